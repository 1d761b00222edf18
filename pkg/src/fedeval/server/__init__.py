"""The benchmarking platform service: HTTP API, auth, durable persistence."""

from .app import create_app
from .service import StoredState, replay_journal
from .store import Store

__all__ = ["Store", "StoredState", "create_app", "replay_journal"]
