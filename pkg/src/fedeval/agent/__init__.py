"""Data-owner agent (with model-owner and committee subcommands).

Everything irreversible is gated behind an explicit operator decision:
statistics upload, model execution, and result upload each require an
approval bound (by digest) to exactly what the operator was shown. The
agent keeps its own hash-chained approval log and never sends raw data
anywhere; only UIDs, counts, approved statistics, and approved metrics
leave the machine.
"""

from .approvals import ApprovalKind, ApprovalLog, ApprovalRecord
from .client import RecordingTransport, ServerClient
from .home import AgentHome
from .session import AgentSession, DecisionProvider

__all__ = [
    "AgentHome",
    "AgentSession",
    "ApprovalKind",
    "ApprovalLog",
    "ApprovalRecord",
    "DecisionProvider",
    "RecordingTransport",
    "ServerClient",
]
