"""Server entrypoint: environment-driven configuration.

Env vars:
    FEDEVAL_BIND_ADDR                 host:port to listen on (default 127.0.0.1:8080)
    FEDEVAL_DATA_DIR                  where the store file lives (default ./fedeval-data)
    FEDEVAL_BOOTSTRAP_OPERATOR_TOKEN  creates the first operator account if none exists
    FEDEVAL_UI_DIR                    optional static dashboard build to serve at /ui
    FEDEVAL_STATIC_ASSETS_DIR         optional demo asset directory to serve at /assets
"""

from __future__ import annotations

import os
import sys

import uvicorn

from .app import bootstrap_operator, create_app
from .store import Store


def main() -> None:
    bind = os.environ.get("FEDEVAL_BIND_ADDR", "127.0.0.1:8080")
    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"FEDEVAL_BIND_ADDR must look like host:port, got {bind!r}", file=sys.stderr)
        raise SystemExit(2)
    data_dir = os.environ.get("FEDEVAL_DATA_DIR", "./fedeval-data")
    store = Store(data_dir)
    token = os.environ.get("FEDEVAL_BOOTSTRAP_OPERATOR_TOKEN")
    if token:
        bootstrap_operator(store, token)
    app = create_app(
        store,
        ui_dir=os.environ.get("FEDEVAL_UI_DIR") or None,
        assets_dir=os.environ.get("FEDEVAL_STATIC_ASSETS_DIR") or None,
    )
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")


if __name__ == "__main__":
    main()
