"""The coordination server serves the built dashboard at /ui.

Skipped when frontend/dist has not been built; the primary suite must not
depend on the dashboard existing.
"""

from pathlib import Path

import httpx
import pytest

from live_server import LiveServer

FRONTEND = Path(__file__).resolve().parents[1] / "frontend"


@pytest.mark.skipif(
    not (FRONTEND / "dist" / "main.js").is_file(),
    reason="dashboard not built (run `npm run build` in frontend/)",
)
def test_ui_static_route_serves_dashboard(tmp_path):
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_bytes((FRONTEND / "index.html").read_bytes())
    dist = ui_dir / "dist"
    dist.mkdir()
    for path in (FRONTEND / "dist").glob("*.js"):
        (dist / path.name).write_bytes(path.read_bytes())

    server = LiveServer(ui_dir=ui_dir)
    try:
        index = httpx.get(f"{server.url}/ui/")
        assert index.status_code == 200
        assert "approvals dashboard" in index.text
        script = httpx.get(f"{server.url}/ui/dist/main.js")
        assert script.status_code == 200
        assert "decideAssociation" in httpx.get(f"{server.url}/ui/dist/api.js").text
    finally:
        server.stop()
