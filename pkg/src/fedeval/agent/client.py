"""HTTP client for the coordination server.

The transport is injectable so tests can wrap it with a recorder; the
data-locality guarantees are asserted against exactly the bytes this
client puts on the wire.
"""

from __future__ import annotations

from typing import Any

import httpx

from fedeval.registry import DomainError


class RecordingTransport(httpx.BaseTransport):
    """Tees every outbound request (and inbound response) body into a log."""

    def __init__(self, inner: httpx.BaseTransport):
        self.inner = inner
        self.records: list[dict[str, Any]] = []

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        body = request.read()
        response = self.inner.handle_request(request)
        content = response.read()
        self.records.append(
            {
                "method": request.method,
                "url": str(request.url),
                "request_body": bytes(body),
                "response_body": bytes(content),
            }
        )
        return httpx.Response(
            status_code=response.status_code,
            headers=response.headers,
            content=content,
            request=request,
        )

    def outbound_bytes(self) -> bytes:
        return b"".join(r["request_body"] for r in self.records)


class ServerClient:
    """Thin, error-translating wrapper over the /api/v1 JSON API."""

    def __init__(
        self,
        base_url: str,
        token: str,
        transport: httpx.BaseTransport | None = None,
        timeout: float = 30.0,
    ):
        self.base_url = base_url.rstrip("/")
        self._http = httpx.Client(
            base_url=self.base_url,
            headers={"Authorization": f"Bearer {token}"},
            transport=transport,
            timeout=timeout,
        )

    def close(self) -> None:
        self._http.close()

    def _call(self, method: str, path: str, **kw) -> Any:
        try:
            response = self._http.request(method, f"/api/v1{path}", **kw)
        except httpx.HTTPError as exc:
            raise DomainError("NETWORK_ERROR", f"{method} {path}: {exc}")
        if response.status_code == 401:
            raise DomainError("AUTH_FAILED", "server rejected the token")
        if response.status_code >= 400:
            try:
                error = response.json()["error"]
                raise DomainError(error["code"], error.get("message", ""))
            except (KeyError, ValueError):
                raise DomainError("SERVER_ERROR", f"HTTP {response.status_code}")
        return response.json()

    def download(self, url: str) -> bytes:
        """Fetch an asset byte-for-byte (absolute URL or server-relative path)."""
        target = url if "://" in url else f"{self.base_url}{url}"
        try:
            response = httpx.get(target, timeout=60.0, follow_redirects=True)
        except httpx.HTTPError as exc:
            raise DomainError("NETWORK_ERROR", f"GET {target}: {exc}")
        if response.status_code >= 400:
            raise DomainError("DOWNLOAD_FAILED", f"GET {target}: HTTP {response.status_code}")
        return response.content

    # -- typed wrappers ------------------------------------------------------

    def whoami(self) -> dict:
        return self._call("GET", "/accounts/me")

    def create_account(self, payload: dict) -> dict:
        return self._call("POST", "/accounts", json=payload)

    def register_cube(self, payload: dict) -> dict:
        return self._call("POST", "/cubes", json=payload)

    def get_cube(self, cube_id: str) -> dict:
        return self._call("GET", f"/cubes/{cube_id}")

    def register_benchmark(self, payload: dict) -> dict:
        return self._call("POST", "/benchmarks", json=payload)

    def get_benchmark(self, benchmark_id: str) -> dict:
        return self._call("GET", f"/benchmarks/{benchmark_id}")

    def list_benchmarks(self) -> list[dict]:
        return self._call("GET", "/benchmarks")["benchmarks"]

    def activate_benchmark(self, benchmark_id: str) -> dict:
        return self._call("POST", f"/benchmarks/{benchmark_id}/activate")

    def register_dataset(self, payload: dict) -> dict:
        return self._call("POST", "/datasets", json=payload)

    def request_association(self, benchmark_id: str, subject: str, subject_kind: str) -> dict:
        return self._call(
            "POST",
            "/associations",
            json={"benchmark_id": benchmark_id, "subject": subject, "subject_kind": subject_kind},
        )

    def decide_association(self, association_id: str, decision: str) -> dict:
        return self._call(
            "POST", f"/associations/{association_id}/decision", json={"decision": decision}
        )

    def list_associations(self, state: str | None = None) -> list[dict]:
        params = {"state": state} if state else None
        return self._call("GET", "/associations", params=params)["associations"]

    def fetch_pending(self, dataset_uid: str, wait: float = 0.0) -> list[dict]:
        params = {"wait": wait} if wait else None
        return self._call("GET", f"/datasets/{dataset_uid}/pending", params=params)["tasks"]

    def submit_result(self, payload: dict) -> dict:
        return self._call("POST", "/results", json=payload)

    def get_results(self, benchmark_id: str) -> dict:
        return self._call("GET", f"/benchmarks/{benchmark_id}/results")

    def get_audit(self, from_seq: int = 0) -> list[dict]:
        return self._call("GET", "/audit", params={"from_seq": from_seq})["events"]
