"""HTTP surface: /api/v1 JSON API plus optional static mounts.

Every API route requires a bearer token. Errors come back as
``{"error": {"code", "message"}}`` with the HTTP status mapped from the
code. The optional static mounts serve the approvals dashboard at /ui and
demo-hosted cube assets at /assets (the platform itself never stores
model or data bytes; the asset mount exists for self-contained demos).
"""

from __future__ import annotations

import time
from pathlib import Path
from fastapi import Body, Depends, FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from fedeval.registry import Account, DomainError, hash_bytes
from fedeval.registry.model import Role

from . import serde
from .service import (
    find_account_by_token_hash,
    query_associations,
    query_pending,
    query_results,
)
from .store import Store

API_PREFIX = "/api/v1"

_STATUS_BY_CODE = {
    "UNAUTHENTICATED": 401,
    "FORBIDDEN": 403,
    "NOT_ALLOWLISTED": 403,
    "UNKNOWN_BENCHMARK": 404,
    "UNKNOWN_DATASET": 404,
    "UNKNOWN_CUBE": 404,
    "UNKNOWN_ASSOCIATION": 404,
    "UNKNOWN_ACCOUNT": 404,
    "DUPLICATE_UID": 409,
    "DUPLICATE_RESULT": 409,
    "DUPLICATE_ASSOCIATION": 409,
    "DUPLICATE_ACCOUNT": 409,
    "DUPLICATE_TOKEN": 409,
    "ILLEGAL_TRANSITION": 409,
    "BENCHMARK_NOT_OPERATIONAL": 409,
    "VERSION_CONFLICT": 409,
}
_DEFAULT_STATUS = 422  # validation-shaped errors: INVALID_*, MISSING_HASH, ...


def http_status_for(code: str) -> int:
    return _STATUS_BY_CODE.get(code, _DEFAULT_STATUS)


def create_app(
    store: Store,
    *,
    ui_dir: Path | str | None = None,
    assets_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="fedeval coordination server", docs_url=None, redoc_url=None)

    @app.exception_handler(DomainError)
    async def _domain_error(request: Request, exc: DomainError) -> JSONResponse:
        return JSONResponse(
            status_code=http_status_for(exc.code),
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    def current_account(request: Request) -> Account:
        header = request.headers.get("Authorization", "")
        scheme, _, token = header.partition(" ")
        if scheme.lower() != "bearer" or not token.strip():
            raise DomainError("UNAUTHENTICATED", "missing bearer token")
        account = find_account_by_token_hash(
            store.state, hash_bytes(token.strip().encode("utf-8"))
        )
        if account is None:
            raise DomainError("UNAUTHENTICATED", "unknown token")
        return account

    Auth = Depends(current_account)

    # -- accounts ----------------------------------------------------------

    @app.post(API_PREFIX + "/accounts")
    def create_account(payload: dict = Body(...), account: Account = Auth) -> dict:
        body = dict(payload)
        token = body.pop("token", None)
        if token is not None:
            if not isinstance(token, str) or len(token) < 8:
                raise DomainError("VALIDATION", "token must be a string of at least 8 chars")
            body["token_hash"] = str(hash_bytes(token.encode("utf-8")))
        response = store.apply("create_account", account.id, body)
        if token is not None:
            response = {**response, "token": token}
        return response

    @app.get(API_PREFIX + "/accounts/me")
    def whoami(account: Account = Auth) -> dict:
        return {
            "id": account.id,
            "display_name": account.display_name,
            "roles": sorted(r.value for r in account.roles),
        }

    # -- benchmarks ---------------------------------------------------------

    @app.post(API_PREFIX + "/benchmarks")
    def register_benchmark(payload: dict = Body(...), account: Account = Auth) -> dict:
        return store.apply("register_benchmark", account.id, payload)

    @app.get(API_PREFIX + "/benchmarks")
    def list_benchmarks(account: Account = Auth) -> dict:
        return {
            "benchmarks": [
                serde.benchmark_to_json(b)
                for _, b in sorted(store.state.benchmarks.items())
            ]
        }

    @app.get(API_PREFIX + "/benchmarks/{benchmark_id}")
    def get_benchmark(benchmark_id: str, account: Account = Auth) -> dict:
        benchmark = store.state.benchmarks.get(benchmark_id)
        if benchmark is None:
            raise DomainError("UNKNOWN_BENCHMARK", f"no benchmark {benchmark_id!r}")
        return serde.benchmark_to_json(benchmark)

    @app.post(API_PREFIX + "/benchmarks/{benchmark_id}/activate")
    def activate_benchmark(benchmark_id: str, account: Account = Auth) -> dict:
        return store.apply("activate_benchmark", account.id, {"benchmark_id": benchmark_id})

    @app.post(API_PREFIX + "/benchmarks/{benchmark_id}/retire")
    def retire_benchmark(benchmark_id: str, account: Account = Auth) -> dict:
        return store.apply("retire_benchmark", account.id, {"benchmark_id": benchmark_id})

    @app.get(API_PREFIX + "/benchmarks/{benchmark_id}/results")
    def get_results(benchmark_id: str, account: Account = Auth) -> dict:
        return serde.report_to_json(query_results(store.state, account, benchmark_id))

    # -- cubes / datasets ----------------------------------------------------

    @app.post(API_PREFIX + "/cubes")
    def register_cube(payload: dict = Body(...), account: Account = Auth) -> dict:
        return store.apply("register_cube", account.id, payload)

    @app.get(API_PREFIX + "/cubes/{cube_id}")
    def get_cube(cube_id: str, account: Account = Auth) -> dict:
        cube = store.state.cubes.get(cube_id)
        if cube is None:
            raise DomainError("UNKNOWN_CUBE", f"no cube {cube_id!r}")
        return serde.cube_to_json(cube)

    @app.post(API_PREFIX + "/datasets")
    def register_dataset(payload: dict = Body(...), account: Account = Auth) -> dict:
        return store.apply("register_dataset", account.id, payload)

    @app.get(API_PREFIX + "/datasets/{dataset_uid}/pending")
    def fetch_pending(
        dataset_uid: str,
        wait: float = Query(0.0, ge=0.0, le=30.0),
        account: Account = Auth,
    ) -> dict:
        # Optional long-poll: re-check until tasks appear or the wait
        # budget is spent. Version changes gate the re-computation.
        deadline = time.monotonic() + wait
        while True:
            response = query_pending(store.state, account, dataset_uid)
            if response["tasks"] or time.monotonic() >= deadline:
                return response
            time.sleep(0.25)

    # -- associations ---------------------------------------------------------

    @app.post(API_PREFIX + "/associations")
    def request_association(payload: dict = Body(...), account: Account = Auth) -> dict:
        return store.apply("request_association", account.id, payload)

    @app.get(API_PREFIX + "/associations")
    def list_associations(
        state: str | None = Query(None), account: Account = Auth
    ) -> dict:
        return {"associations": query_associations(store.state, account, state)}

    @app.post(API_PREFIX + "/associations/{association_id}/decision")
    def decide_association(
        association_id: str, payload: dict = Body(...), account: Account = Auth
    ) -> dict:
        body = {"association_id": association_id, "decision": payload.get("decision")}
        return store.apply("decide_association", account.id, body)

    # -- results / audit -------------------------------------------------------

    @app.post(API_PREFIX + "/results")
    def submit_result(payload: dict = Body(...), account: Account = Auth) -> dict:
        return store.apply("submit_result", account.id, payload)

    @app.get(API_PREFIX + "/audit")
    def get_audit(from_seq: int = Query(0, ge=0), account: Account = Auth) -> dict:
        events = store.state.audit[from_seq:]
        return {"events": [serde.audit_event_to_json(e) for e in events]}

    # -- static mounts ----------------------------------------------------------

    if assets_dir is not None:
        app.mount("/assets", StaticFiles(directory=str(assets_dir)), name="assets")
    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def bootstrap_operator(store: Store, token: str) -> None:
    """Create the initial platform-operator account if none exists yet."""
    state = store.state
    if any(Role.PLATFORM_OPERATOR in a.roles for a in state.accounts.values()):
        return
    store.apply(
        "create_account",
        "",
        {
            "id": "operator",
            "display_name": "Platform operator",
            "roles": [Role.PLATFORM_OPERATOR.value],
            "token_hash": str(hash_bytes(token.encode("utf-8"))),
        },
    )

