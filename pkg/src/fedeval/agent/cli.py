"""fedeval-agent: the command-line client for every human role.

Exit codes: 0 ok, 2 validation/execution problem, 3 approval denied,
4 server rejected, 5 integrity failure.

Approvals are interactive prompts. There is deliberately no --yes:
the human gate on model execution and result upload is the point. For
automated tests only, --insecure-decision-file supplies decisions from a
JSON file {"decision": "approve"|"reject"}.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from fedeval.registry import DomainError
from fedeval.runtime import SandboxPolicy
from fedeval.runtime.backends import get_backend

from .approvals import ApprovalKind
from .client import ServerClient
from .home import AgentHome
from .report import write_leaderboard_report
from .session import AgentSession

EXIT_VALIDATION = 2
EXIT_NOT_APPROVED = 3
EXIT_SERVER = 4
EXIT_INTEGRITY = 5

_EXIT_FOR_CODE = {
    "NOT_APPROVED": EXIT_NOT_APPROVED,
    "NO_APPROVAL": EXIT_NOT_APPROVED,
    "HASH_MISMATCH": EXIT_INTEGRITY,
    "CHAIN_CORRUPT": EXIT_INTEGRITY,
}

_SERVER_CODES = {
    "AUTH_FAILED", "NETWORK_ERROR", "DOWNLOAD_FAILED", "SERVER_ERROR",
    "FORBIDDEN", "NOT_ALLOWLISTED", "UNAUTHENTICATED",
    "DUPLICATE_UID", "DUPLICATE_RESULT", "DUPLICATE_ASSOCIATION",
    "DUPLICATE_ACCOUNT", "DUPLICATE_TOKEN", "ILLEGAL_TRANSITION",
    "BENCHMARK_NOT_OPERATIONAL", "INVALID_BUNDLE", "INVALID_RESULT",
    "MISSING_HASH", "PAYLOAD_TOO_LARGE", "UNKNOWN_BENCHMARK",
    "UNKNOWN_DATASET", "UNKNOWN_CUBE", "UNKNOWN_ASSOCIATION",
}


def _exit_code_for(error: DomainError) -> int:
    if error.code in _EXIT_FOR_CODE:
        return _EXIT_FOR_CODE[error.code]
    if error.code in _SERVER_CODES:
        return EXIT_SERVER
    return EXIT_VALIDATION


def _fail(error: DomainError) -> None:
    click.echo(f"error [{error.code}]: {error.message}", err=True)
    sys.exit(_exit_code_for(error))


class Context:
    def __init__(self, decision_file: str | None, backend_id: str, insecure_network: bool):
        self.decision_file = decision_file
        self.backend_id = backend_id
        self.insecure_network = insecure_network
        self._session: AgentSession | None = None

    def home(self) -> AgentHome:
        root = os.environ.get("FEDEVAL_AGENT_HOME")
        if not root:
            raise DomainError("VALIDATION", "FEDEVAL_AGENT_HOME is not set")
        return AgentHome(root)

    def client(self) -> ServerClient:
        url = os.environ.get("FEDEVAL_SERVER_URL")
        token = os.environ.get("FEDEVAL_TOKEN")
        if not url or not token:
            raise DomainError("VALIDATION", "FEDEVAL_SERVER_URL and FEDEVAL_TOKEN must be set")
        return ServerClient(url, token)

    def decide(self, kind: ApprovalKind, sheet: str) -> bool:
        click.echo(sheet)
        if self.decision_file is not None:
            decisions = json.loads(Path(self.decision_file).read_text("utf-8"))
            decision = decisions.get(kind.value, decisions.get("decision"))
            if decision not in ("approve", "reject"):
                raise DomainError("VALIDATION", f"decision file gives no decision for {kind.value}")
            click.echo(f"[insecure-decision-file] {kind.value}: {decision}")
            return decision == "approve"
        return click.confirm(f"Approve {kind.value.replace('_', ' ').lower()}?", default=False)

    def session(self) -> AgentSession:
        if self._session is None:
            self._session = AgentSession(
                self.home(),
                self.client(),
                self.decide,
                backend=get_backend(self.backend_id),
                insecure_allow_network=self.insecure_network,
                policy=SandboxPolicy(),
            )
        return self._session


@click.group()
@click.option("--backend", default="container", show_default=True,
              help="Execution backend: container or process.")
@click.option("--insecure-allow-network", is_flag=True,
              help="Accept a backend that cannot deny network access (tests only).")
@click.option("--insecure-decision-file", type=click.Path(exists=True, dir_okay=False),
              default=None,
              help='JSON decisions for automated tests, e.g. {"decision": "approve"}.')
@click.pass_context
def main(ctx: click.Context, backend: str, insecure_allow_network: bool,
         insecure_decision_file: str | None) -> None:
    """Data-owner agent for federated evaluation (plus model-owner and
    committee subcommands)."""
    ctx.obj = Context(insecure_decision_file, backend, insecure_allow_network)


def _run(ctx: click.Context, fn) -> None:
    try:
        fn(ctx.obj)
    except DomainError as error:
        _fail(error)


# -- dataset ------------------------------------------------------------------


@main.group()
def dataset() -> None:
    """Prepare and register local datasets (metadata only leaves the machine)."""


@dataset.command("prepare")
@click.option("--raw", "raw_path", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--benchmark", "benchmark_id", required=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--name", default=None)
@click.pass_context
def dataset_prepare(ctx, raw_path, benchmark_id, out_path, name):
    def go(c: Context):
        meta = c.session().dataset_prepare(raw_path, benchmark_id, out_path, name)
        click.echo(f"prepared {meta['name']}: uid {meta['generated_uid']}")
        click.echo(f"statistics: {json.dumps(meta['statistics'], sort_keys=True)}")

    _run(ctx, go)


@dataset.command("register")
@click.argument("name")
@click.pass_context
def dataset_register(ctx, name):
    def go(c: Context):
        meta = c.session().dataset_register(name)
        click.echo(f"registered {meta['name']} ({meta['generated_uid']})")

    _run(ctx, go)


# -- tasks ---------------------------------------------------------------------


@main.group()
def tasks() -> None:
    """List, approve, run, and submit pending evaluation tasks."""


@tasks.command("list")
@click.option("--dataset", "dataset_name", required=True)
@click.option("--wait", default=0.0, show_default=True, help="Long-poll seconds.")
@click.pass_context
def tasks_list(ctx, dataset_name, wait):
    def go(c: Context):
        pending = c.session().poll(dataset_name, wait=wait)
        if not pending:
            click.echo("no pending tasks")
            return
        for task in pending:
            click.echo(
                f"{task['task_id']}  benchmark={task['benchmark_id']} "
                f"model={task['model_cube']['name']} ({task['model_cube_id']})"
            )

    _run(ctx, go)


@tasks.command("approve")
@click.argument("task_id")
@click.pass_context
def tasks_approve(ctx, task_id):
    def go(c: Context):
        record = c.session().approve_model(task_id)
        click.echo(f"{record.decision}: model execution for task {task_id}")
        if not record.approved:
            sys.exit(EXIT_NOT_APPROVED)

    _run(ctx, go)


@tasks.command("run")
@click.argument("task_id")
@click.pass_context
def tasks_run(ctx, task_id):
    def go(c: Context):
        draft = c.session().run_evaluation(task_id)
        click.echo(f"draft result for {task_id}: {json.dumps(draft['metrics'], sort_keys=True)}")

    _run(ctx, go)


@tasks.command("submit")
@click.argument("task_id")
@click.pass_context
def tasks_submit(ctx, task_id):
    def go(c: Context):
        draft = c.session().submit(task_id)
        click.echo(f"uploaded result {draft['server_result_id']} for task {task_id}")

    _run(ctx, go)


# -- audit ---------------------------------------------------------------------


@main.group()
def audit() -> None:
    """Inspect the local hash-chained approval log."""


@audit.command("show")
@click.pass_context
def audit_show(ctx):
    def go(c: Context):
        session = c.session()
        listing, count = session.audit_listing()
        if listing:
            click.echo(listing)
        click.echo(f"{count} entries; chain verification: ok")

    _run(ctx, go)


# -- model owner ------------------------------------------------------------------


@main.group()
def model() -> None:
    """Model-owner commands."""


@model.command("submit")
@click.argument("cube_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--benchmark", "benchmark_id", required=True)
@click.option("--publish-dir", required=True, type=click.Path())
@click.option("--assets-base-url", required=True)
@click.pass_context
def model_submit(ctx, cube_dir, benchmark_id, publish_dir, assets_base_url):
    def go(c: Context):
        out = c.session().model_submit(cube_dir, benchmark_id, publish_dir, assets_base_url)
        click.echo(f"cube {out['cube_id']} registered; association {out['association_id']} requested")

    _run(ctx, go)


# -- committee ---------------------------------------------------------------------


@main.group()
def benchmark() -> None:
    """Committee commands."""


@benchmark.command("create")
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--publish-dir", required=True, type=click.Path())
@click.option("--assets-base-url", required=True)
@click.pass_context
def benchmark_create(ctx, bundle_dir, publish_dir, assets_base_url):
    def go(c: Context):
        out = c.session().benchmark_create(bundle_dir, publish_dir, assets_base_url)
        click.echo(f"benchmark {out['benchmark_id']} registered (DRAFT)")

    _run(ctx, go)


@benchmark.command("activate")
@click.argument("benchmark_id")
@click.pass_context
def benchmark_activate(ctx, benchmark_id):
    def go(c: Context):
        out = c.client().activate_benchmark(benchmark_id)
        click.echo(f"benchmark {out['id']} is {out['state']}")

    _run(ctx, go)


# -- results -----------------------------------------------------------------------


@main.group()
def results() -> None:
    """Fetch policy-filtered results."""


@results.command("show")
@click.argument("benchmark_id")
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Also write leaderboard.csv, site_rows.csv and figures here.")
@click.pass_context
def results_show(ctx, benchmark_id, out_dir):
    def go(c: Context):
        report = c.client().get_results(benchmark_id)
        for agg in report["aggregates"]:
            metrics = ", ".join(
                f"{name}={val['value']:.6f} (sites={val['site_count']}, n={val['total_samples']})"
                for name, val in sorted(agg["metrics"].items())
            )
            click.echo(f"{agg['model_name']}: {metrics}")
        if not report["aggregates"]:
            click.echo("no results visible under the benchmark's release policy")
        if out_dir:
            written = write_leaderboard_report(report, out_dir)
            for path in written:
                click.echo(f"wrote {path}")

    _run(ctx, go)


# -- account (operator) ----------------------------------------------------------------


@main.group()
def account() -> None:
    """Platform-operator commands."""


@account.command("create")
@click.option("--id", "account_id", required=True)
@click.option("--display-name", default=None)
@click.option("--role", "roles", multiple=True, required=True,
              type=click.Choice(["COMMITTEE", "DATA_OWNER", "MODEL_OWNER", "PLATFORM_OPERATOR"]))
@click.option("--token", required=True)
@click.pass_context
def account_create(ctx, account_id, display_name, roles, token):
    def go(c: Context):
        out = c.client().create_account(
            {
                "id": account_id,
                "display_name": display_name or account_id,
                "roles": list(roles),
                "token": token,
            }
        )
        click.echo(f"account {out['id']} created with roles {', '.join(out['roles'])}")

    _run(ctx, go)


if __name__ == "__main__":
    main()
