"""Task execution through the file-system interface.

The runner owns the workspace: it stages the cube's files, materializes
input bindings as copies (tasks never touch the originals), pre-creates
output locations, and hands a :class:`LaunchPlan` to a backend. Bindings
appear at /fedeval/inputs/<binding> and /fedeval/outputs/<binding> inside
containers, and under <workspace>/inputs and <workspace>/outputs for the
process backend; either way the task receives one --<binding>=<path>
argument per binding (plus --parameters=<path> when declared).

Mounts are derived from the task's declared bindings and nothing else, so
no path outside the workspace or the declared inputs is ever exposed.
"""

from __future__ import annotations

import shutil
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Mapping

from fedeval.registry.errors import DomainError
from fedeval.registry.uids import ContentUid, hash_bytes, hash_tree_path

from .manifest import BindingKind, TaskSpec
from .verify import VerifiedCube, IMAGE_FILENAME

if TYPE_CHECKING:  # pragma: no cover
    from .backends import ExecutionBackend

LOG_EXCERPT_CHARS = 2000


class NetworkPolicy(str, Enum):
    DENIED = "DENIED"


@dataclass(frozen=True)
class SandboxPolicy:
    """Resource and isolation bounds for one task execution.

    ``network`` supports only DENIED; backends that cannot enforce it
    (the process backend) refuse to run unless the caller explicitly
    passes the insecure override. Read-only mounts are exactly the task's
    input bindings, writable mounts exactly its output bindings.
    """

    network: NetworkPolicy = NetworkPolicy.DENIED
    cpu_limit: float = 1.0
    memory_limit_mb: int = 2048
    wall_clock_limit_s: float = 900.0


class TaskStatus(str, Enum):
    OK = "OK"
    FAILED = "FAILED"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class TaskOutcome:
    """What happened: OK means exit 0 within limits and all declared
    outputs present (each digested); a zero exit with a missing output is
    downgraded to FAILED."""

    status: TaskStatus
    exit_code: int
    output_digests: dict[str, ContentUid] = field(default_factory=dict)
    log_excerpt: str = ""


@dataclass(frozen=True)
class LaunchPlan:
    """Everything a backend needs to start one task."""

    cube_dir: Path
    image_path: Path
    image_ref: str
    process_entrypoint: tuple[str, ...]
    task: str
    input_paths: dict[str, Path]
    output_paths: dict[str, Path]
    outputs_dir: Path
    parameters_path: Path | None
    log_path: Path
    policy: SandboxPolicy


@dataclass(frozen=True)
class LaunchResult:
    exit_code: int
    timed_out: bool


def _assert_inside(path: Path, root: Path) -> Path:
    resolved = path.resolve()
    if not resolved.is_relative_to(root.resolve()):
        raise DomainError("ILLEGAL_PATH", f"{path} escapes workspace {root}")
    return resolved


def _stage_cube(cube: VerifiedCube, workspace: Path) -> Path:
    """Copy the verified cube's files (sans image archive) into the workspace
    so tasks can never mutate the content-addressed originals."""
    staged = workspace / "cube"
    staged.mkdir()
    for src in sorted(cube.assets.root.rglob("*")):
        rel = src.relative_to(cube.assets.root)
        if rel.as_posix() == IMAGE_FILENAME:
            continue
        dest = _assert_inside(staged / rel, workspace)
        if src.is_dir():
            dest.mkdir(parents=True, exist_ok=True)
        else:
            dest.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(src, dest)
    return staged


def _materialize_inputs(
    spec: TaskSpec, input_bindings: Mapping[str, Path | str], workspace: Path
) -> dict[str, Path]:
    missing = set(spec.inputs) - set(input_bindings)
    if missing:
        raise DomainError("MISSING_INPUT", f"no host path for bindings {sorted(missing)}")
    unknown = set(input_bindings) - set(spec.inputs)
    if unknown:
        raise DomainError("UNKNOWN_BINDING", f"bindings not declared by task: {sorted(unknown)}")

    inputs_root = workspace / "inputs"
    inputs_root.mkdir()
    out: dict[str, Path] = {}
    for binding, binding_spec in spec.inputs.items():
        src = Path(input_bindings[binding])
        dest = _assert_inside(inputs_root / binding, workspace)
        if binding_spec.kind is BindingKind.DIR:
            if not src.is_dir():
                raise DomainError("MISSING_INPUT", f"binding {binding!r}: {src} is not a directory")
            shutil.copytree(src, dest, symlinks=False)
        else:
            if not src.is_file():
                raise DomainError("MISSING_INPUT", f"binding {binding!r}: {src} is not a file")
            shutil.copyfile(src, dest)
        out[binding] = dest
    return out


def run_task(
    cube: VerifiedCube,
    task: str,
    input_bindings: Mapping[str, Path | str],
    workspace: Path | str,
    policy: SandboxPolicy,
    backend: "ExecutionBackend",
    *,
    insecure_allow_network: bool = False,
) -> TaskOutcome:
    """Execute one named task of a verified cube inside a fresh workspace.

    Raises UNKNOWN_TASK, MISSING_INPUT / UNKNOWN_BINDING,
    WORKSPACE_NOT_EMPTY, or SANDBOX_UNAVAILABLE before anything launches;
    non-zero exits and timeouts come back in the TaskOutcome.
    """
    spec = cube.manifest.tasks.get(task)
    if spec is None:
        raise DomainError(
            "UNKNOWN_TASK",
            f"cube {cube.manifest.name!r} has no task {task!r} "
            f"(has: {sorted(cube.manifest.tasks)})",
        )
    if not backend.capabilities().can_deny_network and not insecure_allow_network:
        raise DomainError(
            "SANDBOX_UNAVAILABLE",
            f"backend {backend.id!r} cannot deny network access; "
            "pass --insecure-allow-network to accept that risk",
        )

    workspace = Path(workspace)
    if workspace.exists() and any(workspace.iterdir()):
        raise DomainError("WORKSPACE_NOT_EMPTY", str(workspace))
    workspace.mkdir(parents=True, exist_ok=True)

    staged_cube = _stage_cube(cube, workspace)
    input_paths = _materialize_inputs(spec, input_bindings, workspace)

    outputs_root = workspace / "outputs"
    outputs_root.mkdir()
    output_paths: dict[str, Path] = {}
    for binding, binding_spec in spec.outputs.items():
        dest = _assert_inside(outputs_root / binding, workspace)
        if binding_spec.kind is BindingKind.DIR:
            dest.mkdir()
        output_paths[binding] = dest

    parameters_path: Path | None = None
    if spec.parameters_file is not None:
        src = staged_cube / spec.parameters_file
        if not src.is_file():
            raise DomainError(
                "MISSING_INPUT", f"declared parameters file {spec.parameters_file!r} absent"
            )
        parameters_path = workspace / "parameters.yaml"
        shutil.copyfile(src, parameters_path)
        parameters_path.chmod(0o444)

    logs_dir = workspace / "logs"
    logs_dir.mkdir()
    log_path = logs_dir / f"{task}.log"

    plan = LaunchPlan(
        cube_dir=staged_cube,
        image_path=cube.assets.image_path,
        image_ref=cube.manifest.image_ref,
        process_entrypoint=cube.manifest.process_entrypoint,
        task=task,
        input_paths=input_paths,
        output_paths=output_paths,
        outputs_dir=outputs_root,
        parameters_path=parameters_path,
        log_path=log_path,
        policy=policy,
    )
    result = backend.launch(plan)

    excerpt = ""
    if log_path.is_file():
        excerpt = log_path.read_text("utf-8", errors="replace")[-LOG_EXCERPT_CHARS:]

    if result.timed_out:
        return TaskOutcome(TaskStatus.TIMEOUT, result.exit_code, log_excerpt=excerpt)
    if result.exit_code != 0:
        return TaskOutcome(TaskStatus.FAILED, result.exit_code, log_excerpt=excerpt)

    digests: dict[str, ContentUid] = {}
    for binding, binding_spec in spec.outputs.items():
        path = output_paths[binding]
        if binding_spec.kind is BindingKind.DIR and path.is_dir():
            digests[binding] = hash_tree_path(path)
        elif binding_spec.kind is BindingKind.FILE and path.is_file():
            digests[binding] = hash_bytes(path.read_bytes())
        else:
            return TaskOutcome(
                TaskStatus.FAILED,
                result.exit_code,
                log_excerpt=excerpt + f"\n[runner] declared output {binding!r} missing",
            )
    return TaskOutcome(TaskStatus.OK, result.exit_code, output_digests=digests, log_excerpt=excerpt)
