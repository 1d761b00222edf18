"""Execution backends: OCI container runtime and bare-process fallback.

The container backend launches tasks through an external OCI-compatible
runtime with networking disabled and only the declared bind mounts. The
process backend runs the cube's declared local entrypoint directly; it
cannot deny network access and exists for tests and CI, so callers must
opt in with the insecure flag.
"""

from __future__ import annotations

import os
import resource
import shutil
import subprocess
import uuid
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

from fedeval.registry.errors import DomainError

from .runner import LaunchPlan, LaunchResult


@dataclass(frozen=True)
class BackendCapabilities:
    can_deny_network: bool
    can_limit_resources: bool


class ExecutionBackend(ABC):
    id: str

    @abstractmethod
    def capabilities(self) -> BackendCapabilities: ...

    @abstractmethod
    def launch(self, plan: LaunchPlan) -> LaunchResult: ...


def _binding_args(input_paths: dict[str, str], output_paths: dict[str, str], parameters: str | None) -> list[str]:
    args = [f"--{name}={path}" for name, path in {**input_paths, **output_paths}.items()]
    if parameters is not None:
        args.append(f"--parameters={parameters}")
    return args


class ProcessBackend(ExecutionBackend):
    """Runs the manifest's process_entrypoint as a local subprocess.

    Applies wall-clock and address-space limits; network denial is not
    possible at this isolation level, which the capability report states.
    """

    id = "process"

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(can_deny_network=False, can_limit_resources=True)

    def launch(self, plan: LaunchPlan) -> LaunchResult:
        if not plan.process_entrypoint:
            raise DomainError(
                "SANDBOX_UNAVAILABLE",
                f"cube {plan.image_ref!r} declares no process_entrypoint",
            )
        argv = [
            *plan.process_entrypoint,
            plan.task,
            *_binding_args(
                {b: str(p) for b, p in plan.input_paths.items()},
                {b: str(p) for b, p in plan.output_paths.items()},
                str(plan.parameters_path) if plan.parameters_path else None,
            ),
        ]
        memory_bytes = plan.policy.memory_limit_mb * 1024 * 1024

        def preexec() -> None:
            try:
                resource.setrlimit(resource.RLIMIT_AS, (memory_bytes, memory_bytes))
            except (ValueError, OSError):
                pass

        env = {
            "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
            "HOME": str(plan.log_path.parent),
            "LC_ALL": "C.UTF-8",
            "PYTHONDONTWRITEBYTECODE": "1",
        }
        with open(plan.log_path, "ab") as log:
            proc = subprocess.Popen(
                argv,
                cwd=plan.cube_dir,
                stdout=log,
                stderr=subprocess.STDOUT,
                env=env,
                preexec_fn=preexec,
                start_new_session=True,
            )
            try:
                proc.wait(timeout=plan.policy.wall_clock_limit_s)
            except subprocess.TimeoutExpired:
                try:
                    os.killpg(proc.pid, 9)
                except ProcessLookupError:
                    pass
                proc.wait()
                return LaunchResult(exit_code=proc.returncode or -1, timed_out=True)
        return LaunchResult(exit_code=proc.returncode, timed_out=False)


class ContainerBackend(ExecutionBackend):
    """Shells out to an OCI runtime (docker/podman) with --network=none."""

    id = "container"

    def __init__(self, runtime_binary: str | None = None):
        self.runtime_binary = runtime_binary or os.environ.get(
            "FEDEVAL_CONTAINER_RUNTIME", "docker"
        )

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(can_deny_network=True, can_limit_resources=True)

    def _runtime(self) -> str:
        found = shutil.which(self.runtime_binary)
        if found is None:
            raise DomainError(
                "SANDBOX_UNAVAILABLE",
                f"container runtime {self.runtime_binary!r} not found on PATH",
            )
        return found

    def launch(self, plan: LaunchPlan) -> LaunchResult:
        runtime = self._runtime()
        name = f"fedeval-{uuid.uuid4().hex[:12]}"
        with open(plan.log_path, "ab") as log:
            load = subprocess.run(
                [runtime, "load", "-i", str(plan.image_path)],
                stdout=log,
                stderr=subprocess.STDOUT,
            )
            if load.returncode != 0:
                raise DomainError(
                    "SANDBOX_UNAVAILABLE",
                    f"{self.runtime_binary} load failed with exit {load.returncode}",
                )
            cmd = [
                runtime, "run", "--rm", "--name", name,
                "--network=none",
                f"--cpus={plan.policy.cpu_limit}",
                f"--memory={plan.policy.memory_limit_mb}m",
                "-v", f"{plan.cube_dir}:/fedeval/cube:ro",
            ]
            container_inputs = {}
            for binding, path in plan.input_paths.items():
                container_inputs[binding] = f"/fedeval/inputs/{binding}"
                cmd += ["-v", f"{path}:/fedeval/inputs/{binding}:ro"]
            outputs_root = plan.outputs_dir
            cmd += ["-v", f"{outputs_root}:/fedeval/outputs"]
            container_outputs = {
                binding: f"/fedeval/outputs/{binding}" for binding in plan.output_paths
            }
            parameters = None
            if plan.parameters_path is not None:
                parameters = "/fedeval/parameters.yaml"
                cmd += ["-v", f"{plan.parameters_path}:{parameters}:ro"]
            cmd.append(plan.image_ref)
            cmd.append(plan.task)
            cmd += _binding_args(container_inputs, container_outputs, parameters)

            proc = subprocess.Popen(cmd, stdout=log, stderr=subprocess.STDOUT)
            try:
                proc.wait(timeout=plan.policy.wall_clock_limit_s)
            except subprocess.TimeoutExpired:
                subprocess.run(
                    [runtime, "kill", name],
                    stdout=subprocess.DEVNULL,
                    stderr=subprocess.DEVNULL,
                )
                proc.wait()
                return LaunchResult(exit_code=proc.returncode or -1, timed_out=True)
        return LaunchResult(exit_code=proc.returncode, timed_out=False)


_BACKENDS: dict[str, ExecutionBackend] = {}


def register_backend(backend: ExecutionBackend) -> None:
    _BACKENDS[backend.id] = backend


register_backend(ProcessBackend())
register_backend(ContainerBackend())


def probe_backend(backend_id: str) -> BackendCapabilities:
    """Capability report for a backend id; BACKEND_NOT_FOUND if unknown."""
    backend = _BACKENDS.get(backend_id)
    if backend is None:
        raise DomainError("BACKEND_NOT_FOUND", f"no backend registered as {backend_id!r}")
    return backend.capabilities()


def get_backend(backend_id: str) -> ExecutionBackend:
    backend = _BACKENDS.get(backend_id)
    if backend is None:
        raise DomainError("BACKEND_NOT_FOUND", f"no backend registered as {backend_id!r}")
    return backend
