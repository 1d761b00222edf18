"""The container task contract: manifests, verification, sandboxed execution."""

from .backends import (
    BackendCapabilities,
    ContainerBackend,
    ExecutionBackend,
    ProcessBackend,
    probe_backend,
    register_backend,
)
from .manifest import BindingKind, BindingSpec, CubeManifest, TaskSpec, parse_manifest
from .restricted_yaml import dump_restricted_yaml, load_restricted_yaml
from .runner import NetworkPolicy, SandboxPolicy, TaskOutcome, TaskStatus, run_task
from .verify import (
    CubeAssets,
    Mismatch,
    PinnedHashes,
    VerificationOutcome,
    VerifiedCube,
    pinned_hashes_of_assets,
    verify_cube,
)

__all__ = [
    "BackendCapabilities",
    "BindingKind",
    "BindingSpec",
    "ContainerBackend",
    "CubeAssets",
    "CubeManifest",
    "ExecutionBackend",
    "Mismatch",
    "NetworkPolicy",
    "PinnedHashes",
    "ProcessBackend",
    "SandboxPolicy",
    "TaskOutcome",
    "TaskSpec",
    "TaskStatus",
    "VerificationOutcome",
    "VerifiedCube",
    "dump_restricted_yaml",
    "load_restricted_yaml",
    "parse_manifest",
    "pinned_hashes_of_assets",
    "probe_backend",
    "register_backend",
    "run_task",
    "verify_cube",
]
