"""Pinned-hash verification of local cube assets.

Nothing executes before verification: :func:`run_task` only accepts a
:class:`VerifiedCube`, and only :func:`verify_cube` can construct one.

Asset layout inside a cube directory:

    cube.yaml        the manifest
    image.tar.gz     gzip tarball of the OCI image layout
    parameters.yaml  optional parameters file
    <extra paths>    any additional files pinned by the record
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from fedeval.registry.errors import DomainError
from fedeval.registry.uids import ContentUid, hash_bytes

from .manifest import CubeManifest, parse_manifest

MANIFEST_FILENAME = "cube.yaml"
IMAGE_FILENAME = "image.tar.gz"
PARAMETERS_FILENAME = "parameters.yaml"
RESERVED_FILENAMES = frozenset({MANIFEST_FILENAME, IMAGE_FILENAME, PARAMETERS_FILENAME})


@dataclass(frozen=True)
class CubeAssets:
    """Paths to a cube's local files, rooted at one directory."""

    root: Path

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_FILENAME

    @property
    def image_path(self) -> Path:
        return self.root / IMAGE_FILENAME

    @property
    def parameters_path(self) -> Path:
        return self.root / PARAMETERS_FILENAME

    def extra_path(self, relpath: str) -> Path:
        return self.root / relpath


@dataclass(frozen=True)
class PinnedHashes:
    """The registered digests a local cube must reproduce."""

    manifest_uid: ContentUid
    image_uid: ContentUid
    parameters_uid: ContentUid | None = None
    extra_files: tuple[tuple[str, ContentUid], ...] = ()


@dataclass(frozen=True)
class Mismatch:
    """One digest disagreement; ``actual`` is None when the file is missing."""

    component: str
    expected: ContentUid | None
    actual: ContentUid | None

    def __str__(self) -> str:
        if self.actual is None:
            return f"{self.component}: file missing (expected {self.expected})"
        return f"{self.component}: expected {self.expected}, got {self.actual}"


class VerifiedCube:
    """Proof that a cube's assets matched their pinned hashes.

    Instances exist only as the product of a successful
    :func:`verify_cube`; holding one is the precondition for execution.
    """

    __slots__ = ("manifest", "assets", "pinned")

    def __init__(self, manifest: CubeManifest, assets: CubeAssets, pinned: PinnedHashes, *, _token=None):
        if _token is not _CONSTRUCT_TOKEN:
            raise TypeError("VerifiedCube can only be produced by verify_cube()")
        self.manifest = manifest
        self.assets = assets
        self.pinned = pinned


_CONSTRUCT_TOKEN = object()


@dataclass(frozen=True)
class VerificationOutcome:
    mismatches: tuple[Mismatch, ...]
    cube: VerifiedCube | None = None

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def require(self) -> VerifiedCube:
        """The verified handle, or DomainError(HASH_MISMATCH) if any digest failed."""
        if not self.ok:
            details = "; ".join(str(m) for m in self.mismatches)
            raise DomainError("HASH_MISMATCH", details)
        assert self.cube is not None
        return self.cube


def _digest_or_none(path: Path) -> ContentUid | None:
    if not path.is_file():
        return None
    return hash_bytes(path.read_bytes())


def verify_cube(assets: CubeAssets, pinned: PinnedHashes) -> VerificationOutcome:
    """Recompute every pinned digest over the local files.

    Returns the full mismatch list (empty means ok). The manifest is parsed
    only after its bytes verified; a manifest that hashes correctly but does
    not parse raises the parse error (a registered cube like that is broken
    at the source).
    """
    mismatches: list[Mismatch] = []

    checks: list[tuple[str, Path, ContentUid | None]] = [
        ("manifest", assets.manifest_path, pinned.manifest_uid),
        ("image", assets.image_path, pinned.image_uid),
    ]
    if pinned.parameters_uid is not None:
        checks.append(("parameters", assets.parameters_path, pinned.parameters_uid))
    for relpath, uid in pinned.extra_files:
        checks.append((f"extra:{relpath}", assets.extra_path(relpath), uid))

    for component, path, expected in checks:
        actual = _digest_or_none(path)
        if actual != expected:
            mismatches.append(Mismatch(component=component, expected=expected, actual=actual))

    if mismatches:
        return VerificationOutcome(mismatches=tuple(mismatches))

    manifest = parse_manifest(assets.manifest_path.read_text("utf-8"))
    if pinned.parameters_uid is None and any(
        task.parameters_file is not None for task in manifest.tasks.values()
    ):
        # The manifest would feed a parameters file into execution that no
        # registered digest covers; refuse rather than run unpinned input.
        return VerificationOutcome(
            mismatches=(
                Mismatch(
                    component="parameters",
                    expected=None,
                    actual=_digest_or_none(assets.parameters_path),
                ),
            )
        )
    cube = VerifiedCube(manifest, assets, pinned, _token=_CONSTRUCT_TOKEN)
    return VerificationOutcome(mismatches=(), cube=cube)


def pinned_hashes_of_assets(assets: CubeAssets, extra_files: list[str] | None = None) -> PinnedHashes:
    """Compute the hashes of a local cube directory before registration.

    ``extra_files`` defaults to every non-reserved file under the root.
    """
    if not assets.manifest_path.is_file():
        raise DomainError("MISSING_HASH", f"no {MANIFEST_FILENAME} in {assets.root}")
    if not assets.image_path.is_file():
        raise DomainError("MISSING_HASH", f"no {IMAGE_FILENAME} in {assets.root}")

    if extra_files is None:
        extra_files = sorted(
            p.relative_to(assets.root).as_posix()
            for p in assets.root.rglob("*")
            if p.is_file() and p.relative_to(assets.root).as_posix() not in RESERVED_FILENAMES
        )
    params_uid = None
    if assets.parameters_path.is_file():
        params_uid = hash_bytes(assets.parameters_path.read_bytes())
    return PinnedHashes(
        manifest_uid=hash_bytes(assets.manifest_path.read_bytes()),
        image_uid=hash_bytes(assets.image_path.read_bytes()),
        parameters_uid=params_uid,
        extra_files=tuple(
            (rel, hash_bytes(assets.extra_path(rel).read_bytes())) for rel in extra_files
        ),
    )
