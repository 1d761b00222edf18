"""Moving cube assets around: download-and-pin, publish-for-hosting."""

from __future__ import annotations

import shutil
from pathlib import Path

from fedeval.registry import ContentUid, DomainError
from fedeval.runtime import CubeAssets, PinnedHashes, pinned_hashes_of_assets
from fedeval.runtime.verify import IMAGE_FILENAME, MANIFEST_FILENAME, PARAMETERS_FILENAME

from .client import ServerClient


def pinned_from_descriptor(descriptor: dict) -> PinnedHashes:
    """The server's pinned hashes for a cube, as published at registration."""
    params = descriptor.get("parameters_uid")
    return PinnedHashes(
        manifest_uid=ContentUid(descriptor["manifest_uid"]),
        image_uid=ContentUid(descriptor["image_uid"]),
        parameters_uid=ContentUid(params) if params else None,
        extra_files=tuple(
            (e["path"], ContentUid(e["uid"])) for e in descriptor.get("extra_files", [])
        ),
    )


def download_cube(client: ServerClient, descriptor: dict, dest: Path) -> CubeAssets:
    """Fetch every registered component of a cube into ``dest``."""
    urls = dict(descriptor.get("download_urls") or {})
    required = ["manifest", "image"]
    if descriptor.get("parameters_uid"):
        required.append("parameters")
    required += [f"extra:{e['path']}" for e in descriptor.get("extra_files", [])]
    missing = [c for c in required if c not in urls]
    if missing:
        raise DomainError(
            "DOWNLOAD_FAILED",
            f"cube {descriptor['id']} registration carries no URL for {missing}",
        )
    dest.mkdir(parents=True, exist_ok=True)
    name_for = {
        "manifest": MANIFEST_FILENAME,
        "image": IMAGE_FILENAME,
        "parameters": PARAMETERS_FILENAME,
    }
    for component in required:
        if component.startswith("extra:"):
            rel = component.split(":", 1)[1]
            target = dest / rel
            target.parent.mkdir(parents=True, exist_ok=True)
        else:
            target = dest / name_for[component]
        target.write_bytes(client.download(urls[component]))
    return CubeAssets(dest)


def publish_cube_dir(cube_dir: Path, publish_root: Path, base_url: str) -> tuple[PinnedHashes, dict]:
    """Copy a local cube into a hosted directory and derive its URLs.

    The platform never stores asset bytes; owners host them (here: a plain
    static directory, e.g. the demo server's /assets mount) and register
    only hashes plus these URLs.
    """
    assets = CubeAssets(Path(cube_dir))
    pinned = pinned_hashes_of_assets(assets)
    slug = f"{assets.root.name}-{pinned.manifest_uid[:12]}"
    dest = Path(publish_root) / slug
    if dest.exists():
        shutil.rmtree(dest)
    shutil.copytree(assets.root, dest)

    base = base_url.rstrip("/")
    urls = {
        "manifest": f"{base}/{slug}/{MANIFEST_FILENAME}",
        "image": f"{base}/{slug}/{IMAGE_FILENAME}",
    }
    if pinned.parameters_uid is not None:
        urls["parameters"] = f"{base}/{slug}/{PARAMETERS_FILENAME}"
    for rel, _ in pinned.extra_files:
        urls[f"extra:{rel}"] = f"{base}/{slug}/{rel}"
    return pinned, urls
