"""Content-addressed identifiers.

A ContentUid is the lowercase-hex SHA-256 of some content. Single files
hash as their raw bytes; file trees hash through a canonical manifest so
the result is independent of presentation order:

    for each file, in ascending lexicographic byte order of its path:
        "<path>\\n<decimal byte length>\\n<hex digest of content>\\n"
    UID = sha256 of the concatenated manifest lines (UTF-8)

Paths are '/'-separated, relative, and must not contain '..' segments.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import Iterable

from .errors import DomainError

_HEX_DIGITS = set("0123456789abcdef")


class ContentUid(str):
    """Lowercase 64-hex-digit SHA-256 digest string."""

    __slots__ = ()

    def __new__(cls, value: str) -> "ContentUid":
        if len(value) != 64 or not set(value) <= _HEX_DIGITS:
            raise ValueError(f"not a 64-char lowercase hex digest: {value!r}")
        return super().__new__(cls, value)


ZERO_UID = ContentUid("0" * 64)


def hash_bytes(data: bytes) -> ContentUid:
    """SHA-256 of raw bytes; the UID convention for single files."""
    return ContentUid(hashlib.sha256(data).hexdigest())


def _check_path(path: str) -> None:
    if not path or path.startswith("/") or "\\" in path:
        raise DomainError("ILLEGAL_PATH", f"path must be relative, '/'-separated: {path!r}")
    segments = path.split("/")
    if any(seg in ("", ".", "..") for seg in segments):
        raise DomainError("ILLEGAL_PATH", f"path contains empty, '.' or '..' segment: {path!r}")


def compute_content_uid(files: Iterable[tuple[str, bytes]]) -> ContentUid:
    """UID of a file tree given as (relative path, content) pairs.

    Presentation order does not matter; duplicate or illegal paths raise
    DomainError (DUPLICATE_PATH / ILLEGAL_PATH). The empty tree hashes to
    the digest of the empty byte string.
    """
    entries: dict[str, bytes] = {}
    for path, content in files:
        _check_path(path)
        if path in entries:
            raise DomainError("DUPLICATE_PATH", f"path listed twice: {path!r}")
        entries[path] = content
    manifest = "".join(
        f"{path}\n{len(content)}\n{hash_bytes(content)}\n"
        for path, content in sorted(entries.items())
    )
    return hash_bytes(manifest.encode("utf-8"))


def hash_tree_path(root: Path | str) -> ContentUid:
    """Compute the tree UID of a directory on disk.

    Symlinks are followed for file content; directory structure below
    ``root`` maps to '/'-separated relative paths.
    """
    root = Path(root)
    files: list[tuple[str, bytes]] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            full = Path(dirpath) / name
            rel = full.relative_to(root).as_posix()
            files.append((rel, full.read_bytes()))
    return compute_content_uid(files)
