"""Restricted YAML: scalars, maps, and lists only.

Cube manifests, parameters, and metric outputs all use this subset so that
every implementation language can parse them identically. Anchors, aliases,
explicit tags, multiple documents, and duplicate mapping keys are rejected
with the offending line number.
"""

from __future__ import annotations

import io
from typing import Any

import yaml
from yaml.constructor import SafeConstructor

from fedeval.registry.errors import DomainError

_IMPLICIT_TAGS = {
    "tag:yaml.org,2002:str",
    "tag:yaml.org,2002:int",
    "tag:yaml.org,2002:float",
    "tag:yaml.org,2002:bool",
    "tag:yaml.org,2002:null",
    "tag:yaml.org,2002:map",
    "tag:yaml.org,2002:seq",
}


def _parse_error(message: str, line: int | None = None) -> DomainError:
    where = f" (line {line + 1})" if line is not None else ""
    return DomainError("PARSE_ERROR", f"{message}{where}")


def _scan_events(text: str) -> None:
    docs = 0
    try:
        for event in yaml.parse(io.StringIO(text)):
            line = event.start_mark.line if event.start_mark else None
            if isinstance(event, yaml.DocumentStartEvent):
                docs += 1
                if docs > 1:
                    raise _parse_error("multiple documents not allowed", line)
            if isinstance(event, yaml.AliasEvent):
                raise _parse_error("aliases not allowed", line)
            if getattr(event, "anchor", None) is not None and not isinstance(
                event, yaml.AliasEvent
            ):
                raise _parse_error("anchors not allowed", line)
            tag = getattr(event, "tag", None)
            if tag is not None and tag not in _IMPLICIT_TAGS:
                raise _parse_error(f"explicit tag {tag!r} not allowed", line)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise _parse_error(str(getattr(exc, "problem", exc)), mark.line if mark else None)


def _construct(node: yaml.Node, ctor: SafeConstructor) -> Any:
    if isinstance(node, yaml.MappingNode):
        out: dict[str, Any] = {}
        for key_node, value_node in node.value:
            if not isinstance(key_node, yaml.ScalarNode):
                raise _parse_error("mapping keys must be scalars", key_node.start_mark.line)
            key = ctor.construct_object(key_node, deep=True)
            if not isinstance(key, str):
                raise _parse_error(
                    f"mapping keys must be strings, got {key!r}", key_node.start_mark.line
                )
            if key in out:
                raise _parse_error(f"duplicate key {key!r}", key_node.start_mark.line)
            out[key] = _construct(value_node, ctor)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_construct(child, ctor) for child in node.value]
    return ctor.construct_object(node, deep=True)


def load_restricted_yaml(text: str) -> Any:
    """Parse the restricted subset; DomainError(PARSE_ERROR) on violation."""
    _scan_events(text)
    try:
        root = yaml.compose(io.StringIO(text))
    except yaml.YAMLError as exc:  # pragma: no cover - caught by _scan_events
        mark = getattr(exc, "problem_mark", None)
        raise _parse_error(str(getattr(exc, "problem", exc)), mark.line if mark else None)
    if root is None:
        return None
    return _construct(root, SafeConstructor())


def dump_restricted_yaml(value: Any) -> str:
    """Serialize plain scalars/lists/dicts deterministically (keys kept in order)."""
    return yaml.safe_dump(value, sort_keys=False, default_flow_style=False)
