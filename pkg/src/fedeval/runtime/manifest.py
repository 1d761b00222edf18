"""Cube manifest (cube.yaml) parsing.

Schema (restricted YAML, schema_version 1):

    schema_version: 1
    name: <display name>
    image_ref: <container image reference>
    process_entrypoint: [<argv>, ...]     # optional; needed by the process backend
    tasks:
      <task name>:
        inputs:  { <binding>: {kind: FILE|DIR}, ... }
        outputs: { <binding>: {kind: FILE|DIR}, ... }
        parameters_file: <relative path>  # optional

Binding names double as the final path segment under /fedeval/inputs and
/fedeval/outputs, so they must be plain single segments: no separators, no
'..'. Tasks receive one --<binding>=<path> argument per binding plus
--parameters=<path> when a parameters file is declared.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from enum import Enum

import yaml

from fedeval.registry.errors import DomainError

from .restricted_yaml import load_restricted_yaml

SUPPORTED_SCHEMA_VERSION = 1

_BINDING_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


class BindingKind(str, Enum):
    FILE = "FILE"
    DIR = "DIR"


@dataclass(frozen=True)
class BindingSpec:
    kind: BindingKind


@dataclass(frozen=True)
class TaskSpec:
    inputs: dict[str, BindingSpec]
    outputs: dict[str, BindingSpec]
    parameters_file: str | None = None


@dataclass(frozen=True)
class CubeManifest:
    schema_version: int
    name: str
    image_ref: str
    tasks: dict[str, TaskSpec]
    process_entrypoint: tuple[str, ...] = ()


def _fail(message: str) -> DomainError:
    return DomainError("PARSE_ERROR", message)


def _check_binding_name(name: str, where: str) -> None:
    if ".." in name or "/" in name or "\\" in name or not _BINDING_NAME.match(name):
        raise _fail(f"ILLEGAL_PATH: binding name {name!r} in {where} is not a safe path segment")


def _check_relative_path(path: str, where: str) -> None:
    if path.startswith("/") or "\\" in path:
        raise _fail(f"ILLEGAL_PATH: {where} path must be relative: {path!r}")
    if any(seg in ("", ".", "..") for seg in path.split("/")):
        raise _fail(f"ILLEGAL_PATH: {where} path has empty, '.' or '..' segment: {path!r}")


def _parse_bindings(raw: object, where: str) -> dict[str, BindingSpec]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise _fail(f"{where} must be a mapping of binding names")
    out: dict[str, BindingSpec] = {}
    for name, spec in raw.items():
        _check_binding_name(name, where)
        if not isinstance(spec, dict) or set(spec) != {"kind"}:
            raise _fail(f"{where}.{name} must be a mapping with exactly a 'kind' field")
        kind = spec["kind"]
        if kind not in (BindingKind.FILE.value, BindingKind.DIR.value):
            raise _fail(f"{where}.{name}.kind must be FILE or DIR, got {kind!r}")
        out[name] = BindingSpec(kind=BindingKind(kind))
    return out


def _parse_task(name: str, raw: object) -> TaskSpec:
    if not isinstance(raw, dict):
        raise _fail(f"task {name!r} must be a mapping")
    unknown = set(raw) - {"inputs", "outputs", "parameters_file"}
    if unknown:
        raise _fail(f"task {name!r} has unknown fields: {sorted(unknown)}")
    inputs = _parse_bindings(raw.get("inputs"), f"tasks.{name}.inputs")
    outputs = _parse_bindings(raw.get("outputs"), f"tasks.{name}.outputs")
    overlap = set(inputs) & set(outputs)
    if overlap:
        raise _fail(f"task {name!r} reuses binding names across inputs/outputs: {sorted(overlap)}")
    parameters_file = raw.get("parameters_file")
    if parameters_file is not None:
        if not isinstance(parameters_file, str):
            raise _fail(f"task {name!r} parameters_file must be a string")
        _check_relative_path(parameters_file, f"tasks.{name}.parameters_file")
    return TaskSpec(inputs=inputs, outputs=outputs, parameters_file=parameters_file)


def _check_duplicate_tasks(text: str) -> None:
    # YAML mappings silently collapse duplicate keys; give repeated task
    # names their own error code before the generic loader reports.
    try:
        root = yaml.compose(io.StringIO(text))
    except yaml.YAMLError:
        return  # the restricted loader produces the parse error
    if not isinstance(root, yaml.MappingNode):
        return
    for key_node, value_node in root.value:
        if (
            isinstance(key_node, yaml.ScalarNode)
            and key_node.value == "tasks"
            and isinstance(value_node, yaml.MappingNode)
        ):
            seen: set[str] = set()
            for task_key, _ in value_node.value:
                if isinstance(task_key, yaml.ScalarNode):
                    if task_key.value in seen:
                        raise DomainError(
                            "DUPLICATE_TASK",
                            f"task {task_key.value!r} defined twice "
                            f"(line {task_key.start_mark.line + 1})",
                        )
                    seen.add(task_key.value)


def parse_manifest(text: str) -> CubeManifest:
    """Parse and validate a cube.yaml; raises DomainError with a precise reason.

    Error codes: PARSE_ERROR (syntax, structure, illegal paths),
    UNSUPPORTED_SCHEMA_VERSION, DUPLICATE_TASK.
    """
    _check_duplicate_tasks(text)
    raw = load_restricted_yaml(text)
    if not isinstance(raw, dict):
        raise _fail("manifest must be a top-level mapping")

    version = raw.get("schema_version")
    if version != SUPPORTED_SCHEMA_VERSION:
        raise DomainError(
            "UNSUPPORTED_SCHEMA_VERSION",
            f"schema_version must be {SUPPORTED_SCHEMA_VERSION}, got {version!r}",
        )
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise _fail("manifest 'name' must be a non-empty string")
    image_ref = raw.get("image_ref")
    if not isinstance(image_ref, str) or not image_ref:
        raise _fail("manifest 'image_ref' must be a non-empty string")

    entrypoint_raw = raw.get("process_entrypoint", [])
    if not isinstance(entrypoint_raw, list) or not all(
        isinstance(part, str) and part for part in entrypoint_raw
    ):
        raise _fail("'process_entrypoint' must be a list of non-empty strings")

    tasks_raw = raw.get("tasks")
    if not isinstance(tasks_raw, dict) or not tasks_raw:
        raise _fail("manifest must declare at least one task under 'tasks'")
    tasks = {tname: _parse_task(tname, traw) for tname, traw in tasks_raw.items()}

    unknown = set(raw) - {"schema_version", "name", "image_ref", "process_entrypoint", "tasks"}
    if unknown:
        raise _fail(f"manifest has unknown top-level fields: {sorted(unknown)}")

    return CubeManifest(
        schema_version=version,
        name=name,
        image_ref=image_ref,
        tasks=tasks,
        process_entrypoint=tuple(entrypoint_raw),
    )
