"""Build the reference benchmark bundle on disk.

The bundle is byte-deterministic: fixed tar metadata, gzip mtime 0, and
constants rendered from :mod:`fedeval.refbench.constants`, so cube UIDs
are stable across builds and machines.

Layout:

    <bundle>/benchmark.yaml
    <bundle>/prep/{cube.yaml,run.py,image.tar.gz}
    <bundle>/metrics/{cube.yaml,run.py,image.tar.gz}
    <bundle>/models/majority/{cube.yaml,run.py,image.tar.gz}
    <bundle>/models/linear/{cube.yaml,run.py,parameters.yaml,image.tar.gz}
"""

from __future__ import annotations

import gzip
import io
import json
import tarfile
from pathlib import Path

from . import scripts

PREP_CUBE_YAML = """\
schema_version: 1
name: refbench-prep
image_ref: example.org/refbench/prep:1
process_entrypoint: [python3, run.py]
tasks:
  prepare:
    inputs:
      raw: {kind: DIR}
    outputs:
      prepared: {kind: DIR}
  sanity_check:
    inputs:
      prepared: {kind: DIR}
    outputs:
      report: {kind: FILE}
  statistics:
    inputs:
      prepared: {kind: DIR}
    outputs:
      statistics: {kind: FILE}
"""

METRICS_CUBE_YAML = """\
schema_version: 1
name: refbench-metrics
image_ref: example.org/refbench/metrics:1
process_entrypoint: [python3, run.py]
tasks:
  evaluate:
    inputs:
      predictions: {kind: FILE}
      data: {kind: DIR}
    outputs:
      results: {kind: FILE}
"""

MAJORITY_CUBE_YAML = """\
schema_version: 1
name: refbench-majority
image_ref: example.org/refbench/majority:1
process_entrypoint: [python3, run.py]
tasks:
  infer:
    inputs:
      data: {kind: DIR}
    outputs:
      predictions: {kind: FILE}
"""

LINEAR_CUBE_YAML = """\
schema_version: 1
name: refbench-linear
image_ref: example.org/refbench/linear:1
process_entrypoint: [python3, run.py]
tasks:
  infer:
    inputs:
      data: {kind: DIR}
    outputs:
      predictions: {kind: FILE}
    parameters_file: parameters.yaml
"""

BENCHMARK_YAML = """\
name: refbench
description: >
  Synthetic multi-site tabular binary classification with configurable
  distribution shift; the reference workload for platform demos and tests.
docs_url: https://example.org/refbench/docs
visibility: OPEN
release_policy:
  mode: PUBLIC
  show_per_site: true
metric_specs:
  - name: accuracy
    range: [0.0, 1.0]
    higher_is_better: true
    decomposable: true
  - name: sensitivity
    range: [0.0, 1.0]
    higher_is_better: true
    decomposable: false
  - name: specificity
    range: [0.0, 1.0]
    higher_is_better: true
    decomposable: false
cubes:
  preparation: prep
  metrics: metrics
  reference_model: models/majority
"""


def stub_image_archive(image_ref: str) -> bytes:
    """A minimal, deterministic OCI image layout tarball.

    Stands in for a real image: the process backend never loads it, but
    its bytes participate in hash pinning and tamper detection exactly
    like a production image archive would.
    """
    files = {
        "oci-layout": b'{"imageLayoutVersion": "1.0.0"}\n',
        "index.json": json.dumps(
            {"schemaVersion": 2, "manifests": [], "annotations": {"org.opencontainers.image.ref.name": image_ref}},
            sort_keys=True,
        ).encode("ascii")
        + b"\n",
    }
    tar_buffer = io.BytesIO()
    with tarfile.open(fileobj=tar_buffer, mode="w", format=tarfile.USTAR_FORMAT) as tar:
        for name in sorted(files):
            info = tarfile.TarInfo(name=name)
            info.size = len(files[name])
            info.mtime = 0
            info.uid = info.gid = 0
            info.uname = info.gname = "root"
            info.mode = 0o644
            tar.addfile(info, io.BytesIO(files[name]))
    gz_buffer = io.BytesIO()
    with gzip.GzipFile(fileobj=gz_buffer, mode="wb", mtime=0) as gz:
        gz.write(tar_buffer.getvalue())
    return gz_buffer.getvalue()


_CUBES: dict[str, dict[str, str]] = {
    "prep": {"cube.yaml": PREP_CUBE_YAML, "run.py": scripts.PREP_RUN_PY},
    "metrics": {"cube.yaml": METRICS_CUBE_YAML, "run.py": scripts.METRICS_RUN_PY},
    "models/majority": {"cube.yaml": MAJORITY_CUBE_YAML, "run.py": scripts.MAJORITY_RUN_PY},
    "models/linear": {
        "cube.yaml": LINEAR_CUBE_YAML,
        "run.py": scripts.LINEAR_RUN_PY,
        "parameters.yaml": scripts.LINEAR_PARAMETERS_YAML,
    },
}

_IMAGE_REFS = {
    "prep": "example.org/refbench/prep:1",
    "metrics": "example.org/refbench/metrics:1",
    "models/majority": "example.org/refbench/majority:1",
    "models/linear": "example.org/refbench/linear:1",
}


def build_cube_dir(which: str, dest: Path | str) -> Path:
    """Write one cube ('prep', 'metrics', 'models/majority', 'models/linear')."""
    if which not in _CUBES:
        raise ValueError(f"unknown cube {which!r}; have {sorted(_CUBES)}")
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    for name, text in _CUBES[which].items():
        (dest / name).write_text(text, "utf-8")
    (dest / "image.tar.gz").write_bytes(stub_image_archive(_IMAGE_REFS[which]))
    return dest


def build_benchmark_bundle(dest: Path | str) -> Path:
    """Write the complete bundle (benchmark.yaml plus all four cubes)."""
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    (dest / "benchmark.yaml").write_text(BENCHMARK_YAML, "utf-8")
    for which in _CUBES:
        build_cube_dir(which, dest / which)
    return dest
