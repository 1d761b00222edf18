"""Task scripts shipped inside the reference cubes.

Each cube carries a standalone, stdlib-only run.py so it executes the
same way under the process backend and inside a container image. The
published constants are rendered in at bundle-build time, keeping
:mod:`fedeval.refbench.constants` the single source of truth while the
shipped bytes stay deterministic.
"""

from __future__ import annotations

from .constants import LINEAR_BIAS, LINEAR_WEIGHTS, PREP_CENTER, PREP_SCALE

_CSV_HELPERS = '''\
def read_rows(path):
    text = path.read_text("utf-8")
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise SystemExit("empty csv: %s" % path)
    return lines[0].split(","), [line.split(",") for line in lines[1:]]
'''

PREP_RUN_PY = f'''\
#!/usr/bin/env python3
"""Dataset preparation: fixed-constant normalization, quality gate, statistics."""
import argparse
from pathlib import Path

CENTER = {list(PREP_CENTER)!r}
SCALE = {list(PREP_SCALE)!r}


{_CSV_HELPERS}

def do_prepare(args):
    raw = Path(args.raw)
    out = Path(args.prepared)
    out.mkdir(parents=True, exist_ok=True)
    header, rows = read_rows(raw / "features.csv")
    if len(header) != len(CENTER):
        raise SystemExit("expected %d feature columns, got %d" % (len(CENTER), len(header)))
    out_lines = [",".join(header)]
    for row in rows:
        cells = []
        for j, cell in enumerate(row[: len(CENTER)]):
            try:
                cells.append("%.6f" % ((float(cell) - CENTER[j]) / SCALE[j]))
            except ValueError:
                cells.append("nan")
        out_lines.append(",".join(cells))
    (out / "features.csv").write_text("\\n".join(out_lines) + "\\n")
    labels = raw / "labels.csv"
    if labels.is_file():
        (out / "labels.csv").write_bytes(labels.read_bytes())


def do_sanity_check(args):
    prepared = Path(args.prepared)
    problems = []
    n_rows = None
    feats = prepared / "features.csv"
    if not feats.is_file():
        problems.append("features.csv missing")
    else:
        header, rows = read_rows(feats)
        n_rows = len(rows)
        for i, row in enumerate(rows):
            if len(row) != len(header):
                problems.append("row %d: expected %d columns" % (i, len(header)))
                break
            bad = next(
                (cell for cell in row if _non_finite(cell)),
                None,
            )
            if bad is not None:
                problems.append("row %d: non-finite or non-numeric value %r" % (i, bad))
                break
    labels = prepared / "labels.csv"
    if not labels.is_file():
        problems.append("labels.csv missing")
    else:
        _, label_rows = read_rows(labels)
        if any(row[0] not in ("0", "1") for row in label_rows):
            problems.append("labels must be 0 or 1")
        if n_rows is not None and len(label_rows) != n_rows:
            problems.append(
                "row-count mismatch: %d features vs %d labels" % (n_rows, len(label_rows))
            )
    Path(args.report).write_text("OK\\n" if not problems else "\\n".join(problems) + "\\n")
    if problems:
        for problem in problems:
            print("sanity_check:", problem)
        raise SystemExit(2)


def _non_finite(cell):
    try:
        value = float(cell)
    except ValueError:
        return True
    return value != value or value in (float("inf"), float("-inf"))


def do_statistics(args):
    prepared = Path(args.prepared)
    _, label_rows = read_rows(prepared / "labels.csv")
    n = len(label_rows)
    positives = sum(1 for row in label_rows if row[0] == "1")
    Path(args.statistics).write_text(
        "n: %d\\npositive_fraction: %r\\n" % (n, positives / n)
    )


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("task")
    for opt in ("--raw", "--prepared", "--report", "--statistics", "--parameters"):
        parser.add_argument(opt)
    args = parser.parse_args()
    if args.task == "prepare":
        do_prepare(args)
    elif args.task == "sanity_check":
        do_sanity_check(args)
    elif args.task == "statistics":
        do_statistics(args)
    else:
        raise SystemExit("unknown task: %s" % args.task)


if __name__ == "__main__":
    main()
'''

MAJORITY_RUN_PY = f'''\
#!/usr/bin/env python3
"""Baseline model: predicts the constant majority class (0) for every row."""
import argparse
from pathlib import Path


{_CSV_HELPERS}

def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("task")
    parser.add_argument("--data")
    parser.add_argument("--predictions")
    parser.add_argument("--parameters")
    args = parser.parse_args()
    if args.task != "infer":
        raise SystemExit("unknown task: %s" % args.task)
    feats = Path(args.data) / "features.csv"
    if not feats.is_file():
        print("infer: features.csv missing")
        raise SystemExit(2)
    _, rows = read_rows(feats)
    Path(args.predictions).write_text("prediction\\n" + "0\\n" * len(rows))


if __name__ == "__main__":
    main()
'''

LINEAR_RUN_PY = f'''\
#!/usr/bin/env python3
"""Linear model with fixed published weights over the prepared features."""
import argparse
from pathlib import Path


{_CSV_HELPERS}

def load_parameters(path):
    weights = None
    bias = None
    for line in Path(path).read_text("utf-8").splitlines():
        key, _, value = line.partition(":")
        key = key.strip()
        if key == "weights":
            weights = [float(x) for x in value.strip().strip("[]").split(",")]
        elif key == "bias":
            bias = float(value)
    if weights is None or bias is None:
        raise SystemExit("parameters file must define weights and bias")
    return weights, bias


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("task")
    parser.add_argument("--data")
    parser.add_argument("--predictions")
    parser.add_argument("--parameters")
    args = parser.parse_args()
    if args.task != "infer":
        raise SystemExit("unknown task: %s" % args.task)
    weights, bias = load_parameters(args.parameters)
    _, rows = read_rows(Path(args.data) / "features.csv")
    lines = ["prediction"]
    for i, row in enumerate(rows):
        if len(row) < len(weights):
            print("infer: row %d has %d columns, need %d" % (i, len(row), len(weights)))
            raise SystemExit(2)
        try:
            score = sum(w * float(cell) for w, cell in zip(weights, row)) + bias
        except ValueError:
            print("infer: row %d has a non-numeric value" % i)
            raise SystemExit(2)
        lines.append("1" if score > 0 else "0")
    Path(args.predictions).write_text("\\n".join(lines) + "\\n")


if __name__ == "__main__":
    main()
'''

METRICS_RUN_PY = f'''\
#!/usr/bin/env python3
"""Evaluation: confusion-count metrics over predictions vs. reference labels."""
import argparse
from pathlib import Path


{_CSV_HELPERS}

def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("task")
    parser.add_argument("--predictions")
    parser.add_argument("--data")
    parser.add_argument("--results")
    parser.add_argument("--parameters")
    args = parser.parse_args()
    if args.task != "evaluate":
        raise SystemExit("unknown task: %s" % args.task)
    _, pred_rows = read_rows(Path(args.predictions))
    _, label_rows = read_rows(Path(args.data) / "labels.csv")
    if len(pred_rows) != len(label_rows):
        print(
            "evaluate: length mismatch: %d predictions vs %d labels"
            % (len(pred_rows), len(label_rows))
        )
        raise SystemExit(3)
    counts = {{"tp": 0, "tn": 0, "fp": 0, "fn": 0}}
    for i, (pred, label) in enumerate(zip(pred_rows, label_rows)):
        p, y = pred[0], label[0]
        if p not in ("0", "1") or y not in ("0", "1"):
            print("evaluate: row %d has non-binary value" % i)
            raise SystemExit(2)
        key = ("t" if p == y else "f") + ("p" if p == "1" else "n")
        counts[key] += 1
    n = len(pred_rows)
    lines = ["n: %d" % n, "accuracy: %r" % ((counts["tp"] + counts["tn"]) / n)]
    positives = counts["tp"] + counts["fn"]
    if positives:
        lines.append("sensitivity: %r" % (counts["tp"] / positives))
    else:
        lines.append("sensitivity: null")
        lines.append("sensitivity_reason: no positive labels")
    negatives = counts["tn"] + counts["fp"]
    if negatives:
        lines.append("specificity: %r" % (counts["tn"] / negatives))
    else:
        lines.append("specificity: null")
        lines.append("specificity_reason: no negative labels")
    Path(args.results).write_text("\\n".join(lines) + "\\n")


if __name__ == "__main__":
    main()
'''

LINEAR_PARAMETERS_YAML = (
    f"weights: [{', '.join(repr(w) for w in LINEAR_WEIGHTS)}]\nbias: {LINEAR_BIAS!r}\n"
)
