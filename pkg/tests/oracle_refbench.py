"""Standalone oracle for the reference benchmark pipeline.

Deliberately independent of the cube scripts: it re-derives preparation,
the linear model, and the confusion-count metrics from the *published*
constants, which are re-stated here verbatim. A guard test asserts these
copies match the package's published values, so any drift trips an alarm
instead of silently weakening the oracle.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

ORACLE_PREP_CENTER = (0.5, 0.4, -0.25, 0.15)
ORACLE_PREP_SCALE = (1.2, 1.1, 1.15, 1.05)
ORACLE_LINEAR_WEIGHTS = (0.8, 0.7, -0.45, 0.25)
ORACLE_LINEAR_BIAS = 0.02


def read_csv_rows(path: Path) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[1:]  # drop header


def read_labels(path: Path) -> list[int]:
    return [int(row[0]) for row in read_csv_rows(path)]


def prepare_features(raw_dir: Path) -> list[list[float]]:
    """Normalization as the published constants define it, with the same
    6-decimal quantization the file format imposes."""
    out = []
    for row in read_csv_rows(raw_dir / "features.csv"):
        out.append(
            [
                float("%.6f" % ((float(cell) - c) / s))
                for cell, c, s in zip(row, ORACLE_PREP_CENTER, ORACLE_PREP_SCALE)
            ]
        )
    return out


def predict_linear(prepared_features: list[list[float]]) -> list[int]:
    preds = []
    for row in prepared_features:
        score = sum(w * x for w, x in zip(ORACLE_LINEAR_WEIGHTS, row)) + ORACLE_LINEAR_BIAS
        preds.append(1 if score > 0 else 0)
    return preds


def predict_majority(prepared_features: list[list[float]]) -> list[int]:
    return [0] * len(prepared_features)


def confusion_counts(predictions: list[int], labels: list[int]) -> dict[str, int]:
    assert len(predictions) == len(labels)
    counts = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    for p, y in zip(predictions, labels):
        key = ("t" if p == y else "f") + ("p" if p == 1 else "n")
        counts[key] += 1
    return counts


def metrics_from_counts(counts: dict[str, int]) -> dict[str, float | None]:
    n = sum(counts.values())
    positives = counts["tp"] + counts["fn"]
    negatives = counts["tn"] + counts["fp"]
    return {
        "accuracy": (counts["tp"] + counts["tn"]) / n,
        "sensitivity": counts["tp"] / positives if positives else None,
        "specificity": counts["tn"] / negatives if negatives else None,
        "n": n,
    }


def site_metrics(raw_dir: Path, model: str) -> dict[str, float | None]:
    """Full-pipeline oracle for one site: raw tree -> metrics."""
    prepared = prepare_features(raw_dir)
    labels = read_labels(raw_dir / "labels.csv")
    predict = predict_linear if model == "linear" else predict_majority
    return metrics_from_counts(confusion_counts(predict(prepared), labels))


def pooled_accuracy(raw_dirs: list[Path], model: str) -> float:
    """Accuracy over the union of all sites' samples, as one float division."""
    correct = 0
    total = 0
    for raw_dir in raw_dirs:
        prepared = prepare_features(raw_dir)
        labels = read_labels(raw_dir / "labels.csv")
        predict = predict_linear if model == "linear" else predict_majority
        preds = predict(prepared)
        correct += sum(1 for p, y in zip(preds, labels) if p == y)
        total += len(labels)
    return correct / total


def pooled_accuracy_exact(raw_dirs: list[Path], model: str) -> Fraction:
    correct = 0
    total = 0
    for raw_dir in raw_dirs:
        prepared = prepare_features(raw_dir)
        labels = read_labels(raw_dir / "labels.csv")
        predict = predict_linear if model == "linear" else predict_majority
        preds = predict(prepared)
        correct += sum(1 for p, y in zip(preds, labels) if p == y)
        total += len(labels)
    return Fraction(correct, total)
