"""Leaderboard report rendering: delimited files plus figures.

Writes what the caller's policy-filtered view of a benchmark's results
contains: leaderboard.csv (one row per model/metric aggregate),
site_rows.csv when the view includes per-site rows, and one bar-chart
PNG per metric alongside.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def write_leaderboard_report(report: dict, out_dir: Path | str) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    leaderboard = out_dir / "leaderboard.csv"
    with open(leaderboard, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["model_cube_id", "model_name", "metric", "value", "site_count", "total_samples"]
        )
        for agg in report.get("aggregates", []):
            for metric, value in sorted(agg["metrics"].items()):
                writer.writerow(
                    [
                        agg["model_cube_id"],
                        agg["model_name"],
                        metric,
                        repr(value["value"]),
                        value["site_count"],
                        value["total_samples"],
                    ]
                )
    written.append(leaderboard)

    if report.get("site_rows"):
        metric_names = sorted({m for row in report["site_rows"] for m in row["metrics"]})
        site_rows = out_dir / "site_rows.csv"
        with open(site_rows, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["model_cube_id", "model_name", "dataset_uid", "dataset_name", "sample_count"]
                + metric_names
            )
            for row in report["site_rows"]:
                writer.writerow(
                    [
                        row["model_cube_id"],
                        row["model_name"],
                        row["dataset_uid"],
                        row["dataset_name"],
                        row["sample_count"],
                    ]
                    + [
                        repr(row["metrics"][m]) if m in row["metrics"] else ""
                        for m in metric_names
                    ]
                )
        written.append(site_rows)

    written.extend(_write_figures(report, out_dir))
    return written


def _write_figures(report: dict, out_dir: Path) -> list[Path]:
    aggregates = report.get("aggregates", [])
    metric_names = sorted({m for agg in aggregates for m in agg["metrics"]})
    written = []
    for metric in metric_names:
        models = [agg for agg in aggregates if metric in agg["metrics"]]
        labels = [agg["model_name"] for agg in models]
        values = [agg["metrics"][metric]["value"] for agg in models]
        fig, ax = plt.subplots(figsize=(max(4.0, 1.4 * len(labels)), 3.2))
        ax.bar(range(len(labels)), values, color="#4878a8")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=20, ha="right")
        ax.set_ylabel(metric)
        ax.set_title(f"{report.get('benchmark_name', report.get('benchmark_id', ''))}: {metric}")
        ax.margins(y=0.15)
        for x, v in enumerate(values):
            ax.annotate(f"{v:.4f}", (x, v), ha="center", va="bottom", fontsize=8)
        fig.tight_layout()
        path = out_dir / f"leaderboard_{metric}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written
