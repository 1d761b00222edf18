"""Multi-site raw data generation with controllable distribution shift."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .constants import (
    CLASS_SEPARATION,
    FEATURE_COUNT,
    SHIFT_DISPLACEMENT,
    VALUE_FORMAT,
)
from .prng import SplitMix64


@dataclass(frozen=True)
class SiteConfig:
    """One site's generation recipe; generation is a pure function of it.

    ``shift`` displaces all feature means (simulating the site's local
    distribution); ``label_noise`` flips each recorded label with the
    given probability while features stay tied to the true class.
    """

    seed: int
    n: int
    shift: float = 0.0
    label_noise: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 <= self.shift <= 1.0:
            raise ValueError("shift must be in [0, 1]")
        if not 0.0 <= self.label_noise <= 0.5:
            raise ValueError("label_noise must be in [0, 0.5]")


def render_site(cfg: SiteConfig) -> dict[str, bytes]:
    """The raw tree as bytes: features.csv and labels.csv.

    Draw order per row is fixed: class coin, then 12 uniform draws per
    feature (pseudo-gaussian), then the label-noise coin.
    """
    rng = SplitMix64(cfg.seed)
    feature_lines = ["f1,f2,f3,f4"]
    label_lines = ["label"]
    for _ in range(cfg.n):
        true_class = 1 if rng.next_unit() < 0.5 else 0
        values = []
        for j in range(FEATURE_COUNT):
            mean = true_class * CLASS_SEPARATION[j] + cfg.shift * SHIFT_DISPLACEMENT[j]
            values.append(VALUE_FORMAT % (mean + rng.next_pseudo_gaussian()))
        flip = rng.next_unit() < cfg.label_noise
        label = true_class ^ 1 if flip else true_class
        feature_lines.append(",".join(values))
        label_lines.append(str(label))
    return {
        "features.csv": ("\n".join(feature_lines) + "\n").encode("ascii"),
        "labels.csv": ("\n".join(label_lines) + "\n").encode("ascii"),
    }


def generate_site(cfg: SiteConfig, out_dir: Path | str) -> Path:
    """Write the site's raw tree under ``out_dir`` and return it."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, data in render_site(cfg).items():
        (out_dir / name).write_bytes(data)
    return out_dir
