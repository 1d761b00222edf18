"""Synthetic, fully deterministic reference benchmark.

Multi-site binary-classification tabular data with controllable
distribution shift, plus the preparation, model, and metrics cubes that
exercise every platform mechanism at desk scale.
"""

from .bundle import build_benchmark_bundle, build_cube_dir, stub_image_archive
from .generate import SiteConfig, generate_site, render_site
from .prng import SplitMix64

__all__ = [
    "SiteConfig",
    "SplitMix64",
    "build_benchmark_bundle",
    "build_cube_dir",
    "generate_site",
    "render_site",
    "stub_image_archive",
]
