"""Portable 64-bit SplitMix-style generator.

Specified by its constants so any language reproduces the byte-identical
stream: state advances by 0x9E3779B97F4A7C15 per draw; output mixing is

    z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27; z *= 0x94D049BB133111EB
    z ^= z >> 31

with all arithmetic modulo 2**64. Unit doubles take the top 53 bits; the
pseudo-gaussian is the Irwin-Hall sum of 12 unit draws minus 6 (mean 0,
variance 1), which keeps generation free of transcendental functions and
therefore bit-identical across platforms.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_UNIT = 2.0**-53


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * _UNIT

    def next_pseudo_gaussian(self) -> float:
        total = 0.0
        for _ in range(12):
            total += self.next_unit()
        return total - 6.0
