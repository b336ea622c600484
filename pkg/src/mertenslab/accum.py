"""Compensated floating-point accumulation helpers.

Long prefix sums are built segment by segment: within a segment numpy's
pairwise ``sum``/``cumsum`` is already accurate, and the running carry
across segments is kept in a Neumaier (sum, compensation) pair so the
cross-segment chain loses nothing to rounding.
"""

from __future__ import annotations

import numpy as np


class NeumaierSum:
    """Running compensated scalar sum (Kahan with Neumaier's branch)."""

    __slots__ = ("total", "comp")

    def __init__(self, total: float = 0.0, comp: float = 0.0):
        self.total = total
        self.comp = comp

    def add(self, value: float) -> None:
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.comp += (self.total - t) + value
        else:
            self.comp += (value - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.comp


def kahan_slice_add(out: np.ndarray, comp: np.ndarray, sl, addend) -> None:
    """In-place ``out[sl] += addend`` with per-element Kahan compensation."""
    y = addend - comp[sl]
    t = out[sl] + y
    comp[sl] = (t - out[sl]) - y
    out[sl] = t


def compensated_sum(values: np.ndarray, chunk: int = 1 << 16) -> float:
    """Sum a 1-D float array: pairwise per chunk, Neumaier across chunks."""
    acc = NeumaierSum()
    for i in range(0, len(values), chunk):
        acc.add(float(np.sum(values[i:i + chunk])))
    return acc.value


def chunked_cumsum(values: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    """Cumulative sum with compensated carries at chunk boundaries."""
    out = np.empty(len(values), dtype=np.float64)
    acc = NeumaierSum()
    for i in range(0, len(values), chunk):
        block = values[i:i + chunk]
        np.cumsum(block, out=out[i:i + len(block)])
        if acc.total != 0.0 or acc.comp != 0.0:
            out[i:i + len(block)] += acc.value
        acc.add(float(np.sum(block)))
    return out
