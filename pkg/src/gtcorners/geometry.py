"""Chamber and interlacing geometry.

A spectrum is an ascending tuple of reals, a point of the Weyl chamber.
Interlacing checks use weak inequalities with no tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from gtcorners.errors import DegenerateSpectrumError, DimensionError


def as_spectrum(values, strict: bool = False) -> np.ndarray:
    """Validate an ascending tuple and return it as a 1-D float array.

    With ``strict=True`` ties are rejected (interior of the chamber).
    """
    x = np.asarray(values, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"expected a non-empty 1-D tuple, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("spectrum entries must be finite")
    gaps = np.diff(x)
    if np.any(gaps < 0):
        raise ValueError(f"spectrum is not ascending: {x.tolist()}")
    if strict and np.any(gaps == 0):
        raise DegenerateSpectrumError(
            f"spectrum has repeated coordinates (min_gap=0): {x.tolist()}"
        )
    return x


def min_gap(x) -> float:
    """Smallest gap between consecutive coordinates; ``inf`` for a single one."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float("inf")
    return float(np.min(np.diff(x)))


def interlaces(y, x) -> bool:
    """True iff ``x[0] <= y[0] <= x[1] <= ... <= y[-1] <= x[-1]``."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size + 1:
        raise DimensionError(
            f"interlacing needs len(x) == len(y) + 1, got {x.size} and {y.size}"
        )
    return bool(np.all(x[:-1] <= y) and np.all(y <= x[1:]))


def vandermonde(x) -> float:
    """Product of ``x[j] - x[i]`` over ``j > i``; 1 for fewer than two entries."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 2:
        return 1.0
    i, j = np.triu_indices(n, k=1)
    return float(np.prod(x[j] - x[i]))


def vandermonde_rows(points: np.ndarray) -> np.ndarray:
    """Row-wise Vandermonde product for an ``(m, K)`` array."""
    points = np.asarray(points, dtype=float)
    k = points.shape[-1]
    if k < 2:
        return np.ones(points.shape[:-1])
    i, j = np.triu_indices(k, k=1)
    return np.prod(points[..., j] - points[..., i], axis=-1)


@dataclass(frozen=True)
class GTPattern:
    """Triangular array of rows of lengths N-1, ..., 1 (longest row first)."""

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        lengths = [len(r) for r in rows]
        top = len(rows)
        if lengths != list(range(top, 0, -1)):
            raise DimensionError(f"row lengths must be {top}, ..., 1; got {lengths}")

    @property
    def size(self) -> int:
        """N, the length of the top row this pattern hangs from."""
        return len(self.rows) + 1

    def row(self, k: int) -> tuple[float, ...]:
        """Row of length ``k`` (1 <= k <= N-1)."""
        if not 1 <= k < self.size:
            raise DimensionError(f"row length {k} outside 1..{self.size - 1}")
        return self.rows[self.size - 1 - k]

    def to_json(self) -> list[list[float]]:
        return [list(r) for r in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[float]]) -> "GTPattern":
        return cls(tuple(tuple(r) for r in data))


def pattern_in_polytope(pattern: GTPattern | Sequence[Sequence[float]], x) -> bool:
    """True iff ``x`` interlaces the first row and every row interlaces the next."""
    if not isinstance(pattern, GTPattern):
        pattern = GTPattern(tuple(tuple(r) for r in pattern))
    x = np.asarray(x, dtype=float).ravel()
    if pattern.size != x.size:
        raise DimensionError(
            f"pattern hangs from a row of length {pattern.size}, top row has {x.size}"
        )
    upper = x
    for row in pattern.rows:
        if not interlaces(row, upper):
            return False
        upper = np.asarray(row)
    return True
