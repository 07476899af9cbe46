"""Integer Gelfand-Tsetlin schemes and relative dimensions.

Counts are exact Python integers. Rows are processed top-down: for each
level m the table ``g_m[y]`` holds the number of interlacing chains from the
top row ``x`` down to the row ``y`` of length m. A row ``z`` sits below ``y``
iff every ``y_i`` lies in ``[z_{i-1}, z_i]``, so one step is a box sum and is
read off an m-dimensional prefix-sum table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import floor

import numpy as np

from gtcorners.density import CornerDensity
from gtcorners.errors import DegenerateSpectrumError, DimensionError, ResourceError
from gtcorners.geometry import as_spectrum

# largest table (number of entries) the DP will allocate
DEFAULT_BUDGET = 5_000_000


def as_signature(values) -> tuple[int, ...]:
    """Validate a weakly increasing integer tuple."""
    vals = tuple(np.asarray(values).ravel().tolist())
    if not vals:
        raise DimensionError("a signature needs at least one entry")
    out = []
    for v in vals:
        if isinstance(v, float) and not v.is_integer():
            raise ValueError(f"signature entries must be integers, got {v}")
        out.append(int(v))
    if any(b < a for a, b in zip(out, out[1:])):
        raise ValueError(f"signature is not weakly increasing: {out}")
    return tuple(out)


def _box_sum(prefix: np.ndarray, lo: list[np.ndarray], hi: list[np.ndarray]) -> np.ndarray:
    """Inclusive box sums ``sum g[lo_0..hi_0, ..., lo_m..hi_m]`` from a prefix table."""
    dims = len(lo)
    total = 0
    for corner in product((0, 1), repeat=dims):
        idx = tuple(hi[i] + 1 if c else lo[i] for i, c in enumerate(corner))
        sign = -1 if (dims - sum(corner)) % 2 else 1
        total = total + sign * prefix[idx]
    return total


def _prefix(g: np.ndarray) -> np.ndarray:
    p = np.zeros(tuple(s + 1 for s in g.shape), dtype=object)
    p[tuple(slice(1, None) for _ in g.shape)] = g
    for axis in range(g.ndim):
        p = np.cumsum(p, axis=axis, dtype=object)
    return p


def _descend(x: tuple[int, ...], k: int, budget: int) -> np.ndarray:
    """Table of chain counts for rows of length ``k``, indexed by ``row - x[0]``."""
    n = len(x)
    base = x[0]
    r = x[-1] - x[0] + 1
    if r ** (n - 1) > budget:
        raise ResourceError(
            f"DP table of {r}^{n - 1} entries exceeds the budget of {budget}"
        )
    shifted = [v - base for v in x]
    # level N-1: indicator of y interlacing x
    g = np.zeros((r,) * (n - 1), dtype=object)
    g[tuple(slice(shifted[i], shifted[i + 1] + 1) for i in range(n - 1))] = 1
    for m in range(n - 2, k - 1, -1):
        prefix = _prefix(g)
        z = np.indices((r,) * m).reshape(m, -1)
        lo = [np.zeros(z.shape[1], dtype=int)] + [z[i] for i in range(m)]
        hi = [z[i] for i in range(m)] + [np.full(z.shape[1], r - 1)]
        vals = _box_sum(prefix, lo, hi)
        ordered = np.all(z[:-1] <= z[1:], axis=0) if m > 1 else np.ones(z.shape[1], bool)
        vals = np.where(ordered, vals, 0)
        g = np.asarray(vals, dtype=object).reshape((r,) * m)
    return g


@lru_cache(maxsize=4096)
def _count_schemes(x: tuple[int, ...], budget: int) -> int:
    if len(x) == 1:
        return 1
    return int(np.sum(_descend(x, 1, budget)))


def count_schemes(x, budget: int = DEFAULT_BUDGET) -> int:
    """Number of integer Gelfand-Tsetlin schemes with top row ``x``.

    This is the dimension of the irreducible U(N) representation whose
    highest weight is ``x`` read in descending order.
    """
    return _count_schemes(as_signature(x), budget)


def count_between(x, y, budget: int = DEFAULT_BUDGET) -> int:
    """Number of integer chains ``x > Y^(N-1) > ... > Y^(K+1) > y``."""
    x = as_signature(x)
    y = as_signature(y)
    n, k = len(x), len(y)
    if not 1 <= k < n:
        raise DimensionError(f"need 1 <= len(y) < len(x), got {k} and {n}")
    if y[0] < x[0] or y[-1] > x[-1]:
        return 0
    g = _descend(x, k, budget)
    return int(g[tuple(v - x[0] for v in y)])


def relative_dimension(x, y, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Fraction of schemes with top row ``x`` whose row of length len(y) equals ``y``."""
    x = as_signature(x)
    y = as_signature(y)
    between = count_between(x, y, budget)
    if between == 0:
        return Fraction(0)
    return Fraction(between * _count_schemes(y, budget), _count_schemes(x, budget))


def relative_dimension_distribution(x, k: int, budget: int = DEFAULT_BUDGET) -> dict:
    """The whole law of the row of length ``k``: ``{y: Fraction}`` over its support."""
    x = as_signature(x)
    n = len(x)
    if not 1 <= k < n:
        raise DimensionError(f"need 1 <= K < N, got K={k}, N={n}")
    g = _descend(x, k, budget)
    total = _count_schemes(x, budget)
    out = {}
    for idx in zip(*np.nonzero(g != 0)):
        y = tuple(int(i) + x[0] for i in idx)
        out[y] = Fraction(int(g[idx]) * _count_schemes(y, budget), total)
    return out


def round_half_up(v) -> np.ndarray:
    return np.array([floor(t + 0.5) for t in np.asarray(v, dtype=float).ravel()], dtype=int)


@dataclass(frozen=True)
class ScalingRow:
    point: tuple[float, ...]
    lattice_point: tuple[int, ...]
    discrete: float
    continuous: float

    @property
    def abs_diff(self) -> float:
        return abs(self.discrete - self.continuous)


@dataclass(frozen=True)
class ScalingReport:
    x: tuple[float, ...]
    k: int
    scale: int
    lattice_top: tuple[int, ...]
    total_mass: Fraction
    rows: tuple[ScalingRow, ...]


def scaling_limit_compare(x, k: int, scale: int, points, budget: int = DEFAULT_BUDGET) -> ScalingReport:
    """Compare ``L^K * nu_Z(round(L x), round(L a))`` with the continuous density at ``a``.

    No convergence rate is asserted; callers look at how ``abs_diff`` moves
    as ``scale`` grows.
    """
    x = as_spectrum(x, strict=True)
    if scale < 1:
        raise ValueError("scale L must be >= 1")
    top = tuple(int(v) for v in round_half_up(scale * x))
    if any(b <= a for a, b in zip(top, top[1:])):
        raise DegenerateSpectrumError(
            f"round(L*x) = {list(top)} has repeated entries; use a larger L"
        )
    dens = CornerDensity(x, k)
    law = relative_dimension_distribution(top, k, budget)
    rows = []
    for a in np.asarray(points, dtype=float).reshape(-1, k):
        lat = tuple(int(v) for v in round_half_up(scale * a))
        nu = law.get(lat, Fraction(0))
        rows.append(
            ScalingRow(
                point=tuple(a.tolist()),
                lattice_point=lat,
                discrete=float(nu * scale**k),
                continuous=float(dens.formula(a[None, :])[0]),
            )
        )
    return ScalingReport(
        x=tuple(x.tolist()),
        k=k,
        scale=scale,
        lattice_top=top,
        total_mass=sum(law.values(), Fraction(0)),
        rows=tuple(rows),
    )

