"""Goodness-of-fit checks tying Monte Carlo samples to the closed forms.

Thresholds live with the callers (the verification suites); the functions
here only compute statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from gtcorners.density import CornerDensity, chamber_box_integral
from gtcorners.geometry import as_spectrum
from gtcorners.matrixmodel import RandomStream, sample_corner_spectra


@dataclass(frozen=True)
class SampleSet:
    """Corner spectra (one weakly increasing K-tuple per row) plus provenance."""

    points: np.ndarray
    x: tuple[float, ...] = ()
    k: int = 0
    seed: int | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if np.any(np.diff(pts, axis=1) < 0):
            raise ValueError("sample points must be weakly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if not self.k:
            object.__setattr__(self, "k", pts.shape[1])

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def from_orbit(cls, x, k: int, samples: int, seed: int, threads: int = 1) -> "SampleSet":
        pts = sample_corner_spectra(x, k, samples, seed, threads=threads)
        return cls(pts, tuple(float(v) for v in np.ravel(x)), k, seed)


def ks_statistic_1d(samples, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and ``cdf``."""
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    n = s.size
    if n == 0:
        raise ValueError("empty sample")
    if n < 10:
        raise ValueError(f"need at least 10 samples, got {n}")
    try:
        f = np.asarray(cdf(s), dtype=float)
        if f.shape != s.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([cdf(v) for v in s], dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def default_grid(x, k: int, per_axis: int = 5) -> np.ndarray:
    """``per_axis**k`` points, equally spaced strictly inside ``[x_1, x_N]`` per axis."""
    x = as_spectrum(x)
    levels = np.linspace(x[0], x[-1], per_axis + 2)[1:-1]
    return np.array(list(product(levels, repeat=k)))


def grid_cdf_discrepancy(samples: SampleSet, d: CornerDensity, grid) -> float:
    """Max over ``t`` in ``grid`` of |empirical P(a <= t) - model P(a <= t)|."""
    pts = samples.points
    worst = 0.0
    for t in np.asarray(grid, dtype=float).reshape(-1, d.k):
        emp = np.mean(np.all(pts <= t[None, :], axis=1))
        model = chamber_box_integral(d, upper=t)
        worst = max(worst, abs(emp - model))
    return worst


@dataclass(frozen=True)
class Chi2Result:
    statistic: float
    dof: int
    bins: int


def pearson_chi2(observed, probabilities, min_expected: float = 5.0) -> Chi2Result:
    """Pearson statistic with low-expectation bins pooled together.

    Bins whose expected count is below ``min_expected`` are merged into one
    pool; if the pool itself is still too small it joins the smallest
    retained bin.
    """
    obs = np.asarray(observed, dtype=float).ravel()
    p = np.asarray(probabilities, dtype=float).ravel()
    n = obs.sum()
    exp = n * p
    keep = exp >= min_expected
    o = list(obs[keep])
    e = list(exp[keep])
    pool_o, pool_e = obs[~keep].sum(), exp[~keep].sum()
    if pool_e > 0 or pool_o > 0:
        if pool_e >= min_expected:
            o.append(pool_o)
            e.append(pool_e)
        elif e:
            j = int(np.argmin(e))
            o[j] += pool_o
            e[j] += pool_e
    if len(e) < 2:
        raise ValueError("fewer than two bins with enough expected counts")
    o, e = np.array(o), np.array(e)
    return Chi2Result(float(np.sum((o - e) ** 2 / e)), len(e) - 1, len(e))


def chamber_bins(x, k: int, per_axis: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Product bins over ``[x_1, x_N]^k`` that meet the chamber, as (lower, upper) pairs."""
    x = as_spectrum(x)
    edges = np.linspace(x[0], x[-1], per_axis + 1)
    out = []
    for idx in product(range(per_axis), repeat=k):
        if all(a <= b for a, b in zip(idx, idx[1:])):
            idx = np.array(idx)
            out.append((edges[idx], edges[idx + 1]))
    return out


def histogram_chi2(samples: SampleSet, d: CornerDensity, per_axis: int = 8) -> Chi2Result:
    """Pearson chi-square of binned samples against exact bin probabilities."""
    x = d.x
    edges = np.linspace(x[0], x[-1], per_axis + 1)
    bins = chamber_bins(x, d.k, per_axis)
    lookup = {}
    for b, (lo, hi) in enumerate(bins):
        lookup[tuple(np.searchsorted(edges, lo))] = b
    cell = np.clip(np.searchsorted(edges, samples.points, side="right") - 1, 0, per_axis - 1)
    observed = np.zeros(len(bins))
    keys, counts = np.unique(cell, axis=0, return_counts=True)
    for key, c in zip(keys, counts):
        observed[lookup[tuple(int(v) for v in key)]] += c
    probs = np.array([chamber_box_integral(d, lower=lo, upper=hi) for lo, hi in bins])
    return pearson_chi2(observed, probs)


def gt_volume_mc(x, points: int, seed: int, chunk: int = 1 << 16) -> tuple[float, float]:
    """Hit-or-miss volume of the Gelfand-Tsetlin polytope; returns (estimate, stderr).

    Row ``m`` coordinate ``i`` is drawn uniformly from ``[x_i, x_{i+N-m}]``,
    the bounding box implied by iterated interlacing.
    """
    x = as_spectrum(x, strict=True)
    n = x.size
    lows = [x[: m] for m in range(n - 1, 0, -1)]
    highs = [x[n - m :] for m in range(n - 1, 0, -1)]
    box = float(np.prod([np.prod(h - l) for l, h in zip(lows, highs)]))
    hits = 0
    done = 0
    c = 0
    while done < points:
        size = min(chunk, points - done)
        gen = RandomStream(seed, c).generator
        upper = np.broadcast_to(x, (size, n))
        ok = np.ones(size, dtype=bool)
        for l, h in zip(lows, highs):
            row = l + (h - l) * gen.random((size, l.size))
            ok &= np.all(upper[:, :-1] <= row, axis=1) & np.all(row <= upper[:, 1:], axis=1)
            upper = row
        hits += int(ok.sum())
        done += size
        c += 1
    p = hits / points
    return box * p, box * np.sqrt(p * (1 - p) / points)
