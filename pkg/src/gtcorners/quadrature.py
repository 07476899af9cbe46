"""Gauss-Legendre rules for piecewise polynomial integrands.

Every integrand in this package is a polynomial on each cell of a grid cut
by the spline knots, so per-cell Gauss-Legendre with enough nodes is exact
up to roundoff.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np


def nodes_for_degree(degree: int) -> int:
    """Node count used for a per-coordinate polynomial degree (one spare node)."""
    return (max(degree, 0) + 2) // 2 + 1


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def interval_rule(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def cut(lo: float, hi: float, breaks) -> np.ndarray:
    """``[lo, hi]`` split at every break strictly inside it."""
    b = np.asarray(breaks, dtype=float)
    inner = b[(b > lo) & (b < hi)]
    return np.concatenate(([lo], np.unique(inner), [hi]))


def integrate_1d(f, lo: float, hi: float, breaks, degree: int) -> float:
    """Cell-wise Gauss-Legendre of a vectorised ``f`` that is polynomial between breaks."""
    if hi <= lo:
        return 0.0
    edges = cut(lo, hi, breaks)
    n = nodes_for_degree(degree)
    pts, wts = [], []
    for left, right in zip(edges[:-1], edges[1:]):
        x, w = interval_rule(left, right, n)
        pts.append(x)
        wts.append(w)
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    return float(np.dot(wts, f(pts)))


def tensor_rule(boxes, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes for a stack of boxes.

    ``boxes`` has shape ``(c, K, 2)`` (lower/upper per coordinate). Returns
    points ``(c * n**K, K)`` and weights ``(c * n**K,)``.
    """
    boxes = np.asarray(boxes, dtype=float)
    c, k, _ = boxes.shape
    x, w = gauss_legendre(n)
    grid = np.array(list(product(range(n), repeat=k)), dtype=int)  # (n**K, K)
    ref_x = x[grid]  # (n**K, K)
    ref_w = np.prod(w[grid], axis=1)
    lo = boxes[:, :, 0][:, None, :]
    half = 0.5 * (boxes[:, :, 1] - boxes[:, :, 0])[:, None, :]
    pts = lo + half * (ref_x[None, :, :] + 1.0)
    wts = ref_w[None, :] * np.prod(half, axis=2)
    return pts.reshape(-1, k), wts.reshape(-1)
