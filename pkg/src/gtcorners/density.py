"""Closed-form corner densities and the objects around them.

For a strictly increasing spectrum ``x`` of length N and a corner size K,
the eigenvalues ``a_1 <= ... <= a_K`` of the K x K corner of a random matrix
from the orbit of ``diag(x)`` have density

    c(N, K) * V(a) * det[M(a_j; x_i, ..., x_{N-K+i})] / prod_{j-i >= N-K+1} (x_j - x_i)

where ``M`` is the fundamental spline and ``V`` the Vandermonde product.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, factorial, inf, lgamma, log, prod

import mpmath
import numpy as np

from gtcorners.errors import (
    ConditioningError,
    DegenerateSpectrumError,
    DimensionError,
    RangeError,
    ResourceError,
)
from gtcorners.geometry import (
    as_spectrum,
    interlaces,
    vandermonde,
    vandermonde_rows,
)
from gtcorners.quadrature import cut, integrate_1d, nodes_for_degree, tensor_rule
from gtcorners.splines import as_knots, fundamental_spline, spline_tail_integrals

# Above this N constants and gap products are handled in log space.
LOG_SPACE_N = 20
DEFAULT_BUDGET = 4_000_000
_CHUNK = 200_000


def c_constant(n: int, k: int) -> int:
    """``prod_{i=1}^{K-1} binom(N-K+i, i)``, an exact integer."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= K <= N-1, got N={n}, K={k}")
    return prod(comb(n - k + i, i) for i in range(1, k))


def superfactorial(n: int) -> int:
    """``0! 1! ... (n-1)!``."""
    return prod(factorial(i) for i in range(n))


def _log_superfactorial(n: int) -> float:
    return sum(lgamma(i + 1) for i in range(n))


def kernel_density(x, a) -> float:
    """Density of the spectrum of the (N-1)-corner: ``(N-1)! V(a) / V(x)`` on ``a < x``."""
    x = as_spectrum(x, strict=True)
    a = np.asarray(a, dtype=float).ravel()
    if x.size < 2:
        raise DimensionError("the one-step kernel needs N >= 2")
    if a.size != x.size - 1:
        raise DimensionError(f"need len(a) = N-1 = {x.size - 1}, got {a.size}")
    if not interlaces(a, x):
        return 0.0
    return factorial(x.size - 1) * vandermonde(a) / vandermonde(x)


def _kernel_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised one-step kernel ``(K-1)! V(b) / V(a)`` for rows of ``a`` over fixed ``b``."""
    k = a.shape[1]
    ok = np.all(a[:, :-1] <= b[None, :], axis=1) & np.all(b[None, :] <= a[:, 1:], axis=1)
    va = vandermonde_rows(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = factorial(k - 1) * vandermonde(b) / va
    return np.where(ok & (va != 0), out, 0.0)


class CornerDensity:
    """Density of the K-corner spectrum for the orbit of ``diag(x)``.

    Instances are immutable; evaluation is vectorised over rows of points.
    """

    def __init__(self, x, k: int):
        x = as_spectrum(x, strict=True)
        n = x.size
        if not 1 <= k <= n - 1:
            raise ValueError(f"need 1 <= K <= N-1, got N={n}, K={k}")
        self._x = x
        self._x.setflags(write=False)
        self.n = n
        self.k = int(k)
        width = n - k + 1
        # spline windows x_i..x_{N-K+i}; validating them surfaces clustering early
        self.windows = tuple(as_knots(x[i : i + width]) for i in range(k))
        self.c = c_constant(n, k)
        i, j = np.triu_indices(n, k=width)
        gaps = x[j] - x[i]
        self.log_c = log(self.c)
        self.log_gap_product = float(np.sum(np.log(gaps)))
        self.gap_product = float(np.prod(gaps)) if n <= LOG_SPACE_N else None

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def spline_degree(self) -> int:
        return self.n - self.k - 1

    def __repr__(self) -> str:
        return f"CornerDensity(x={self._x.tolist()}, k={self.k})"

    def spline_matrix(self, points) -> np.ndarray:
        """``E[m, i, j] = M(a_j; window_i)`` for points ``a`` of shape ``(m, K)``."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.k)
        out = np.empty((pts.shape[0], self.k, self.k))
        for i, w in enumerate(self.windows):
            out[:, i, :] = fundamental_spline(pts, w)
        return out

    def formula(self, points) -> np.ndarray:
        """The closed form at arbitrary (not necessarily ordered) points.

        The expression is symmetric in the coordinates, which the chamber
        integrators rely on.
        """
        pts = np.asarray(points, dtype=float).reshape(-1, self.k)
        if self.k == 1:
            return fundamental_spline(pts[:, 0], self.windows[0])
        mats = self.spline_matrix(pts)
        va = vandermonde_rows(pts)
        if self.n <= LOG_SPACE_N:
            return self.c * va * np.linalg.det(mats) / self.gap_product
        sign, logdet = np.linalg.slogdet(mats)
        with np.errstate(divide="ignore"):
            logv = np.log(np.abs(va))
        total = self.log_c + logv + logdet - self.log_gap_product
        return np.where(sign * va == 0, 0.0, np.sign(va) * sign * np.exp(total))

    def __call__(self, a):
        a_arr = np.asarray(a, dtype=float)
        if a_arr.ndim <= 1 and a_arr.size != self.k:
            raise DimensionError(f"a point needs {self.k} coordinates, got {a_arr.size}")
        pts = a_arr.reshape(1, self.k) if a_arr.ndim <= 1 else a_arr
        if pts.shape[-1] != self.k:
            raise DimensionError(f"points must have {self.k} coordinates, got {pts.shape}")
        if np.any(np.diff(pts, axis=1) < 0):
            raise ValueError("corner spectra must be weakly increasing")
        vals = self.formula(pts)
        return float(vals[0]) if a_arr.ndim <= 1 else vals


def corner_density(d: CornerDensity, a):
    """Evaluate ``d`` at one point of length K or at rows of an ``(m, K)`` array."""
    return d(a)


def gt_volume(x) -> float:
    """Euclidean volume of the Gelfand-Tsetlin polytope with top row ``x``."""
    x = as_spectrum(x, strict=True)
    n = x.size
    if n < 2:
        raise DimensionError("the polytope needs N >= 2")
    if n <= LOG_SPACE_N:
        return vandermonde(x) / superfactorial(n)
    i, j = np.triu_indices(n, k=1)
    return float(np.exp(np.sum(np.log(x[j] - x[i])) - _log_superfactorial(n)))


# ---------------------------------------------------------------- integrals


def _monotone_bounds(k: int, lower, upper, lo: float, hi: float):
    lower = np.full(k, -inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(k, inf) if upper is None else np.asarray(upper, dtype=float)
    if lower.size != k or upper.size != k:
        raise DimensionError(f"bounds must have {k} coordinates")
    # on the chamber a_j >= a_i >= lower_i (i < j) and a_j <= a_i <= upper_i (i > j)
    lower = np.clip(np.maximum.accumulate(lower), lo, hi)
    upper = np.clip(np.minimum.accumulate(upper[::-1])[::-1], lo, hi)
    return lower, upper


def _nondecreasing(ranges):
    """All nondecreasing index tuples with entry j in ``ranges[j]`` (a ``range``)."""
    out = []

    def rec(j, floor, acc):
        if j == len(ranges):
            out.append(tuple(acc))
            return
        for m in range(max(floor, ranges[j].start), ranges[j].stop):
            acc.append(m)
            rec(j + 1, m, acc)
            acc.pop()

    rec(0, 0, [])
    return out


def chamber_box_integral(
    d: CornerDensity, lower=None, upper=None, budget: int = DEFAULT_BUDGET
) -> float:
    """Integral of ``d`` over ``{a_1 <= ... <= a_K, lower <= a <= upper}``.

    The region is cut into cells of the grid formed by the knots and the
    bounds. Cells whose coordinates fall in distinct grid intervals are boxes
    inside the chamber. When r coordinates share an interval the region is
    an ordered simplex; the integrand is symmetric, so that piece equals the
    box integral divided by r!.
    """
    x = d.x
    k = d.k
    lower, upper = _monotone_bounds(k, lower, upper, x[0], x[-1])
    if np.any(upper <= lower):
        return 0.0
    edges = np.unique(np.concatenate([x, lower, upper]))
    index = {v: i for i, v in enumerate(edges)}
    ranges = [range(index[lower[j]], index[upper[j]]) for j in range(k)]
    cells = _nondecreasing(ranges)
    q = nodes_for_degree(d.n - 2)
    if len(cells) * q**k > budget:
        raise ResourceError(
            f"{len(cells)} cells x {q}^{k} nodes exceeds the budget of {budget} evaluations"
        )
    if not cells:
        return 0.0
    cells = np.asarray(cells, dtype=int)
    boxes = np.stack([edges[cells], edges[cells + 1]], axis=-1)
    # 1/r! for every run of r equal interval indices
    weight = np.ones(len(cells))
    run = np.ones(len(cells))
    for j in range(1, k):
        same = cells[:, j] == cells[:, j - 1]
        run = np.where(same, run + 1, 1.0)
        weight = weight / np.where(same, run, 1.0)
    per_cell = q**k
    total = 0.0
    step = max(1, _CHUNK // per_cell)
    for s in range(0, len(cells), step):
        pts, wts = tensor_rule(boxes[s : s + step], q)
        cw = np.repeat(weight[s : s + step], per_cell)
        total += float(np.dot(wts * cw, d.formula(pts)))
    return total


def _andreief_mass(d: CornerDensity) -> float:
    # int over chamber of V(a) det[phi_i(a_j)] = det[int a^k phi_i(a) da]
    x = d.x
    center = 0.5 * (x[0] + x[-1])
    scale = 0.5 * (x[-1] - x[0])
    k = d.k
    mom = np.empty((k, k))
    for i, w in enumerate(d.windows):
        for p in range(k):
            mom[p, i] = integrate_1d(
                lambda a, p=p, w=w: ((a - center) / scale) ** p * fundamental_spline(a, w),
                w[0],
                w[-1],
                w,
                d.spline_degree + p,
            )
    logdet_sign, logdet = np.linalg.slogdet(mom)
    log_total = d.log_c + logdet + (k * (k - 1) / 2) * log(scale) - d.log_gap_product
    return float(logdet_sign * np.exp(log_total))


def normalization(d: CornerDensity, method: str = "auto", budget: int = DEFAULT_BUDGET) -> float:
    """Total mass of ``d`` over the chamber (should be 1).

    ``"cells"`` integrates the K-dimensional density cell by cell;
    ``"moments"`` reduces it to a K x K determinant of one-dimensional spline
    moments; ``"auto"`` uses cells when they fit in ``budget``.
    """
    if method not in ("auto", "cells", "moments"):
        raise ValueError(f"unknown method {method!r}")
    if d.k == 1 and method != "moments":
        return spline_tail_integrals(-inf, inf, d.windows[0])
    if method == "moments":
        return _andreief_mass(d)
    try:
        return chamber_box_integral(d, budget=budget)
    except ResourceError:
        if method == "cells":
            raise
        return _andreief_mass(d)


def compose_kernel(d: CornerDensity, b, budget: int = DEFAULT_BUDGET) -> float:
    """Push the level-K density one step down and evaluate it at ``b`` (length K-1).

    Integrates ``d(a) * kernel(a, b)`` over ``a_1 <= b_1 <= a_2 <= ... <= a_K``,
    a box, cut at the knots. The product is a polynomial of degree N-K-1 in
    each coordinate on every cell.
    """
    k = d.k
    if k < 2:
        raise ValueError("composition needs K >= 2")
    b = np.asarray(b, dtype=float).ravel()
    if b.size != k - 1:
        raise DimensionError(f"need len(b) = K-1 = {k - 1}, got {b.size}")
    if np.any(np.diff(b) < 0):
        raise ValueError("b must be weakly increasing")
    x = d.x
    lo_hi = list(zip(np.concatenate(([-inf], b)), np.concatenate((b, [inf]))))
    axes = []
    for lo, hi in lo_hi:
        lo, hi = max(lo, x[0]), min(hi, x[-1])
        if hi <= lo:
            return 0.0
        e = cut(lo, hi, x)
        axes.append(list(zip(e[:-1], e[1:])))
    q = nodes_for_degree(d.spline_degree)
    ncells = prod(len(a) for a in axes)
    if ncells * q**k > budget:
        raise ResourceError(
            f"{ncells} cells x {q}^{k} nodes exceeds the budget of {budget} evaluations"
        )
    boxes = np.array([list(c) for c in product(*axes)])
    pts, wts = tensor_rule(boxes, q)
    vals = d.formula(pts) * _kernel_rows(pts, b)
    return float(np.dot(wts, vals))


def _exact_det(m: np.ndarray) -> float:
    """Determinant of the float entries in exact rational arithmetic.

    Structurally singular matrices (exact zeros and ones from the support
    pattern) then give exactly 0 instead of an LU rounding residue.
    """
    a = [[Fraction(float(v)) for v in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for j in range(n):
        p = next((i for i in range(j, n) if a[i][j] != 0), None)
        if p is None:
            return 0.0
        if p != j:
            a[j], a[p] = a[p], a[j]
            det = -det
        det *= a[j][j]
        for i in range(j + 1, n):
            f = a[i][j] / a[j][j]
            if f:
                a[i] = [u - f * v for u, v in zip(a[i], a[j])]
    return float(det)


def column_reduction(x, k: int, b) -> tuple[float, float]:
    """Both sides of the column-reduction identity used in the induction step.

    Left: ``det[int_{b_{j-1}}^{b_j} M(a; x_i..x_{N-K+i}) da]`` (K x K, with
    ``b_0 = -inf``, ``b_K = +inf``). Right: ``(N-K+1)^{-(K-1)}
    prod_i (x_{N-K+i+1} - x_i) det[M(b_j; x_i..x_{N-K+i+1})]`` ((K-1) x (K-1)).
    """
    x = as_spectrum(x, strict=True)
    n = x.size
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= K <= N-1, got N={n}, K={k}")
    b = np.asarray(b, dtype=float).ravel()
    if b.size != k - 1:
        raise DimensionError(f"need len(b) = K-1 = {k - 1}, got {b.size}")
    if np.any(np.diff(b) < 0):
        raise ValueError("b must be weakly increasing")
    width = n - k + 1
    ends = np.concatenate(([-inf], b, [inf]))
    f = np.array(
        [
            [spline_tail_integrals(ends[j], ends[j + 1], x[i : i + width]) for j in range(k)]
            for i in range(k)
        ]
    )
    lhs = _exact_det(f)
    if k == 1:
        return lhs, 1.0
    m = np.array(
        [fundamental_spline(b, x[i : i + width + 1]) for i in range(k - 1)]
    )
    spans = np.array([x[width + i] - x[i] for i in range(k - 1)])
    rhs = float(np.prod(spans) * _exact_det(m) / width ** (k - 1))
    return lhs, rhs


# -------------------------------------------------------------------- HCIZ


def _as_distinct_complex(z, n: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != n:
        raise DimensionError(f"need {n} eigenvalues of Z, got {z.size}")
    if not np.all(np.isfinite(z)):
        raise ValueError("eigenvalues of Z must be finite")
    if n > 1:
        i, j = np.triu_indices(n, k=1)
        if np.min(np.abs(z[j] - z[i])) == 0:
            raise DegenerateSpectrumError("eigenvalues of Z must be pairwise distinct")
    return z


def _hciz_mp(z: np.ndarray, xs: np.ndarray, n: int) -> complex:
    dps = 40
    while dps <= 2560:
        with mpmath.workdps(dps):
            zz = [mpmath.mpc(v.real, v.imag) for v in z]
            xx = [mpmath.mpf(v) for v in xs]
            e = mpmath.matrix([[mpmath.exp(zi * xj) for xj in xx] for zi in zz])
            det = mpmath.det(e)
            hadamard = mpmath.fprod(
                mpmath.sqrt(mpmath.fsum(abs(e[r, s]) ** 2 for s in range(n))) for r in range(n)
            )
            if abs(det) * mpmath.mpf(10) ** (dps - 20) > hadamard:
                vz = mpmath.fprod(zz[j] - zz[i] for i in range(n) for j in range(i + 1, n))
                vx = mpmath.fprod(xx[j] - xx[i] for i in range(n) for j in range(i + 1, n))
                return complex(superfactorial(n) * det / (vz * vx))
        dps *= 2
    raise ConditioningError("HCIZ determinant cancels beyond 2560 digits")


def hciz(x, z) -> complex:
    """Laplace transform of the orbital measure at a matrix with eigenvalues ``z``.

    ``c_N det[exp(z_i x_j)] / (V(z) V(x))`` with ``c_N = 0! 1! ... (N-1)!``.
    The determinant cancels heavily when the ``z`` (or ``x``) are close; in
    that case it is recomputed in multiprecision until it is resolved.
    """
    x = as_spectrum(x, strict=True)
    n = x.size
    z = _as_distinct_complex(z, n)
    shift = 0.5 * (x[0] + x[-1])
    xs = x - shift
    phase = shift * np.sum(z)
    expo = np.outer(z, xs)
    if np.max(expo.real) > 700 or phase.real > 700:
        raise RangeError("exp(z x) overflows; rescale Z or X")
    if n == 1:
        return complex(np.exp(z[0] * x[0]))
    e = np.exp(expo)
    det = np.linalg.det(e)
    big = np.max(np.abs(e), axis=1)
    hadamard = np.prod(big * np.linalg.norm(e / big[:, None], axis=1))
    # LU roundoff is about n * eps * hadamard; keep ~12 digits or go multiprecision
    if abs(det) > 1e12 * n * np.finfo(float).eps * hadamard:
        i, j = np.triu_indices(n, k=1)
        value = superfactorial(n) * det / (np.prod(z[j] - z[i]) * np.prod(xs[j] - xs[i]))
        value = complex(value)
    else:
        value = _hciz_mp(z, xs, n)
    if value == 0:
        return 0j
    if np.log(abs(value)) + phase.real > 709.0:
        raise RangeError("HCIZ value overflows double precision")
    return complex(value * np.exp(phase))
