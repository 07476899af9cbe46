"""Verification suites: every closed form against an independent route.

Each ``check_*`` function returns a list of :class:`Check` records with the
statistic, the threshold it was held to and the verdict. Suites bundle the
checks and are what ``gtcorners verify`` runs.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from math import factorial, inf, sqrt

import numpy as np
from scipy.stats import chi2

from gtcorners.density import (
    CornerDensity,
    column_reduction,
    compose_kernel,
    gt_volume,
    hciz,
    kernel_density,
    normalization,
)
from gtcorners.discrete import (
    count_schemes,
    relative_dimension,
    relative_dimension_distribution,
    scaling_limit_compare,
)
from gtcorners.errors import ResourceError
from gtcorners.geometry import vandermonde
from gtcorners.matrixmodel import laplace_mc
from gtcorners.quadrature import integrate_1d, tensor_rule
from gtcorners.splines import (
    fundamental_spline,
    spline_by_divided_difference,
    spline_tail_integrals,
    upper_tail,
)
from gtcorners.stats import (
    SampleSet,
    default_grid,
    grid_cdf_discrepancy,
    gt_volume_mc,
    histogram_chi2,
    ks_statistic_1d,
)

MAX_CONTINUOUS_N = 8
MAX_DISCRETE_N = 5
# interior Monte Carlo checks stop here: bin and grid counts grow like per_axis**K
MAX_INTERIOR_K = 3
KS_CRITICAL_1PCT = 1.63
GRID_CDF_FACTOR = 5.0

_STEPS = (1.0, 2.0, 4.0, 1.5, 3.0, 2.5, 1.0)


def default_spectrum(n: int) -> np.ndarray:
    """Fixed irregular spectrum of length ``n``; ``(0, 1, 3, 7)`` for n = 4."""
    if not 1 <= n <= MAX_CONTINUOUS_N:
        raise ResourceError(f"N={n} outside the supported range 1..{MAX_CONTINUOUS_N}")
    return np.concatenate(([0.0], np.cumsum(_STEPS[: n - 1])))


@dataclass
class Check:
    test: str
    statistic: float
    threshold: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def _le(test, statistic, threshold, **detail) -> Check:
    return Check(test, float(statistic), float(threshold), bool(statistic <= threshold), detail)


def _random_knots(rng, n: int) -> np.ndarray:
    # gaps within a factor 5 of each other, random scale and offset
    gaps = rng.uniform(0.2, 1.0, n - 1) * rng.uniform(0.1, 10.0)
    return np.concatenate(([0.0], np.cumsum(gaps))) + rng.uniform(-5.0, 5.0)


def _random_spectrum(rng, n: int) -> np.ndarray:
    return _random_knots(rng, n) if n > 1 else rng.uniform(-1, 1, 1)


# ---------------------------------------------------------------- splines


def check_spline_identities(vectors: int = 200, max_knots: int = 12, seed: int = 0, grid: int = 1000):
    rng = np.random.default_rng(seed)
    norm_err = tail_err = dd_err = 0.0
    support_bad = negative = 0
    for _ in range(vectors):
        n = int(rng.integers(2, max_knots + 1))
        y = _random_knots(rng, n)
        f = lambda a: fundamental_spline(a, y)
        deg = n - 2
        gl_total = integrate_1d(f, y[0], y[-1], y, deg)
        norm_err = max(norm_err, abs(gl_total - 1.0), abs(spline_tail_integrals(-inf, inf, y) - 1.0))
        b, c = np.sort(rng.uniform(y[0] - 1, y[-1] + 1, 2))
        for lo, hi in ((-inf, c), (b, c), (b, inf)):
            gl = integrate_1d(f, max(lo, y[0]), min(hi, y[-1]), y, deg)
            tail_err = max(tail_err, abs(spline_tail_integrals(lo, hi, y) - gl))
        a = rng.uniform(y[0], y[-1], 50)
        exact = f(a)
        dd = spline_by_divided_difference(a, y)
        dd_err = max(dd_err, float(np.max(np.abs(dd - exact) / np.abs(exact))))
        w = y[-1] - y[0]
        pts = np.linspace(y[0] - 0.5 * w, y[-1] + 0.5 * w, grid)
        vals = f(pts)
        outside = (pts < y[0]) | (pts >= y[-1])
        support_bad += int(np.count_nonzero(vals[outside]))
        negative += int(np.count_nonzero(vals < 0))
    return [
        _le("spline total mass 1 (closed form and Gauss-Legendre)", norm_err, 1e-10),
        _le("spline tail integrals (closed form vs Gauss-Legendre)", tail_err, 1e-10),
        _le("spline via divided difference (max relative error)", dd_err, 1e-10),
        _le("spline support (nonzero values outside [y_1, y_n))", support_bad, 0),
        _le("spline nonnegativity (negative values on grid)", negative, 0),
    ]


# ----------------------------------------------------------------- kernel


def check_kernel_base(ns=range(2, 9), points: int = 1000, seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for n in ns:
        x = _random_spectrum(rng, n)
        d = CornerDensity(x, n - 1)
        a = x[:-1] + (x[1:] - x[:-1]) * rng.uniform(0.01, 0.99, (points, n - 1))
        thm = d(a)
        ker = np.array([kernel_density(x, row) for row in a])
        err = float(np.max(np.abs(thm - ker) / np.abs(ker)))
        out.append(_le(f"K=N-1 density equals one-step kernel, N={n}", err, 1e-10))
    return out


# ---------------------------------------------------------------- theorem


def check_rank_one_exact(ns=range(2, 9), points: int = 1000, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in ns:
        x = _random_spectrum(rng, n)
        a = rng.uniform(x[0], x[-1], points)
        m = fundamental_spline(a, x)
        dens = CornerDensity(x, 1)(a[:, None])
        mask = m != 0
        worst = max(worst, float(np.max(np.abs(dens[mask] - m[mask]) / np.abs(m[mask]))))
    return [_le("K=1 density equals fundamental spline (relative)", worst, 1e-12)]


def check_rank_one_mc(x=(0.0, 1.0, 3.0, 7.0), samples: int = 100_000, seed: int = 7, threads: int = 1):
    x = np.asarray(x, dtype=float)
    s = SampleSet.from_orbit(x, 1, samples, seed, threads)
    stat = ks_statistic_1d(s.points[:, 0], lambda t: 1.0 - upper_tail(t, x))
    return [
        _le(
            f"K=1 Monte Carlo KS, X={x.tolist()}, n={samples}",
            stat,
            KS_CRITICAL_1PCT / sqrt(samples),
            seed=seed,
        )
    ]


def check_interior(cases, samples: int = 100_000, seed: int = 7, threads: int = 1, per_axis: int = 8):
    """Grid CDF discrepancy and binned chi-square for each ``(x, K)``."""
    out = []
    for x, k in cases:
        x = np.asarray(x, dtype=float)
        n = x.size
        d = CornerDensity(x, k)
        s = SampleSet.from_orbit(x, k, samples, seed, threads)
        disc = grid_cdf_discrepancy(s, d, default_grid(x, k, 5))
        out.append(
            _le(
                f"grid CDF discrepancy N={n} K={k}",
                disc,
                GRID_CDF_FACTOR / sqrt(samples),
                x=x.tolist(),
                seed=seed,
            )
        )
        r = histogram_chi2(s, d, per_axis)
        lo, hi = chi2.ppf([0.005, 0.995], r.dof)
        out.append(
            Check(
                f"chi-square N={n} K={k}",
                r.statistic,
                float(hi),
                bool(lo <= r.statistic <= hi),
                {"band": [float(lo), float(hi)], "dof": r.dof, "x": x.tolist(), "seed": seed},
            )
        )
    return out


def check_normalization(max_n: int = 6, seed: int = 0, method: str = "auto", ns=None):
    rng = np.random.default_rng(seed)
    out = []
    for n in ns if ns is not None else range(2, max_n + 1):
        x = _random_spectrum(rng, n)
        for k in range(1, n):
            mass = normalization(CornerDensity(x, k), method=method)
            out.append(_le(f"total mass N={n} K={k}", abs(mass - 1.0), 1e-8, method=method))
    return out


# ------------------------------------------------------------- recurrence


def check_recurrence(max_n: int = 5, points: int = 10, seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for n in range(3, max_n + 1):
        x = _random_spectrum(rng, n)
        for k in range(2, n):
            upper = CornerDensity(x, k)
            lower = CornerDensity(x, k - 1)
            worst = 0.0
            for _ in range(points):
                b = np.sort(rng.uniform(x[0], x[-1], k - 1))
                ref = lower(b)
                worst = max(worst, abs(compose_kernel(upper, b) - ref) / max(1.0, abs(ref)))
            out.append(_le(f"kernel composition K={k} -> K-1, N={n}", worst, 1e-8))
    return out


def check_column_reduction(instances: int = 100, max_n: int = 8, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(2, max_n + 1))
        x = _random_spectrum(rng, n)
        for k in range(1, n):
            b = np.sort(rng.uniform(x[0], x[-1], k - 1))
            lhs, rhs = column_reduction(x, k, b)
            scale = max(abs(lhs), abs(rhs))
            if scale > 0:
                worst = max(worst, abs(lhs - rhs) / scale)
    return [_le("column-reduction determinant identity (relative)", worst, 1e-10)]


# ----------------------------------------------------------------- volume


def check_volume(ns=(3, 4), points: int = 1_000_000, seed: int = 7):
    out = [_le("GT volume of X=(0,1,2) equals 1", abs(gt_volume([0.0, 1.0, 2.0]) - 1.0), 1e-12)]
    for n in ns:
        x = default_spectrum(n)
        est, se = gt_volume_mc(x, points, seed)
        exact = gt_volume(x)
        out.append(
            _le(
                f"GT volume vs hit-or-miss, N={n}",
                abs(est - exact) / se if se > 0 else abs(est - exact),
                3.0,
                estimate=est,
                exact=exact,
                stderr=se,
            )
        )
    return out


# ------------------------------------------------------------------- HCIZ


def _fixed_unitary(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _mc_cases(seed: int):
    x = np.array([0.0, 1.0, 2.0])
    w = _fixed_unitary(3, seed)
    z_herm = np.array([0.3, 0.1, 0.0])
    yield "diag(0.3, 0.1, 0)", x, np.diag(z_herm), z_herm
    zc = np.array([0.4 + 0.5j, -0.2 + 0.1j, 0.1 - 0.7j])
    yield "conjugated complex diagonal", x, w @ np.diag(zc) @ np.conj(w.T), zc


def check_hciz(samples: int = 100_000, seed: int = 7, max_n: int = 4, nodes: int = 16, threads: int = 1):
    out = []
    for label, x, zmat, zeig in _mc_cases(seed):
        exact = hciz(x, zeig)
        est = laplace_mc(x, zmat, samples, seed, threads)
        dev = max(
            abs(est.value.real - exact.real) / est.stderr_real,
            abs(est.value.imag - exact.imag) / est.stderr_imag if est.stderr_imag > 0 else 0.0,
        )
        out.append(
            _le(
                f"HCIZ vs Monte Carlo, {label}",
                dev,
                3.0,
                exact=[exact.real, exact.imag],
                estimate=[est.value.real, est.value.imag],
            )
        )
    rng = np.random.default_rng(seed)
    for n in range(2, max_n + 1):
        x = _random_spectrum(rng, n)
        zt = rng.uniform(-1, 1, n - 1) + 1j * rng.uniform(-0.5, 0.5, n - 1)
        lhs = hciz(x, np.concatenate((zt, [0.0])))
        rhs = corner_identity_rhs(x, zt, nodes)
        out.append(
            _le(
                f"HCIZ corner identity by quadrature, N={n}",
                abs(lhs - rhs) / abs(lhs),
                1e-6,
            )
        )
    worst = 0.0
    for n in range(2, max_n + 2):
        x = _random_spectrum(rng, n)
        z = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
        ref = hciz(x, z)
        for p in list(permutations(range(n)))[1:]:
            worst = max(worst, abs(hciz(x, z[list(p)]) - ref) / abs(ref))
    out.append(_le("HCIZ invariant under relabelling z", worst, 1e-12))
    return out


def corner_identity_rhs(x, zt, nodes: int = 16) -> complex:
    """``(N-1)!/V(x) * int_{y < x} V(y) HCIZ(y, zt) dy`` by tensor Gauss-Legendre."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 1:
        raise ValueError("need N >= 2")
    box = np.stack([x[:-1], x[1:]], axis=-1)[None]
    pts, wts = tensor_rule(box, nodes)
    vals = np.array([vandermonde(y) * hciz(y, zt) for y in pts])
    return complex(factorial(n - 1) / vandermonde(x) * np.dot(wts, vals))


# --------------------------------------------------------------- discrete


def enumerate_patterns(x):
    """All integer patterns below ``x`` as lists of rows (longest first)."""
    x = tuple(x)
    if len(x) == 1:
        yield []
        return
    ranges = [range(x[i], x[i + 1] + 1) for i in range(len(x) - 1)]

    def rows(i, acc):
        if i == len(ranges):
            yield tuple(acc)
            return
        for v in ranges[i]:
            acc.append(v)
            yield from rows(i + 1, acc)
            acc.pop()

    for y in rows(0, []):
        for rest in enumerate_patterns(y):
            yield [y] + rest


def check_discrete(max_n: int = 4, max_coord: int = 4, scales=(10, 20, 40)):
    count_bad = reldim_bad = sum_bad = checked = 0
    for n in range(1, max_n + 1):
        for x in combinations_with_replacement(range(max_coord + 1), n):
            pats = list(enumerate_patterns(x))
            if count_schemes(x) != len(pats):
                count_bad += 1
            for k in range(1, n):
                hist = {}
                for p in pats:
                    y = p[n - 1 - k]
                    hist[y] = hist.get(y, 0) + 1
                law = relative_dimension_distribution(x, k)
                if sum(law.values(), Fraction(0)) != 1:
                    sum_bad += 1
                for y, c in hist.items():
                    checked += 1
                    if relative_dimension(x, y) != Fraction(c, len(pats)) or law.get(y) != Fraction(c, len(pats)):
                        reldim_bad += 1
                if set(law) != set(hist):
                    reldim_bad += 1
    diffs = [
        scaling_limit_compare([0.0, 1.0, 2.0], 1, L, [[1.0]]).rows[0].abs_diff for L in scales
    ]
    decreasing = all(b < a for a, b in zip(diffs, diffs[1:]))
    return [
        _le(f"scheme counts vs enumeration (N<={max_n}, coords 0..{max_coord})", count_bad, 0),
        _le(f"relative dimensions vs enumeration ({checked} rows)", reldim_bad, 0),
        _le("relative dimensions sum to exactly 1", sum_bad, 0),
        Check(
            "scaling-limit differences strictly decrease",
            diffs[-1],
            diffs[0],
            decreasing,
            {"scales": list(scales), "differences": diffs},
        ),
    ]


# ----------------------------------------------------------------- suites


SUITES = ("splines", "kernel", "theorem", "volume", "hciz", "recurrence", "discrete")


def run_suite(name: str, n: int = 4, seed: int = 7, samples: int = 100_000, threads: int = 1) -> dict:
    """Run one suite (or ``"all"``) with the CLI's parameters and return a JSON-able report."""
    if name not in SUITES + ("all",):
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    if not 2 <= n <= MAX_CONTINUOUS_N:
        raise ResourceError(f"N={n} outside the desk-scale range 2..{MAX_CONTINUOUS_N}")
    names = SUITES if name == "all" else (name,)
    t0 = time.perf_counter()
    checks: list[Check] = []
    for s in names:
        if s == "splines":
            checks += check_spline_identities(seed=seed)
        elif s == "kernel":
            checks += check_kernel_base(range(2, n + 1), seed=seed)
        elif s == "theorem":
            x = default_spectrum(n)
            checks += check_rank_one_exact(range(2, n + 1), seed=seed)
            checks += check_rank_one_mc(x, samples, seed, threads)
            checks += check_interior([(x, k) for k in range(2, min(n, MAX_INTERIOR_K + 1))], samples, seed, threads)
            checks += check_normalization(min(n, 6), seed=seed)
            if n > 6:
                # the cell integral is minutes at N > 6; the moment determinant is not
                checks += check_normalization(seed=seed, method="moments", ns=range(7, n + 1))
        elif s == "volume":
            checks += check_volume([m for m in (3, 4) if m <= n] or [n], seed=seed)
        elif s == "hciz":
            checks += check_hciz(samples, seed, max_n=min(n, 4), threads=threads)
        elif s == "recurrence":
            checks += check_recurrence(max(n, 3), seed=seed)
            checks += check_column_reduction(max_n=n, seed=seed)
        elif s == "discrete":
            if n > MAX_DISCRETE_N and name != "all":
                raise ResourceError(f"discrete suite supports N <= {MAX_DISCRETE_N}")
            checks += check_discrete(max_n=min(n, MAX_DISCRETE_N))
    return {
        "suite": name,
        "params": {"n": n, "seed": seed, "samples": samples},
        "checks": [c.as_json() for c in checks],
        "pass": all(c.passed for c in checks),
        "runtime_s": round(time.perf_counter() - t0, 3),
    }
