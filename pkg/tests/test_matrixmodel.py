import mpmath
import numpy as np
import pytest
from scipy import integrate, stats

from gtcorners.density import CornerDensity, chamber_box_integral, hciz
from gtcorners.errors import DimensionError, RangeError
from gtcorners.geometry import interlaces, pattern_in_polytope
from gtcorners.matrixmodel import (
    RandomStream,
    corner,
    gt_pattern_of,
    haar_unitaries,
    haar_unitary,
    hermitian_spectrum,
    laplace_mc,
    orbit_sample,
    orbit_samples,
    sample_corner_spectra,
    sample_patterns,
)
from gtcorners.splines import upper_tail


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


# ------------------------------------------------------------------- Haar


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_unitarity(n):
    u = haar_unitaries(n, 200, RandomStream(3))
    eye = np.eye(n)
    err = np.abs(u @ np.conj(np.swapaxes(u, 1, 2)) - eye).max()
    assert err < 1e-12


def test_one_by_one_is_phase():
    u = haar_unitary(1, RandomStream(5))
    assert u.shape == (1, 1)
    assert abs(abs(u[0, 0]) - 1) < 1e-14


@pytest.mark.parametrize("n", [2, 3, 6])
def test_haar_first_moment(n):
    u = haar_unitaries(n, 100_000, RandomStream(11))
    w = np.abs(u[:, 0, 0]) ** 2
    se = w.std(ddof=1) / np.sqrt(w.size)
    assert abs(w.mean() - 1 / n) < 3 * se


def test_haar_two_by_two_entry_is_uniform():
    # for Haar U(2), |U_11|^2 is uniform on [0, 1]
    u = haar_unitaries(2, 50_000, RandomStream(12))
    w = np.abs(u[:, 0, 0]) ** 2
    assert stats.kstest(w, "uniform").pvalue > 0.01


def test_haar_phases_uniform():
    # without the phase fix the diagonal phases of Q are biased
    u = haar_unitaries(3, 50_000, RandomStream(13))
    ang = np.angle(u[:, 0, 0])
    assert stats.kstest((ang + np.pi) / (2 * np.pi), "uniform").pvalue > 0.01


def test_left_invariance(rng):
    x = np.array([0.0, 1.0, 3.0, 7.0])
    w = haar_unitary(4, RandomStream(99))
    h = orbit_samples(x, 10_000, RandomStream(1))
    g = w @ orbit_samples(x, 10_000, RandomStream(2)) @ w.conj().T
    for f in (lambda m: m[:, 0, 0].real, lambda m: np.abs(m[:, 0, 1]) ** 2):
        a, b = f(h), f(g)
        se = np.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
        assert abs(a.mean() - b.mean()) < 4 * se


def test_stream_determinism():
    a = haar_unitaries(4, 10, RandomStream(7, 2))
    b = haar_unitaries(4, 10, RandomStream(7, 2))
    c = haar_unitaries(4, 10, RandomStream(7, 3))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# ------------------------------------------------------------------- orbit


def test_orbit_sample_spectrum_and_trace():
    x = np.array([-1.0, 0.5, 2.0, 2.0, 4.0])
    h = orbit_sample(x, RandomStream(4))
    assert np.abs(h - h.conj().T).max() == 0
    np.testing.assert_allclose(hermitian_spectrum(h), x, atol=1e-10)
    assert abs(np.trace(h).real - x.sum()) < 1e-10


def test_central_orbit():
    h = orbit_sample([2.5, 2.5, 2.5], RandomStream(8))
    np.testing.assert_allclose(h, 2.5 * np.eye(3), atol=1e-12)


# ------------------------------------------------------------------ corner


def test_corner_examples(rng):
    h = random_hermitian(rng, 4)
    assert np.array_equal(corner(h, 4), h)
    assert corner(h, 1).shape == (1, 1) and corner(h, 1)[0, 0] == h[0, 0]
    np.testing.assert_array_equal(corner(np.diag([0.0, 1, 2, 3]), 2), np.diag([0.0, 1]))
    np.testing.assert_array_equal(corner(corner(h, 3), 2), corner(h, 2))
    with pytest.raises(DimensionError):
        corner(h, 0)
    with pytest.raises(DimensionError):
        corner(h, 5)


# ---------------------------------------------------------------- spectrum


def test_spectrum_examples():
    np.testing.assert_allclose(hermitian_spectrum(np.diag([3.0, -1.0, 2.0])), [-1, 2, 3])
    np.testing.assert_allclose(hermitian_spectrum(np.array([[0, 1], [1, 0]])), [-1, 1], atol=1e-15)


def test_spectrum_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_spectrum(np.array([[0, 1], [0, 0]], dtype=float))
    with pytest.raises(DimensionError):
        hermitian_spectrum(np.ones((2, 3)))


def test_spectrum_against_high_precision(rng):
    for n in (3, 6, 10):
        h = random_hermitian(rng, n)
        with mpmath.workdps(40):
            ev = mpmath.eighe(mpmath.matrix(h.tolist()), eigvals_only=True)
            ref = np.sort([float(v) for v in ev])
        assert np.abs(hermitian_spectrum(h) - ref).max() <= 1e-12 * np.linalg.norm(h, 2)


def test_corner_spectra_interlace(rng):
    for _ in range(50):
        h = random_hermitian(rng, 6)
        assert interlaces(hermitian_spectrum(corner(h, 5)), hermitian_spectrum(h))


# ----------------------------------------------------------------- patterns


def test_pattern_of_diagonal():
    p = gt_pattern_of(np.diag([0.0, 1.0, 2.0]))
    assert p.rows == ((0.0, 1.0), (0.0,))


def test_pattern_in_polytope_always(rng):
    x = np.array([0.0, 0.4, 2.0, 2.1, 5.0])
    for s in range(20):
        h = orbit_sample(x, RandomStream(s))
        assert pattern_in_polytope(gt_pattern_of(h), hermitian_spectrum(h))


def test_sample_patterns_rows_interlace():
    x = np.array([0.0, 1.0, 3.0, 7.0])
    rows = sample_patterns(x, 500, seed=3, chunk=128)
    assert [r.shape for r in rows] == [(500, 1), (500, 2), (500, 3)]
    for s in range(500):
        pat = [rows[k][s] for k in range(2, -1, -1)]
        assert pattern_in_polytope(pat, x + np.array([-1e-12, 0, 0, 1e-12]))


def test_row_mean_matches_density():
    # E[a_1] for K=2 equals x_1 + int P(a_1 > t) dt, and P(a_1 > t) = mass of [t, inf)^2
    x = np.array([0.0, 1.0, 3.0, 7.0])
    d = CornerDensity(x, 2)
    tail = lambda t: chamber_box_integral(d, lower=[t, t])
    mean, _ = integrate.quad(tail, x[0], x[-1], points=x[1:-1], epsabs=1e-10)
    mean += x[0]
    pts = sample_corner_spectra(x, 2, 100_000, seed=21)
    se = pts[:, 0].std(ddof=1) / np.sqrt(len(pts))
    assert abs(pts[:, 0].mean() - mean) < 3 * se


def test_rank_one_marginal_ks():
    x = np.array([0.0, 1.0, 3.0, 7.0])
    a = sample_corner_spectra(x, 1, 20_000, seed=5)[:, 0]
    res = stats.kstest(a, lambda t: 1.0 - upper_tail(t, x))
    assert res.statistic < 1.63 / np.sqrt(a.size)


def test_sampling_independent_of_threads():
    x = np.array([0.0, 1.0, 3.0, 7.0])
    a = sample_corner_spectra(x, 2, 5000, seed=9, threads=1, chunk=1000)
    b = sample_corner_spectra(x, 2, 5000, seed=9, threads=3, chunk=1000)
    assert np.array_equal(a, b)
    c = sample_corner_spectra(x, 2, 5000, seed=10, threads=1, chunk=1000)
    assert not np.array_equal(a, c)


# ------------------------------------------------------------------ Laplace


def test_laplace_trivial_cases():
    est = laplace_mc([0.0, 1.0, 2.0], np.zeros((3, 3)), 100, seed=1)
    assert est.value == 1.0 and est.stderr_real == 0.0 and est.stderr_imag == 0.0
    z = 0.3 - 0.2j
    est = laplace_mc([1.7], np.array([[z]]), 50, seed=1)
    assert est.value == pytest.approx(np.exp(z * 1.7), rel=1e-14)
    assert est.stderr_real < 1e-15 and est.stderr_imag < 1e-15


def test_laplace_matches_hciz():
    x = np.array([0.0, 1.0, 2.0])
    z = np.diag([0.3, 0.1, 0.0])
    est = laplace_mc(x, z, 100_000, seed=17)
    ref = hciz(x, np.diag(z))
    assert abs(est.value.real - ref.real) < 3 * est.stderr_real
    assert abs(est.value.imag) < 1e-12


def test_laplace_errors():
    with pytest.raises(RangeError):
        laplace_mc([0.0, 100.0], np.diag([10.0, 0.0]), 10, seed=1)
    with pytest.raises(DimensionError):
        laplace_mc([0.0, 1.0], np.zeros((3, 3)), 10, seed=1)
    with pytest.raises(ValueError):
        laplace_mc([0.0, 1.0], np.zeros((2, 2)), 0, seed=1)
