"""Random matrices on a unitary orbit and their corners.

Samples are drawn in fixed-size chunks, chunk ``c`` from the Philox stream
``(seed, c)``, so the output does not depend on how many threads are used.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from gtcorners.errors import DimensionError, RangeError
from gtcorners.geometry import GTPattern, as_spectrum

CHUNK = 8192
# exp() overflows just above 709
_EXP_LIMIT = 700.0


@dataclass
class RandomStream:
    """Reproducible generator identified by ``(seed, stream)``."""

    seed: int
    stream: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        self.generator = np.random.Generator(np.random.Philox(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RandomStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return RandomStream(0 if rng is None else int(rng)).generator


def haar_unitaries(n: int, count: int, rng) -> np.ndarray:
    """``count`` independent Haar unitaries, shape ``(count, n, n)``.

    QR of a complex Ginibre matrix, with each column of Q rotated by the
    phase of the matching diagonal entry of R. Without that fix the law is
    not Haar.
    """
    if n < 1:
        raise DimensionError("N must be >= 1")
    gen = _as_generator(rng)
    g = (gen.standard_normal((count, n, n)) + 1j * gen.standard_normal((count, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r, axis1=1, axis2=2)
    phase = diag / np.abs(diag)
    return q * phase[:, None, :]


def haar_unitary(n: int, rng) -> np.ndarray:
    return haar_unitaries(n, 1, rng)[0]


def orbit_samples(x, count: int, rng) -> np.ndarray:
    """``U diag(x) U*`` for ``count`` Haar unitaries."""
    x = as_spectrum(x)
    u = haar_unitaries(x.size, count, rng)
    h = (u * x[None, None, :]) @ np.conj(np.swapaxes(u, 1, 2))
    # symmetrise away the roundoff so the result is exactly self-adjoint
    return 0.5 * (h + np.conj(np.swapaxes(h, 1, 2)))


def orbit_sample(x, rng) -> np.ndarray:
    """One matrix from the orbital measure of ``diag(x)``."""
    return orbit_samples(x, 1, rng)[0]


def corner(h, k: int) -> np.ndarray:
    """Upper-left ``k x k`` block (works on stacks of matrices too)."""
    h = np.asarray(h)
    n = h.shape[-1]
    if not 1 <= k <= n:
        raise DimensionError(f"corner size {k} outside 1..{n}")
    return h[..., :k, :k]


def _check_hermitian(h: np.ndarray):
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise DimensionError(f"expected square matrices, got shape {h.shape}")
    asym = np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2)))) if h.size else 0.0
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    if asym > 1e-12 * scale:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3g})")


def hermitian_spectrum(h) -> np.ndarray:
    """Ascending eigenvalues (stacks allowed)."""
    h = np.asarray(h)
    _check_hermitian(h)
    return np.linalg.eigvalsh(h)


def gt_pattern_of(h) -> GTPattern:
    """Spectra of the corners of sizes N-1, ..., 1."""
    h = np.asarray(h)
    _check_hermitian(h)
    n = h.shape[-1]
    if n < 2:
        raise DimensionError("a pattern needs N >= 2")
    rows = tuple(tuple(np.linalg.eigvalsh(h[:k, :k]).tolist()) for k in range(n - 1, 0, -1))
    return GTPattern(rows)


def _chunks(total: int, chunk: int):
    return [(c, min(chunk, total - c * chunk)) for c in range((total + chunk - 1) // chunk)]


def _run_chunks(fn, total: int, threads: int, chunk: int):
    jobs = _chunks(total, chunk)
    if threads <= 1:
        return [fn(c, size) for c, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def sample_corner_spectra(
    x, k: int, samples: int, seed: int, threads: int = 1, chunk: int = CHUNK
) -> np.ndarray:
    """Eigenvalues of the K-corner for ``samples`` orbit matrices, shape ``(samples, K)``."""
    x = as_spectrum(x)
    n = x.size
    if not 1 <= k <= n:
        raise DimensionError(f"corner size {k} outside 1..{n}")

    def work(c, size):
        u = haar_unitaries(n, size, RandomStream(seed, c))[:, :k, :]
        hk = (u * x[None, None, :]) @ np.conj(np.swapaxes(u, 1, 2))
        return np.linalg.eigvalsh(0.5 * (hk + np.conj(np.swapaxes(hk, 1, 2))))

    return np.concatenate(_run_chunks(work, samples, threads, chunk), axis=0)


def sample_patterns(
    x, samples: int, seed: int, threads: int = 1, chunk: int = CHUNK
) -> list[np.ndarray]:
    """Full corner patterns; entry ``k - 1`` of the result is the ``(samples, k)`` row-k array."""
    x = as_spectrum(x)
    n = x.size

    def work(c, size):
        h = orbit_samples(x, size, RandomStream(seed, c))
        return [np.linalg.eigvalsh(h[:, :k, :k]) for k in range(1, n)]

    parts = _run_chunks(work, samples, threads, chunk)
    return [np.concatenate([p[k] for p in parts], axis=0) for k in range(n - 1)]


@dataclass(frozen=True)
class LaplaceEstimate:
    value: complex
    stderr_real: float
    stderr_imag: float
    samples: int


def _jackknife_mean_se(v: np.ndarray) -> float:
    n = v.size
    if n < 2:
        return 0.0
    loo = (v.sum() - v) / (n - 1)
    return float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))


def laplace_mc(x, z, samples: int, seed: int, threads: int = 1) -> LaplaceEstimate:
    """Monte Carlo mean of ``exp(Tr(Z H))`` over the orbit of ``diag(x)``."""
    x = as_spectrum(x)
    n = x.size
    z = np.asarray(z, dtype=complex)
    if z.shape != (n, n):
        raise DimensionError(f"Z must be {n} x {n}, got {z.shape}")
    if samples < 1:
        raise ValueError("need at least one sample")
    bound = np.linalg.norm(z, 2) * np.sum(np.abs(x))
    if bound > _EXP_LIMIT:
        raise RangeError(
            f"|Tr(ZH)| may reach {bound:.3g}; exp overflows, rescale Z or X"
        )

    def work(c, size):
        h = orbit_samples(x, size, RandomStream(seed, c))
        return np.exp(np.einsum("ij,sji->s", z, h))

    v = np.concatenate(_run_chunks(work, samples, threads, CHUNK))
    return LaplaceEstimate(
        value=complex(v.mean()),
        stderr_real=_jackknife_mean_se(v.real),
        stderr_imag=_jackknife_mean_se(v.imag),
        samples=samples,
    )
