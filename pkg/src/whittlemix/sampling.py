"""Exact simulation of stationary Gaussian series.

Draws are produced by circulant embedding: the autocovariance sequence
``c(0..L-1)`` is wrapped onto a circle of length ``2L - 2``, whose
eigenvalues are the FFT of the wrapped sequence.  When all eigenvalues
are nonnegative the draw is exact and costs one FFT.  The embedding
length starts at the series length and doubles (up to three times) until
the spectrum is nonnegative; if no embedding works, a dense Cholesky
factorization is used for short series.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cholesky, toeplitz

from .covariance import CovarianceSpec, acv_sequence
from .errors import FactorizationError

# Circulant eigenvalues more negative than this abort the embedding.
_NEGATIVE_EIG_TOL = 1e-9
# Dense fallback is only attempted below this length.
_DENSE_FALLBACK_MAX_N = 4096


def circulant_spectrum(acv_head: np.ndarray) -> np.ndarray:
    """Eigenvalues of the circulant embedding of ``acv_head`` (length L).

    The embedded circle is ``[c0, .., c_{L-1}, c_{L-2}, .., c_1]`` of
    length ``2L - 2``; its eigenvalues are the (real) FFT of that ring.
    """
    acv_head = np.asarray(acv_head, dtype=float)
    if acv_head.size < 2:
        raise ValueError("circulant embedding needs at least two lags")
    ring = np.concatenate([acv_head, acv_head[-2:0:-1]])
    return np.fft.fft(ring).real


def _draw_from_spectrum(lam: np.ndarray, n: int,
                        rng: np.random.Generator) -> np.ndarray:
    m = lam.size
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    x = np.fft.fft(z * np.sqrt(lam / m))
    return np.ascontiguousarray(x.real[:n])


def simulate_gaussian_process(spec: CovarianceSpec, n: int, seed) -> np.ndarray:
    """One exact draw of length ``n`` from the stationary Gaussian law
    with autocovariance ``acv_sequence(spec, n)``.

    Parameters
    ----------
    spec : CovarianceSpec
        Covariance model of the process.
    n : int
        Series length, >= 1.
    seed : int, sequence of int, or numpy.random.Generator
        Source of randomness.  Passing the same seed reproduces the draw
        bit for bit.

    Raises
    ------
    FactorizationError
        If no embedding up to eight times the series length is positive
        semi-definite and the series is too long for the dense fallback.
    """
    if n < 1:
        raise ValueError(f"series length must be >= 1, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(seed)

    if n == 1:
        return rng.standard_normal(1) * np.sqrt(spec.total_variance)

    for doubling in range(4):
        length = n * (2 ** doubling)
        lam = circulant_spectrum(acv_sequence(spec, length))
        if lam.min() >= -_NEGATIVE_EIG_TOL:
            return _draw_from_spectrum(np.clip(lam, 0.0, None), n, rng)

    if n > _DENSE_FALLBACK_MAX_N:
        raise FactorizationError(
            f"no positive circulant embedding up to length {8 * n} and the "
            f"series (n={n}) is too long for the dense fallback "
            f"(limit {_DENSE_FALLBACK_MAX_N})")
    factor = _dense_factor(spec, n)
    return factor @ rng.standard_normal(n)


def _dense_factor(spec: CovarianceSpec, n: int) -> np.ndarray:
    """Lower Cholesky factor of the dense covariance, with jitter escalation."""
    base = toeplitz(acv_sequence(spec, n))
    jitter = 1e-10 * spec.total_variance
    attempt = 0.0
    for _ in range(4):
        try:
            return cholesky(base + attempt * np.eye(n), lower=True)
        except np.linalg.LinAlgError:
            attempt = jitter if attempt == 0.0 else attempt * 10.0
    raise FactorizationError(
        f"dense covariance factorization failed for n={n} even after "
        f"jitter escalation up to {attempt}")
