"""Fourier grid, periodograms, and exact expected periodograms.

All spectral quantities live on the n Fourier frequencies
``omega_j = 2 pi j / n`` for ``j = -ceil(n/2)+1, ..., 0, ..., floor(n/2)``
and are returned in that (ascending-j) order.  Missing observations are
handled by modulation: series are multiplied by the 0/1 observation mask
before transforming, and model autocovariances are attenuated by the
mask's pair counts so that the expected periodogram of the modulated
series is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MaskError, SpectrumDomainError
from .series import ObservedSeries

# Expected-periodogram values below FLOOR_SCALE * c(0) are lifted to that
# floor before any log or ratio; values below -NEGATIVE_TOL abort instead.
FLOOR_SCALE = 1e-12
NEGATIVE_TOL = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """The n Fourier frequencies of a length-n series, ascending in j."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"grid length must be >= 1, got {self.n}")

    @property
    def indices(self) -> np.ndarray:
        """Signed Fourier indices ``-ceil(n/2)+1 .. floor(n/2)``."""
        half_up = (self.n + 1) // 2
        return np.arange(-half_up + 1, self.n // 2 + 1)

    @property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies ``2 pi j / n`` aligned with ``indices``."""
        return 2.0 * np.pi * self.indices / self.n

    @property
    def zero_position(self) -> int:
        """Position of ``omega = 0`` in the grid ordering."""
        return (self.n + 1) // 2 - 1


def to_grid_order(fft_values: np.ndarray) -> np.ndarray:
    """Reorder FFT-output values (j = 0..n-1) to ascending signed j."""
    fft_values = np.asarray(fft_values)
    n = fft_values.shape[0]
    return np.roll(fft_values, (n - 1) // 2, axis=0)


_to_grid_order = to_grid_order


def periodogram(y) -> np.ndarray:
    """Periodogram ``I_j = |sum_t y_t e^(-i omega_j t)|^2 / n``.

    ``y`` must be complete; values are returned on the ascending
    frequency grid and are nonnegative.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("periodogram needs a nonempty one-dimensional series")
    raw = np.abs(np.fft.fft(y)) ** 2 / y.size
    return _to_grid_order(raw)


def modulated_residual_periodogram(series: ObservedSeries, design,
                                   beta) -> np.ndarray:
    """Periodogram of the mask-modulated residuals ``g * (x - M beta)``.

    Unobserved entries contribute exactly zero regardless of the
    placeholder values stored there.
    """
    m_values = getattr(design, "values", design)
    m_values = np.asarray(m_values, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if m_values.shape[0] != series.n:
        raise ValueError(
            f"design has {m_values.shape[0]} rows for a series of "
            f"length {series.n}")
    if beta.shape != (m_values.shape[1],):
        raise ValueError(
            f"coefficient vector of length {beta.size} does not match "
            f"{m_values.shape[1]} design columns")
    resid = np.where(series.mask, series.values - m_values @ beta, 0.0)
    return periodogram(resid)


def mask_pair_counts(g) -> np.ndarray:
    """Number of observed pairs at each lag, ``sum_t g_t g_(t+tau)``.

    Computed via one FFT-based autocorrelation; the result is exact
    because the mask is binary.
    """
    g = np.asarray(g)
    if g.dtype != bool and not np.all((g == 0) | (g == 1)):
        raise MaskError("modulating sequence must be binary (0/1)")
    g = g.astype(float)
    n = g.size
    spec = np.fft.rfft(g, 2 * n)
    counts = np.fft.irfft(spec * np.conj(spec), 2 * n)[:n]
    return np.rint(counts)


def modulated_acv(acv_seq, g) -> np.ndarray:
    """Expected biased sample autocovariance of the modulated process.

    ``c~(tau) = c(tau) * (1/n) * sum_t g_t g_(t+tau)``; with a complete
    mask this is the familiar ``(1 - tau/n)`` taper.
    """
    acv_seq = np.asarray(acv_seq, dtype=float)
    g = np.asarray(g)
    if acv_seq.size != g.size:
        raise ValueError(
            f"autocovariance length {acv_seq.size} does not match "
            f"mask length {g.size}")
    return acv_seq * mask_pair_counts(g) / g.size


def taper_acv(acv_seq) -> np.ndarray:
    """Complete-data weighting ``(1 - tau/n) * c(tau)``."""
    acv_seq = np.asarray(acv_seq, dtype=float)
    n = acv_seq.size
    return acv_seq * (1.0 - np.arange(n) / n)


def expected_periodogram(weighted_acv, *, floor_scale: float = FLOOR_SCALE,
                         negative_tol: float = NEGATIVE_TOL) -> np.ndarray:
    """Expected periodogram from an already-weighted autocovariance.

    ``f(omega_j) = 2 Re[sum_tau cbar(tau) e^(-i omega_j tau)] - cbar(0)``
    where ``cbar`` is either the ``(1 - tau/n)``-tapered sequence
    (complete data) or the pair-count-attenuated sequence (missing
    data).  One FFT of length exactly n; values are returned on the
    ascending grid, floored at ``floor_scale * cbar(0)``.

    Raises
    ------
    SpectrumDomainError
        If any value is more negative than ``-negative_tol``, which
        signals an invalid autocovariance rather than round-off.
    """
    cbar = np.asarray(weighted_acv, dtype=float)
    if cbar.ndim != 1 or cbar.size == 0:
        raise ValueError("expected a nonempty one-dimensional "
                         "autocovariance sequence")
    f = 2.0 * np.fft.fft(cbar).real - cbar[0]
    low = f.min()
    if low < -negative_tol:
        raise SpectrumDomainError(
            f"expected periodogram reached {low:.3e}, below the "
            f"-{negative_tol:.1e} tolerance; the autocovariance sequence "
            f"is not valid")
    floor = floor_scale * cbar[0]
    if floor > 0.0:
        np.clip(f, floor, None, out=f)
    return _to_grid_order(f)


def expected_periodogram_complete(acv_seq, **kwargs) -> np.ndarray:
    """Expected periodogram of a fully observed series."""
    return expected_periodogram(taper_acv(acv_seq), **kwargs)


def expected_periodogram_modulated(acv_seq, g, **kwargs) -> np.ndarray:
    """Expected periodogram of a mask-modulated series."""
    return expected_periodogram(modulated_acv(acv_seq, g), **kwargs)
