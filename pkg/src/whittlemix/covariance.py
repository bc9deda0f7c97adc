"""Stationary autocovariance families for the random error term.

The error process is zero-mean and stationary.  Its autocovariance at
integer lag ``tau`` is a nugget ``c0`` (variance present at lag 0 only)
plus a correlated component of variance ``c1`` whose decay is set by the
family tag:

- ``exponential``: ``c1 * exp(-tau / lambda_m)``;
- ``matern``: the Matern kernel with length-scale ``lambda_m`` and
  smoothness ``nu``, evaluated through the modified Bessel function of
  the second kind;
- ``matern_periodic``: the Matern kernel multiplied by the periodic
  kernel ``exp(-2 * sin^2(pi * tau / period) / lambda_p^2)`` with a
  fixed period.

The exponential family is kept distinct from Matern at ``nu = 1/2``:
the two differ by a factor ``sqrt(2)`` inside the length-scale, and the
baseline estimation method is defined in terms of the plain exponential
form.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln, kve

from .errors import ParameterDomainError

EXPONENTIAL = "exponential"
MATERN = "matern"
MATERN_PERIODIC = "matern_periodic"

FAMILIES = (EXPONENTIAL, MATERN, MATERN_PERIODIC)

# Matern arguments below this threshold are treated as the tau -> 0 limit
# of the correlated component (limit continuity guard).
_TINY_ARGUMENT = 1e-12

_LOG2 = float(np.log(2.0))


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterDomainError(message)


@dataclass(frozen=True)
class CovarianceSpec:
    """Parameters of one stationary autocovariance family.

    Parameters
    ----------
    family : str
        One of ``"exponential"``, ``"matern"``, ``"matern_periodic"``.
    c0 : float
        Nugget variance, >= 0.  Added at lag 0 only.
    c1 : float
        Partial sill variance, >= 0.  Total variance is ``c0 + c1``.
    lambda_m : float
        Length-scale in time steps, > 0.
    nu : float
        Smoothness, > 0.  Used by the Matern families only.
    lambda_p : float
        Length-scale of the periodic kernel, > 0.  Matern-periodic only.
    period : float
        Period of the periodic kernel in time steps, > 0.  Fixed, never
        estimated.  Matern-periodic only.
    """

    family: str
    c0: float
    c1: float
    lambda_m: float
    nu: float = 1.0
    lambda_p: float = 1.0
    period: float = 12.0

    def __post_init__(self) -> None:
        _require(self.family in FAMILIES,
                 f"unknown covariance family {self.family!r}; "
                 f"expected one of {FAMILIES}")
        _require(np.isfinite(self.c0) and self.c0 >= 0.0,
                 f"nugget c0 must be finite and >= 0, got {self.c0}")
        _require(np.isfinite(self.c1) and self.c1 >= 0.0,
                 f"partial sill c1 must be finite and >= 0, got {self.c1}")
        _require(np.isfinite(self.lambda_m) and self.lambda_m > 0.0,
                 f"length-scale lambda_m must be > 0, got {self.lambda_m}")
        if self.family in (MATERN, MATERN_PERIODIC):
            _require(np.isfinite(self.nu) and self.nu > 0.0,
                     f"smoothness nu must be > 0, got {self.nu}")
        if self.family == MATERN_PERIODIC:
            _require(np.isfinite(self.lambda_p) and self.lambda_p > 0.0,
                     f"periodic length-scale lambda_p must be > 0, "
                     f"got {self.lambda_p}")
            _require(np.isfinite(self.period) and self.period > 0.0,
                     f"period must be > 0, got {self.period}")

    @property
    def total_variance(self) -> float:
        """Variance at lag 0, ``c0 + c1``."""
        return self.c0 + self.c1

    @property
    def free_parameter_names(self) -> tuple[str, ...]:
        """Names of the parameters estimated for this family, in order."""
        if self.family == EXPONENTIAL:
            return ("c0", "c1", "lambda_m")
        if self.family == MATERN:
            return ("c0", "c1", "lambda_m", "nu")
        return ("c0", "c1", "lambda_m", "nu", "lambda_p")

    def parameter_values(self) -> np.ndarray:
        """Values of the free parameters, aligned with their names."""
        return np.array([getattr(self, name)
                         for name in self.free_parameter_names])

    def with_parameters(self, values) -> "CovarianceSpec":
        """Return a copy with the free parameters replaced by ``values``."""
        names = self.free_parameter_names
        values = np.asarray(values, dtype=float)
        if values.shape != (len(names),):
            raise ParameterDomainError(
                f"expected {len(names)} parameter values for family "
                f"{self.family!r}, got shape {values.shape}")
        return replace(self, **dict(zip(names, values.tolist())))


def _matern_component(c1: float, lambda_m: float, nu: float,
                      tau: np.ndarray) -> np.ndarray:
    """Correlated part of the Matern autocovariance at lags ``tau`` > 0.

    Evaluated in log space through the exponentially scaled Bessel
    function so that large arguments underflow cleanly to zero and large
    smoothness values cannot overflow the ``x**nu`` prefactor.
    """
    if c1 == 0.0:
        return np.zeros_like(tau)
    x = 2.0 * np.sqrt(nu) * tau / lambda_m
    out = np.empty_like(x)
    tiny = x < _TINY_ARGUMENT
    out[tiny] = c1
    xs = x[~tiny]
    if xs.size:
        with np.errstate(divide="ignore"):
            log_val = (np.log(c1) + (1.0 - nu) * _LOG2 - gammaln(nu)
                       + nu * np.log(xs) + np.log(kve(nu, xs)) - xs)
        out[~tiny] = np.exp(log_val)
    return out


def _periodic_kernel(lambda_p: float, period: float,
                     tau: np.ndarray) -> np.ndarray:
    s = np.sin(np.pi * tau / period)
    return np.exp(-2.0 * s * s / (lambda_p * lambda_p))


def acv(spec: CovarianceSpec, tau) -> np.ndarray | float:
    """Autocovariance of ``spec`` at nonnegative lag(s) ``tau``.

    ``tau`` may be a scalar or an array; integer lags are the normal
    use, but any nonnegative real lag is accepted (the continuous form
    is exercised directly by the numerical checks of the Bessel path).

    Returns ``c0 + c1`` at ``tau = 0`` and the family's correlated value
    at ``tau > 0``.
    """
    arr = np.asarray(tau, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0):
        raise ParameterDomainError("lags must be finite and >= 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)

    out = np.empty_like(arr)
    at_zero = arr == 0.0
    out[at_zero] = spec.c0 + spec.c1
    pos = arr[~at_zero]
    if pos.size:
        if spec.family == EXPONENTIAL:
            vals = spec.c1 * np.exp(-pos / spec.lambda_m)
        else:
            vals = _matern_component(spec.c1, spec.lambda_m, spec.nu, pos)
            if spec.family == MATERN_PERIODIC:
                vals = vals * _periodic_kernel(spec.lambda_p, spec.period, pos)
        if not np.all(np.isfinite(vals)):
            raise ParameterDomainError(
                f"autocovariance is not finite at {spec}; the smoothness "
                f"or scale is outside the numerically evaluable range")
        out[~at_zero] = vals

    return float(out[0]) if scalar else out


def acv_sequence(spec: CovarianceSpec, n: int) -> np.ndarray:
    """Autocovariance at integer lags ``0 .. n-1`` as a length-``n`` vector."""
    if n < 1:
        raise ParameterDomainError(f"sequence length must be >= 1, got {n}")
    return np.asarray(acv(spec, np.arange(n, dtype=float)))
