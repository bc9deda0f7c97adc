"""Construction of the fixed-term design matrix.

The mean of the response is a linear combination of declared covariate
columns: an intercept, a linear trend scaled to (1/n, ..., 1), a
sine/cosine pair for seasonal variation, a cyclic cubic spline basis for
temporary trends, and a lagged-response column that aggregates an
exogenous driver through a normalized impulse-response weight curve.
Time is indexed t = 1..n throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DesignError, ParameterDomainError


@dataclass(frozen=True)
class Intercept:
    """A column of ones."""


@dataclass(frozen=True)
class LinearTrend:
    """A column (1/n, 2/n, ..., 1)."""


@dataclass(frozen=True)
class SeasonalPair:
    """Columns sin(2 pi t / period) and cos(2 pi t / period)."""

    period: float = 12.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.period) and self.period > 0):
            raise DesignError(f"seasonal period must be > 0, got {self.period}")


@dataclass(frozen=True)
class CyclicSplines:
    """``count`` cyclic cubic spline basis columns spanning the sample."""

    count: int

    def __post_init__(self) -> None:
        if self.count < 3:
            raise DesignError(
                f"cyclic spline basis needs at least 3 functions, "
                f"got {self.count}")


@dataclass(frozen=True)
class IrfCovariate:
    """One column aggregating an exogenous series over a lag window."""

    window: int = 120

    def __post_init__(self) -> None:
        if self.window < 1:
            raise DesignError(
                f"impulse-response window must be >= 1, got {self.window}")


Component = Intercept | LinearTrend | SeasonalPair | CyclicSplines | IrfCovariate


@dataclass(frozen=True)
class IrfParams:
    """Shape and rate of the impulse-response weight curve.

    The weight at lag ``tau`` is proportional to
    ``(tau + 1)^(s - 1) * exp(-a * (tau + 1))``.
    """

    s: float
    a: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.s) and self.s > 0):
            raise ParameterDomainError(f"shape s must be > 0, got {self.s}")
        if not (np.isfinite(self.a) and self.a > 0):
            raise ParameterDomainError(f"rate a must be > 0, got {self.a}")


@dataclass(frozen=True)
class ExogenousSeries:
    """Complete exogenous driver aligned to the response grid.

    The last ``n`` entries correspond to response times ``1..n``; the
    leading entries supply the lag history the impulse-response window
    needs at early times, so the length must be at least
    ``n + window - 1``.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if values.ndim != 1 or values.size == 0:
            raise DesignError("exogenous series must be a nonempty vector")
        if not np.all(np.isfinite(values)):
            raise DesignError("exogenous series must be complete "
                              "(no missing or non-finite entries)")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def as_exogenous(exog) -> ExogenousSeries:
    if isinstance(exog, ExogenousSeries):
        return exog
    return ExogenousSeries(np.asarray(exog, dtype=float))


@dataclass(frozen=True)
class DesignSpec:
    """Ordered list of fixed-term components."""

    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        components = tuple(self.components)
        object.__setattr__(self, "components", components)
        if not components:
            raise DesignError("design needs at least one component")
        kinds = [type(c) for c in components]
        if kinds.count(Intercept) > 1 or kinds.count(LinearTrend) > 1:
            raise DesignError("intercept and trend may appear at most once")
        if Intercept in kinds and CyclicSplines in kinds:
            raise DesignError(
                "an intercept is redundant alongside a cyclic spline basis; "
                "declare one or the other")
        if kinds.count(IrfCovariate) > 1:
            raise DesignError("at most one exogenous-response column "
                              "is supported")

    @property
    def n_columns(self) -> int:
        total = 0
        for comp in self.components:
            if isinstance(comp, SeasonalPair):
                total += 2
            elif isinstance(comp, CyclicSplines):
                total += comp.count
            else:
                total += 1
        return total

    @property
    def irf_component(self) -> IrfCovariate | None:
        for comp in self.components:
            if isinstance(comp, IrfCovariate):
                return comp
        return None

    @property
    def needs_exogenous(self) -> bool:
        return self.irf_component is not None

    @property
    def column_labels(self) -> tuple[str, ...]:
        labels: list[str] = []
        for comp in self.components:
            if isinstance(comp, Intercept):
                labels.append("intercept")
            elif isinstance(comp, LinearTrend):
                labels.append("trend")
            elif isinstance(comp, SeasonalPair):
                labels.extend(["seasonal_sin", "seasonal_cos"])
            elif isinstance(comp, CyclicSplines):
                labels.extend(f"spline_{j + 1}" for j in range(comp.count))
            else:
                labels.append("exog_response")
        return tuple(labels)


@dataclass(frozen=True)
class DesignMatrix:
    """Realized n x m design matrix with column labels."""

    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if values.ndim != 2:
            raise DesignError("design matrix must be two-dimensional")
        if values.shape[1] != len(self.labels):
            raise DesignError("column labels must match the column count")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


def irf_weights(gamma: IrfParams, window: int) -> np.ndarray:
    """Normalized impulse-response weights at lags ``0 .. window-1``.

    Computed in log space, so extreme shape or rate values cannot
    overflow; the weights always sum to exactly 1 after normalization.
    """
    if window < 1:
        raise DesignError(f"window must be >= 1, got {window}")
    lag_plus_one = np.arange(1, window + 1, dtype=float)
    log_w = (gamma.s - 1.0) * np.log(lag_plus_one) - gamma.a * lag_plus_one
    log_w -= log_w.max()
    w = np.exp(log_w)
    total = w.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise ParameterDomainError(
            f"impulse-response weights degenerate for s={gamma.s}, "
            f"a={gamma.a}")
    return w / total


def irf_column(exog, gamma: IrfParams, window: int, n: int) -> np.ndarray:
    """Lagged-response column ``m_t = sum_tau w_tau * p(t - tau)``, t = 1..n."""
    exog = as_exogenous(exog)
    required = n + window - 1
    if len(exog) < required:
        raise DesignError(
            f"exogenous series too short: the lag window needs at least "
            f"{required} values ({n} response times plus {window - 1} of "
            f"history), got {len(exog)}")
    w = irf_weights(gamma, window)
    full = np.convolve(exog.values, w, mode="valid")
    return full[-n:]


def cyclic_spline_basis(n: int, count: int) -> np.ndarray:
    """``count`` cyclic cubic spline basis functions sampled at t = 1..n.

    Knots are evenly spaced over [0, n] (``count + 1`` knots, the last
    identified with the first by periodicity).  Basis function ``j``
    interpolates the indicator of knot ``j``; the basis therefore sums
    to one at every time (the periodic interpolant of a constant is that
    constant).
    """
    if count < 3:
        raise DesignError(
            f"cyclic spline basis needs at least 3 functions, got {count}")
    if n < count + 1:
        raise DesignError(
            f"series too short for {count} spline functions; "
            f"need n >= {count + 1}, got {n}")
    knots = np.linspace(0.0, float(n), count + 1)
    t = np.arange(1, n + 1, dtype=float)
    basis = np.empty((n, count))
    for j in range(count):
        y = np.zeros(count + 1)
        y[j] = 1.0
        if j == 0:
            y[-1] = 1.0
        basis[:, j] = CubicSpline(knots, y, bc_type="periodic")(t)
    return basis


def build_design(spec: DesignSpec, n: int, *, exog=None,
                 gamma: IrfParams | None = None) -> DesignMatrix:
    """Realize the design matrix for ``n`` times.

    ``exog`` and ``gamma`` are required exactly when ``spec`` contains
    an exogenous-response component.
    """
    if n < 1:
        raise DesignError(f"design length must be >= 1, got {n}")
    if spec.needs_exogenous:
        if exog is None:
            raise DesignError("this design needs an exogenous series")
        if gamma is None:
            raise DesignError("this design needs impulse-response parameters")
    t = np.arange(1, n + 1, dtype=float)
    columns: list[np.ndarray] = []
    for comp in spec.components:
        if isinstance(comp, Intercept):
            columns.append(np.ones(n))
        elif isinstance(comp, LinearTrend):
            columns.append(t / n)
        elif isinstance(comp, SeasonalPair):
            angle = 2.0 * np.pi * t / comp.period
            columns.append(np.sin(angle))
            columns.append(np.cos(angle))
        elif isinstance(comp, CyclicSplines):
            columns.extend(cyclic_spline_basis(n, comp.count).T)
        else:
            columns.append(irf_column(exog, gamma, comp.window, n))
    return DesignMatrix(np.column_stack(columns), spec.column_labels)
