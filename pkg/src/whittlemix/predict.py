"""Simple Kriging for gap filling and forecasting.

The fitted fixed term is treated as a known mean: the predictor at a
target time adds the best linear prediction of the residual,
``k*' C_obs^{-1} r_obs``, to the fixed-term value there, with predictive
variance ``c(0) - k*' C_obs^{-1} k*``.  For fits with asymmetric
exponential-power errors the residuals are first mapped to the Gaussian
scale through the fitted marginal (``r -> ndtri(F(r))``), kriged there,
and the predicted values mapped back through ``F^{-1}(ndtr(.))`` before
the fixed term is added.

Forecast targets extend the design matrix in time while keeping every
column anchored to the fitted length: the trend keeps its original
slope, seasonal columns continue as functions of absolute time, cyclic
spline columns wrap periodically, and the lagged exogenous column
requires driver data through the last target time (never imputed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import ndtr, ndtri

from .aep import _CDF_CLAMP, aep_cdf, aep_quantile
from .covariance import CovarianceSpec, acv_sequence
from .design import (
    CyclicSplines,
    DesignSpec,
    Intercept,
    IrfParams,
    LinearTrend,
    SeasonalPair,
    cyclic_spline_basis,
    irf_column,
)
from .errors import FactorizationError, MaskError, ParameterDomainError
from .estimate import METHOD_AEP_ML, ModelFit
from .series import ObservedSeries

_MAX_JITTER_ESCALATIONS = 3
_VARIANCE_SLACK = 1e-9


@dataclass(frozen=True)
class PredictionRequest:
    """Where to predict, given a fitted model and the observed series.

    Target times use the same 1-based time index as the series: times
    in ``1..n`` fill gaps, times beyond ``n`` are forecasts.  A target
    may coincide with an observed time (with no nugget the predictor
    then reproduces the observation exactly).  When the design contains
    a lagged exogenous column, ``exog`` must cover lag history through
    the last target time, aligned so its final entry corresponds to
    ``max(n, max(target_times))``.
    """

    series: ObservedSeries
    design: DesignSpec
    fit: ModelFit
    target_times: tuple[int, ...]
    exog: np.ndarray | None = None

    def __post_init__(self) -> None:
        times = tuple(int(t) for t in self.target_times)
        if not times:
            raise ParameterDomainError("at least one target time is needed")
        if any(t < 1 for t in times):
            raise ParameterDomainError(
                f"target times must be >= 1, got {min(times)}")
        if len(set(times)) != len(times):
            raise ParameterDomainError("target times must be distinct")
        object.__setattr__(self, "target_times", times)

    @property
    def horizon(self) -> int:
        """Last time the design matrix must reach."""
        return max(self.series.n, max(self.target_times))


@dataclass(frozen=True)
class Prediction:
    """Per-target predictive mean and variance.

    For Gaussian fits the variance is the Kriging variance, bounded by
    the total variance ``c0 + c1``.  For asymmetric exponential-power
    fits the mean is the value back-mapped from the Gaussian scale, the
    variance is the Gaussian-scale Kriging variance, and ``quantiles``
    maps requested levels to back-mapped predictive quantiles.
    """

    target_times: tuple[int, ...]
    mean: np.ndarray
    variance: np.ndarray
    jitter_escalations: int = 0
    clamp_events: int = 0
    quantiles: Mapping[float, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        mean = np.ascontiguousarray(np.asarray(self.mean, dtype=float))
        variance = np.ascontiguousarray(
            np.asarray(self.variance, dtype=float))
        k = len(self.target_times)
        if mean.shape != (k,) or variance.shape != (k,):
            raise ParameterDomainError(
                "prediction mean and variance must align with target times")
        if not np.all(np.isfinite(mean)):
            raise ParameterDomainError("prediction mean must be finite")
        if not (np.all(np.isfinite(variance)) and np.all(variance >= 0.0)):
            raise ParameterDomainError(
                "prediction variance must be finite and nonnegative")
        mean.flags.writeable = False
        variance.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", variance)


def extended_design_matrix(design: DesignSpec, n: int, horizon: int, *,
                           exog=None, gamma: IrfParams | None = None
                           ) -> np.ndarray:
    """Design matrix over times ``1..horizon`` anchored to length ``n``.

    The first ``n`` rows reproduce the fitted design exactly; later rows
    continue each column as a function of absolute time (trend slope and
    spline period stay those of the fitted sample).
    """
    if horizon < n:
        raise ParameterDomainError(
            f"horizon {horizon} cannot precede the series end {n}")
    t = np.arange(1, horizon + 1, dtype=float)
    columns: list[np.ndarray] = []
    for comp in design.components:
        if isinstance(comp, Intercept):
            columns.append(np.ones(horizon))
        elif isinstance(comp, LinearTrend):
            columns.append(t / n)
        elif isinstance(comp, SeasonalPair):
            angle = 2.0 * np.pi * t / comp.period
            columns.append(np.sin(angle))
            columns.append(np.cos(angle))
        elif isinstance(comp, CyclicSplines):
            basis = cyclic_spline_basis(n, comp.count)
            wrapped = np.arange(horizon) % n
            columns.extend(basis[wrapped].T)
        else:
            if exog is None:
                raise ParameterDomainError(
                    "this design needs an exogenous series covering the "
                    "prediction horizon")
            if gamma is None:
                raise ParameterDomainError(
                    "this design needs fitted impulse-response parameters")
            columns.append(irf_column(exog, gamma, comp.window, horizon))
    return np.column_stack(columns)


def _factor_with_jitter(matrix: np.ndarray, lag_zero: float):
    """Cholesky with escalating diagonal jitter on failure.

    Returns ``(factor, escalations)`` where each escalation adds
    ``1e-10 * c(0)``, growing tenfold per attempt, at most three times.
    """
    bump = 0.0
    for escalation in range(_MAX_JITTER_ESCALATIONS + 1):
        try:
            working = matrix if bump == 0.0 else (
                matrix + bump * np.eye(matrix.shape[0]))
            return cho_factor(working, lower=True), escalation
        except np.linalg.LinAlgError:
            bump = 1e-10 * lag_zero * 10.0 ** escalation
    raise FactorizationError(
        f"observed-time covariance is not positive definite even after "
        f"{_MAX_JITTER_ESCALATIONS} jitter escalations (last bump {bump:g})")


def _kriging_weights(series: ObservedSeries, alpha: CovarianceSpec,
                     targets: np.ndarray, horizon: int):
    """Solve the Kriging system once for all targets.

    Returns ``(weights, variance, escalations)`` with ``weights`` of
    shape ``(n_observed, n_targets)``.
    """
    obs = series.observed_indices
    c = acv_sequence(alpha, horizon)
    c_obs = c[np.abs(obs[:, None] - obs[None, :])]
    k_star = c[np.abs(obs[:, None] - (targets - 1)[None, :])]
    factor, escalations = _factor_with_jitter(c_obs, c[0])
    weights = cho_solve(factor, k_star)
    variance = c[0] - np.sum(k_star * weights, axis=0)
    lowest = float(variance.min(initial=np.inf))
    if lowest < -1e-6:
        raise FactorizationError(
            f"Kriging variance {lowest:g} is negative beyond roundoff; "
            f"the observed-time covariance solve is unreliable")
    variance = np.clip(variance, 0.0, None)
    if float(variance.max(initial=0.0)) > alpha.total_variance + _VARIANCE_SLACK:
        raise FactorizationError(
            "Kriging variance exceeds the total variance; the "
            "observed-time covariance solve is unreliable")
    return weights, variance, escalations


def _fixed_term(request: PredictionRequest) -> np.ndarray:
    return extended_design_matrix(
        request.design, request.series.n, request.horizon,
        exog=request.exog, gamma=request.fit.gamma) @ request.fit.beta


def simple_krige(request: PredictionRequest) -> Prediction:
    """Predict at the target times under a Gaussian residual model."""
    series = request.series
    fit = request.fit
    targets = np.asarray(request.target_times, dtype=np.intp)
    fixed = _fixed_term(request)
    residuals = series.values[series.mask] - fixed[:series.n][series.mask]
    weights, variance, escalations = _kriging_weights(
        series, fit.alpha, targets, request.horizon)
    mean = fixed[targets - 1] + weights.T @ residuals
    return Prediction(request.target_times, mean, variance,
                      jitter_escalations=escalations)


def _clamped_probabilities(values) -> tuple[np.ndarray, int]:
    values = np.asarray(values, dtype=float)
    clamped = np.clip(values, _CDF_CLAMP, 1.0 - _CDF_CLAMP)
    return clamped, int(np.count_nonzero(clamped != values))


def krige_aep(request: PredictionRequest,
              quantile_levels: tuple[float, ...] = ()) -> Prediction:
    """Predict under an asymmetric exponential-power residual model.

    Residuals are mapped to the Gaussian scale through the fitted
    marginal, kriged there under the unit-variance correlation model,
    and predicted values (and any requested quantile levels) are mapped
    back through the marginal before the fixed term is added.  The
    reported variance is the Gaussian-scale Kriging variance.
    """
    fit = request.fit
    if fit.theta is None:
        raise ParameterDomainError(
            "this fit carries no error-shape parameters; "
            "use simple_krige instead")
    if abs(fit.alpha.total_variance - 1.0) > 1e-9:
        raise ParameterDomainError(
            f"the Gaussian-scale model must have unit total variance "
            f"(c0 + c1 = 1), got {fit.alpha.total_variance}")
    if any(not 0.0 < q < 1.0 for q in quantile_levels):
        raise ParameterDomainError(
            f"quantile levels must lie in (0, 1), got {quantile_levels}")
    series = request.series
    targets = np.asarray(request.target_times, dtype=np.intp)
    fixed = _fixed_term(request)
    residuals = series.values[series.mask] - fixed[:series.n][series.mask]
    probs, clamps = _clamped_probabilities(aep_cdf(residuals, fit.theta))
    gaussian = ndtri(probs)
    weights, variance, escalations = _kriging_weights(
        series, fit.alpha, targets, request.horizon)
    mean_gaussian = weights.T @ gaussian
    back_probs, more = _clamped_probabilities(ndtr(mean_gaussian))
    clamps += more
    mean = fixed[targets - 1] + aep_quantile(back_probs, fit.theta)
    quantiles: dict[float, np.ndarray] = {}
    spread = np.sqrt(variance)
    for level in quantile_levels:
        shifted = mean_gaussian + ndtri(level) * spread
        level_probs, more = _clamped_probabilities(ndtr(shifted))
        clamps += more
        quantiles[level] = (fixed[targets - 1]
                            + aep_quantile(level_probs, fit.theta))
    return Prediction(request.target_times, mean, variance,
                      jitter_escalations=escalations, clamp_events=clamps,
                      quantiles=quantiles)


def predict(request: PredictionRequest,
            quantile_levels: tuple[float, ...] = ()) -> Prediction:
    """Dispatch to the Gaussian or error-shape-aware predictor."""
    if request.fit.method == METHOD_AEP_ML and request.fit.theta is not None:
        return krige_aep(request, quantile_levels)
    return simple_krige(request)


@dataclass(frozen=True)
class GapPlan:
    """``gaps`` runs of ``width`` consecutive months removed at once."""

    gaps: int
    width: int

    def __post_init__(self) -> None:
        if self.gaps < 1 or self.width < 1:
            raise ParameterDomainError(
                f"a gap plan needs gaps >= 1 and width >= 1, "
                f"got {self.gaps} x {self.width}")

    @property
    def label(self) -> str:
        return f"{self.gaps}x{self.width}"


DEFAULT_GAP_PLANS = (GapPlan(12, 1), GapPlan(6, 2), GapPlan(3, 4))


@dataclass(frozen=True)
class GapPlanResult:
    """Pooled RMSE per fit label for one plan, plus the reduction."""

    plan: GapPlan
    rmse: Mapping[str, float]
    reduction_percent: float


@dataclass(frozen=True)
class GapExperimentResult:
    candidate: str
    baseline: str
    repeats: int
    results: tuple[GapPlanResult, ...]


def _draw_gap_starts(rng: np.random.Generator, mask: np.ndarray,
                     plan: GapPlan) -> np.ndarray:
    """Starts (0-based) of non-touching observed runs with observed ends.

    Every removed run must be fully observed (so the truth is known),
    and the positions immediately before and after each run must stay
    observed, so runs are separated by at least one kept observation.
    """
    n = mask.size
    window = plan.width + 2
    if n < window:
        raise MaskError(
            f"series of length {n} cannot host width-{plan.width} gaps")
    runs = np.lib.stride_tricks.sliding_window_view(mask, window)
    pool = set(np.flatnonzero(runs.all(axis=1)) + 1)
    chosen: list[int] = []
    for _ in range(plan.gaps):
        if not pool:
            raise MaskError(
                f"cannot place {plan.gaps} non-touching gaps of width "
                f"{plan.width} with observed neighbours; only "
                f"{len(chosen)} fit")
        start = int(rng.choice(sorted(pool)))
        chosen.append(start)
        pool -= set(range(start - plan.width, start + plan.width + 1))
    return np.sort(np.asarray(chosen, dtype=np.intp))


def gap_experiment(series: ObservedSeries, design: DesignSpec,
                   fits: Mapping[str, ModelFit], *,
                   plans: tuple[GapPlan, ...] = DEFAULT_GAP_PLANS,
                   repeats: int = 250, seed: int | None = None,
                   exog=None) -> GapExperimentResult:
    """Hide observed runs, predict them back, and compare two fits.

    For each plan, ``repeats`` random draws remove the planned runs
    (each neighboured by kept observations), every fit predicts the
    removed values, and squared errors are pooled across repeats into
    one RMSE per fit.  The reduction is the percentage by which the
    first fit's RMSE undercuts the second's.
    """
    if len(fits) != 2:
        raise ParameterDomainError(
            f"the gap experiment compares exactly two fits, "
            f"got {len(fits)}")
    if repeats < 1:
        raise ParameterDomainError(f"repeats must be >= 1, got {repeats}")
    candidate, baseline = fits.keys()
    rng = np.random.default_rng(seed)
    results: list[GapPlanResult] = []
    for plan in plans:
        squared = {label: 0.0 for label in fits}
        count = 0
        for _ in range(repeats):
            starts = _draw_gap_starts(rng, series.mask, plan)
            removed = (starts[:, None]
                       + np.arange(plan.width)[None, :]).ravel()
            carved_mask = series.mask.copy()
            carved_mask[removed] = False
            carved = ObservedSeries(series.values, carved_mask)
            truth = series.values[removed]
            times = tuple(int(t) for t in removed + 1)
            count += removed.size
            for label, fit in fits.items():
                request = PredictionRequest(carved, design, fit, times,
                                            exog=exog)
                errors = predict(request).mean - truth
                squared[label] += float(errors @ errors)
        rmse = {label: float(np.sqrt(total / count))
                for label, total in squared.items()}
        if rmse[baseline] > 0.0:
            reduction = 100.0 * (1.0 - rmse[candidate] / rmse[baseline])
        else:
            reduction = 0.0
        results.append(GapPlanResult(plan, rmse, reduction))
    return GapExperimentResult(candidate, baseline, repeats, tuple(results))
