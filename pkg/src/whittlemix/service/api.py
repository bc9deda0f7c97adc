"""Handlers behind the HTTP endpoints, callable in-process.

Each handler is a pure function from a request model to a response
model; the CLI calls them directly and the FastAPI app wires them to
routes, so both surfaces share one implementation.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from ..aep import aep_quantile, fit_aep_marginal
from ..covariance import acv_sequence
from ..design import DesignSpec, build_design
from ..errors import DesignError
from ..estimate import ModelFit, fit
from ..predict import PredictionRequest, gap_experiment, predict
from ..series import ObservedSeries
from ..simstudy import ScenarioConfig, gen_scenario, run_study
from .schemas import (AcvRow, DiagnoseRequest, DiagnoseResponse, FitRequest,
                      FitReport, FitResponse, FillRequest, ForecastRequest,
                      GapArmConfig, GapExperimentRequest,
                      GapExperimentResponse, GapResultModel, GapStudySettings,
                      MarginalReport, OptimizerSettings, PredictionResponse,
                      PredictionRow, QqRow, SimulateRequest, SimulateResponse,
                      StudyRowModel, FailureModel, BoxplotGroupModel,
                      FitSettings, to_design)


def _exog_array(values) -> np.ndarray | None:
    return None if values is None else np.asarray(values, dtype=float)


def _run_fit(series: ObservedSeries, exog: np.ndarray | None,
             settings: FitSettings) -> tuple[ModelFit, DesignSpec]:
    spec = settings.to_model_spec()
    model_fit = fit(series, spec, exog=exog,
                    config=settings.optimizer.to_config())
    return model_fit, spec.design


def perform_fit(request: FitRequest) -> FitResponse:
    series = request.series.to_series()
    model_fit, _ = _run_fit(series, _exog_array(request.exog),
                            request.settings)
    return FitResponse(fit=FitReport.from_fit(model_fit))


def _prediction_response(series: ObservedSeries, design: DesignSpec,
                         model_fit: ModelFit, targets: tuple[int, ...],
                         exog: np.ndarray | None,
                         level: float) -> PredictionResponse:
    report = FitReport.from_fit(model_fit)
    if not targets:
        return PredictionResponse(fit=report, level=level, predictions=[])
    lo, hi = (1.0 - level) / 2.0, (1.0 + level) / 2.0
    prediction = predict(
        PredictionRequest(series, design, model_fit, targets, exog=exog),
        quantile_levels=(lo, hi))
    if prediction.quantiles:
        lower, upper = prediction.quantiles[lo], prediction.quantiles[hi]
    else:
        z = float(ndtri(hi))
        half = z * np.sqrt(prediction.variance)
        lower, upper = prediction.mean - half, prediction.mean + half
    rows = [PredictionRow(time=t, mean=float(prediction.mean[i]),
                          variance=float(prediction.variance[i]),
                          lower=float(lower[i]), upper=float(upper[i]))
            for i, t in enumerate(targets)]
    return PredictionResponse(fit=report, level=level, predictions=rows,
                              jitter_escalations=prediction.jitter_escalations,
                              clamp_events=prediction.clamp_events)


def perform_fill(request: FillRequest) -> PredictionResponse:
    """Fit, then predict every unobserved time inside the sample."""
    series = request.series.to_series()
    exog = _exog_array(request.exog)
    model_fit, design = _run_fit(series, exog, request.settings)
    targets = tuple(int(t) + 1 for t in np.flatnonzero(~series.mask))
    return _prediction_response(series, design, model_fit, targets, exog,
                                request.level)


def perform_forecast(request: ForecastRequest) -> PredictionResponse:
    """Fit, then predict the ``horizon`` times past the sample end.

    When the design has a lagged exogenous column, ``exog`` must end at
    the last forecast time; the trailing ``horizon`` entries are held
    out of the fit.
    """
    series = request.series.to_series()
    exog = _exog_array(request.exog)
    fit_exog = exog
    if exog is not None:
        if exog.size <= request.horizon:
            raise DesignError(
                f"the exogenous series has {exog.size} entries but must "
                f"cover the fitting range plus {request.horizon} forecast "
                f"steps")
        fit_exog = exog[:exog.size - request.horizon]
    model_fit, design = _run_fit(series, fit_exog, request.settings)
    targets = tuple(range(series.n + 1, series.n + request.horizon + 1))
    return _prediction_response(series, design, model_fit, targets, exog,
                                request.level)


def _masked_autocovariance(residuals: np.ndarray, mask: np.ndarray,
                           max_lag: int) -> list[float | None]:
    """Pairwise-complete autocovariance of residuals at lags 0..max_lag."""
    padded = np.where(mask, residuals, 0.0)
    weights = mask.astype(float)
    out: list[float | None] = []
    for lag in range(max_lag + 1):
        pairs = float(weights[:weights.size - lag] @ weights[lag:])
        if pairs == 0.0:
            out.append(None)
            continue
        total = float(padded[:padded.size - lag] @ padded[lag:])
        out.append(total / pairs)
    return out


def perform_diagnose(request: DiagnoseRequest) -> DiagnoseResponse:
    """Fit, then export residual autocovariance and quantile tables."""
    series = request.series.to_series()
    exog = _exog_array(request.exog)
    model_fit, design = _run_fit(series, exog, request.settings)
    matrix = build_design(design, series.n, exog=exog, gamma=model_fit.gamma)
    fixed = matrix.values @ model_fit.beta
    residuals = np.where(series.mask, series.values - fixed, 0.0)

    max_lag = min(request.max_lag, series.n - 1)
    empirical = _masked_autocovariance(residuals, series.mask, max_lag)
    model_acv = acv_sequence(model_fit.alpha, max_lag + 1)
    acv_rows = [AcvRow(lag=lag, empirical=empirical[lag],
                       model=float(model_acv[lag]))
                for lag in range(max_lag + 1)]

    observed = np.sort(residuals[series.mask])
    k = observed.size
    probabilities = (np.arange(1, k + 1) - 0.5) / k
    mean = float(observed.mean())
    sd = float(observed.std(ddof=1)) if k > 1 else 0.0
    gaussian = mean + sd * ndtri(probabilities)
    marginal = fit_aep_marginal(residuals[series.mask],
                                request.settings.optimizer.to_config())
    aep = aep_quantile(probabilities, marginal.params)
    qq_rows = [QqRow(probability=float(probabilities[i]),
                     residual=float(observed[i]),
                     gaussian=float(gaussian[i]), aep=float(aep[i]))
               for i in range(k)]
    return DiagnoseResponse(fit=FitReport.from_fit(model_fit),
                            residual_count=k, residual_mean=mean,
                            residual_sd=sd, acv=acv_rows, qq=qq_rows,
                            marginal=MarginalReport.from_fit(marginal))


def _arm_labels(candidate: GapArmConfig,
                baseline: GapArmConfig) -> tuple[str, str]:
    first, second = candidate.resolved_label(), baseline.resolved_label()
    if first == second:
        return f"{first} (candidate)", f"{second} (baseline)"
    return first, second


def _simulated_gap_study(settings: GapStudySettings, base_seed: int,
                         optimizer: OptimizerSettings
                         ) -> GapResultModel | None:
    if not settings.run:
        return None
    scenario = ScenarioConfig(settings.scenario, settings.n,
                              missing_fraction=settings.missing_fraction,
                              replicates=settings.replicate + 1,
                              base_seed=base_seed)
    series, exog, truth = gen_scenario(scenario, settings.replicate)
    exog_values = None if exog is None else exog.values
    candidate_label, baseline_label = _arm_labels(settings.candidate,
                                                  settings.baseline)
    optim = optimizer.to_config()
    fits = {}
    for label, arm in ((candidate_label, settings.candidate),
                       (baseline_label, settings.baseline)):
        fits[label] = fit(series, arm.to_model_spec(truth.design),
                          exog=exog_values, config=optim)
    result = gap_experiment(
        series, truth.design, fits,
        plans=tuple(plan.to_plan() for plan in settings.plans),
        repeats=settings.repeats, seed=base_seed, exog=exog_values)
    return GapResultModel.from_result(result)


def perform_simulate(request: SimulateRequest) -> SimulateResponse:
    config = request.config
    configs = [ScenarioConfig(entry.scenario, entry.n,
                              missing_fraction=entry.missing_fraction,
                              replicates=entry.replicates,
                              base_seed=config.base_seed)
               for entry in config.scenarios]
    methods = None if config.methods is None else tuple(config.methods)
    result = run_study(configs, methods=methods,
                       optim=config.optimizer.to_config(),
                       workers=request.threads,
                       profile_regression=config.profile_regression)
    gap = _simulated_gap_study(config.gap, config.base_seed,
                               config.optimizer)
    return SimulateResponse(
        rows=[StudyRowModel.from_row(row) for row in result.rows],
        failures=[FailureModel.from_record(r) for r in result.failures],
        groups=[BoxplotGroupModel.from_group(g) for g in result.summary()],
        gap=gap)


def perform_gap_experiment(request: GapExperimentRequest
                           ) -> GapExperimentResponse:
    series = request.series.to_series()
    exog = _exog_array(request.exog)
    design = to_design(request.design)
    candidate_label, baseline_label = _arm_labels(request.candidate,
                                                  request.baseline)
    optim = request.optimizer.to_config()
    fits = {}
    for label, arm in ((candidate_label, request.candidate),
                       (baseline_label, request.baseline)):
        fits[label] = fit(series, arm.to_model_spec(design), exog=exog,
                          config=optim)
    result = gap_experiment(series, design, fits,
                            plans=tuple(p.to_plan() for p in request.plans),
                            repeats=request.repeats, seed=request.seed,
                            exog=exog)
    return GapExperimentResponse(
        result=GapResultModel.from_result(result),
        fits={label: FitReport.from_fit(f) for label, f in fits.items()})
