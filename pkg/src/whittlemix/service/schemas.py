"""Request/response models and their converters to core objects.

Every model rejects unknown keys, and every configuration field has a
default, so an empty JSON document is a complete configuration.  The
same models double as the command-line configuration file format
(:class:`RunConfig`), keeping the CLI a thin client of the service
handlers.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..aep import AepMarginalFit
from ..covariance import CovarianceSpec
from ..design import (CyclicSplines, DesignSpec, Intercept, IrfCovariate,
                      LinearTrend, SeasonalPair)
from ..estimate import CovarianceModel, ModelFit, ModelSpec
from ..optim import OptimConfig, OptimizerReport
from ..predict import GapExperimentResult, GapPlan
from ..series import ObservedSeries
from ..simstudy import BoxplotGroup, FailureRecord, StudyRow

MethodName = Literal["whittle", "gaussian_ml", "two_stage", "aep_ml"]
ScenarioName = Literal["standard_mixed", "fully_random", "aep_error"]
FamilyName = Literal["exponential", "matern", "matern_periodic"]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --------------------------------------------------------------------------
# model configuration


class InterceptSpec(StrictModel):
    kind: Literal["intercept"] = "intercept"


class LinearTrendSpec(StrictModel):
    kind: Literal["linear_trend"] = "linear_trend"


class SeasonalPairSpec(StrictModel):
    kind: Literal["seasonal_pair"] = "seasonal_pair"
    period: float = Field(12.0, gt=0)


class CyclicSplinesSpec(StrictModel):
    kind: Literal["cyclic_splines"] = "cyclic_splines"
    count: int = Field(4, ge=3)


class IrfCovariateSpec(StrictModel):
    kind: Literal["irf_covariate"] = "irf_covariate"
    window: int = Field(120, ge=1)


ComponentSpec = Annotated[
    Union[InterceptSpec, LinearTrendSpec, SeasonalPairSpec,
          CyclicSplinesSpec, IrfCovariateSpec],
    Field(discriminator="kind")]

_COMPONENT_BUILDERS = {
    "intercept": lambda spec: Intercept(),
    "linear_trend": lambda spec: LinearTrend(),
    "seasonal_pair": lambda spec: SeasonalPair(spec.period),
    "cyclic_splines": lambda spec: CyclicSplines(spec.count),
    "irf_covariate": lambda spec: IrfCovariate(spec.window),
}


def to_design(components) -> DesignSpec:
    return DesignSpec(tuple(_COMPONENT_BUILDERS[c.kind](c)
                            for c in components))


class CovarianceConfig(StrictModel):
    """Covariance family plus any parameters pinned instead of estimated."""

    family: FamilyName = "matern"
    fixed: dict[str, float] = Field(default_factory=dict)
    pin_total_variance: bool = False

    def to_model(self) -> CovarianceModel:
        return CovarianceModel(self.family, dict(self.fixed),
                               self.pin_total_variance)


class OptimizerSettings(StrictModel):
    restarts: int = Field(3, ge=1)
    maxiter: int = Field(5000, ge=1)
    fatol: float = Field(1e-8, gt=0)
    xatol: float = Field(1e-8, gt=0)
    jitter_scale: float = Field(0.3, ge=0)
    seed: int | None = Field(None, ge=0)

    def to_config(self) -> OptimConfig:
        return OptimConfig(self.restarts, self.maxiter, self.fatol,
                           self.xatol, self.jitter_scale, self.seed)


class FitSettings(StrictModel):
    """Everything a single estimation run needs besides the data."""

    design: list[ComponentSpec] = Field(
        default_factory=lambda: [InterceptSpec()])
    covariance: CovarianceConfig = CovarianceConfig()
    method: MethodName = "whittle"
    profile_regression: bool = False
    theta_fixed: dict[str, float] = Field(
        default_factory=lambda: {"mu": 0.0})
    optimizer: OptimizerSettings = OptimizerSettings()

    def to_model_spec(self) -> ModelSpec:
        return ModelSpec(to_design(self.design), self.covariance.to_model(),
                         self.method,
                         profile_regression=self.profile_regression,
                         theta_fixed=dict(self.theta_fixed))


# --------------------------------------------------------------------------
# data payloads


class SeriesPayload(StrictModel):
    """Response values on times 1..n; ``null`` marks a missing value."""

    values: list[float | None] = Field(min_length=1)

    def to_series(self) -> ObservedSeries:
        mask = np.array([v is not None for v in self.values])
        values = np.array([0.0 if v is None else float(v)
                           for v in self.values])
        return ObservedSeries(values, mask)


# --------------------------------------------------------------------------
# fit reports


class OptimizerDiagnostics(StrictModel):
    objective: float
    iterations: int
    converged: bool
    restarts_used: int
    best_restart: int
    out_of_domain_evaluations: int

    @classmethod
    def from_report(cls, report: OptimizerReport) -> "OptimizerDiagnostics":
        return cls(objective=report.objective, iterations=report.iterations,
                   converged=report.converged,
                   restarts_used=report.restarts_used,
                   best_restart=report.best_restart,
                   out_of_domain_evaluations=report.out_of_domain_evaluations)


def covariance_parameters(spec: CovarianceSpec) -> dict[str, float]:
    out = {name: float(getattr(spec, name))
           for name in spec.free_parameter_names}
    if spec.family == "matern_periodic":
        out["period"] = float(spec.period)
    return out


class FitReport(StrictModel):
    """All estimated parameters plus optimizer diagnostics for one fit."""

    method: MethodName
    converged: bool
    objective: float
    family: FamilyName
    covariance: dict[str, float]
    beta: dict[str, float]
    gamma: dict[str, float] | None = None
    theta: dict[str, float] | None = None
    optimizer: OptimizerDiagnostics
    stage_one: OptimizerDiagnostics | None = None
    clamp_events: int = 0

    @classmethod
    def from_fit(cls, fit: ModelFit) -> "FitReport":
        gamma = (None if fit.gamma is None
                 else {"s": float(fit.gamma.s), "a": float(fit.gamma.a)})
        theta = (None if fit.theta is None
                 else {name: float(getattr(fit.theta, name))
                       for name in ("mu", "sigma", "varsigma", "p1", "p2")})
        stage_one = (None if fit.stage_one_report is None
                     else OptimizerDiagnostics.from_report(
                         fit.stage_one_report))
        return cls(method=fit.method, converged=fit.converged,
                   objective=float(fit.objective), family=fit.alpha.family,
                   covariance=covariance_parameters(fit.alpha),
                   beta={label: float(value) for label, value
                         in zip(fit.beta_labels, fit.beta)},
                   gamma=gamma, theta=theta,
                   optimizer=OptimizerDiagnostics.from_report(fit.report),
                   stage_one=stage_one, clamp_events=fit.clamp_events)


class MarginalReport(StrictModel):
    """Independent-residual error-shape fit used by the diagnostics."""

    params: dict[str, float]
    objective: float
    converged: bool

    @classmethod
    def from_fit(cls, fit: AepMarginalFit) -> "MarginalReport":
        params = {name: float(getattr(fit.params, name))
                  for name in ("mu", "sigma", "varsigma", "p1", "p2")}
        return cls(params=params, objective=float(fit.objective),
                   converged=fit.converged)


# --------------------------------------------------------------------------
# fit / fill / forecast / diagnose requests and responses


class FitRequest(StrictModel):
    series: SeriesPayload
    exog: list[float] | None = None
    settings: FitSettings = FitSettings()


class FitResponse(StrictModel):
    fit: FitReport


class FillRequest(StrictModel):
    series: SeriesPayload
    exog: list[float] | None = None
    settings: FitSettings = FitSettings()
    level: float = Field(0.95, gt=0, lt=1)


class ForecastRequest(StrictModel):
    """Forecast request; ``exog`` must end at the last forecast time."""

    series: SeriesPayload
    exog: list[float] | None = None
    settings: FitSettings = FitSettings()
    level: float = Field(0.95, gt=0, lt=1)
    horizon: int = Field(12, ge=1)


class PredictionRow(StrictModel):
    time: int
    mean: float
    variance: float
    lower: float
    upper: float


class PredictionResponse(StrictModel):
    fit: FitReport
    level: float
    predictions: list[PredictionRow]
    jitter_escalations: int = 0
    clamp_events: int = 0


class DiagnoseRequest(StrictModel):
    series: SeriesPayload
    exog: list[float] | None = None
    settings: FitSettings = FitSettings()
    max_lag: int = Field(60, ge=1)


class AcvRow(StrictModel):
    lag: int
    empirical: float | None
    model: float


class QqRow(StrictModel):
    probability: float
    residual: float
    gaussian: float
    aep: float


class DiagnoseResponse(StrictModel):
    fit: FitReport
    residual_count: int
    residual_mean: float
    residual_sd: float
    acv: list[AcvRow]
    qq: list[QqRow]
    marginal: MarginalReport


# --------------------------------------------------------------------------
# simulation study


class ScenarioRunConfig(StrictModel):
    scenario: ScenarioName = "standard_mixed"
    n: int = Field(256, ge=16)
    replicates: int = Field(100, ge=1)
    missing_fraction: float = Field(0.25, ge=0, lt=1)


class GapPlanConfig(StrictModel):
    gaps: int = Field(ge=1)
    width: int = Field(ge=1)

    def to_plan(self) -> GapPlan:
        return GapPlan(self.gaps, self.width)


def _default_plans() -> list[GapPlanConfig]:
    return [GapPlanConfig(gaps=12, width=1), GapPlanConfig(gaps=6, width=2),
            GapPlanConfig(gaps=3, width=4)]


class GapArmConfig(StrictModel):
    """One competitor in a gap experiment: a method and a covariance."""

    label: str = ""
    method: MethodName = "whittle"
    covariance: CovarianceConfig = CovarianceConfig()
    profile_regression: bool = False

    def resolved_label(self) -> str:
        return self.label or f"{self.method}-{self.covariance.family}"

    def to_model_spec(self, design: DesignSpec) -> ModelSpec:
        return ModelSpec(design, self.covariance.to_model(), self.method,
                         profile_regression=self.profile_regression)


def _default_baseline_arm() -> GapArmConfig:
    return GapArmConfig(method="gaussian_ml",
                        covariance=CovarianceConfig(family="exponential"))


class GapStudySettings(StrictModel):
    """Optional gap experiment on one simulated scenario replicate."""

    run: bool = False
    scenario: ScenarioName = "standard_mixed"
    n: int = Field(240, ge=16)
    missing_fraction: float = Field(0.0, ge=0, lt=1)
    replicate: int = Field(0, ge=0)
    repeats: int = Field(250, ge=1)
    plans: list[GapPlanConfig] = Field(default_factory=_default_plans)
    candidate: GapArmConfig = GapArmConfig()
    baseline: GapArmConfig = Field(default_factory=_default_baseline_arm)


class SimulateConfig(StrictModel):
    scenarios: list[ScenarioRunConfig] = Field(
        default_factory=lambda: [ScenarioRunConfig()])
    methods: list[MethodName] | None = None
    base_seed: int = Field(0, ge=0)
    optimizer: OptimizerSettings = OptimizerSettings()
    profile_regression: bool = False
    gap: GapStudySettings = GapStudySettings()


class SimulateRequest(StrictModel):
    config: SimulateConfig = SimulateConfig()
    threads: int = Field(1, ge=1)


class StudyRowModel(StrictModel):
    scenario: str
    n: int
    method: str
    replicate: int
    metric: str
    value: float

    @classmethod
    def from_row(cls, row: StudyRow) -> "StudyRowModel":
        return cls(scenario=row.scenario, n=row.n, method=row.method,
                   replicate=row.replicate, metric=row.metric,
                   value=row.value)


class FailureModel(StrictModel):
    scenario: str
    n: int
    method: str
    replicate: int
    error: str

    @classmethod
    def from_record(cls, record: FailureRecord) -> "FailureModel":
        return cls(scenario=record.scenario, n=record.n,
                   method=record.method, replicate=record.replicate,
                   error=record.error)


class BoxplotGroupModel(StrictModel):
    scenario: str
    n: int
    method: str
    metric: str
    count: int
    minimum: float
    q1: float
    median: float
    q3: float
    p90: float
    upper_points: list[float]
    cutoff_count: int

    @classmethod
    def from_group(cls, group: BoxplotGroup) -> "BoxplotGroupModel":
        return cls(scenario=group.scenario, n=group.n, method=group.method,
                   metric=group.metric, count=group.count,
                   minimum=group.minimum, q1=group.q1, median=group.median,
                   q3=group.q3, p90=group.p90,
                   upper_points=list(group.upper_points),
                   cutoff_count=group.cutoff_count)


class GapPlanRow(StrictModel):
    plan: str
    rmse: dict[str, float]
    reduction_percent: float


class GapResultModel(StrictModel):
    candidate: str
    baseline: str
    repeats: int
    rows: list[GapPlanRow]

    @classmethod
    def from_result(cls, result: GapExperimentResult) -> "GapResultModel":
        rows = [GapPlanRow(plan=entry.plan.label,
                           rmse={k: float(v) for k, v in entry.rmse.items()},
                           reduction_percent=entry.reduction_percent)
                for entry in result.results]
        return cls(candidate=result.candidate, baseline=result.baseline,
                   repeats=result.repeats, rows=rows)


class SimulateResponse(StrictModel):
    rows: list[StudyRowModel]
    failures: list[FailureModel]
    groups: list[BoxplotGroupModel]
    gap: GapResultModel | None = None


# --------------------------------------------------------------------------
# data-driven gap experiment


class GapExperimentRequest(StrictModel):
    series: SeriesPayload
    exog: list[float] | None = None
    design: list[ComponentSpec] = Field(
        default_factory=lambda: [InterceptSpec()])
    candidate: GapArmConfig = GapArmConfig()
    baseline: GapArmConfig = Field(default_factory=_default_baseline_arm)
    optimizer: OptimizerSettings = OptimizerSettings()
    plans: list[GapPlanConfig] = Field(default_factory=_default_plans)
    repeats: int = Field(250, ge=1)
    seed: int | None = Field(None, ge=0)


class GapExperimentResponse(StrictModel):
    result: GapResultModel
    fits: dict[str, FitReport]


# --------------------------------------------------------------------------
# command-line configuration document


class FillSettings(StrictModel):
    level: float = Field(0.95, gt=0, lt=1)


class ForecastSettings(StrictModel):
    level: float = Field(0.95, gt=0, lt=1)
    horizon: int = Field(12, ge=1)


class DiagnoseSettings(StrictModel):
    max_lag: int = Field(60, ge=1)


class GapRunSettings(StrictModel):
    """Configuration of the gap-experiment command on ingested data."""

    candidate: GapArmConfig = GapArmConfig()
    baseline: GapArmConfig = Field(default_factory=_default_baseline_arm)
    plans: list[GapPlanConfig] = Field(default_factory=_default_plans)
    repeats: int = Field(250, ge=1)
    seed: int | None = Field(None, ge=0)


class RunConfig(StrictModel):
    """The whole command-line configuration: one JSON document.

    Every command reads its own section (the shared estimation settings
    live under ``fit``); unknown keys anywhere are rejected.
    """

    fit: FitSettings = FitSettings()
    fill: FillSettings = FillSettings()
    forecast: ForecastSettings = ForecastSettings()
    diagnose: DiagnoseSettings = DiagnoseSettings()
    simulate: SimulateConfig = SimulateConfig()
    gap: GapRunSettings = GapRunSettings()
