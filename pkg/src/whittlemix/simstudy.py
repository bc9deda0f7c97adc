"""Simulation-study harness: scenarios, metrics, and the replicate loop.

Three data-generating scenarios exercise the estimators:

* ``standard_mixed`` — a full mixed model: linear trend, a seasonal
  pair, four cyclic splines, and a lagged response to a positive
  exogenous driver, with nested-nugget Matern errors.
* ``fully_random`` — the same design is *fitted*, but every regression
  coefficient used for generation is zero, so the data are errors only;
  this probes whether the estimators flag irrelevant predictors.
* ``aep_error`` — a simpler fixed term (intercept instead of splines)
  with skewed heavy-tailed errors built by pushing a unit-variance
  Gaussian process through an asymmetric exponential-power marginal;
  this probes robustness to non-Gaussianity.

Each (scenario, n, replicate) triple owns seed streams derived from
``SeedSequence([base_seed, scenario_id, n, replicate, stream])``, so any
subset of replicates can run in any order — or in parallel workers —
and produce identical results.  The standard and fully random scenarios
share the exogenous-driver stream so that, replicate by replicate, both
fit the very same design matrix.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .aep import AepParams, simulate_aep_errors
from .covariance import CovarianceSpec, acv_sequence
from .design import (
    CyclicSplines,
    DesignSpec,
    ExogenousSeries,
    Intercept,
    IrfCovariate,
    IrfParams,
    LinearTrend,
    SeasonalPair,
    build_design,
    irf_weights,
)
from .errors import MaskError, NotApplicableError, ParameterDomainError, WhittlemixError
from .estimate import (
    METHOD_AEP_ML,
    METHOD_GAUSSIAN_ML,
    METHOD_TWO_STAGE,
    METHOD_WHITTLE,
    CovarianceModel,
    ModelFit,
    ModelSpec,
    fit,
)
from .optim import OptimConfig
from .predict import Prediction, PredictionRequest, predict
from .sampling import simulate_gaussian_process
from .series import ObservedSeries

logger = logging.getLogger(__name__)

SCENARIO_STANDARD = "standard_mixed"
SCENARIO_RANDOM = "fully_random"
SCENARIO_AEP = "aep_error"
SCENARIOS = (SCENARIO_STANDARD, SCENARIO_RANDOM, SCENARIO_AEP)

_SCENARIO_IDS = {SCENARIO_STANDARD: 1, SCENARIO_RANDOM: 2, SCENARIO_AEP: 3}

STREAM_ERROR = 0
STREAM_EXOG = 1
STREAM_MASK = 2
_STREAM_FIT_BASE = 100

METHOD_ORDER = (METHOD_WHITTLE, METHOD_GAUSSIAN_ML, METHOD_TWO_STAGE,
                METHOD_AEP_ML)

METRIC_ALPHA_RELATIVE = "alpha_relative_error"
METRIC_ACV_DIVERGENCE = "acv_divergence"
METRIC_BETA_RELATIVE = "beta_relative_error"
METRIC_BETA_ABSOLUTE = "beta_absolute_error"
METRIC_IRF_DIVERGENCE = "irf_divergence"
METRIC_MISSING_RMSE = "missing_rmse"

#: Which error metric applies in which scenario: relative parameter
#: errors need a nonzero truth, covariance parameters fitted under a
#: misspecified Gaussian model are compared through the autocovariance
#: they imply rather than one by one, and the impulse-response curve is
#: compared only when the generating model actually used one.
APPLICABLE_METRICS = {
    SCENARIO_STANDARD: (METRIC_ALPHA_RELATIVE, METRIC_BETA_RELATIVE,
                        METRIC_IRF_DIVERGENCE, METRIC_MISSING_RMSE),
    SCENARIO_RANDOM: (METRIC_ALPHA_RELATIVE, METRIC_BETA_ABSOLUTE,
                      METRIC_MISSING_RMSE),
    SCENARIO_AEP: (METRIC_ACV_DIVERGENCE, METRIC_BETA_RELATIVE,
                   METRIC_IRF_DIVERGENCE, METRIC_MISSING_RMSE),
}

_MAX_MASK_REDRAWS = 1000


@dataclass(frozen=True)
class ScenarioTruth:
    """Generating design and parameter values for one scenario."""

    design: DesignSpec
    beta: np.ndarray
    gamma: IrfParams
    alpha: CovarianceSpec
    alpha_ext: CovarianceSpec
    theta: AepParams | None = None
    irf_window: int = 120

    def __post_init__(self) -> None:
        beta = np.ascontiguousarray(np.asarray(self.beta, dtype=float))
        if beta.shape != (self.design.n_columns,):
            raise ParameterDomainError(
                f"beta has {beta.size} entries but the design has "
                f"{self.design.n_columns} columns")
        beta.flags.writeable = False
        object.__setattr__(self, "beta", beta)
        if self.irf_window < 1:
            raise ParameterDomainError(
                f"irf_window must be >= 1, got {self.irf_window}")


def default_truth(scenario: str) -> ScenarioTruth:
    """Generating values for each scenario's reference experiment."""
    gamma = IrfParams(8.0, 0.2)
    alpha_ext = CovarianceSpec("matern", c0=0.1, c1=1.0, lambda_m=15.0,
                               nu=0.5)
    if scenario in (SCENARIO_STANDARD, SCENARIO_RANDOM):
        design = DesignSpec((LinearTrend(), SeasonalPair(12.0),
                             CyclicSplines(4), IrfCovariate(120)))
        beta = np.array([3.0, 0.15, -0.6, 18.0, 10.0, 18.0, 20.0, 1.5])
        if scenario == SCENARIO_RANDOM:
            beta = np.zeros_like(beta)
        alpha = CovarianceSpec("matern", c0=0.05, c1=2.0, lambda_m=25.0,
                               nu=1.5)
        return ScenarioTruth(design, beta, gamma, alpha, alpha_ext)
    if scenario == SCENARIO_AEP:
        design = DesignSpec((Intercept(), LinearTrend(), SeasonalPair(12.0),
                             IrfCovariate(120)))
        beta = np.array([16.0, 3.0, 0.15, -0.6, 1.5])
        alpha = CovarianceSpec("matern", c0=0.1, c1=0.9, lambda_m=25.0,
                               nu=1.5)
        theta = AepParams(0.0, 1.4, 0.4, 1.0, 1.9)
        return ScenarioTruth(design, beta, gamma, alpha, alpha_ext, theta)
    raise ParameterDomainError(
        f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")


@dataclass(frozen=True)
class ScenarioConfig:
    """One cell of the study: a scenario at one series length."""

    scenario: str
    n: int
    missing_fraction: float = 0.25
    replicates: int = 100
    base_seed: int = 0
    truth: ScenarioTruth | None = None

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ParameterDomainError(
                f"unknown scenario {self.scenario!r}; "
                f"expected one of {SCENARIOS}")
        if self.n < 16:
            raise ParameterDomainError(f"n must be >= 16, got {self.n}")
        if not 0.0 <= self.missing_fraction < 1.0:
            raise ParameterDomainError(
                f"missing fraction must lie in [0, 1), "
                f"got {self.missing_fraction}")
        if self.replicates < 1:
            raise ParameterDomainError(
                f"replicates must be >= 1, got {self.replicates}")
        if self.base_seed < 0:
            raise ParameterDomainError(
                f"base seed must be >= 0, got {self.base_seed}")
        if self.truth is None:
            object.__setattr__(self, "truth", default_truth(self.scenario))
        if (self.scenario == SCENARIO_AEP) != (self.truth.theta is not None):
            raise ParameterDomainError(
                "error-shape parameters are required exactly for the "
                "skewed-error scenario")

    def stream_rng(self, replicate: int, stream: int,
                   scenario_id: int | None = None) -> np.random.Generator:
        """Independent generator for one (replicate, stream) pair."""
        sid = (_SCENARIO_IDS[self.scenario]
               if scenario_id is None else scenario_id)
        return np.random.default_rng(np.random.SeedSequence(
            [self.base_seed, sid, self.n, replicate, stream]))


def gen_external_variable(alpha_ext: CovarianceSpec, length: int,
                          seed) -> ExogenousSeries:
    """Strictly positive driver: elementwise exp of a Gaussian draw."""
    return ExogenousSeries(
        np.exp(simulate_gaussian_process(alpha_ext, length, seed)))


def draw_mcar_mask(rng: np.random.Generator, n: int, fraction: float,
                   min_observed: int) -> tuple[np.ndarray, int]:
    """Miss-completely-at-random mask keeping at least ``min_observed``.

    Draws are repeated (count returned) until enough points survive, so
    downstream solvers always have more observations than parameters.
    """
    if min_observed > n:
        raise MaskError(
            f"cannot keep {min_observed} observed points in a series "
            f"of length {n}")
    for redraws in range(_MAX_MASK_REDRAWS + 1):
        mask = rng.random(n) >= fraction
        if int(mask.sum()) >= min_observed:
            return mask, redraws
    raise MaskError(
        f"no mask with >= {min_observed} observed points in "
        f"{_MAX_MASK_REDRAWS} draws at missing fraction {fraction}")


def gen_scenario(config: ScenarioConfig, replicate: int
                 ) -> tuple[ObservedSeries, ExogenousSeries, ScenarioTruth]:
    """Generate one replicate: latent series, driver, and the truth.

    The returned series stores the complete latent values — entries at
    masked times are the simulation truth, readable for scoring but
    invisible to every estimator (all computations go through the mask).
    The standard and fully random scenarios draw the exogenous driver
    from a shared stream, so at equal (n, replicate) they see the same
    design matrix.
    """
    truth = config.truth
    n = config.n
    exog_sid = (1 if config.scenario in (SCENARIO_STANDARD, SCENARIO_RANDOM)
                else _SCENARIO_IDS[config.scenario])
    exog = gen_external_variable(
        truth.alpha_ext, n + truth.irf_window - 1,
        config.stream_rng(replicate, STREAM_EXOG, scenario_id=exog_sid))
    error_rng = config.stream_rng(replicate, STREAM_ERROR)
    if truth.theta is not None:
        errors = simulate_aep_errors(truth.alpha, truth.theta, n, error_rng)
    else:
        errors = simulate_gaussian_process(truth.alpha, n, error_rng)
    matrix = build_design(truth.design, n, exog=exog,
                          gamma=truth.gamma).values
    latent = matrix @ truth.beta + errors
    min_observed = max(2 * truth.design.n_columns, 10)
    mask, redraws = draw_mcar_mask(
        config.stream_rng(replicate, STREAM_MASK),
        n, config.missing_fraction, min_observed)
    if redraws:
        logger.info("replicate %d of %s (n=%d): %d mask redraw(s) to keep "
                    "%d observed points", replicate, config.scenario, n,
                    redraws, min_observed)
    return ObservedSeries(latent, mask), exog, truth


def alpha_relative_error(alpha_hat: CovarianceSpec,
                         alpha_true: CovarianceSpec) -> float:
    """Sum of absolute proportional errors over covariance parameters."""
    if alpha_hat.family != alpha_true.family:
        raise NotApplicableError(
            f"cannot compare parameters across families "
            f"({alpha_hat.family} vs {alpha_true.family}); "
            f"compare implied autocovariances instead")
    names = alpha_true.free_parameter_names
    hat = np.array([getattr(alpha_hat, name) for name in names])
    true = np.array([getattr(alpha_true, name) for name in names])
    if np.any(true == 0.0):
        raise NotApplicableError(
            "relative covariance error is undefined when a true "
            "parameter is 0")
    return float(np.abs((hat - true) / true).sum())


def acv_divergence(alpha_hat: CovarianceSpec, alpha_true: CovarianceSpec,
                   n: int) -> float:
    """Sum of absolute autocovariance gaps over lags ``0 .. n-1``."""
    return float(np.abs(acv_sequence(alpha_hat, n)
                        - acv_sequence(alpha_true, n)).sum())


def beta_relative_error(beta_hat, beta_true) -> float:
    """Sum of absolute proportional regression-coefficient errors."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_true = np.asarray(beta_true, dtype=float)
    if np.any(beta_true == 0.0):
        raise NotApplicableError(
            "relative regression error is undefined when a true "
            "coefficient is 0; use the absolute error instead")
    return float(np.abs((beta_hat - beta_true) / beta_true).sum())


def beta_absolute_error(beta_hat, beta_true) -> float:
    """Sum of absolute regression-coefficient errors."""
    return float(np.abs(np.asarray(beta_hat, dtype=float)
                        - np.asarray(beta_true, dtype=float)).sum())


def irf_divergence(gamma_hat: IrfParams, gamma_true: IrfParams,
                   window: int) -> float:
    """Sum of absolute gaps between normalized impulse-response curves."""
    return float(np.abs(irf_weights(gamma_hat, window)
                        - irf_weights(gamma_true, window)).sum())


def missing_rmse(prediction: Prediction, series: ObservedSeries) -> float:
    """Root mean squared prediction error at the masked times."""
    missing = np.flatnonzero(~series.mask)
    if missing.size == 0:
        raise NotApplicableError("the series has no missing values")
    expected = tuple(int(t) for t in missing + 1)
    if prediction.target_times != expected:
        raise ParameterDomainError(
            "prediction targets must be exactly the masked times")
    return float(np.sqrt(np.mean(
        (prediction.mean - series.values[missing]) ** 2)))


def compute_metrics(scenario: str, model_fit: ModelFit,
                    truth: ScenarioTruth, series: ObservedSeries,
                    prediction: Prediction | None = None
                    ) -> dict[str, float]:
    """All metrics applicable to ``scenario``, by name.

    Requesting a metric outside its scenario raises
    ``NotApplicableError`` from the individual metric functions; this
    driver only ever computes the applicable set.
    """
    if scenario not in SCENARIOS:
        raise ParameterDomainError(
            f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    values: dict[str, float] = {}
    for name in APPLICABLE_METRICS[scenario]:
        if name == METRIC_ALPHA_RELATIVE:
            values[name] = alpha_relative_error(model_fit.alpha, truth.alpha)
        elif name == METRIC_ACV_DIVERGENCE:
            values[name] = acv_divergence(model_fit.alpha, truth.alpha,
                                          series.n)
        elif name == METRIC_BETA_RELATIVE:
            values[name] = beta_relative_error(model_fit.beta, truth.beta)
        elif name == METRIC_BETA_ABSOLUTE:
            values[name] = beta_absolute_error(model_fit.beta, truth.beta)
        elif name == METRIC_IRF_DIVERGENCE:
            if model_fit.gamma is None:
                raise NotApplicableError(
                    "the fitted design has no impulse-response column")
            values[name] = irf_divergence(model_fit.gamma, truth.gamma,
                                          truth.irf_window)
        elif name == METRIC_MISSING_RMSE and prediction is not None:
            values[name] = missing_rmse(prediction, series)
    return values


def methods_for(scenario: str) -> tuple[str, ...]:
    """Estimation methods compared in a scenario."""
    base = (METHOD_WHITTLE, METHOD_GAUSSIAN_ML, METHOD_TWO_STAGE)
    if scenario == SCENARIO_AEP:
        return base + (METHOD_AEP_ML,)
    return base


def model_spec_for(scenario: str, truth: ScenarioTruth, method: str, *,
                   profile_regression: bool = False) -> ModelSpec:
    """The fitting specification a method uses in a scenario.

    Gaussian-error methods always estimate the full covariance; the
    error-shape-aware method pins the copula variance to one and leaves
    the scale to the marginal.
    """
    if method == METHOD_AEP_ML:
        covariance = CovarianceModel(truth.alpha.family,
                                     pin_total_variance=True)
    else:
        covariance = CovarianceModel(truth.alpha.family)
    return ModelSpec(
        truth.design, covariance, method=method,
        profile_regression=profile_regression and method == METHOD_WHITTLE)


@dataclass(frozen=True)
class StudyRow:
    """One recorded value in the long-format results table."""

    scenario: str
    n: int
    method: str
    replicate: int
    metric: str
    value: float


@dataclass(frozen=True)
class FailureRecord:
    """A replicate-method cell that raised, with the reason."""

    scenario: str
    n: int
    method: str
    replicate: int
    error: str


@dataclass(frozen=True)
class BoxplotGroup:
    """Boxplot-ready statistics for one (scenario, n, method, metric).

    Whiskers run from the minimum to the 90th percentile; values above
    the 90th percentile are individual points, and any of those beyond
    ``q3 + 5 IQR`` are dropped from the point list and only counted, to
    keep plots legible.
    """

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
    upper_points: tuple[float, ...]
    cutoff_count: int


@dataclass(frozen=True)
class StudyResult:
    """Long-format rows plus failures from one study run."""

    rows: tuple[StudyRow, ...]
    failures: tuple[FailureRecord, ...] = ()

    def values(self, scenario: str, n: int, method: str,
               metric: str) -> np.ndarray:
        return np.array([row.value for row in self.rows
                         if (row.scenario, row.n, row.method, row.metric)
                         == (scenario, n, method, metric)])

    def summary(self) -> list[BoxplotGroup]:
        groups: dict[tuple, list[float]] = {}
        for row in self.rows:
            key = (row.scenario, row.n, row.method, row.metric)
            groups.setdefault(key, []).append(row.value)
        out: list[BoxplotGroup] = []
        for key, values in groups.items():
            data = np.asarray(values, dtype=float)
            q1, median, q3, p90 = np.quantile(data, [0.25, 0.5, 0.75, 0.9])
            cap = q3 + 5.0 * (q3 - q1)
            upper = np.sort(data[data > p90])
            cut = int(np.count_nonzero(upper > cap))
            shown = upper if cut == 0 else upper[:-cut]
            out.append(BoxplotGroup(*key, data.size, float(data.min()),
                                    float(q1), float(median), float(q3),
                                    float(p90),
                                    tuple(float(v) for v in shown), cut))
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["scenario", "n", "method", "replicate",
                             "metric", "value"])
            for row in self.rows:
                writer.writerow([row.scenario, row.n, row.method,
                                 row.replicate, row.metric,
                                 repr(row.value)])

    def write_summary(self, path) -> None:
        payload = {
            "groups": [vars(group) | {"upper_points":
                                      list(group.upper_points)}
                       for group in self.summary()],
            "failures": [vars(record) for record in self.failures],
            "failure_count": len(self.failures),
        }
        with open(path, "w") as handle:
            json.dump(payload, handle, indent=2)


def _fit_seed(config: ScenarioConfig, replicate: int, method: str) -> int:
    stream = _STREAM_FIT_BASE + METHOD_ORDER.index(method)
    seq = np.random.SeedSequence(
        [config.base_seed, _SCENARIO_IDS[config.scenario], config.n,
         replicate, stream])
    return int(seq.generate_state(1)[0])


def run_replicate(config: ScenarioConfig, replicate: int, *,
                  methods: tuple[str, ...] | None = None,
                  optim: OptimConfig = OptimConfig(),
                  profile_regression: bool = False
                  ) -> tuple[list[StudyRow], list[FailureRecord]]:
    """Generate one replicate and run every method on it."""
    try:
        series, exog, truth = gen_scenario(config, replicate)
    except WhittlemixError as error:
        logger.warning("%s n=%d replicate %d failed to generate: %s",
                       config.scenario, config.n, replicate, error)
        return [], [FailureRecord(config.scenario, config.n, "generation",
                                  replicate, str(error))]
    missing = np.flatnonzero(~series.mask)
    rows: list[StudyRow] = []
    failures: list[FailureRecord] = []
    for method in methods or methods_for(config.scenario):
        spec = model_spec_for(config.scenario, truth, method,
                              profile_regression=profile_regression)
        cell = (config.scenario, config.n, method, replicate)
        try:
            started = time.perf_counter()
            model_fit = fit(series, spec, exog=exog.values,
                            config=replace(optim, seed=_fit_seed(
                                config, replicate, method)))
            elapsed = time.perf_counter() - started
            prediction = None
            if missing.size:
                request = PredictionRequest(
                    series, truth.design, model_fit,
                    tuple(int(t) for t in missing + 1), exog=exog.values)
                prediction = predict(request)
            metrics = compute_metrics(config.scenario, model_fit, truth,
                                      series, prediction)
        except (WhittlemixError, FloatingPointError) as error:
            logger.warning("%s n=%d %s replicate %d failed: %s",
                           config.scenario, config.n, method, replicate,
                           error)
            failures.append(FailureRecord(*cell, str(error)))
            continue
        metrics["wall_seconds"] = elapsed
        metrics["converged"] = float(model_fit.converged)
        rows.extend(StudyRow(*cell, name, value)
                    for name, value in metrics.items())
    return rows, failures


def _replicate_task(args) -> tuple[list[StudyRow], list[FailureRecord]]:
    config, replicate, methods, optim, profile = args
    return run_replicate(config, replicate, methods=methods, optim=optim,
                         profile_regression=profile)


def run_study(configs, *, methods: tuple[str, ...] | None = None,
              optim: OptimConfig = OptimConfig(), workers: int = 1,
              profile_regression: bool = False) -> StudyResult:
    """Run every configured cell over its replicates.

    Results are identical for any ``workers`` count because every
    replicate derives its own seed streams.  Failures are recorded and
    skipped, never fatal.
    """
    tasks = [(config, replicate, methods, optim, profile_regression)
             for config in configs
             for replicate in range(config.replicates)]
    rows: list[StudyRow] = []
    failures: list[FailureRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_replicate_task, tasks))
    else:
        outcomes = [_replicate_task(task) for task in tasks]
    for task_rows, task_failures in outcomes:
        rows.extend(task_rows)
        failures.extend(task_failures)
    return StudyResult(tuple(rows), tuple(failures))
