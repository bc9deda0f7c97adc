"""Joint estimation of mean and error-covariance parameters.

Three estimators share one optimizer contract:

* ``whittle`` — minimizes the debiased, missing-data-aware Whittle
  objective jointly over covariance parameters, regression coefficients,
  and impulse-response parameters.  An optional frequency-domain
  generalized-least-squares profile of the coefficients is available as
  an acceleration flag (exact: the objective is quadratic in them).
* ``gaussian_ml`` — exact Gaussian likelihood over observed rows with the
  coefficients profiled out in closed form at every evaluation.
* ``two_stage`` — stage 1 fits the mean by least squares (optimizing the
  impulse-response parameters numerically when present), stage 2 fits the
  covariance by the Whittle objective on the frozen stage-1 residuals.
* ``aep_ml`` — exact likelihood with asymmetric-exponential-power margins
  coupled by the Gaussian copula of the error process.

All methods run Nelder-Mead over transformed parameters with jittered
restarts and deterministic, data-driven starting points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.linalg import cho_factor, cho_solve, qr

from . import aep as aep_module
from .covariance import MATERN, CovarianceSpec, acv_sequence
from .design import (
    DesignSpec,
    ExogenousSeries,
    IrfParams,
    as_exogenous,
    build_design,
    irf_column,
)
from .errors import (
    DesignError,
    FactorizationError,
    MaskError,
    ParameterDomainError,
    SpectrumDomainError,
)
from .optim import (
    IdentityTransform,
    LogitTransform,
    LogTransform,
    OptimConfig,
    OptimizerReport,
    ShiftedLogTransform,
    TransformedVector,
    minimize_with_restarts,
)
from .series import ObservedSeries
from .spectral import (
    FrequencyGrid,
    expected_periodogram,
    mask_pair_counts,
    to_grid_order,
)

__all__ = [
    "METHOD_WHITTLE",
    "METHOD_GAUSSIAN_ML",
    "METHOD_TWO_STAGE",
    "METHOD_AEP_ML",
    "METHODS",
    "CovarianceModel",
    "ModelSpec",
    "ModelFit",
    "FitWorkspace",
    "whittle_nll",
    "gaussian_nll",
    "profile_beta",
    "fit",
]

METHOD_WHITTLE = "whittle"
METHOD_GAUSSIAN_ML = "gaussian_ml"
METHOD_TWO_STAGE = "two_stage"
METHOD_AEP_ML = "aep_ml"
METHODS = (METHOD_WHITTLE, METHOD_GAUSSIAN_ML, METHOD_TWO_STAGE, METHOD_AEP_ML)

_LOG_2PI = math.log(2.0 * math.pi)
_NUGGET_SHIFT = 1e-10
_DEFAULT_GAMMA_START = (1.0, 0.1)
_NUGGET_FRACTION_START = 0.05
_THETA_NAMES = ("mu", "sigma", "varsigma", "p1", "p2")


@dataclass(frozen=True)
class CovarianceModel:
    """A covariance family with a free/fixed split of its parameters.

    ``fixed`` maps parameter names to pinned values; the remaining family
    parameters are estimated.  With ``pin_total_variance`` the partial
    sill is derived as ``c1 = 1 - c0`` (unit total variance, the copula
    convention), so ``c0`` becomes a unit-interval parameter and ``c1``
    leaves the free list.
    """

    family: str = MATERN
    fixed: Mapping[str, float] = field(default_factory=dict)
    pin_total_variance: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "fixed", dict(self.fixed))
        names = self._family_names()
        for key, value in self.fixed.items():
            if key not in names:
                raise ParameterDomainError(
                    f"parameter {key!r} is not estimated for family "
                    f"{self.family!r}; expected a subset of {names}")
            if not np.isfinite(value):
                raise ParameterDomainError(
                    f"fixed value for {key!r} must be finite, got {value}")
        if self.pin_total_variance:
            if "c1" in self.fixed:
                raise ParameterDomainError(
                    "c1 is derived as 1 - c0 when the total variance is "
                    "pinned; do not fix it separately")
            c0 = self.fixed.get("c0")
            if c0 is not None and not 0.0 < c0 < 1.0:
                raise ParameterDomainError(
                    f"with pinned total variance c0 must lie in (0, 1), "
                    f"got {c0}")

    def _family_names(self) -> tuple[str, ...]:
        template = CovarianceSpec(self.family, c0=0.5, c1=0.5, lambda_m=1.0)
        return template.free_parameter_names

    @property
    def free_names(self) -> tuple[str, ...]:
        names = []
        for name in self._family_names():
            if name in self.fixed:
                continue
            if name == "c1" and self.pin_total_variance:
                continue
            names.append(name)
        return tuple(names)

    def transforms(self) -> tuple[object, ...]:
        out = []
        for name in self.free_names:
            if name == "c0":
                out.append(LogitTransform() if self.pin_total_variance
                           else ShiftedLogTransform(_NUGGET_SHIFT))
            else:
                out.append(LogTransform())
        return tuple(out)

    def build(self, free_values: Mapping[str, float]) -> CovarianceSpec:
        """Assemble a full spec from free values plus the fixed ones."""
        params = dict(self.fixed)
        params.update(free_values)
        if self.pin_total_variance:
            c0 = params.get("c0")
            if c0 is None:
                raise ParameterDomainError("pinned covariance needs c0")
            if not 0.0 < c0 < 1.0:
                raise ParameterDomainError(
                    f"with pinned total variance c0 must lie in (0, 1), "
                    f"got {c0}")
            params["c1"] = 1.0 - c0
        missing = [n for n in self._family_names() if n not in params]
        if missing:
            raise ParameterDomainError(
                f"covariance parameters missing values: {missing}")
        return CovarianceSpec(self.family, **params)


@dataclass(frozen=True)
class ModelSpec:
    """What to fit: design, covariance model, and estimation method."""

    design: DesignSpec
    covariance: CovarianceModel
    method: str = METHOD_WHITTLE
    exclude_zero_frequency: bool = False
    profile_regression: bool = False
    theta_fixed: Mapping[str, float] = field(
        default_factory=lambda: {"mu": 0.0})

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ParameterDomainError(
                f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.profile_regression and self.method != METHOD_WHITTLE:
            raise ParameterDomainError(
                "profile_regression applies to the whittle method only")
        if self.method == METHOD_AEP_ML and not self.covariance.pin_total_variance:
            raise ParameterDomainError(
                "the AEP likelihood requires unit total error variance; "
                "use a covariance model with pin_total_variance=True")
        object.__setattr__(self, "theta_fixed", dict(self.theta_fixed))
        for key, value in self.theta_fixed.items():
            if key not in _THETA_NAMES:
                raise ParameterDomainError(
                    f"unknown AEP parameter {key!r}; expected a subset of "
                    f"{_THETA_NAMES}")
            if not np.isfinite(value):
                raise ParameterDomainError(
                    f"fixed value for {key!r} must be finite, got {value}")

    @property
    def theta_free_names(self) -> tuple[str, ...]:
        return tuple(n for n in _THETA_NAMES if n not in self.theta_fixed)


@dataclass(frozen=True)
class ModelFit:
    """Estimated parameters plus optimizer diagnostics."""

    method: str
    alpha: CovarianceSpec
    beta: np.ndarray
    gamma: IrfParams | None
    theta: aep_module.AepParams | None
    objective: float
    report: OptimizerReport
    beta_labels: tuple[str, ...]
    stage_one_report: OptimizerReport | None = None
    clamp_events: int = 0

    def __post_init__(self) -> None:
        beta = np.ascontiguousarray(np.asarray(self.beta, dtype=float))
        beta.flags.writeable = False
        object.__setattr__(self, "beta", beta)

    @property
    def converged(self) -> bool:
        primary = bool(self.report.converged and np.isfinite(self.objective))
        if self.stage_one_report is not None:
            return primary and self.stage_one_report.converged
        return primary


class FitWorkspace:
    """Cached quantities for repeated objective evaluations on one series.

    Owns the frequency grid, the mask pair counts, the static design
    columns (everything except the impulse-response column, which depends
    on the parameters being optimized), the DFTs the generalized-least-
    squares profile needs, and the observed-row views the exact
    likelihoods need.  A workspace is single-threaded; each fit owns one.
    """

    def __init__(self, series: ObservedSeries, design: DesignSpec, *,
                 exog=None, exclude_zero_frequency: bool = False):
        self.series = series
        self.design = design
        self.n = series.n
        self.exog: ExogenousSeries | None = None
        if design.needs_exogenous:
            if exog is None:
                raise DesignError("this design needs an exogenous series")
            self.exog = as_exogenous(exog)

        self.grid = FrequencyGrid(self.n)
        self.include = np.ones(self.n, dtype=bool)
        if exclude_zero_frequency:
            self.include[self.grid.zero_position] = False

        mask = series.mask.astype(float)
        self.pair_counts = mask_pair_counts(mask)
        self.acv_weights = self.pair_counts / self.n
        self.masked_values = series.masked_values()

        labels = design.column_labels
        self.m = design.n_columns
        self._irf_position = (labels.index("exog_response")
                              if "exog_response" in labels else None)
        self._irf_window = (design.irf_component.window
                            if design.irf_component is not None else 0)
        gamma_ref = (IrfParams(*_DEFAULT_GAMMA_START)
                     if self._irf_position is not None else None)
        base = build_design(design, self.n, exog=self.exog, gamma=gamma_ref)
        self._matrix = np.array(base.values)  # writable working copy
        self._matrix_gamma: tuple[float, float] | None = None

        self.observed = series.observed_indices
        self.n_observed = series.n_observed
        self.x_observed = series.values[self.observed]
        # integer lag gathers: C_obs = acv_sequence(alpha)[lag_matrix];
        # quadratic in the observed count, so built only when an exact
        # likelihood first asks for it — the spectral path never does.
        self._lag_matrix_cache: np.ndarray | None = None

        self._mask = mask
        self._gls_static_ffts: np.ndarray | None = None
        self._gls_value_fft: np.ndarray | None = None

    # ---------------------------------------------------------------- mean
    def design_matrix(self, gamma: IrfParams | None) -> np.ndarray:
        """The n x m design matrix at ``gamma`` (cached static columns)."""
        if self._irf_position is None:
            return self._matrix
        if gamma is None:
            raise DesignError("this design needs impulse-response parameters")
        key = (gamma.s, gamma.a)
        if key != self._matrix_gamma:
            self._matrix[:, self._irf_position] = irf_column(
                self.exog, gamma, self._irf_window, self.n)
            self._matrix_gamma = key
        return self._matrix

    def residuals_observed(self, beta, gamma: IrfParams | None) -> np.ndarray:
        matrix = self.design_matrix(gamma)
        beta = self._check_beta(beta)
        return self.x_observed - matrix[self.observed] @ beta

    def ols_beta(self, gamma: IrfParams | None) -> np.ndarray:
        matrix = self.design_matrix(gamma)[self.observed]
        solution, _, rank, _ = np.linalg.lstsq(matrix, self.x_observed,
                                               rcond=None)
        if rank < self.m:
            raise DesignError(
                "design matrix is rank deficient on the observed rows; "
                "remove redundant columns")
        return solution

    def _check_beta(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.m,):
            raise DesignError(
                f"expected {self.m} coefficients, got shape {beta.shape}")
        return beta

    # ------------------------------------------------------------ spectral
    def expected_spectrum(self, alpha: CovarianceSpec) -> np.ndarray:
        """Expected modulated periodogram at every grid frequency."""
        weighted = acv_sequence(alpha, self.n) * self.acv_weights
        return expected_periodogram(weighted)

    def residual_periodogram(self, beta, gamma: IrfParams | None) -> np.ndarray:
        matrix = self.design_matrix(gamma)
        beta = self._check_beta(beta)
        with np.errstate(all="ignore"):
            resid = np.where(self.series.mask,
                             self.series.values - matrix @ beta, 0.0)
            return to_grid_order(np.abs(np.fft.fft(resid)) ** 2 / self.n)

    def whittle(self, alpha: CovarianceSpec, beta,
                gamma: IrfParams | None = None) -> float:
        """Whittle objective; +inf (never a crash) off the spectral domain."""
        beta = self._check_beta(beta)
        with np.errstate(all="ignore"):
            try:
                f = self.expected_spectrum(alpha)
            except (ParameterDomainError, SpectrumDomainError):
                return math.inf
            i_tilde = self.residual_periodogram(beta, gamma)
            value = np.sum(np.log(f[self.include])
                           + i_tilde[self.include] / f[self.include])
        return float(value) if np.isfinite(value) else math.inf

    def _gls_components(self, gamma: IrfParams | None):
        if self._gls_value_fft is None:
            self._gls_value_fft = to_grid_order(np.fft.fft(self.masked_values))
        if self._gls_static_ffts is None:
            static = np.array(self._matrix)
            if self._irf_position is not None:
                static[:, self._irf_position] = 0.0
            self._gls_static_ffts = to_grid_order(
                np.fft.fft(self._mask[:, None] * static, axis=0)).T
        ffts = self._gls_static_ffts
        if self._irf_position is not None:
            column = irf_column(self.exog, gamma, self._irf_window, self.n)
            ffts = ffts.copy()
            ffts[self._irf_position] = to_grid_order(
                np.fft.fft(self._mask * column))
        return ffts, self._gls_value_fft

    def whittle_profiled(self, alpha: CovarianceSpec,
                         gamma: IrfParams | None = None
                         ) -> tuple[float, np.ndarray]:
        """Profile the coefficients out of the Whittle objective exactly.

        The objective is quadratic in the coefficients, so the optimum is
        the solution of frequency-domain generalized-least-squares normal
        equations weighted by the expected spectrum.
        """
        with np.errstate(all="ignore"):
            try:
                f = self.expected_spectrum(alpha)
            except (ParameterDomainError, SpectrumDomainError):
                return math.inf, np.full(self.m, np.nan)
            ffts, value_fft = self._gls_components(gamma)
            w = 1.0 / f[self.include]
            col = ffts[:, self.include]
            val = value_fft[self.include]
            weighted = col * w
            normal = np.real(weighted @ col.conj().T)
            moment = np.real(weighted.conj() @ val)
            try:
                beta = np.linalg.solve(normal, moment)
            except np.linalg.LinAlgError:
                beta = np.linalg.lstsq(normal, moment, rcond=None)[0]
            resid_power = np.abs(val - beta @ col) ** 2 / self.n
            value = np.sum(np.log(f[self.include]) + resid_power * w)
        if not (np.isfinite(value) and np.all(np.isfinite(beta))):
            return math.inf, np.full(self.m, np.nan)
        return float(value), beta

    # ------------------------------------------------------------ gaussian
    @property
    def _lag_matrix(self) -> np.ndarray:
        if self._lag_matrix_cache is None:
            self._lag_matrix_cache = np.abs(
                self.observed[:, None] - self.observed[None, :]
            ).astype(np.intp)
        return self._lag_matrix_cache

    def covariance_matrix(self, alpha: CovarianceSpec) -> np.ndarray:
        """Dense covariance over the observed times via an integer gather."""
        return acv_sequence(alpha, self.n)[self._lag_matrix]

    def _cholesky(self, alpha: CovarianceSpec):
        matrix = self.covariance_matrix(alpha)
        try:
            return cho_factor(matrix, lower=True)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise FactorizationError(
                f"error covariance over the observed times cannot be "
                f"factorized at {alpha}") from exc

    def gaussian(self, alpha: CovarianceSpec, beta,
                 gamma: IrfParams | None = None) -> float:
        factor = self._cholesky(alpha)
        resid = self.residuals_observed(beta, gamma)
        quad = resid @ cho_solve(factor, resid)
        logdet = 2.0 * np.sum(np.log(np.diag(factor[0])))
        return float(0.5 * (logdet + quad + self.n_observed * _LOG_2PI))

    def gaussian_profiled(self, alpha: CovarianceSpec,
                          gamma: IrfParams | None = None
                          ) -> tuple[float, np.ndarray]:
        factor = self._cholesky(alpha)
        matrix = self.design_matrix(gamma)[self.observed]
        beta = _profile_beta_factored(factor, matrix, self.x_observed)
        resid = self.x_observed - matrix @ beta
        quad = resid @ cho_solve(factor, resid)
        logdet = 2.0 * np.sum(np.log(np.diag(factor[0])))
        value = float(0.5 * (logdet + quad + self.n_observed * _LOG_2PI))
        return value, beta

    # ----------------------------------------------------------------- aep
    def aep(self, alpha: CovarianceSpec, beta, gamma: IrfParams | None,
            theta: aep_module.AepParams) -> tuple[float, int]:
        factor = self._cholesky(alpha)
        resid = self.residuals_observed(beta, gamma)
        return aep_module.aep_nll_core(resid, factor, theta)


# --------------------------------------------------------------- functions

def whittle_nll(series: ObservedSeries, design: DesignSpec,
                alpha: CovarianceSpec, beta,
                gamma: IrfParams | None = None, *, exog=None,
                exclude_zero_frequency: bool = False,
                workspace: FitWorkspace | None = None) -> float:
    """Negative debiased Whittle log-likelihood over all Fourier frequencies.

    Sums ``log f(w_j) + I(w_j) / f(w_j)`` where ``f`` is the expected
    modulated periodogram under ``alpha`` and ``I`` is the modulated
    periodogram of the mean residuals.  Values stored at unobserved times
    never contribute.  Returns +inf for parameter points outside the
    spectral domain rather than raising, so optimizers can probe freely.
    """
    if workspace is None:
        workspace = FitWorkspace(series, design, exog=exog,
                                 exclude_zero_frequency=exclude_zero_frequency)
    return workspace.whittle(alpha, beta, gamma)


def gaussian_nll(series: ObservedSeries, design: DesignSpec,
                 alpha: CovarianceSpec, beta,
                 gamma: IrfParams | None = None, *, exog=None,
                 workspace: FitWorkspace | None = None) -> float:
    """Exact negative Gaussian log-likelihood over the observed rows.

    Rows (and matching covariance rows/columns) at unobserved times are
    deleted.  Includes the ``(n_obs / 2) log(2 pi)`` constant.  Raises
    ``FactorizationError`` if the covariance submatrix is not positive
    definite at ``alpha``.
    """
    if workspace is None:
        workspace = FitWorkspace(series, design, exog=exog)
    return workspace.gaussian(alpha, beta, gamma)


def _profile_beta_factored(factor, m_obs: np.ndarray,
                           x_obs: np.ndarray) -> np.ndarray:
    solved_m = cho_solve(factor, m_obs)
    normal = m_obs.T @ solved_m
    moment = solved_m.T @ x_obs
    try:
        return np.linalg.solve(normal, moment)
    except np.linalg.LinAlgError as exc:
        raise DesignError(
            "normal equations are singular; the design matrix is rank "
            "deficient on the observed rows") from exc


def profile_beta(m_obs, c_obs, x_obs, labels=None) -> np.ndarray:
    """Closed-form generalized-least-squares coefficients.

    Solves ``(M' C^-1 M) beta = M' C^-1 x`` through a Cholesky
    factorization of ``C`` — no explicit inverse is formed.  A rank-
    deficient design raises ``DesignError`` naming the dependent columns.
    """
    m_obs = np.asarray(m_obs, dtype=float)
    c_obs = np.asarray(c_obs, dtype=float)
    x_obs = np.asarray(x_obs, dtype=float)
    if m_obs.ndim != 2:
        raise DesignError("design matrix must be two-dimensional")
    n, m = m_obs.shape
    if c_obs.shape != (n, n) or x_obs.shape != (n,):
        raise DesignError(
            f"shape mismatch: design {m_obs.shape}, covariance "
            f"{c_obs.shape}, response {x_obs.shape}")
    _, r, pivots = qr(m_obs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag.max(initial=0.0) * max(n, m) * np.finfo(float).eps
    rank = int(np.sum(diag > tol))
    if rank < m:
        dependent = sorted(pivots[rank:].tolist())
        names = ([labels[i] for i in dependent] if labels is not None
                 else dependent)
        raise DesignError(
            f"design matrix is rank deficient: columns {names} are "
            f"linearly dependent on the others")
    try:
        factor = cho_factor(c_obs, lower=True)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            "covariance matrix is not positive definite") from exc
    return _profile_beta_factored(factor, m_obs, x_obs)


# --------------------------------------------------------------- layouts

@dataclass(frozen=True)
class _Layout:
    """Free-parameter vector layout for one method's optimization."""

    vector: TransformedVector
    alpha_names: tuple[str, ...]
    alpha_slice: slice
    beta_slice: slice
    gamma_slice: slice
    theta_names: tuple[str, ...]
    theta_slice: slice

    @property
    def size(self) -> int:
        return self.vector.size


def _build_layout(spec: ModelSpec, m: int, *, include_alpha: bool,
                  include_beta: bool, include_gamma: bool,
                  include_theta: bool) -> _Layout:
    names: list[str] = []
    transforms: list[object] = []

    alpha_names = spec.covariance.free_names if include_alpha else ()
    start = len(names)
    names.extend(alpha_names)
    transforms.extend(spec.covariance.transforms() if include_alpha else ())
    alpha_slice = slice(start, len(names))

    start = len(names)
    if include_beta:
        names.extend(f"beta_{k}" for k in range(m))
        transforms.extend(IdentityTransform() for _ in range(m))
    beta_slice = slice(start, len(names))

    start = len(names)
    if include_gamma:
        names.extend(["irf_s", "irf_a"])
        transforms.extend([LogTransform(), LogTransform()])
    gamma_slice = slice(start, len(names))

    theta_names = spec.theta_free_names if include_theta else ()
    start = len(names)
    names.extend(f"aep_{t}" for t in theta_names)
    for t in theta_names:
        if t == "mu":
            transforms.append(IdentityTransform())
        elif t == "varsigma":
            transforms.append(LogitTransform())
        else:
            transforms.append(LogTransform())
    theta_slice = slice(start, len(names))

    return _Layout(
        vector=TransformedVector(tuple(names), tuple(transforms)),
        alpha_names=alpha_names,
        alpha_slice=alpha_slice,
        beta_slice=beta_slice,
        gamma_slice=gamma_slice,
        theta_names=theta_names,
        theta_slice=theta_slice,
    )


def _decode(layout: _Layout, spec: ModelSpec, raw: np.ndarray,
            *, beta_default: np.ndarray | None = None,
            gamma_default: IrfParams | None = None):
    """Raw optimizer point -> (alpha, beta, gamma, theta); may raise."""
    values = layout.vector.to_domain(raw)
    alpha = spec.covariance.build(
        dict(zip(layout.alpha_names, values[layout.alpha_slice])))
    beta = (values[layout.beta_slice]
            if layout.beta_slice.stop > layout.beta_slice.start
            else beta_default)
    if layout.gamma_slice.stop > layout.gamma_slice.start:
        gamma_values = values[layout.gamma_slice]
        gamma = IrfParams(float(gamma_values[0]), float(gamma_values[1]))
    else:
        gamma = gamma_default
    theta = None
    if layout.theta_names:
        params = dict(spec.theta_fixed)
        params.update(zip(layout.theta_names, values[layout.theta_slice]))
        theta = aep_module.AepParams(**params)
    return alpha, beta, gamma, theta


# --------------------------------------------------------- initialization

def _empirical_acv_halving_lag(workspace: FitWorkspace,
                               residuals_full: np.ndarray) -> int:
    """Smallest lag at which the masked empirical autocovariance halves."""
    n = workspace.n
    masked = np.where(workspace.series.mask, residuals_full, 0.0)
    size = 2 * n
    spectrum = np.abs(np.fft.rfft(masked, size)) ** 2
    sums = np.fft.irfft(spectrum, size)[:n]
    counts = workspace.pair_counts
    with np.errstate(invalid="ignore", divide="ignore"):
        acv_hat = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    if acv_hat[0] <= 0.0:
        return max(1, n // 4)
    below = np.nonzero(acv_hat[1:] <= 0.5 * acv_hat[0])[0]
    lag = int(below[0]) + 1 if below.size else n // 4
    return int(min(max(lag, 1), n // 2))


def _stage_one_gamma(workspace: FitWorkspace, config: OptimConfig,
                     rng: np.random.Generator) -> tuple[IrfParams, OptimizerReport]:
    """Least-squares impulse-response parameters on the OLS problem."""
    gamma_vector = TransformedVector(
        ("irf_s", "irf_a"), (LogTransform(), LogTransform()))

    def stage_one(raw: np.ndarray) -> float:
        s, a = gamma_vector.to_domain(raw)
        gamma = IrfParams(float(s), float(a))
        resid = workspace.residuals_observed(
            workspace.ols_beta(gamma), gamma)
        return float(resid @ resid)

    raw0 = gamma_vector.to_raw(np.asarray(_DEFAULT_GAMMA_START, dtype=float))
    best_raw, report = minimize_with_restarts(
        _guarded(stage_one), raw0, config, rng=rng)
    s, a = gamma_vector.to_domain(best_raw)
    return IrfParams(float(s), float(a)), report


def _initial_point(spec: ModelSpec, workspace: FitWorkspace,
                   config: OptimConfig, rng: np.random.Generator):
    """Deterministic data-driven start: OLS mean, moment-matched covariance.

    When the design has an impulse-response component, the likelihood
    methods start from its stage-one least-squares estimate rather than
    the fixed default: the exact likelihood has a local optimum where an
    inflated, long-range covariance absorbs the unexplained driver signal,
    and a simplex search started far from the right response shape settles
    there.  The two-stage method skips the polish — its own first stage is
    this least-squares problem.
    """
    gamma0 = (IrfParams(*_DEFAULT_GAMMA_START)
              if workspace.design.needs_exogenous else None)
    if gamma0 is not None and spec.method != METHOD_TWO_STAGE:
        gamma0, _ = _stage_one_gamma(workspace, config, rng)
    beta0 = workspace.ols_beta(gamma0)
    resid_obs = workspace.residuals_observed(beta0, gamma0)
    matrix = workspace.design_matrix(gamma0)
    resid_full = workspace.series.values - matrix @ beta0
    variance = float(np.var(resid_obs))
    half_lag = _empirical_acv_halving_lag(workspace, resid_full)

    alpha0: dict[str, float] = {}
    for name in spec.covariance.free_names:
        if name == "c0":
            alpha0[name] = (_NUGGET_FRACTION_START
                            if spec.covariance.pin_total_variance
                            else max(_NUGGET_FRACTION_START * variance, 1e-8))
        elif name == "c1":
            alpha0[name] = max((1.0 - _NUGGET_FRACTION_START) * variance, 1e-8)
        elif name in ("lambda_m", "lambda_p"):
            alpha0[name] = float(half_lag)
        elif name == "nu":
            alpha0[name] = 1.0

    theta0: dict[str, float] = {}
    for name in spec.theta_free_names:
        if name == "mu":
            theta0[name] = float(np.mean(resid_obs))
        elif name == "sigma":
            theta0[name] = max(float(np.std(resid_obs)), 1e-6)
        elif name == "varsigma":
            theta0[name] = 0.5
        else:
            theta0[name] = 2.0
    return alpha0, beta0, gamma0, theta0


def _encode_start(layout: _Layout, alpha0: Mapping[str, float],
                  beta0: np.ndarray, gamma0: IrfParams | None,
                  theta0: Mapping[str, float]) -> np.ndarray:
    values: list[float] = [alpha0[name] for name in layout.alpha_names]
    if layout.beta_slice.stop > layout.beta_slice.start:
        values.extend(beta0)
    if layout.gamma_slice.stop > layout.gamma_slice.start:
        if gamma0 is None:
            raise DesignError("this design needs impulse-response parameters")
        values.extend([gamma0.s, gamma0.a])
    values.extend(theta0[name] for name in layout.theta_names)
    return layout.vector.to_raw(np.asarray(values, dtype=float))


# ---------------------------------------------------------------- fitting

def _guarded(evaluate):
    """Wrap an objective so domain and factorization failures score +inf."""

    def objective(raw: np.ndarray) -> float:
        try:
            value = evaluate(raw)
        except (ParameterDomainError, SpectrumDomainError,
                FactorizationError, FloatingPointError, OverflowError):
            return math.inf
        return value if np.isfinite(value) else math.inf

    return objective


def fit(series: ObservedSeries, spec: ModelSpec, *, exog=None,
        config: OptimConfig = OptimConfig()) -> ModelFit:
    """Estimate all free parameters of ``spec`` on ``series``.

    Dispatches on ``spec.method``; see the module docstring.  Non-
    convergence after all restarts is flagged on the returned fit, never
    raised — the best point found is still reported.
    """
    workspace = FitWorkspace(
        series, spec.design, exog=exog,
        exclude_zero_frequency=spec.exclude_zero_frequency)
    total_free = (len(spec.covariance.free_names) + workspace.m
                  + (2 if spec.design.needs_exogenous else 0)
                  + (len(spec.theta_free_names)
                     if spec.method == METHOD_AEP_ML else 0))
    _require_enough_observations(workspace, total_free)
    rng = np.random.default_rng(config.seed)
    alpha0, beta0, gamma0, theta0 = _initial_point(spec, workspace, config, rng)

    if spec.method == METHOD_TWO_STAGE:
        return _fit_two_stage(series, spec, workspace, config, rng, alpha0)

    include_gamma = workspace.design.needs_exogenous
    include_beta = spec.method in (METHOD_WHITTLE, METHOD_AEP_ML) \
        and not spec.profile_regression
    include_theta = spec.method == METHOD_AEP_ML
    layout = _build_layout(spec, workspace.m, include_alpha=True,
                           include_beta=include_beta,
                           include_gamma=include_gamma,
                           include_theta=include_theta)

    def evaluate(raw: np.ndarray) -> float:
        alpha, beta, gamma, theta = _decode(layout, spec, raw,
                                            beta_default=beta0,
                                            gamma_default=gamma0)
        if spec.method == METHOD_GAUSSIAN_ML:
            return workspace.gaussian_profiled(alpha, gamma)[0]
        if spec.method == METHOD_AEP_ML:
            return workspace.aep(alpha, beta, gamma, theta)[0]
        if spec.profile_regression:
            return workspace.whittle_profiled(alpha, gamma)[0]
        return workspace.whittle(alpha, beta, gamma)

    x0 = _encode_start(layout, alpha0, beta0, gamma0, theta0)
    best_raw, report = minimize_with_restarts(
        _guarded(evaluate), x0, config, rng=rng)

    alpha, beta, gamma, theta = _decode(layout, spec, best_raw,
                                        beta_default=beta0,
                                        gamma_default=gamma0)
    clamp_events = 0
    if spec.method == METHOD_GAUSSIAN_ML:
        objective, beta = workspace.gaussian_profiled(alpha, gamma)
    elif spec.method == METHOD_AEP_ML:
        objective, clamp_events = workspace.aep(alpha, beta, gamma, theta)
    elif spec.profile_regression:
        objective, beta = workspace.whittle_profiled(alpha, gamma)
    else:
        objective = report.objective
    return ModelFit(
        method=spec.method,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        theta=theta,
        objective=float(objective),
        report=report,
        beta_labels=spec.design.column_labels,
        clamp_events=clamp_events,
    )


def _require_enough_observations(workspace: FitWorkspace, count: int) -> None:
    if workspace.n_observed < count:
        raise MaskError(
            f"cannot fit {count} free parameters from "
            f"{workspace.n_observed} observed points")


def _fit_two_stage(series: ObservedSeries, spec: ModelSpec,
                   workspace: FitWorkspace, config: OptimConfig,
                   rng: np.random.Generator, alpha0) -> ModelFit:
    stage_one_report: OptimizerReport | None = None
    if workspace.design.needs_exogenous:
        gamma_hat, stage_one_report = _stage_one_gamma(workspace, config, rng)
    else:
        gamma_hat = None
    beta_hat = workspace.ols_beta(gamma_hat)

    layout = _build_layout(spec, workspace.m, include_alpha=True,
                           include_beta=False, include_gamma=False,
                           include_theta=False)
    if layout.size == 0:
        raise ParameterDomainError(
            "two-stage fitting needs at least one free covariance parameter")

    i_tilde = workspace.residual_periodogram(beta_hat, gamma_hat)
    included = i_tilde[workspace.include]

    def stage_two(raw: np.ndarray) -> float:
        alpha, _, _, _ = _decode(layout, spec, raw)
        with np.errstate(all="ignore"):
            f = workspace.expected_spectrum(alpha)[workspace.include]
            value = np.sum(np.log(f) + included / f)
        return float(value) if np.isfinite(value) else math.inf

    x0 = _encode_start(layout, alpha0, beta_hat, gamma_hat, {})
    best_raw, report = minimize_with_restarts(
        _guarded(stage_two), x0, config, rng=rng)
    alpha, _, _, _ = _decode(layout, spec, best_raw)
    return ModelFit(
        method=spec.method,
        alpha=alpha,
        beta=beta_hat,
        gamma=gamma_hat,
        theta=None,
        objective=report.objective,
        report=report,
        beta_labels=spec.design.column_labels,
        stage_one_report=stage_one_report,
    )
