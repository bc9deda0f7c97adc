"""Asymmetric exponential power (AEP) margins for the error process.

The AEP law has five parameters: location ``mu`` (the mode), scale
``sigma``, skewness ``varsigma`` in (0, 1), and separate left/right tail
exponents ``p1``, ``p2``.  This module provides the density, distribution
and quantile functions, simulation of correlated AEP errors by pushing a
unit-variance Gaussian process through the probability transform (a
Gaussian copula), the exact likelihood coupling AEP margins with the
Gaussian dependence structure, and an iid marginal fit used for residual
diagnostics.

Everything is evaluated in log space: the normalizing constant
``K(p) = 1 / (2 p^(1/p) Gamma(1 + 1/p))`` itself over- or underflows for
extreme tail exponents, so only its logarithm is ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import expit, gammainc, gammaincinv, gammaln, ndtr, ndtri

from .covariance import CovarianceSpec
from .errors import FactorizationError, ParameterDomainError
from .optim import (
    IdentityTransform,
    LogitTransform,
    LogTransform,
    OptimConfig,
    OptimizerReport,
    TransformedVector,
    minimize_with_restarts,
)
from .sampling import simulate_gaussian_process

__all__ = [
    "AepParams",
    "AepMarginalFit",
    "aep_pdf",
    "aep_log_pdf",
    "aep_cdf",
    "aep_quantile",
    "simulate_aep_errors",
    "aep_nll",
    "aep_nll_core",
    "fit_aep_marginal",
]

_CDF_CLAMP = 1e-15
_UNIT_VARIANCE_TOL = 1e-9
_LOG2 = math.log(2.0)


def _log_normalizer(p: float) -> float:
    """log K(p) with K(p) = 1 / (2 p^(1/p) Gamma(1 + 1/p))."""
    return -(_LOG2 + math.log(p) / p + gammaln(1.0 + 1.0 / p))


@dataclass(frozen=True)
class AepParams:
    """Parameters of one asymmetric exponential power distribution.

    Derived quantities are cached on construction: the log normalizing
    constants of each tail and the effective skewness ``varsigma_star``
    that reweights the two branches so the density is continuous at the
    mode.
    """

    mu: float
    sigma: float
    varsigma: float
    p1: float
    p2: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.mu):
            raise ParameterDomainError(f"location mu must be finite, got {self.mu}")
        if not (np.isfinite(self.sigma) and self.sigma > 0.0):
            raise ParameterDomainError(f"scale sigma must be > 0, got {self.sigma}")
        if not (np.isfinite(self.varsigma) and 0.0 < self.varsigma < 1.0):
            raise ParameterDomainError(
                f"skewness varsigma must lie in (0, 1), got {self.varsigma}")
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not (np.isfinite(p) and p > 0.0):
                raise ParameterDomainError(
                    f"tail exponent {name} must be > 0, got {p}")
        log_k1 = _log_normalizer(self.p1)
        log_k2 = _log_normalizer(self.p2)
        star = float(expit(
            math.log(self.varsigma) - math.log1p(-self.varsigma)
            + log_k1 - log_k2))
        if not 0.0 < star < 1.0:
            raise ParameterDomainError(
                f"tail exponents p1={self.p1}, p2={self.p2} are too extreme: "
                f"the branch weight degenerates to {star}")
        object.__setattr__(self, "log_k1", log_k1)
        object.__setattr__(self, "log_k2", log_k2)
        object.__setattr__(self, "varsigma_star", star)


def _branch_arguments(z, params: AepParams):
    z = np.asarray(z, dtype=float)
    left = z <= params.mu
    scale_left = 2.0 * params.varsigma_star * params.sigma
    scale_right = 2.0 * (1.0 - params.varsigma_star) * params.sigma
    u = np.where(left, (params.mu - z) / scale_left,
                 (z - params.mu) / scale_right)
    return z, left, u


def aep_log_pdf(z, params: AepParams) -> np.ndarray | float:
    """Log density, exact in both tails."""
    z, left, u = _branch_arguments(z, params)
    with np.errstate(over="ignore"):
        exponent = np.where(left,
                            np.power(u, params.p1) / params.p1,
                            np.power(u, params.p2) / params.p2)
    log_front_left = (math.log(params.varsigma)
                      - math.log(params.varsigma_star)
                      - math.log(params.sigma) + params.log_k1)
    log_front_right = (math.log1p(-params.varsigma)
                       - math.log1p(-params.varsigma_star)
                       - math.log(params.sigma) + params.log_k2)
    result = np.where(left, log_front_left, log_front_right) - exponent
    return result if result.ndim else float(result)


def aep_pdf(z, params: AepParams) -> np.ndarray | float:
    """Density of the AEP law; two power-exponential branches at the mode."""
    result = np.exp(aep_log_pdf(z, params))
    return result if np.ndim(result) else float(result)


def aep_cdf(z, params: AepParams) -> np.ndarray | float:
    """Distribution function via the regularized lower incomplete gamma."""
    z, left, u = _branch_arguments(z, params)
    with np.errstate(over="ignore"):
        arg_left = np.power(u, params.p1) / params.p1
        arg_right = np.power(u, params.p2) / params.p2
    result = np.where(
        left,
        params.varsigma * (1.0 - gammainc(1.0 / params.p1, arg_left)),
        params.varsigma
        + (1.0 - params.varsigma) * gammainc(1.0 / params.p2, arg_right))
    return result if result.ndim else float(result)


def aep_quantile(pi, params: AepParams) -> np.ndarray | float:
    """Quantile function; exact inverse of ``aep_cdf`` branch by branch."""
    pi = np.asarray(pi, dtype=float)
    if np.any(pi < 0.0) or np.any(pi > 1.0) or not np.all(np.isfinite(pi)):
        raise ParameterDomainError("probabilities must lie in [0, 1]")
    lower = pi <= params.varsigma
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        q_left = np.power(
            params.p1 * gammaincinv(
                1.0 / params.p1,
                1.0 - np.where(lower, pi, 0.0) / params.varsigma),
            1.0 / params.p1)
        q_right = np.power(
            params.p2 * gammaincinv(
                1.0 / params.p2,
                (np.where(lower, 1.0, pi) - params.varsigma)
                / (1.0 - params.varsigma)),
            1.0 / params.p2)
    scale_left = 2.0 * params.varsigma_star * params.sigma
    scale_right = 2.0 * (1.0 - params.varsigma_star) * params.sigma
    result = np.where(lower,
                      params.mu - scale_left * q_left,
                      params.mu + scale_right * q_right)
    return result if result.ndim else float(result)


def simulate_aep_errors(cov: CovarianceSpec, params: AepParams, n: int,
                        seed) -> np.ndarray:
    """Correlated AEP errors: a Gaussian draw pushed through Phi then F^-1.

    The underlying Gaussian process must have unit total variance so that
    its margins are standard normal and the probability transform is
    exact.
    """
    if abs(cov.total_variance - 1.0) > _UNIT_VARIANCE_TOL:
        raise ParameterDomainError(
            f"the Gaussian process driving AEP errors must have total "
            f"variance c0 + c1 = 1, got {cov.total_variance}")
    gaussian = simulate_gaussian_process(cov, n, seed)
    return np.asarray(aep_quantile(ndtr(gaussian), params))


def aep_nll_core(residuals: np.ndarray, factor,
                 params: AepParams) -> tuple[float, int]:
    """Negative log-likelihood given a Cholesky factor of the copula matrix.

    ``factor`` is a ``scipy.linalg.cho_factor`` result for the unit-
    variance error covariance over the observed times.  Residual
    probabilities are clamped away from {0, 1} before the normal inverse;
    the clamp count is returned for diagnostics.
    """
    probabilities = np.asarray(aep_cdf(residuals, params))
    clamps = int(np.sum((probabilities < _CDF_CLAMP)
                        | (probabilities > 1.0 - _CDF_CLAMP)))
    a = ndtri(np.clip(probabilities, _CDF_CLAMP, 1.0 - _CDF_CLAMP))
    quad = a @ cho_solve(factor, a)
    logdet = 2.0 * np.sum(np.log(np.diag(factor[0])))
    log_f = np.asarray(aep_log_pdf(residuals, params))
    value = 0.5 * logdet - 0.5 * (a @ a - quad) - np.sum(log_f)
    if not np.isfinite(value):
        return math.inf, clamps
    return float(value), clamps


def aep_nll(series, design, alpha: CovarianceSpec, beta,
            theta: AepParams, gamma=None, *, exog=None) -> float:
    """Exact AEP likelihood over observed rows (deleted elsewhere).

    Couples AEP margins with the Gaussian dependence of the error
    process: residuals are mapped to normal scores through the AEP
    distribution function, scored under the unit-variance Gaussian
    process law, and the marginal density correction is added.
    """
    from .design import build_design
    from .covariance import acv_sequence

    if abs(alpha.total_variance - 1.0) > _UNIT_VARIANCE_TOL:
        raise ParameterDomainError(
            f"the AEP likelihood requires total error variance c0 + c1 = 1, "
            f"got {alpha.total_variance}")
    matrix = build_design(design, series.n, exog=exog, gamma=gamma).values
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (matrix.shape[1],):
        raise ParameterDomainError(
            f"expected {matrix.shape[1]} coefficients, got shape {beta.shape}")
    observed = series.observed_indices
    if observed.size < matrix.shape[1]:
        raise ParameterDomainError(
            f"need at least {matrix.shape[1]} observed points, "
            f"got {observed.size}")
    residuals = series.values[observed] - matrix[observed] @ beta
    lags = np.abs(observed[:, None] - observed[None, :]).astype(np.intp)
    covariance = acv_sequence(alpha, series.n)[lags]
    try:
        factor = cho_factor(covariance, lower=True)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            f"error covariance over the observed times is not positive "
            f"definite at {alpha}") from exc
    return aep_nll_core(residuals, factor, params=theta)[0]


@dataclass(frozen=True)
class AepMarginalFit:
    """Result of an iid AEP fit to residuals."""

    params: AepParams
    objective: float
    report: OptimizerReport

    @property
    def converged(self) -> bool:
        return self.report.converged


def fit_aep_marginal(residuals, config: OptimConfig = OptimConfig()
                     ) -> AepMarginalFit:
    """Maximum-likelihood AEP fit treating residuals as independent.

    Starts from moment estimates (median location, standard-deviation
    scale, symmetric tails) and minimizes the iid negative log-likelihood
    with the shared restarted simplex.
    """
    residuals = np.asarray(residuals, dtype=float)
    if residuals.ndim != 1 or residuals.size < 50:
        raise ParameterDomainError(
            f"marginal AEP fitting needs at least 50 residuals in a vector, "
            f"got shape {residuals.shape}")
    if not np.all(np.isfinite(residuals)):
        raise ParameterDomainError("residuals must be finite")

    vector = TransformedVector(
        ("mu", "sigma", "varsigma", "p1", "p2"),
        (IdentityTransform(), LogTransform(), LogitTransform(),
         LogTransform(), LogTransform()))
    start = vector.to_raw([
        float(np.median(residuals)),
        max(float(np.std(residuals)), 1e-6),
        0.5, 2.0, 2.0,
    ])

    def objective(raw: np.ndarray) -> float:
        try:
            mu, sigma, varsigma, p1, p2 = vector.to_domain(raw)
            params = AepParams(mu, sigma, varsigma, p1, p2)
        except ParameterDomainError:
            return math.inf
        value = -np.sum(aep_log_pdf(residuals, params))
        return float(value) if np.isfinite(value) else math.inf

    best_raw, report = minimize_with_restarts(
        objective, start, config,
        rng=np.random.default_rng(config.seed))
    mu, sigma, varsigma, p1, p2 = vector.to_domain(best_raw)
    return AepMarginalFit(
        params=AepParams(mu, sigma, varsigma, p1, p2),
        objective=report.objective,
        report=report,
    )
