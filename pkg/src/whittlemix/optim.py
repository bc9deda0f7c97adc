"""Derivative-free optimization: parameter transforms and restarted Nelder-Mead.

All objectives in this package are minimized over an unconstrained vector of
transformed parameters.  Strictly positive quantities travel on a log scale,
nonnegative quantities on a shifted-log scale, unit-interval quantities on a
logit scale, and unconstrained coefficients on the identity scale.  The
optimizer runs scipy's Nelder-Mead simplex from a deterministic start plus a
configurable number of jittered restarts, keeping the best converged point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit

from .errors import ParameterDomainError

__all__ = [
    "IdentityTransform",
    "LogTransform",
    "ShiftedLogTransform",
    "LogitTransform",
    "OptimConfig",
    "RestartRecord",
    "OptimizerReport",
    "TransformedVector",
    "minimize_with_restarts",
]

_TIE_WINDOW = 1e-12


class IdentityTransform:
    """Unconstrained parameter (regression coefficients, AEP location)."""

    def to_raw(self, value: float) -> float:
        return float(value)

    def to_domain(self, raw: float) -> float:
        return float(raw)


class LogTransform:
    """Strictly positive parameter."""

    def to_raw(self, value: float) -> float:
        if value <= 0.0:
            raise ParameterDomainError(f"log transform requires a positive value, got {value}")
        return math.log(value)

    def to_domain(self, raw: float) -> float:
        return math.exp(raw)


class ShiftedLogTransform:
    """Nonnegative parameter; zero maps to a finite raw point via a small shift."""

    def __init__(self, shift: float = 1e-10):
        if shift <= 0.0:
            raise ParameterDomainError(f"shift must be positive, got {shift}")
        self.shift = shift

    def to_raw(self, value: float) -> float:
        if value < 0.0:
            raise ParameterDomainError(f"shifted-log transform requires a nonnegative value, got {value}")
        return math.log(value + self.shift)

    def to_domain(self, raw: float) -> float:
        return max(math.exp(raw) - self.shift, 0.0)


class LogitTransform:
    """Parameter confined to the open unit interval."""

    def to_raw(self, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ParameterDomainError(f"logit transform requires a value in (0, 1), got {value}")
        return float(logit(value))

    def to_domain(self, raw: float) -> float:
        return float(expit(raw))


@dataclass(frozen=True)
class TransformedVector:
    """A named list of transforms mapping a raw vector to domain parameters."""

    names: tuple[str, ...]
    transforms: tuple[object, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.transforms):
            raise ParameterDomainError("names and transforms must have equal length")

    @property
    def size(self) -> int:
        return len(self.names)

    def to_raw(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.size,):
            raise ParameterDomainError(f"expected {self.size} values, got shape {values.shape}")
        return np.array([t.to_raw(v) for t, v in zip(self.transforms, values)], dtype=float)

    def to_domain(self, raw) -> np.ndarray:
        raw = np.asarray(raw, dtype=float)
        if raw.shape != (self.size,):
            raise ParameterDomainError(f"expected {self.size} raw values, got shape {raw.shape}")
        return np.array([t.to_domain(r) for t, r in zip(self.transforms, raw)], dtype=float)


@dataclass(frozen=True)
class OptimConfig:
    """Budget and restart policy for the shared Nelder-Mead driver."""

    restarts: int = 3
    maxiter: int = 5000
    fatol: float = 1e-8
    xatol: float = 1e-8
    jitter_scale: float = 0.3
    simplex_step: float = 0.3
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ParameterDomainError(f"restarts must be >= 1, got {self.restarts}")
        if self.maxiter < 1:
            raise ParameterDomainError(f"maxiter must be >= 1, got {self.maxiter}")
        if self.jitter_scale < 0.0:
            raise ParameterDomainError(f"jitter_scale must be >= 0, got {self.jitter_scale}")
        if self.simplex_step <= 0.0:
            raise ParameterDomainError(
                f"simplex_step must be > 0, got {self.simplex_step}")


@dataclass(frozen=True)
class RestartRecord:
    index: int
    objective: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class OptimizerReport:
    """Diagnostics for one optimization run (all restarts)."""

    objective: float
    iterations: int
    converged: bool
    restarts: tuple[RestartRecord, ...] = field(default_factory=tuple)
    best_restart: int = 0
    out_of_domain_evaluations: int = 0

    @property
    def restarts_used(self) -> int:
        return len(self.restarts)


def minimize_with_restarts(
    objective,
    x0,
    config: OptimConfig = OptimConfig(),
    *,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, OptimizerReport]:
    """Minimize ``objective`` over raw coordinates with jittered restarts.

    The first restart starts exactly at ``x0``; later restarts add centred
    Gaussian jitter of scale ``config.jitter_scale``.  The lowest attained
    objective wins; ties within 1e-12 go to the earliest restart.  The
    objective may return +inf to reject a point; such evaluations are counted.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1:
        raise ParameterDomainError(f"x0 must be a vector, got shape {x0.shape}")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    rejected = 0

    def counted(raw: np.ndarray) -> float:
        nonlocal rejected
        value = objective(raw)
        if not np.isfinite(value):
            rejected += 1
            return math.inf
        return float(value)

    records: list[RestartRecord] = []
    points: list[np.ndarray] = []
    for index in range(config.restarts):
        start = x0 if index == 0 else x0 + config.jitter_scale * rng.standard_normal(x0.shape)
        # Seed a full-rank simplex of fixed absolute size: the default
        # (relative 5% steps) starts degenerate in any coordinate near 0,
        # which lets the simplex collapse along flat valleys before it has
        # explored that direction at all.
        simplex = np.vstack([start, start + config.simplex_step * np.eye(start.size)])
        result = minimize(
            counted,
            start,
            method="Nelder-Mead",
            options={
                "maxiter": config.maxiter,
                "fatol": config.fatol,
                "xatol": config.xatol,
                "adaptive": True,
                "initial_simplex": simplex,
            },
        )
        records.append(
            RestartRecord(
                index=index,
                objective=float(result.fun),
                iterations=int(result.nit),
                converged=bool(result.success),
            )
        )
        points.append(np.asarray(result.x, dtype=float))

    best = 0
    for index in range(1, len(records)):
        if records[index].objective < records[best].objective - _TIE_WINDOW:
            best = index

    report = OptimizerReport(
        objective=records[best].objective,
        iterations=sum(r.iterations for r in records),
        converged=bool(records[best].converged
                       and np.isfinite(records[best].objective)),
        restarts=tuple(records),
        best_restart=best,
        out_of_domain_evaluations=rejected,
    )
    return points[best], report
