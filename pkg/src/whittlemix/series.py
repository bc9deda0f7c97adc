"""Observed time series on a regular integer grid with an observation mask."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MaskError


@dataclass(frozen=True)
class ObservedSeries:
    """Values on times 1..n plus a boolean observation mask.

    Entries where the mask is ``False`` are placeholders: every
    computation in this package reads them through the mask, so their
    stored values never influence any result.

    Parameters
    ----------
    values : array of float, length n
        The recorded values; placeholder entries may hold anything
        finite or not.
    mask : array of bool, length n
        ``True`` where the value is observed.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        mask = np.ascontiguousarray(np.asarray(self.mask, dtype=bool))
        if values.ndim != 1 or mask.ndim != 1:
            raise MaskError("values and mask must be one-dimensional")
        if values.size != mask.size:
            raise MaskError(
                f"mask length {mask.size} does not match "
                f"value length {values.size}")
        if int(mask.sum()) < 2:
            raise MaskError("a series needs at least 2 observed values")
        if not np.all(np.isfinite(values[mask])):
            raise MaskError("observed values must be finite")
        values.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def complete(cls, values) -> "ObservedSeries":
        """A fully observed series."""
        values = np.asarray(values, dtype=float)
        return cls(values, np.ones(values.size, dtype=bool))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def n_observed(self) -> int:
        return int(self.mask.sum())

    @property
    def missing_fraction(self) -> float:
        return 1.0 - self.n_observed / self.n

    @property
    def observed_indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def masked_values(self) -> np.ndarray:
        """Values with zeros at unobserved entries (placeholder-safe)."""
        return np.where(self.mask, self.values, 0.0)
