"""Exception types shared across the package."""


class WhittlemixError(Exception):
    """Base class for all package-specific errors."""


class ParameterDomainError(WhittlemixError, ValueError):
    """A model parameter lies outside its admissible domain."""


class SpectrumDomainError(WhittlemixError, ValueError):
    """An expected spectral density came out materially negative.

    Raised when the expected periodogram (which should be nonnegative up to
    rounding) falls below the hard floor, indicating an invalid covariance
    or a numerically broken input rather than benign round-off.
    """


class MaskError(WhittlemixError, ValueError):
    """An observation mask is malformed or leaves too few observed points."""


class DesignError(WhittlemixError, ValueError):
    """A mean-design specification is malformed or incompatible with the data."""


class IngestError(WhittlemixError, ValueError):
    """An input file is malformed: bad header, bad cell, or irregular times."""


class FactorizationError(WhittlemixError, RuntimeError):
    """A covariance matrix could not be factorized even after jitter escalation."""


class NotApplicableError(WhittlemixError, RuntimeError):
    """A method or metric does not apply to the requested scenario or model."""


class ConvergenceError(WhittlemixError, RuntimeError):
    """An optimizer failed to converge and the caller did not allow that."""
