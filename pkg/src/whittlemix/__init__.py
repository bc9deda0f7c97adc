"""Joint estimation of mixed time-series models in the frequency domain.

The package fits models of the form ``x = M(gamma) beta + epsilon`` --
a nonlinear fixed mean plus a correlated stationary error -- using a
debiased Whittle likelihood that handles missing data exactly, alongside
exact Gaussian maximum likelihood and a two-stage baseline.  It also
provides an asymmetric-exponential-power error model, simple Kriging for
gap filling and forecasting, and a simulation-study harness, all exposed
through a small HTTP service and a command-line client.
"""

__version__ = "0.1.0"
