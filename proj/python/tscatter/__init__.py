"""Multivariate t M-functionals of location and scatter."""

from ._core import (
    ConfigError,
    DimensionError,
    DomainViolation,
    Error,
    ExplicitLimitation,
    NoConvergence,
    NotPositiveDefinite,
    check_domain,
    check_equivariance,
    counterexample_sweep,
    fit,
    fit_scatter,
    influence,
    limits,
    make_Pk,
    make_Qk,
    mc_normality,
    read_csv,
    rho,
    sandwich_covariance,
    u_weight,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "DomainViolation",
    "Error",
    "ExplicitLimitation",
    "NoConvergence",
    "NotPositiveDefinite",
    "check_domain",
    "check_equivariance",
    "counterexample_sweep",
    "fit",
    "fit_scatter",
    "influence",
    "limits",
    "make_Pk",
    "make_Qk",
    "mc_normality",
    "read_csv",
    "rho",
    "sandwich_covariance",
    "u_weight",
]
