"""Numerical laboratory for exponentially harmonic maps."""

from .core import (
    BranchError,
    ConvergenceError,
    CosmoState,
    DomainError,
    Gradient2D,
    MetricSignature,
    ModelParams,
    SignatureKind,
    SingularityError,
    UZState,
    eh_residual_flat,
    energy_density,
    stress_energy,
)

__version__ = "0.1.0"
