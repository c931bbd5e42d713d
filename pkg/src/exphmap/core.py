"""Domain types and pointwise evaluators for scalar exponentially harmonic maps.

A scalar map phi: M -> R is exponentially harmonic when it extremizes
``int exp(lam * e(phi)) dmu`` with ``e(phi) = 1/2 g^{mu nu} d_mu phi d_nu phi``.
Flat 2-D spaces use ``lam = 1``; the cosmological modules carry ``lam``
explicitly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(ArithmeticError):
    """A denominator of the field equations vanished."""


class BranchError(DomainError):
    """Point lies outside the invertible range of a parametric branch."""


class ConvergenceError(RuntimeError):
    pass


class SignatureKind(enum.Enum):
    EUCLIDEAN_2D = "euclidean2d"
    MINKOWSKI_2D = "minkowski2d"
    FRIEDMANN_LEMAITRE = "friedmann-lemaitre"


@dataclass(frozen=True)
class MetricSignature:
    """Background metric.

    Minkowski2D is ``diag(+1, -1)`` with ``x`` timelike. FriedmannLemaitre
    carries the curvature index ``k`` and optionally a scale factor ``t -> R``;
    tensors on it are expressed in the comoving orthonormal frame.
    """

    kind: SignatureKind
    k: int = 0
    scale_factor: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.kind is SignatureKind.FRIEDMANN_LEMAITRE:
            if self.k not in (-1, 0, 1):
                raise DomainError(f"curvature index must be -1, 0 or 1, got {self.k}")
        elif self.k != 0 or self.scale_factor is not None:
            raise DomainError("flat 2-D signatures carry no curvature or scale factor")

    @classmethod
    def euclidean(cls) -> "MetricSignature":
        return cls(SignatureKind.EUCLIDEAN_2D)

    @classmethod
    def minkowski(cls) -> "MetricSignature":
        return cls(SignatureKind.MINKOWSKI_2D)

    @classmethod
    def friedmann_lemaitre(cls, k: int = 0, scale_factor=None) -> "MetricSignature":
        return cls(SignatureKind.FRIEDMANN_LEMAITRE, k, scale_factor)

    def metric(self) -> np.ndarray:
        if self.kind is SignatureKind.EUCLIDEAN_2D:
            return np.eye(2)
        if self.kind is SignatureKind.MINKOWSKI_2D:
            return np.diag([1.0, -1.0])
        return np.diag([1.0, -1.0, -1.0, -1.0])

    def scale(self, t: float) -> float:
        if self.scale_factor is None:
            raise DomainError("no scale factor attached to this signature")
        return self.scale_factor(t)


@dataclass(frozen=True)
class ModelParams:
    """Physical and closed-form constants of the coupled system.

    ``lam`` is the coupling lambda (``lambda`` is reserved in Python).
    ``rho_rad0`` is an optional radiation component at ``R = R0``; it is zero
    unless a scenario asks for it.
    """

    lam: float = 1.0
    K: float = 1.0
    Lambda: float = 0.0
    k: int = 0
    omega: float = 0.0
    alpha: float = 1.0
    rho0: float = 0.0
    R0: float = 1.0
    rho_rad0: float = 0.0
    a_const: float = 0.0
    b_const: float = 1.0
    c_const: float = 0.0
    cprime_const: float = 0.0
    e_const: float = 0.0
    l_const: float = 1.0
    k_shift: float = 0.0

    def __post_init__(self):
        if self.k not in (-1, 0, 1):
            raise DomainError(f"k must be -1, 0 or 1, got {self.k}")
        if self.l_const < 0:
            raise DomainError("l_const must be nonnegative")
        if self.b_const <= 0:
            raise DomainError("b_const must be positive")
        if self.rho0 < 0 or self.rho_rad0 < 0:
            raise DomainError("densities must be nonnegative")
        if self.R0 <= 0:
            raise DomainError("R0 must be positive")

    def replace(self, **changes) -> "ModelParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class Gradient2D:
    """First and (optionally) second partials of phi at a point or on a grid."""

    d_x: float
    d_y: float
    d_xx: Optional[float] = None
    d_xy: Optional[float] = None
    d_yy: Optional[float] = None

    def has_hessian(self) -> bool:
        return self.d_xx is not None and self.d_xy is not None and self.d_yy is not None


@dataclass(frozen=True)
class CosmoState:
    t: float
    R: float
    H: float
    y: float
    phi: float
    rho: float = 0.0

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError(f"scale factor must be positive, got {self.R}")
        if self.rho < 0:
            raise DomainError(f"density must be nonnegative, got {self.rho}")


@dataclass(frozen=True)
class UZState:
    """``u = y**2`` and ``z = ydot / y``."""

    u: float
    z: float

    def __post_init__(self):
        if self.u < 0:
            raise DomainError(f"u = y**2 must be nonnegative, got {self.u}")


def _first_partials(grad, sig: MetricSignature) -> np.ndarray:
    if sig.kind is SignatureKind.FRIEDMANN_LEMAITRE:
        if isinstance(grad, Gradient2D):
            raise DomainError("FL background takes the field velocity phidot, not a 2-D gradient")
        return np.asarray([grad], dtype=float)
    if not isinstance(grad, Gradient2D):
        raise DomainError("2-D backgrounds take a Gradient2D")
    return np.asarray([grad.d_x, grad.d_y], dtype=float)


def energy_density(grad, sig: MetricSignature):
    """``e(phi) = 1/2 g^{mu nu} d_mu phi d_nu phi``.

    ``grad`` is a :class:`Gradient2D` on the 2-D signatures and the field
    velocity ``phidot`` on a Friedmann-Lemaitre background (``phi = phi(t)``).
    Array-valued partials are evaluated elementwise.
    """
    _first_partials(grad, sig)
    if sig.kind is SignatureKind.FRIEDMANN_LEMAITRE:
        return 0.5 * np.square(grad)
    if sig.kind is SignatureKind.EUCLIDEAN_2D:
        return 0.5 * (np.square(grad.d_x) + np.square(grad.d_y))
    return 0.5 * (np.square(grad.d_x) - np.square(grad.d_y))


def stress_energy(grad, sig: MetricSignature, lam: float = 1.0) -> np.ndarray:
    """Energy-momentum tensor ``exp(lam e)(g_{mu nu} - lam d_mu phi d_nu phi)``.

    ``lam = 1`` is the plain functional; other values use the rescaled field
    ``phi -> sqrt(lam) phi``. Returns the covariant components as an
    ``(n, n)`` array; on FL this is the comoving orthonormal frame.
    """
    d = _first_partials(grad, sig)
    g = sig.metric()
    if sig.kind is SignatureKind.FRIEDMANN_LEMAITRE:
        d = np.array([d[0], 0.0, 0.0, 0.0])
    e = energy_density(grad, sig)
    return np.exp(lam * e) * (g - lam * np.outer(d, d))


def eh_residual_flat(grad: Gradient2D, sig: MetricSignature):
    """Left-hand side of the scalar EH equation on R^2 or R^{1,1}.

    Euclidean: ``(1+px^2) pxx + 2 px py pxy + (1+py^2) pyy``.
    Minkowski: ``(1+px^2) pxx - 2 px py pxy - (1-py^2) pyy``.
    """
    if not grad.has_hessian():
        raise DomainError("residual needs all five partials")
    px, py = grad.d_x, grad.d_y
    pxx, pxy, pyy = grad.d_xx, grad.d_xy, grad.d_yy
    if sig.kind is SignatureKind.EUCLIDEAN_2D:
        return (1 + px * px) * pxx + 2 * px * py * pxy + (1 + py * py) * pyy
    if sig.kind is SignatureKind.MINKOWSKI_2D:
        return (1 + px * px) * pxx - 2 * px * py * pxy - (1 - py * py) * pyy
    raise DomainError("flat residual is defined on 2-D signatures only")


def stress_energy_divergence(tensor_at, x: float, y: float, sig: MetricSignature, h: float = 1e-4):
    """``g^{ab} d_a T_{b nu}`` by central differences of ``tensor_at(x, y)``.

    Flat coordinates only, so covariant and partial derivatives coincide.
    """
    ginv = np.linalg.inv(sig.metric())
    dTx = (tensor_at(x + h, y) - tensor_at(x - h, y)) / (2 * h)
    dTy = (tensor_at(x, y + h) - tensor_at(x, y - h)) / (2 * h)
    dT = np.stack([dTx, dTy])  # dT[a, b, nu] = d_a T_{b nu}
    return np.einsum("ab,abn->n", ginv, dT)
