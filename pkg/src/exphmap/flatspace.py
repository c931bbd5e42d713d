"""Closed-form exponentially harmonic maps on R^2 and R^{1,1}.

Two families are provided:

* the separable solutions ``phi = F(x) + G(y)``, written parametrically in
  the slopes ``p = F_x`` and ``q = G_y``;
* hodograph solutions ``f(r, theta) = R(r) T(theta)`` of the linearized
  equation in the gradient plane ``(u, v) = (phi_x, phi_y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import BranchError, DomainError, Gradient2D, MetricSignature, SignatureKind
from .specfn import kummer_1f1, minkowski_q, s_pm

RADIAL_FORMS = ("corrected", "literal")


@dataclass(frozen=True)
class ParametricFlatSolution:
    l: float
    c: float = 0.0
    cprime: float = 0.0
    const_k: float = 0.0
    signature: MetricSignature = MetricSignature.euclidean()

    def __post_init__(self):
        if not self.l > 0:
            raise DomainError("separation constant l must be positive")
        if self.signature.kind is SignatureKind.FRIEDMANN_LEMAITRE:
            raise DomainError("parametric solutions live on 2-D flat spaces")

    @property
    def minkowski(self) -> bool:
        return self.signature.kind is SignatureKind.MINKOWSKI_2D

    def y_range(self) -> tuple[float, float]:
        """Interval of ``y`` covered by the slope map (Minkowski: principal branch)."""
        if not self.minkowski:
            return (-np.inf, np.inf)
        return ((-2.0 / 3.0 - self.cprime) / self.l, (2.0 / 3.0 - self.cprime) / self.l)


def _slopes(sol: ParametricFlatSolution, x, y):
    p = s_pm(x, sol.l, sol.c)
    if sol.minkowski:
        # y = (q - q**3/3 - c')/l
        q = minkowski_q(sol.cprime + sol.l * np.asarray(y, dtype=float))
    else:
        # y = -(q**3/3 + q - c')/l
        q = s_pm(y, -sol.l, sol.cprime)
    return p, q


def eval_parametric(sol: ParametricFlatSolution, x, y):
    """Return ``(phi, p, q)`` at ``(x, y)``; arrays broadcast."""
    p, q = _slopes(sol, x, y)
    p2, q2 = np.square(p), np.square(q)
    if sol.minkowski:
        phi = (p2 * p2 + 2 * p2 - q2 * q2 + 2 * q2) / (4 * sol.l)
    else:
        phi = (p2 * p2 + 2 * p2 - q2 * q2 - 2 * q2) / (4 * sol.l)
    return phi + sol.const_k, p, q


def parametric_derivatives(sol: ParametricFlatSolution, x, y) -> Gradient2D:
    """Exact partials through the parametric maps.

    ``phi_x = p`` and ``phi_y = q``; ``F_xx = l/(1+p^2)`` and
    ``G_yy = -l/(1+q^2)`` (Euclidean) or ``l/(1-q^2)`` (Minkowski).
    """
    p, q = _slopes(sol, x, y)
    pxx = sol.l / (1 + np.square(p))
    if sol.minkowski:
        gap = 1 - np.square(q)
        if np.any(gap <= 0):
            raise BranchError("slope reached the branch edge |q| = 1")
        pyy = sol.l / gap
    else:
        pyy = -sol.l / (1 + np.square(q))
    return Gradient2D(p, q, pxx, np.zeros_like(pxx), pyy)


# -- hodograph -----------------------------------------------------------


@dataclass(frozen=True)
class HodographSolution:
    a: float
    ampA: float = 1.0
    ampB: float = 0.0
    normC: Optional[float] = None
    form: str = "corrected"

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("separation constant a must be positive")
        if self.form not in RADIAL_FORMS:
            raise DomainError(f"form must be one of {RADIAL_FORMS}")

    @property
    def norm(self) -> float:
        return default_norm(self.a) if self.normC is None else self.normC


def default_norm(a: float) -> float:
    return 2.0 ** (-(a + 1) / 2)


def kummer_parameters(a: float) -> tuple[float, float]:
    """``(A, b) = (1 + a/2 + a^2/2, 1 + a)``."""
    return 1 + a / 2 + a * a / 2, 1 + a


def hodograph_radial(a: float, r, normC: Optional[float] = None, form: str = "corrected"):
    """Radial factor ``C r^a exp(-s r^2) 1F1(A; 1+a; r^2/2)``.

    ``form="corrected"`` uses ``s = 1/2``; ``form="literal"`` keeps the
    ``s = 1`` exponent as printed, which does not solve the radial equation.
    """
    return hodograph_radial_derivs(a, r, normC, form)[0]


def hodograph_radial_derivs(a: float, r, normC: Optional[float] = None, form: str = "corrected"):
    """``(R, R_r, R_rr)`` from the product rule and ``1F1' = (A/b) 1F1(A+1; b+1)``."""
    if not a > 0:
        raise DomainError("a must be positive")
    if form not in RADIAL_FORMS:
        raise DomainError(f"form must be one of {RADIAL_FORMS}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("r must be nonnegative")
    C = default_norm(a) if normC is None else normC
    A, b = kummer_parameters(a)
    s = r * r / 2
    w0 = kummer_1f1(A, b, s)
    w1 = A / b * kummer_1f1(A + 1, b + 1, s)
    w2 = A * (A + 1) / (b * (b + 1)) * kummer_1f1(A + 2, b + 2, s)

    with np.errstate(divide="ignore", invalid="ignore"):
        h1 = r**a
        h1p = np.where(r > 0, a * r ** (a - 1), 1.0 if a == 1 else 0.0)
        h1pp = np.where(r > 0, a * (a - 1) * r ** (a - 2), 0.0)
    if form == "corrected":
        h2 = np.exp(-s)
        h2p = -r * h2
        h2pp = (r * r - 1) * h2
    else:
        h2 = np.exp(-r * r)
        h2p = -2 * r * h2
        h2pp = (4 * r * r - 2) * h2
    h3, h3p, h3pp = w0, r * w1, w1 + r * r * w2

    R = C * h1 * h2 * h3
    Rp = C * (h1p * h2 * h3 + h1 * h2p * h3 + h1 * h2 * h3p)
    Rpp = C * (
        h1pp * h2 * h3
        + h1 * h2pp * h3
        + h1 * h2 * h3pp
        + 2 * (h1p * h2p * h3 + h1p * h2 * h3p + h1 * h2p * h3p)
    )
    if R.ndim == 0:
        return float(R), float(Rp), float(Rpp)
    return R, Rp, Rpp


def fd_radial(fun: Callable[[float], float], h: float = 1e-3):
    """Wrap ``r -> R`` into ``r -> (R, R', R'')`` with 5-point central differences."""

    def derivs(r):
        f = [fun(r + k * h) for k in (-2, -1, 0, 1, 2)]
        d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        return f[2], d1, d2

    return derivs


def radial_ode_residual(Rfun, a: float, r):
    """``R_rr + (r + 1/r) R_r - a^2 (1 + 1/r^2) R`` with ``Rfun(r) -> (R, R_r, R_rr)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("radial equation is singular at r = 0")
    R, Rp, Rpp = Rfun(r)
    return Rpp + (r + 1 / r) * Rp - a * a * (1 + 1 / (r * r)) * R


def _angular(sol: HodographSolution, theta):
    a = sol.a
    c, s = np.cos(a * theta), np.sin(a * theta)
    T = sol.ampA * c + sol.ampB * s
    Tp = a * (-sol.ampA * s + sol.ampB * c)
    Tpp = -a * a * T
    return T, Tp, Tpp


def _polar_parts(sol: HodographSolution, r, theta, derivs: str):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("hodograph solution evaluated at r = 0")
    if derivs == "analytic":
        R, Rp, Rpp = hodograph_radial_derivs(sol.a, r, sol.norm, sol.form)
    elif derivs == "fd":
        fun = lambda rr: hodograph_radial(sol.a, rr, sol.norm, sol.form)  # noqa: E731
        R, Rp, Rpp = np.vectorize(fd_radial(fun))(r)
    else:
        raise DomainError("derivs must be 'analytic' or 'fd'")
    T, Tp, Tpp = _angular(sol, np.asarray(theta, dtype=float))
    return r, R, Rp, Rpp, T, Tp, Tpp


def hodograph_f(sol: HodographSolution, r, theta, derivs: str = "analytic"):
    """Return ``(f, residual)`` where the residual is the polar hodograph equation

    ``f_rr + (r + 1/r) f_r + (1 + 1/r^2) f_thth``.
    """
    r, R, Rp, Rpp, T, Tp, Tpp = _polar_parts(sol, r, theta, derivs)
    f = R * T
    res = Rpp * T + (r + 1 / r) * Rp * T + (1 + 1 / (r * r)) * R * Tpp
    return f, res


def _polar_hessian(sol: HodographSolution, r, theta):
    r, R, Rp, Rpp, T, Tp, Tpp = _polar_parts(sol, r, theta, "analytic")
    f_r, f_t = Rp * T, R * Tp
    h_rr = Rpp * T
    h_tt = f_r / r + R * Tpp / (r * r)
    h_rt = Rp * Tp / r - f_t / (r * r)
    return f_r, f_t, h_rr, h_tt, h_rt


def hodograph_jacobian(sol: HodographSolution, r, theta):
    """``J = x_u y_v - x_v y_u = f_uu f_vv - f_uv^2`` (rotation invariant)."""
    _, _, h_rr, h_tt, h_rt = _polar_hessian(sol, r, theta)
    return h_rr * h_tt - h_rt * h_rt


def hodograph_jacobian_ok(sol: HodographSolution, r, theta, tol: float = 1e-12) -> bool:
    """False where the hodograph map cannot be inverted back to ``(x, y)``."""
    return bool(np.all(np.abs(hodograph_jacobian(sol, r, theta)) > tol))


def hodograph_xy(sol: HodographSolution, u, v):
    """Physical coordinates ``(x, y) = (f_u, f_v)`` of the gradient-plane point."""
    r = np.hypot(u, v)
    theta = np.arctan2(v, u)
    f_r, f_t, *_ = _polar_hessian(sol, r, theta)
    c, s = np.cos(theta), np.sin(theta)
    return c * f_r - s * f_t / r, s * f_r + c * f_t / r


def hodograph_cartesian_residual(sol: HodographSolution, u, v):
    """``(1+u^2) f_vv - 2uv f_uv + (1+v^2) f_uu`` from the polar Hessian."""
    r = np.hypot(u, v)
    theta = np.arctan2(v, u)
    _, _, h_rr, h_tt, h_rt = _polar_hessian(sol, r, theta)
    c, s = np.cos(theta), np.sin(theta)
    f_uu = c * c * h_rr + s * s * h_tt - 2 * c * s * h_rt
    f_vv = s * s * h_rr + c * c * h_tt + 2 * c * s * h_rt
    f_uv = c * s * (h_rr - h_tt) + (c * c - s * s) * h_rt
    return (1 + u * u) * f_vv - 2 * u * v * f_uv + (1 + v * v) * f_uu
