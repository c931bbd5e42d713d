"""Gravity-coupled exponentially harmonic field without matter.

Variables: ``H = Rdot/R``, ``y = phidot``, ``u = y^2`` and ``z = ydot/y``.
The flat system evolves ``(H, y)`` under the Friedmann constraint; the curved
system evolves ``(u, z)``, which does not involve the curvature index once
``k/R^2`` is eliminated between the two Einstein equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..core import DomainError, ModelParams, SingularityError, UZState
from ..integrate import EventSpec, Trajectory, adaptive_integrate


@dataclass(frozen=True)
class VacuumFlatState:
    H: float
    y: float


def _unpack2(state, a: str, b: str):
    if hasattr(state, a):
        return getattr(state, a), getattr(state, b)
    return state[0], state[1]


def _den(lam, u):
    den = 1 + lam * u
    if np.any(den == 0):
        raise SingularityError("1 + lam y^2 vanished")
    return den


def vacuum_flat_rhs(state, params: ModelParams):
    """``Hdot = -(K lam/4) y^2 e^{lam y^2/2}``, ``ydot = -3 H y / (1 + lam y^2)``."""
    H, y = _unpack2(state, "H", "y")
    lam, K = params.lam, params.K
    u = y * y
    Hdot = -K * lam / 4 * u * np.exp(lam * u / 2)
    ydot = -3 * H * y / _den(lam, u)
    return Hdot, ydot


def constraint_bracket(u, params: ModelParams):
    """Right side of ``H^2 = (K/6)((lam u - 1) e^{lam u/2} - Lambda)``."""
    lam = params.lam
    return params.K / 6 * ((lam * u - 1) * np.exp(lam * u / 2) - params.Lambda)


def friedmann_constraint_residual(H, y, params: ModelParams):
    return np.square(H) - constraint_bracket(np.square(y), params)


def hubble_from_constraint(u, params: ModelParams, sign: int = 1):
    """Signed root ``H = +-sqrt(-(K/6)((1 - lam u) e^{lam u/2} + Lambda))``."""
    br = constraint_bracket(u, params)
    if np.any(br < 0):
        raise DomainError(f"constraint bracket negative ({np.min(br):.3g}): no real Hubble rate")
    return sign * np.sqrt(br)


def uz_from_hy(H, y, lam: float) -> UZState:
    u = y * y
    return UZState(u, -3 * H / _den(lam, u))


def vacuum_flat_uz_rhs(state, params: ModelParams):
    """``udot = 2 z u``, ``zdot = (2 lam u/(1 + lam u)) (3K/8 e^{lam u/2} - z^2)``."""
    u, z = _unpack2(state, "u", "z")
    lam = params.lam
    zdot = 2 * lam * u / _den(lam, u) * (3 * params.K / 8 * np.exp(lam * u / 2) - z * z)
    return 2 * z * u, zdot


def small_u_approximation(z, params: ModelParams, u0: float = 0.0):
    """First-order relation near ``u = 0``: ``u = u0 - ln(|lam|(2 z^2 - 3K/4)) / (2 lam)``."""
    lam = params.lam
    if not lam > 0:
        raise DomainError("small-u relation is stated for lam > 0")
    arg = abs(lam) * (2 * np.square(z) - 3 * params.K / 4)
    if np.any(arg <= 0):
        raise DomainError("2 z^2 - 3K/4 must be positive")
    if u0 == 0 and np.any(arg > 1 + 1e-15):
        raise DomainError("2 z^2 - 3K/4 must not exceed 1/lam when u0 = 0 (u would be negative)")
    return u0 - np.log(arg) / (2 * lam)


class FlatClosedForm(NamedTuple):
    phi: float
    R: float
    H: float
    Lambda_required: float
    phidot: float


def small_lambda_flat_closed_form(a: float, b: float, c: float, e: float, t, K: float = 1.0) -> FlatClosedForm:
    """Exact ``lam = 0`` solution ``phi = c e^{at} + e``, ``R = b e^{Ht}``, ``H = -a/3``."""
    if b <= 0:
        raise DomainError("b must be positive")
    if a * c < 0:
        raise DomainError("a and c must share one sign")
    H = -a / 3
    t = np.asarray(t, dtype=float)
    phi = c * np.exp(a * t) + e
    R = b * np.exp(H * t)
    return FlatClosedForm(phi, R, H, -1 - 2 * a * a / (3 * K), a * c * np.exp(a * t))


def _flat_monitors(params):
    return {
        "constraint": lambda t, s: friedmann_constraint_residual(s[0], s[1], params),
        "u": lambda t, s: s[1] * s[1],
    }


def integrate_vacuum_flat(params: ModelParams, y0: float, t_span, H_sign: int = 1, phi0: float = 0.0,
                          rel_tol: float = 1e-9, abs_tol: float = 1e-12, H0=None) -> Trajectory:
    """Integrate ``(H, y, phi, R)``; ``H0`` defaults to the constraint root with ``H_sign``."""
    if H0 is None:
        H0 = float(hubble_from_constraint(y0 * y0, params, H_sign))

    def rhs(t, s):
        H, y, _, R = s
        Hdot, ydot = vacuum_flat_rhs((H, y), params)
        return np.array([Hdot, ydot, y, H * R])

    traj = adaptive_integrate(rhs, [H0, y0, phi0, params.R0], t_span, rel_tol, abs_tol,
                              monitors=_flat_monitors(params), labels=["H", "y", "phi", "R"])
    traj.meta.update(scenario="vacuum-flat")
    return traj


def integrate_vacuum_flat_uz(params: ModelParams, u0: float, z0: float, t_span, H_sign: int = 1,
                             rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> Trajectory:
    """Integrate ``(u, z)``; ``H`` is reported from the constraint."""

    def rhs(t, s):
        return np.array(vacuum_flat_uz_rhs((s[0], s[1]), params))

    def H_of(t, s):
        # the (u, z) flow does not see Lambda; off the constraint surface there is no real root
        br = constraint_bracket(max(s[0], 0.0), params)
        return H_sign * np.sqrt(br) if br >= 0 else np.nan

    monitors = {"H": H_of}
    traj = adaptive_integrate(rhs, [u0, z0], t_span, rel_tol, abs_tol, monitors=monitors, labels=["u", "z"])
    traj.meta.update(scenario="vacuum-flat-uz")
    return traj


# -- curved ----------------------------------------------------------------


def vacuum_curved_uz_rhs(state, params: ModelParams):
    """``udot = 2zu`` and

    ``zdot = [(1/3)(lam^2 u^2 - 4 lam u + 1) z^2 + (K/4)(2 + lam u) e^{lam u/2} + K Lambda/2] / (1 + lam u)``.
    """
    u, z = _unpack2(state, "u", "z")
    lam, K = params.lam, params.K
    if np.any(u < 0):
        raise DomainError("u must be nonnegative")
    num = (lam * lam * u * u - 4 * lam * u + 1) * z * z / 3 + K / 4 * (2 + lam * u) * np.exp(lam * u / 2) + K * params.Lambda / 2
    return 2 * z * u, num / _den(lam, u)


def curved_u_residual(u, udot, uddot, params: ModelParams):
    """Second-order form in ``u``:

    ``6(1+lam u) uddot/u - (lam^2 u^2 + 2 lam u + 7)(udot/u)^2 - 3K(lam u + 2) e^{lam u/2} - 6 K Lambda``.
    """
    lam, K = params.lam, params.K
    return (6 * (1 + lam * u) * uddot / u - (lam * lam * u * u + 2 * lam * u + 7) * (udot / u) ** 2
            - 3 * K * (lam * u + 2) * np.exp(lam * u / 2) - 6 * K * params.Lambda)


def curved_y_residual(y, ydot, yddot, params: ModelParams):
    """Second-order form in ``y``:

    ``12(1+lam y^2) yddot/y + 4(lam y^2 - lam^2 y^4 - 4)(ydot/y)^2 - 3K(lam y^2+2) e^{lam y^2/2} - 6 K Lambda``.
    """
    lam, K = params.lam, params.K
    u = y * y
    return (12 * (1 + lam * u) * yddot / y + 4 * (lam * u - lam * lam * u * u - 4) * (ydot / y) ** 2
            - 3 * K * (lam * u + 2) * np.exp(lam * u / 2) - 6 * K * params.Lambda)


def hubble_from_uz(u, z, lam: float):
    """``H = -(1 + lam u) z / 3`` from the field equation."""
    return -(1 + lam * u) * z / 3


def implied_curvature(u, z, params: ModelParams):
    """``k / R^2`` implied by the vacuum Friedmann equation at ``(u, z)``."""
    # 3H^2 + 3k/R^2 = K(-(1 - lam u) e^{lam u/2}/2 - Lambda/2) = 3 * bracket
    H = hubble_from_uz(u, z, params.lam)
    return constraint_bracket(u, params) - H * H


def scale_factor_from_phidot(phidot, params: ModelParams):
    """``R = (alpha phidot e^{lam phidot^2/2})^(-1/3)``."""
    prod = params.alpha * np.asarray(phidot, dtype=float)
    if np.any(prod <= 0):
        raise DomainError("alpha * phidot must be positive")
    return (prod * np.exp(params.lam * np.square(phidot) / 2)) ** (-1.0 / 3.0)


def integrate_vacuum_curved(params: ModelParams, u0: float, z0: float, t_span,
                            rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> Trajectory:
    """Integrate ``(u, z)``; monitors ``H``, implied ``k/R^2`` and ``R`` from the field velocity."""
    if u0 <= 0:
        raise DomainError("u0 must be positive")

    def rhs(t, s):
        return np.array(vacuum_curved_uz_rhs((s[0], s[1]), params))

    def R_of(t, s):
        return float(scale_factor_from_phidot(np.sqrt(s[0]), params)) if params.alpha > 0 else np.nan

    monitors = {
        "H": lambda t, s: hubble_from_uz(s[0], s[1], params.lam),
        "curvature": lambda t, s: implied_curvature(s[0], s[1], params),
        "R": R_of,
    }
    traj = adaptive_integrate(rhs, [u0, z0], t_span, rel_tol, abs_tol, monitors=monitors, labels=["u", "z"])
    traj.meta.update(scenario="vacuum-curved")
    return traj


class CurvedClosedForm(NamedTuple):
    z: float
    y: float
    phi: float
    phi_quadrature: float


def small_lambda_curved(Lambda: float, K: float, c: float, t0: float, t) -> CurvedClosedForm:
    """Small-lambda closed forms of the curved vacuum system.

    ``z`` solves ``zdot = z^2/3 + K(Lambda+1)/2`` with ``z(t0) = 0``; ``y`` and
    ``phi`` are the displayed expressions (``y = sec^3 + c`` for
    ``Lambda > -1``, ``sech^3 + c`` below). ``phi_quadrature`` is
    ``int sec^3`` (resp. ``sech^3``) plus ``c t``; for ``Lambda > -1``
    ``phi == exp(phi_quadrature)``.
    """
    if Lambda == -1:
        raise DomainError("Lambda = -1 is the trivial case z' = z^2/3")
    t = np.asarray(t, dtype=float)
    if Lambda > -1:
        om = np.sqrt(1.5 * K * (Lambda + 1))
        th = om * (t - t0) / 3
        if np.any(np.abs(th) >= np.pi / 2):
            raise DomainError("closed form blows up where cos vanishes")
        sec, tan = 1 / np.cos(th), np.tan(th)
        z = om * tan
        y = sec**3 + c
        quad = 3 / (2 * om) * (sec * tan + np.log(sec + tan))
        phi = np.exp(3 / om * np.sin(th) / (2 * np.cos(th) ** 2)) * np.tan(np.pi / 4 + th / 2) ** (1.5 / om) * np.exp(c * t)
    else:
        om = np.sqrt(1.5 * K * (-1 - Lambda))
        th = om * (t - t0) / 3
        sech, tanh = 1 / np.cosh(th), np.tanh(th)
        z = -om * tanh
        y = sech**3 + c
        quad = 3 / (2 * om) * (sech * tanh + np.arctan(np.sinh(th)))
        phi = np.exp(-3 / om * np.sinh(-th) / (2 * np.cosh(-th) ** 2) + 0.5 * np.arctan(np.sinh(-th))) * np.exp(c * t)
    return CurvedClosedForm(z, y, phi, quad + c * t)
