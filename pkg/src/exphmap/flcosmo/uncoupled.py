"""Exponentially harmonic field phi(t) on a fixed FL background (no back-reaction)."""

from __future__ import annotations

import numpy as np

from ..core import DomainError, SingularityError
from ..integrate import Trajectory, adaptive_integrate
from ..specfn import solve_phidot_implicit


def matter_background(R0: float = 1.0, t0: float = 1.0):
    """Dust-dominated flat background ``R = R0 (t/t0)^(2/3)``; returns ``t -> (R, Rdot)``."""

    def background(t):
        if t <= 0:
            raise DomainError("matter background is defined for t > 0")
        R = R0 * (t / t0) ** (2.0 / 3.0)
        return R, 2.0 * R / (3.0 * t)

    return background


def uncoupled_field_rhs(t: float, phidot: float, background, lam: float) -> float:
    """``phiddot = -3 (Rdot/R) phidot / (1 + lam phidot^2)``."""
    den = 1 + lam * phidot * phidot
    if den == 0:
        raise SingularityError("1 + lam phidot^2 vanished")
    R, Rdot = background(t)
    return -3.0 * Rdot / R * phidot / den


def uncoupled_first_integral(R, phidot, lam: float):
    """``R^3 |phidot| exp(lam phidot^2 / 2)``, constant along solutions."""
    return R**3 * np.abs(phidot) * np.exp(lam * np.square(phidot) / 2)


def integrate_uncoupled(lam: float, phidot0: float, t_span, background=None, phi0: float = 0.0,
                        rel_tol: float = 1e-10, abs_tol: float = 1e-14) -> Trajectory:
    """Integrate ``(phi, phidot)`` through the field equation on ``background``."""
    background = background or matter_background()

    def rhs(t, s):
        return np.array([s[1], uncoupled_field_rhs(t, s[1], background, lam)])

    monitors = {
        "R": lambda t, s: background(t)[0],
        "first_integral": lambda t, s: uncoupled_first_integral(background(t)[0], s[1], lam),
    }
    return adaptive_integrate(rhs, [phi0, phidot0], t_span, rel_tol, abs_tol,
                              monitors=monitors, labels=["phi", "phidot"])


def uncoupled_solve_euclidean(lam: float, b: float, t_span, sign: int = 1, phi_start: float = 0.0,
                              rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> Trajectory:
    """``phi(t)`` on the flat dust background from the algebraic velocity relation.

    ``phidot`` solves ``|phidot| exp(lam phidot^2/2) = 1/(b t^2)`` pointwise
    and ``phi`` follows by quadrature from ``phi(t_start) = phi_start``. The
    background is normalised to ``R = t^(2/3)``.
    """
    t_start, t_end = map(float, t_span)
    if t_start <= 0 or t_end <= t_start:
        raise DomainError("t_span must lie in (0, inf) and be increasing")
    if sign not in (-1, 1):
        raise DomainError("sign must be +1 or -1")

    def phidot(t):
        return sign * solve_phidot_implicit(t, lam, b)

    monitors = {
        "phidot": lambda t, s: phidot(t),
        "R": lambda t, s: t ** (2.0 / 3.0),
        "first_integral": lambda t, s: uncoupled_first_integral(t ** (2.0 / 3.0), phidot(t), lam),
    }
    traj = adaptive_integrate(lambda t, s: np.array([phidot(t)]), [phi_start], (t_start, t_end),
                              rel_tol, abs_tol, monitors=monitors, labels=["phi"])
    traj.meta.update(scenario="uncoupled", lam=lam, b=b, sign=sign)
    return traj
