"""FL universe with a perfect fluid ``p = omega rho`` and the exponentially harmonic field.

The primary system evolves ``s = (phi, y, R, H, rho)``:

    phidot = y
    ydot   = -3 H y / (1 + lam y^2)
    Rdot   = H R
    Hdot   = Rddot/R - H^2,  Rddot/R = -(K/6)[(1+3w) rho + 2 rho_r + (1 + lam u/2) e^{lam u/2} + Lambda]
    rhodot = -3 H (1 + w) rho

with the Friedmann equation
``3H^2 + 3k/R^2 = K(rho + rho_r - e^{lam u/2}(1 - lam u)/2 - Lambda/2)``
monitored, not imposed. ``rho_r`` is an optional radiation component
``rho_rad0 (R0/R)^4``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ..core import DomainError, ModelParams, SingularityError
from ..integrate import EventSpec, Trajectory, adaptive_integrate

LABELS = ["phi", "y", "R", "H", "rho"]


@dataclass(frozen=True)
class MatterState:
    y: float
    ydot: float
    R: float
    rho: float

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError("R must be positive")
        if self.rho < 0:
            raise DomainError("rho must be nonnegative")


class MatterRates(NamedTuple):
    ydot: float
    yddot: float
    Rdot: float
    rhodot: float


def radiation_density(R, params: ModelParams):
    return params.rho_rad0 * (params.R0 / R) ** 4


def field_term(y, params: ModelParams):
    """The field's entry in the Friedmann equation, ``-e^{lam u/2}(1 - lam u)/2``."""
    lam = params.lam
    u = np.square(y)
    return -0.5 * np.exp(lam * u / 2) * (1 - lam * u)


def phi_energy_density(y, params: ModelParams, convention: str = "shifted"):
    """Energy density attributed to the field.

    ``"shifted"`` measures the field term relative to its value at rest,
    ``(1 - e^{lam u/2}(1 - lam u))/2``; the constant ``1/2`` it removes is the
    vacuum part that combines with ``Lambda``. ``"magnitude"`` returns
    ``|e^{lam u/2}(1 - lam u)|/2``.
    """
    if convention == "shifted":
        return field_term(y, params) + 0.5
    if convention == "magnitude":
        return np.abs(field_term(y, params))
    raise DomainError(f"unknown convention {convention!r}")


def total_density(y, rho, R, params: ModelParams):
    """``rho + rho_r - e^{lam u/2}(1 - lam u)/2 - Lambda/2`` (Friedmann right side over K)."""
    return rho + radiation_density(R, params) + field_term(y, params) - params.Lambda / 2


def acceleration(y, rho, R, params: ModelParams):
    """``Rddot / R``; independent of the curvature index."""
    lam = params.lam
    u = np.square(y)
    return -params.K / 6 * (
        (1 + 3 * params.omega) * rho + 2 * radiation_density(R, params)
        + (1 + lam * u / 2) * np.exp(lam * u / 2) + params.Lambda
    )


def matter_constraint_residual(H, y, rho, R, params: ModelParams):
    return 3 * np.square(H) + 3 * params.k / np.square(R) - params.K * total_density(y, rho, R, params)


def _den(lam, y):
    den = 1 + lam * y * y
    if den == 0:
        raise SingularityError("1 + lam y^2 vanished")
    return den


def matter_rhs(t: float, s, params: ModelParams) -> np.ndarray:
    phi, y, R, H, rho = s
    if not R > 0:
        raise DomainError("scale factor left R > 0")
    acc = acceleration(y, rho, R, params)
    return np.array([
        y,
        -3 * H * y / _den(params.lam, y),
        H * R,
        acc - H * H,
        -3 * H * (1 + params.omega) * rho,
    ])


def hubble_from_field(y: float, ydot: float, lam: float) -> float:
    """Invert the field equation: ``H = -ydot (1 + lam y^2) / (3 y)``."""
    if y == 0:
        raise SingularityError("H is undetermined by the field equation at y = 0")
    return -ydot * (1 + lam * y * y) / (3 * y)


def matter_state_derivative(state: MatterState, params: ModelParams) -> MatterRates:
    """``(ydot, yddot, Rdot, rhodot)`` at a :class:`MatterState`, via the primary system."""
    lam = params.lam
    y, ydot, R, rho = state.y, state.ydot, state.R, state.rho
    H = hubble_from_field(y, ydot, lam)
    Hdot = acceleration(y, rho, R, params) - H * H
    D = _den(lam, y)
    yddot = -3 * (Hdot * y + H * ydot) / D + 6 * lam * H * y * y * ydot / (D * D)
    return MatterRates(ydot, yddot, H * R, -3 * H * (1 + params.omega) * rho)


def matter_second_order_rhs(y: float, ydot: float, params: ModelParams, literal_curvature: bool = False) -> float:
    """``yddot`` from the closed second-order equation in ``y`` (single fluid).

    The density is eliminated with the Friedmann equation and ``1/R^2`` with
    ``1/R^3 = alpha y e^{lam y^2/2}``, so the curvature term reads
    ``(3/2) e^{lam y^2/3} alpha^{2/3} y^{5/3} k (3w+1) / (1 + lam y^2)``.
    ``literal_curvature=True`` multiplies it by ``lam^{1/3}`` as typeset in
    the source, for comparison.
    """
    if params.rho_rad0:
        raise DomainError("the second-order form covers a single fluid; set rho_rad0 = 0")
    lam, K, L, w, k = params.lam, params.K, params.Lambda, params.omega, params.k
    u = y * y
    D = _den(lam, y)
    e = np.exp(lam * u / 2)
    out = (ydot * ydot / y) * ((3 + w) + 2 * lam * w * u + lam * lam * (1 + w) * u * u) / (2 * D)
    out += 0.75 * y * K * L * (w + 1) / D
    out += 0.75 * K * e * ((1 + w) * y - lam * w * y**3) / D
    if k != 0:
        if params.alpha * y <= 0:
            raise DomainError("curvature term needs alpha * y > 0")
        curv = 1.5 * np.exp(lam * u / 3) * params.alpha ** (2 / 3) * y ** (5 / 3) * k * (3 * w + 1) / D
        if literal_curvature:
            curv *= lam ** (1 / 3)
        out += curv
    return float(out)


def matter_initial_state(params: ModelParams, phidot0: float, phiddot0: float, phi0: float = 0.0,
                         close: Optional[str] = "K", tol: float = 1e-10):
    """Initial vector ``(phi, y, R, H, rho)`` and the parameters that make it consistent.

    ``H0`` follows from the field equation. The Friedmann equation then fixes
    one more constant: ``close="K"`` solves for the coupling, ``"rho0"`` for
    the initial matter density, ``None`` only checks it. ``alpha`` is set so
    that ``1/R^3 = alpha y e^{lam y^2/2}`` holds at ``t0``.
    """
    lam = params.lam
    y0 = phidot0
    H0 = hubble_from_field(y0, phiddot0, lam)
    R0 = params.R0
    lhs = 3 * (H0 * H0 + params.k / (R0 * R0))
    if close == "K":
        dens = total_density(y0, params.rho0, R0, params)
        if not dens > 0:
            raise DomainError("total density must be positive to solve for K")
        params = params.replace(K=lhs / dens)
    elif close == "rho0":
        rho0 = lhs / params.K - total_density(y0, 0.0, R0, params)
        if rho0 < 0:
            raise DomainError(f"constraint needs negative matter density ({rho0:.3g})")
        params = params.replace(rho0=rho0)
    elif close is not None:
        raise DomainError(f"unknown closure {close!r}")
    res = matter_constraint_residual(H0, y0, params.rho0, R0, params)
    if abs(res) > tol * max(1.0, lhs):
        raise DomainError(f"initial data violate the Friedmann equation (residual {res:.3g})")
    alpha = 1.0 / (R0**3 * y0 * np.exp(lam * y0 * y0 / 2))
    params = params.replace(alpha=alpha)
    return params, np.array([phi0, y0, R0, H0, params.rho0])


def matter_monitors(params: ModelParams):
    w = params.omega
    return {
        "constraint": lambda t, s: matter_constraint_residual(s[3], s[1], s[4], s[2], params),
        "conservation": lambda t, s: s[4] * s[2] ** (3 * (1 + w)),
        "accel": lambda t, s: acceleration(s[1], s[4], s[2], params),
        "Rddot": lambda t, s: s[2] * acceleration(s[1], s[4], s[2], params),
        "rho_phi": lambda t, s: phi_energy_density(s[1], params),
        "rho_matter": lambda t, s: s[4],
        "rho_rad": lambda t, s: radiation_density(s[2], params),
    }


def integrate_matter(params: ModelParams, phidot0: float, phiddot0: float, t_span, phi0: float = 0.0,
                     close: Optional[str] = "K", rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> Trajectory:
    """Integrate the primary matter system; acceleration onsets are recorded as events."""
    params, s0 = matter_initial_state(params, phidot0, phiddot0, phi0, close)
    events = [EventSpec("accel", direction=+1, tol=1e-12)]
    traj = adaptive_integrate(lambda t, s: matter_rhs(t, s, params), s0, t_span, rel_tol, abs_tol,
                              events=events, monitors=matter_monitors(params), labels=LABELS)
    traj.meta.update(scenario="matter", params=params)
    return traj


def _fd_second(times, values):
    t = np.asarray(times)
    v = np.asarray(values)
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    return 2 * ((v[2:] - v[1:-1]) / h2 - (v[1:-1] - v[:-2]) / h1) / (h1 + h2)


def detect_acceleration_transition(traj: Trajectory, channel: str = "R") -> Optional[float]:
    """First time ``Rddot`` turns from negative to positive, or ``None``.

    ``Rddot`` is taken by three-point finite differences of the sampled
    scale factor; the crossing is interpolated linearly between the
    bracketing samples.
    """
    if len(traj) < 3:
        raise DomainError("need at least three samples")
    t_mid = traj.times[1:-1]
    acc = _fd_second(traj.times, traj[channel])
    for i in range(len(acc) - 1):
        if acc[i] < 0 <= acc[i + 1]:
            frac = -acc[i] / (acc[i + 1] - acc[i])
            return float(t_mid[i] + frac * (t_mid[i + 1] - t_mid[i]))
    return None


def first_crossing_below(traj: Trajectory, falling: str, other: str) -> Optional[float]:
    """First time channel ``falling`` drops below ``other`` (linear interpolation)."""
    d = traj[falling] - traj[other]
    for i in range(len(d) - 1):
        if d[i] > 0 >= d[i + 1]:
            frac = d[i] / (d[i] - d[i + 1])
            return float(traj.times[i] + frac * (traj.times[i + 1] - traj.times[i]))
    return None


# Default constants for the dust run with phidot0 = 1, phiddot0 = -5, lam = 0.1.
# K is closed from the Friedmann equation; rho0 and Lambda are free choices.
FIG3_PARAMS = ModelParams(lam=0.1, K=1.0, Lambda=-1.0001, omega=0.0, rho0=0.01, R0=1.0, k=0)
FIG3_INITIAL = (1.0, -5.0)
FIG3_SPAN = (0.0, 10.0)
