"""Built-in verification battery.

Each item is a small self-contained computation with its own oracle and
returns ``(passed, detail)``. ``literal=True`` swaps in the radial
factor exactly as typeset (``exp(-r^2)``), which makes the radial items fail.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np

from .config import parse_config
from .core import Gradient2D, MetricSignature, ModelParams, eh_residual_flat, stress_energy, stress_energy_divergence
from .flatspace import (
    HodographSolution,
    ParametricFlatSolution,
    eval_parametric,
    fd_radial,
    hodograph_f,
    hodograph_jacobian_ok,
    hodograph_radial,
    parametric_derivatives,
    radial_ode_residual,
)
from .flcosmo import matter, uncoupled, vacuum
from .integrate import EventSpec, adaptive_integrate, rk4_fixed
from .scenarios import compute_scenario
from .specfn import bisect, kummer_1f1, s_pm, solve_phidot_implicit

Result = Tuple[bool, str]


@dataclass(frozen=True)
class Item:
    name: str
    summary: str
    fn: Callable[[bool], Result]


BATTERY: List[Item] = []


def item(name: str, summary: str):
    def wrap(fn):
        BATTERY.append(Item(name, summary, fn))
        return fn

    return wrap


def _form(literal: bool) -> str:
    return "literal" if literal else "corrected"


def _check(value: float, tol: float, label: str = "max err") -> Result:
    return bool(value < tol), f"{label} {value:.3g} (tol {tol:g})"


# -- flat space ----------------------------------------------------------------


@item("stress-divergence", "FD divergence of T on the separable solution")
def _stress_div(_):
    sig = MetricSignature.euclidean()
    sol = ParametricFlatSolution(1.0, 0.3, -0.2)

    def T(x, y):
        g = parametric_derivatives(sol, x, y)
        return stress_energy(Gradient2D(g.d_x, g.d_y), sig)

    worst = max(np.max(np.abs(stress_energy_divergence(T, x, y, sig, h=1e-4)))
                for x, y in [(0.1, 0.2), (-0.7, 0.4), (1.1, -0.9), (0.0, 0.0)])
    return _check(worst, 1e-5)


@item("flat-residual", "separable Euclidean and Minkowski solutions solve the EH equation")
def _flat_residual(_):
    rng = np.random.default_rng(7)
    worst = 0.0
    for sig in (MetricSignature.euclidean(), MetricSignature.minkowski()):
        sol = ParametricFlatSolution(1.3, 0.2, 0.1, 0.0, sig)
        lo, hi = sol.y_range()
        lo, hi = max(lo, -3.0), min(hi, 3.0)
        x = rng.uniform(-3, 3, 100)
        y = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 100)
        worst = max(worst, np.max(np.abs(eh_residual_flat(parametric_derivatives(sol, x, y), sig))))
    return _check(worst, 1e-8)


@item("kummer-exp", "1F1(3, 3, 2) = e^2")
def _kummer_exp(_):
    return _check(abs(kummer_1f1(3, 3, 2.0) - math.e**2) / math.e**2, 1e-12, "rel err")


@item("kummer-series", "1F1(1, 2, 1) against a 200-term direct sum")
def _kummer_series(_):
    ref, term = 0.0, 1.0
    for n in range(200):
        ref += term
        term *= (1 + n) / (2 + n) / (n + 1)
    return _check(abs(kummer_1f1(1, 2, 1.0) - ref), 1e-13, "abs err")


@item("s-pm-root", "s_pm(4/3, 1, 0) = 1 and matches bisection")
def _s_pm_root(_):
    root = bisect(lambda p: p**3 / 3 + p - 4 / 3, 0.0, 2.0)
    val = float(s_pm(4 / 3, 1.0, 0.0))
    return _check(max(abs(val - 1), abs(val - root)), 1e-12)


@item("phidot-root", "implicit velocity at lam=0.1, b=1, t=1 matches bisection")
def _phidot_root(_):
    v = solve_phidot_implicit(1.0, 0.1, 1.0)
    ref = bisect(lambda w: w * math.exp(0.05 * w * w) - 1.0, 0.0, 1.0)
    fwd = abs(v * math.exp(0.05 * v * v) - 1.0)
    return _check(max(abs(v - ref), fwd), 1e-12)


@item("parametric-value", "phi(4/3, 0) = 0.75 for l=1, c=c'=0")
def _param_value(_):
    phi, p, q = eval_parametric(ParametricFlatSolution(1.0), 4 / 3, 0.0)
    return _check(max(abs(phi - 0.75), abs(p - 1), abs(q)), 1e-12)


@item("parametric-partials", "exact partials vs central differences (h=1e-5)")
def _param_partials(_):
    sol = ParametricFlatSolution(0.8, -0.4, 0.6, 0.0)
    rng = np.random.default_rng(3)
    x, y = rng.uniform(-2, 2, 50), rng.uniform(-2, 2, 50)
    g = parametric_derivatives(sol, x, y)
    h = 1e-5
    fx = (eval_parametric(sol, x + h, y)[0] - eval_parametric(sol, x - h, y)[0]) / (2 * h)
    fy = (eval_parametric(sol, x, y + h)[0] - eval_parametric(sol, x, y - h)[0]) / (2 * h)
    return _check(max(np.max(np.abs(fx - g.d_x)), np.max(np.abs(fy - g.d_y))), 1e-6)


# -- hodograph -------------------------------------------------------------------


@item("hodograph-a1", "a=1, C=1/2 radial factor equals r/2")
def _hod_a1(_):
    return _check(abs(hodograph_radial(1.0, 2.0, 0.5) - 1.0), 1e-12)


@item("radial-residual", "radial equation holds for the radial factor (a=2, a=3; FD derivatives)")
def _radial_residual(literal):
    form = _form(literal)
    worst = 0.0
    for a, rs in ((2.0, (0.5, 1.0, 2.0, 5.0)), (3.0, (1.0,))):
        fun = lambda r, a=a: hodograph_radial(a, r, None, form)  # noqa: E731
        fd = fd_radial(fun, h=1e-3)
        for r in rs:
            worst = max(worst, abs(float(radial_ode_residual(lambda rr: fd(float(rr)), a, r))))
    return _check(worst, 1e-8, f"{form} form: max residual")


@item("radial-typo", "radial factor as typeset fails the radial equation at a=1, r=1")
def _radial_typo(_):
    fd = fd_radial(lambda r: hodograph_radial(1.0, r, None, "literal"), h=1e-3)
    res = abs(float(radial_ode_residual(lambda rr: fd(float(rr)), 1.0, 1.0)))
    return bool(res > 1e-2), f"|residual| {res:.3g} (must exceed 0.01)"


@item("hodograph-degenerate", "a=1 gives a degenerate (J=0) hodograph with zero residual")
def _hod_degenerate(_):
    sol = HodographSolution(1.0, normC=0.5)
    r, th = np.array([0.5, 1.0, 2.0]), np.array([0.3, 1.2, 2.5])
    _, res = hodograph_f(sol, r, th)
    ok = np.max(np.abs(res)) < 1e-12 and not hodograph_jacobian_ok(sol, r, th)
    return bool(ok), f"max residual {np.max(np.abs(res)):.3g}, jacobian flagged"


@item("hodograph-pde", "a=2, A=B=1 polar equation on 20 points (FD derivatives)")
def _hod_pde(literal):
    sol = HodographSolution(2.0, 1.0, 1.0, form=_form(literal))
    rng = np.random.default_rng(11)
    r, th = rng.uniform(0.2, 3.0, 20), rng.uniform(0, 2 * np.pi, 20)
    _, res = hodograph_f(sol, r, th, derivs="fd")
    return _check(float(np.max(np.abs(res))), 1e-7)


# -- uncoupled field -------------------------------------------------------------


@item("uncoupled-lambda0", "lam=0: phi = phi0 + 1/(b t0) - 1/(b t)")
def _unc_l0(_):
    tr = uncoupled.uncoupled_solve_euclidean(0.0, 2.0, (1.0, 100.0))
    exact = 1 / 2.0 - 1 / (2.0 * tr.times)
    return _check(float(np.max(np.abs(tr["phi"] - exact))), 1e-9)


@item("uncoupled-first-integral", "R^3 phidot e^{lam phidot^2/2} conserved by direct integration")
def _unc_fi(_):
    bg = uncoupled.matter_background()
    tr = uncoupled.integrate_uncoupled(0.1, 1.0, (1.0, 50.0), bg, rel_tol=1e-12)
    fi = tr["first_integral"]
    return _check(float(np.max(np.abs(fi / fi[0] - 1))), 1e-8, "rel drift")


@item("uncoupled-plateau", "lam=0.1: |phi(1e3) - phi(1e4)| < 1e-3")
def _unc_plateau(_):
    tr = uncoupled.uncoupled_solve_euclidean(0.1, 1.0, (1.0, 1e4))
    phi_1e3 = tr.interpolate(1e3)[0]
    return _check(abs(phi_1e3 - tr["phi"][-1]), 1e-3, "diff")


@item("uncoupled-small-lambda", "lam=0.1 velocity within 5% of the lam=0 law for t >= 1")
def _unc_small(_):
    t = np.linspace(1.0, 20.0, 60)
    v = solve_phidot_implicit(t, 0.1, 1.0)
    v0 = 1 / t**2
    return _check(float(np.max(np.abs(v - v0) / v0)), 0.05, "rel dev")


# -- vacuum, flat ----------------------------------------------------------------

_VAC = ModelParams(lam=0.1, K=1.0, Lambda=-2.0)


@lru_cache(maxsize=None)
def _vac_flat_traj():
    return vacuum.integrate_vacuum_flat(_VAC, 1.0, (0.0, 10.0), rel_tol=1e-9, abs_tol=1e-12)


@item("constraint-compat", "d/dt of the constraint bracket equals 2 H Hdot")
def _compat(_):
    tr = _vac_flat_traj()
    h = 1e-4
    worst = 0.0
    for t in np.linspace(0.5, 9.5, 19):
        up, dn = tr.interpolate(t + h), tr.interpolate(t - h)
        dbr = (vacuum.constraint_bracket(up[1] ** 2, _VAC) - vacuum.constraint_bracket(dn[1] ** 2, _VAC)) / (2 * h)
        H, y = tr.interpolate(t)[:2]
        Hdot, _ = vacuum.vacuum_flat_rhs((H, y), _VAC)
        worst = max(worst, abs(dbr - 2 * H * Hdot))
    return _check(worst, 1e-6)


@item("constraint-drift", "vacuum-flat constraint residual over t in [0, 10]")
def _drift(_):
    return _check(float(np.max(np.abs(_vac_flat_traj()["constraint"]))), 1e-6)


@item("hubble-root", "constraint root H at u=1 matches bisection")
def _hubble_root(_):
    H = float(vacuum.hubble_from_constraint(1.0, _VAC))
    ref = bisect(lambda h: h * h - vacuum.constraint_bracket(1.0, _VAC), 0.0, 10.0)
    return _check(abs(H - ref), 1e-12)


@item("uz-fixed-point", "(u, z) = (0, 0) is a fixed point")
def _fixed(_):
    d = vacuum.vacuum_flat_uz_rhs((0.0, 0.0), _VAC)
    return _check(max(abs(d[0]), abs(d[1])), 1e-300 + 1e-15, "|rhs|")


@item("uz-equivalence", "(H, y) and (u, z) integrations agree on u = y^2")
def _uz_eq(_):
    y0 = 1.0
    H0 = float(vacuum.hubble_from_constraint(y0 * y0, _VAC))
    st = vacuum.uz_from_hy(H0, y0, _VAC.lam)
    a = vacuum.integrate_vacuum_flat(_VAC, y0, (0.0, 5.0), rel_tol=1e-11, abs_tol=1e-13)
    b = vacuum.integrate_vacuum_flat_uz(_VAC, st.u, st.z, (0.0, 5.0), rel_tol=1e-11, abs_tol=1e-13)
    t = np.linspace(0, 5, 51)
    return _check(float(np.max(np.abs(a.interpolate(t)[:, 1] ** 2 - b.interpolate(t)[:, 0]))), 1e-6)


@item("small-u", "small-u relation tracks the full (u, z) flow while u < 1e-3")
def _small_u(_):
    p = ModelParams(lam=1.0, K=1.0)
    u0, z0 = 1e-4, 1.0
    tr = vacuum.integrate_vacuum_flat_uz(p, u0, z0, (0.0, 3.0), rel_tol=1e-11, abs_tol=1e-15)
    shift = u0 + math.log(p.lam * (2 * z0 * z0 - 0.75 * p.K)) / (2 * p.lam)
    u, z = tr["u"], tr["z"]
    mask = u < 1e-3
    approx = vacuum.small_u_approximation(z[mask], p, shift)
    return _check(float(np.max(np.abs(approx - u[mask]) / u[mask])), 0.10, "max rel err")


@item("flat-closed-form", "lam=0 exponential solution: a=-sqrt(3K/2), K=2, H=sqrt(3)/3, residuals")
def _flat_cf(_):
    K = 2.0
    a = -math.sqrt(1.5 * K)
    t = np.linspace(0, 2, 21)
    cf = vacuum.small_lambda_flat_closed_form(a, 1.0, -0.5, 3.0, t, K)
    p = ModelParams(lam=0.0, K=K, Lambda=cf.Lambda_required)
    Hdot, ydot = vacuum.vacuum_flat_rhs((cf.H, cf.phidot), p)
    res = max(
        abs(a + math.sqrt(3)), abs(cf.H - math.sqrt(3) / 3), float(np.max(np.abs(Hdot))),
        float(np.max(np.abs(ydot - a * cf.phidot))),
        float(np.max(np.abs(vacuum.friedmann_constraint_residual(cf.H, cf.phidot, p)))),
    )
    return _check(res, 1e-10)


# -- vacuum, curved --------------------------------------------------------------


@item("curved-u-equation", "(u, z) trajectory satisfies the second-order u equation")
def _curved_u(_):
    p = ModelParams(lam=0.3, K=1.0, Lambda=-0.5)
    n = 2000
    h = 2.0 / n
    tr = rk4_fixed(lambda t, s: np.array(vacuum.vacuum_curved_uz_rhs((s[0], s[1]), p)), [0.5, -0.2], (0.0, 2.0), n)
    u = tr.states[:, 0]
    i = np.arange(2, n - 1)
    udot = (u[i - 2] - 8 * u[i - 1] + 8 * u[i + 1] - u[i + 2]) / (12 * h)
    uddot = (-u[i - 2] + 16 * u[i - 1] - 30 * u[i] + 16 * u[i + 1] - u[i + 2]) / (12 * h * h)
    worst = float(np.max(np.abs(vacuum.curved_u_residual(u[i], udot, uddot, p))))
    return _check(worst, 1e-5)


@item("curved-lambda-minus-one", "Lambda=-1, small lam: z follows z0/(1 - z0 t/3)")
def _curved_m1(_):
    p = ModelParams(lam=1e-8, K=1.0, Lambda=-1.0)
    z0 = 0.1
    tr = vacuum.integrate_vacuum_curved(p, 1.0, z0, (0.0, 1.0), rel_tol=1e-11)
    ref = z0 / (1 - z0 / 3)
    return _check(abs(tr["z"][-1] - ref) / ref, 1e-2, "rel err")


@item("curved-small-lambda", "tan and tanh branches solve zdot = z^2/3 + K(Lambda+1)/2")
def _curved_branches(_):
    worst = 0.0
    h = 1e-5
    for L in (0.5, -2.0):
        K = 1.0
        t = np.linspace(-1.0, 1.0, 50)
        z = lambda s, L=L: vacuum.small_lambda_curved(L, K, 0.0, 0.0, s).z  # noqa: E731
        zdot = (z(t + h) - z(t - h)) / (2 * h)
        worst = max(worst, float(np.max(np.abs(zdot - z(t) ** 2 / 3 - K * (L + 1) / 2))))
    return _check(worst, 1e-8)


@item("scale-factor-growth", "R(phidot=1e-6) > 10 R(phidot=1e-3)")
def _growth(_):
    p = ModelParams(lam=1.0)
    r1 = vacuum.scale_factor_from_phidot(1e-6, p)
    r2 = vacuum.scale_factor_from_phidot(1e-3, p)
    return bool(r1 > 10 * r2), f"ratio {r1 / r2:.12f}"


# -- matter ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def _fig3(rel_tol=1e-12, rho_rad0=0.0):
    p = matter.FIG3_PARAMS.replace(rho_rad0=rho_rad0)
    return matter.integrate_matter(p, *matter.FIG3_INITIAL, matter.FIG3_SPAN, rel_tol=rel_tol)


@item("matter-reduces-to-vacuum", "rho0 = 0, w = 0, k = 0 reproduces the flat vacuum run")
def _matter_vacuum(_):
    p = ModelParams(lam=0.1, K=1.0, Lambda=-2.0)
    vac = vacuum.integrate_vacuum_flat(p, 1.0, (0, 5), rel_tol=1e-12, abs_tol=1e-14)
    H0, y0 = vac.states[0, :2]
    mat = matter.integrate_matter(p, y0, -3 * H0 * y0 / (1 + p.lam * y0 * y0), (0, 5), close=None)
    t = np.linspace(0, 5, 21)
    a, b = mat.interpolate(t), vac.interpolate(t)
    return _check(float(max(np.max(np.abs(a[:, 1] - b[:, 1])), np.max(np.abs(a[:, 3] - b[:, 0])))), 1e-8)


@item("matter-conservation","rho R^{3(1+w)} conserved for w = 0 and 1/3")
def _conservation(_):
    worst = 0.0
    for w in (0.0, 1 / 3):
        p = matter.FIG3_PARAMS.replace(omega=w)
        tr = matter.integrate_matter(p, *matter.FIG3_INITIAL, matter.FIG3_SPAN)
        c = tr["conservation"]
        worst = max(worst, float(np.max(np.abs(c / c[0] - 1))))
    return _check(worst, 1e-8, "rel drift")


@item("fig3-transition", "dust run: exactly one deceleration to acceleration transition")
def _fig3_once(_):
    tr = _fig3()
    up = [e for e in tr.events if e.name == "accel"]
    ok = len(up) == 1 and all(e.direction > 0 for e in up)
    return ok, f"{len(up)} sign change(s) of Rddot" + (f" at t={up[0].t:.6g}" if up else "")


@item("fig3-stability", "transition time stable to 2% under tolerance halving")
def _fig3_stable(_):
    t1 = [e.t for e in _fig3(1e-10).events]
    t2 = [e.t for e in _fig3(5e-11).events]
    if len(t1) != 1 or len(t2) != 1:
        return False, "transition missing"
    return _check(abs(t1[0] - t2[0]) / t2[0], 0.02, "rel change")


@item("fig4-ordering", "rho_phi starts above matter and radiation and crosses below")
def _fig4(_):
    tr = _fig3(1e-12, 0.005)
    start = tr["rho_phi"][0] > tr["rho_matter"][0] and tr["rho_phi"][0] > tr["rho_rad"][0]
    cross = matter.first_crossing_below(tr, "rho_phi", "rho_matter")
    return bool(start and cross is not None), f"crosses matter at t={cross}"


# -- integrator ------------------------------------------------------------------


@item("rk4-order", "rk4 error ratio 16 +- 20% on y' = y")
def _rk4(_):
    errs = [abs(rk4_fixed(lambda t, y: y, [1.0], (0, 1), n).final[0] - math.e) for n in (16, 32)]
    ratio = errs[0] / errs[1]
    return bool(abs(ratio - 16) < 3.2), f"ratio {ratio:.3f}"


@item("rk4-riccati", "y' = -y^2 to 1/2 with 1000 steps")
def _rk4_ric(_):
    return _check(abs(rk4_fixed(lambda t, y: -y * y, [1.0], (0, 1), 1000).final[0] - 0.5), 1e-6)


@item("adaptive-energy", "oscillator energy drift over 10 periods at rel_tol 1e-9")
def _energy(_):
    tr = adaptive_integrate(lambda t, s: np.array([s[1], -s[0]]), [1.0, 0.0], (0, 20 * np.pi), 1e-9, 1e-12)
    E = 0.5 * (tr.states[:, 0] ** 2 + tr.states[:, 1] ** 2)
    return _check(float(np.max(np.abs(E - 0.5))), 1e-7, "drift")


@item("event-location", "y = 1/2 on y' = -y located at ln 2")
def _event(_):
    tr = adaptive_integrate(lambda t, y: -y, [1.0], (0, 2), 1e-10, 1e-12,
                            events=[EventSpec("y", trigger="threshold", threshold=0.5)],
                            monitors={"y": lambda t, y: y[0]})
    return _check(abs(tr.events[0].t - math.log(2)), 1e-8)


# -- scenarios -------------------------------------------------------------------

_VAC_CFG = """
[scenario]
name = vacuum-flat
[params]
lambda = 0.1
K = 1
Lambda = -2
[initial]
y = 1
[run]
t_start = 0
t_end = 10
rel_tol = 1e-9
"""

_FLAT_CFG = """
[scenario]
name = flat2d
[params]
l = 1
[grid]
x_min = -2
x_max = 2
y_min = -2
y_max = 2
nx = 50
ny = 50
"""

_MATTER_CFG = """
[scenario]
name = matter
[params]
lambda = 0.1
Lambda = -1.0001
omega = 0
rho0 = 0.01
[initial]
phidot = 1
phiddot = -5
[run]
t_start = 0
t_end = 10
"""


def _report_value(report, key):
    for line in report:
        if line.startswith(key + ":"):
            return line.split(":", 1)[1].strip()
    raise KeyError(key)


@item("scenario-vacuum-flat", "vacuum-flat scenario report: constraint residual < 1e-6")
def _sc_vac(_):
    res = compute_scenario(parse_config(_VAC_CFG))
    return _check(float(_report_value(res.report, "max_constraint_residual")), 1e-6)


@item("scenario-flat2d", "flat2d 50x50 grid: max EH residual < 1e-8")
def _sc_flat(_):
    res = compute_scenario(parse_config(_FLAT_CFG))
    return _check(float(np.max(np.abs(res.columns["residual"]))), 1e-8)


@item("scenario-matter", "matter scenario report lists one acceleration transition")
def _sc_matter(_):
    res = compute_scenario(parse_config(_MATTER_CFG))
    n = int(_report_value(res.report, "acceleration_transitions"))
    return n == 1, f"{n} transition(s)"


def run_item(it: Item, literal: bool = False) -> Result:
    try:
        ok, detail = it.fn(literal)
    except Exception as exc:  # a crash is a failure, not an abort of the battery
        return False, f"raised {type(exc).__name__}: {exc}"
    return bool(ok), detail


def verify_all(literal: bool = False, workers: int = 1):
    """Run every item; returns ``[(item, passed, detail)]`` in battery order."""
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda it: run_item(it, literal), BATTERY))
    else:
        results = [run_item(it, literal) for it in BATTERY]
    return [(it, ok, detail) for it, (ok, detail) in zip(BATTERY, results)]
