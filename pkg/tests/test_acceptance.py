"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line with its tolerance."""

import math
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

from exphmap.cli import main
from exphmap.core import MetricSignature, ModelParams, eh_residual_flat
from exphmap.flatspace import (
    ParametricFlatSolution,
    hodograph_radial,
    hodograph_radial_derivs,
    kummer_parameters,
    parametric_derivatives,
    radial_ode_residual,
)
from exphmap.flcosmo import matter, uncoupled, vacuum
from exphmap.integrate import adaptive_integrate, rk4_fixed
from exphmap.specfn import kummer_1f1

from conftest import ACCEPTANCE_LINES

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def emit(line):
    print(line)
    ACCEPTANCE_LINES.append(line)


def report(tag, what, value, tol, ok=None, cmp="<"):
    ok = (value < tol if cmp == "<" else value > tol) if ok is None else ok
    emit(f"{'PASS' if ok else 'FAIL'} [{tag}] {what}: {value:.3e} (need {cmp} {tol:.0e})")
    return ok


def test_ac01_flat_space_exactness():
    rng = np.random.default_rng(20261015)
    t0 = time.perf_counter()
    worst_e = worst_m = 0.0
    for _ in range(10):
        l, c, cp = rng.uniform(1e-3, 5), rng.uniform(-2, 2), rng.uniform(-2, 2)
        e = ParametricFlatSolution(l, c, cp)
        x, y = rng.uniform(-3, 3, 100), rng.uniform(-3, 3, 100)
        worst_e = max(worst_e, np.max(np.abs(eh_residual_flat(parametric_derivatives(e, x, y), e.signature))))
        m = ParametricFlatSolution(l, c, rng.uniform(-0.5, 0.5), 0.0, MetricSignature.minkowski())
        lo, hi = m.y_range()
        ym = rng.uniform(lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo), 100)
        worst_m = max(worst_m, np.max(np.abs(eh_residual_flat(parametric_derivatives(m, x, ym), m.signature))))
    dt = time.perf_counter() - t0
    ok = [report("AC1", "Euclidean max |residual|", worst_e, 1e-8),
          report("AC1", "Minkowski max |residual|", worst_m, 1e-8),
          report("AC1", "runtime s", dt, 1.0)]
    assert all(ok)


def test_ac02_hodograph_ground_truth():
    t0 = time.perf_counter()
    r = np.linspace(0.1, 5, 200)
    worst = 0.0
    for a in (1.0, 2.0, 3.0):
        res = radial_ode_residual(lambda rr, a=a: hodograph_radial_derivs(a, rr), a, r)
        worst = max(worst, float(np.max(np.abs(res))))
    C = 0.5
    lin = float(np.max(np.abs(hodograph_radial(1.0, r, C) - C * r)))
    lit = abs(float(radial_ode_residual(lambda rr: hodograph_radial_derivs(1.0, rr, None, "literal"), 1.0, 1.0)))
    dt = time.perf_counter() - t0

    # independent oracle: the same residual in 40-digit arithmetic from mpmath's 1F1
    mpmath.mp.dps = 40
    mp_worst = mpmath.mpf(0)
    for a in (1, 2, 3):
        A, b = kummer_parameters(a)
        C_ = mpmath.mpf(2) ** (-mpmath.mpf(a + 1) / 2)
        f = lambda x, a=a, A=A, b=b, C_=C_: C_ * x**a * mpmath.exp(-x * x / 2) * mpmath.hyp1f1(A, b, x * x / 2)  # noqa: E731
        for rv in (0.1, 1.0, 2.5, 5.0):
            x = mpmath.mpf(rv)
            rres = mpmath.diff(f, x, 2) + (x + 1 / x) * mpmath.diff(f, x) - a * a * (1 + 1 / x**2) * f(x)
            mp_worst = max(mp_worst, abs(rres))
            assert float(f(x)) == pytest.approx(float(hodograph_radial(a, rv)), rel=1e-12)
    ok = [report("AC2", "corrected radial max |residual|, a in {1,2,3}", worst, 1e-8),
          report("AC2", "mpmath residual of corrected form", float(mp_worst), 1e-8),
          report("AC2", "a=1 deviation from C r", lin, 1e-12),
          report("AC2", "literal exponent |residual| at a=1, r=1", lit, 1e-2, cmp=">"),
          report("AC2", "runtime s", dt, 1.0)]
    assert all(ok)


def test_ac03_kummer_identity():
    worst = 0.0
    for m in (1, 2, 5):
        for x in (0.5, 1.0, 2.0, 10.0):
            worst = max(worst, abs(kummer_1f1(m, m, x) - math.exp(x)) / math.exp(x))
    assert report("AC3", "max rel |1F1(m,m,x) - e^x|", worst, 1e-12)


def test_ac04_constraint_compatibility():
    p = ModelParams(lam=0.1, K=1.0, Lambda=-2.0)
    t0 = time.perf_counter()
    tr = vacuum.integrate_vacuum_flat(p, 1.0, (0.0, 10.0), rel_tol=1e-9)
    dt = time.perf_counter() - t0
    # recompute the residual from the states rather than trusting the monitor
    res = np.max(np.abs(tr["H"] ** 2 - vacuum.constraint_bracket(tr["y"] ** 2, p)))
    ok = [report("AC4", "max |constraint residual|", float(res), 1e-6),
          report("AC4", "runtime s", dt, 1.0)]
    assert all(ok)


def test_ac05_formulation_equivalence():
    p = ModelParams(lam=0.1, K=1.0, Lambda=-2.0)
    rng = np.random.default_rng(5)
    t = np.linspace(0, 5, 101)
    worst = 0.0
    for y0 in rng.uniform(0.2, 2.0, 5):
        H0 = vacuum.hubble_from_constraint(y0 * y0, p)
        st = vacuum.uz_from_hy(H0, y0, p.lam)
        a = vacuum.integrate_vacuum_flat(p, y0, (0, 5), rel_tol=1e-11, abs_tol=1e-13)
        b = vacuum.integrate_vacuum_flat_uz(p, st.u, st.z, (0, 5), rel_tol=1e-11, abs_tol=1e-13)
        ya, yb = a.interpolate(t), b.interpolate(t)
        worst = max(worst, float(np.max(np.abs(ya[:, 1] ** 2 - yb[:, 0]))))
        # the (u, z) run's Hubble rate comes from the constraint
        H_uz = np.array([vacuum.hubble_from_constraint(u, p) for u in yb[:, 0]])
        worst = max(worst, float(np.max(np.abs(H_uz - ya[:, 0]))))
    assert report("AC5", "max |y^2 - u| and |H_hy - H_uz| over 5 runs", worst, 1e-6)


def test_ac06_small_lambda_flat():
    K = 2.0
    a = -math.sqrt(1.5 * K)
    b, c, e = 1.0, -0.5, 3.0
    t = np.linspace(0, 1, 101)
    cf = vacuum.small_lambda_flat_closed_form(a, b, c, e, t, K)
    p0 = ModelParams(lam=0.0, K=K, Lambda=cf.Lambda_required)
    # field equation phiddot + 3 H phidot = 0 with phiddot = a phidot
    r44 = np.max(np.abs(a * cf.phidot + 3 * cf.H * cf.phidot))
    Hdot, ydot = vacuum.vacuum_flat_rhs((cf.H, cf.phidot), p0)
    r45 = np.max(np.abs(Hdot - 0.0))
    r46 = np.max(np.abs(ydot - a * cf.phidot))
    r47 = np.max(np.abs(vacuum.friedmann_constraint_residual(cf.H, cf.phidot, p0)))
    res = float(max(r44, r45, r46, r47))
    p = ModelParams(lam=1e-6, K=K, Lambda=cf.Lambda_required)
    tr = vacuum.integrate_vacuum_flat(p, float(cf.phidot[0]), (0, 1), rel_tol=1e-11, abs_tol=1e-13, phi0=float(cf.phi[0]))
    ex = vacuum.small_lambda_flat_closed_form(a, b, c, e, tr.times, K)
    dev = max(float(np.max(np.abs(tr[n] / v - 1))) for n, v in (("y", ex.phidot), ("phi", ex.phi), ("R", ex.R), ("H", ex.H)))
    ok = [report("AC6", "lambda=0 closed-form residuals", res, 1e-10),
          report("AC6", "lambda=1e-6 relative deviation", dev, 1e-3)]
    assert all(ok)


def test_ac07_curved_small_lambda():
    worst = {}
    h = 1e-5
    for L in (0.5, -3.0):
        K = 1.0
        t = np.linspace(-1.0, 1.0, 50)
        z = lambda s, L=L: vacuum.small_lambda_curved(L, K, 0.0, 0.0, s).z  # noqa: E731
        zdot = (z(t + h) - z(t - h)) / (2 * h)
        worst[L] = float(np.max(np.abs(zdot - z(t) ** 2 / 3 - K * (L + 1) / 2)))
    ok = [report("AC7", "tan branch (Lambda > -1) max |residual|", worst[0.5], 1e-8),
          report("AC7", "tanh branch (Lambda < -1) max |residual|", worst[-3.0], 1e-8)]
    assert all(ok)


def test_ac08_matter_conservation():
    ok = []
    for w in (0.0, 1 / 3):
        tr = matter.integrate_matter(matter.FIG3_PARAMS.replace(omega=w), *matter.FIG3_INITIAL, matter.FIG3_SPAN)
        c = tr["rho"] * tr["R"] ** (3 * (1 + w))
        ok.append(report("AC8", f"rho R^(3(1+w)) rel drift, w={w:.4g}", float(np.max(np.abs(c / c[0] - 1))), 1e-8))
    assert all(ok)


def test_ac09_fig3_qualitative():
    t0 = time.perf_counter()
    tr = matter.integrate_matter(matter.FIG3_PARAMS, *matter.FIG3_INITIAL, matter.FIG3_SPAN, rel_tol=1e-10)
    fine = matter.integrate_matter(matter.FIG3_PARAMS, *matter.FIG3_INITIAL, matter.FIG3_SPAN, rel_tol=5e-11)
    dt = time.perf_counter() - t0
    ups = [e.t for e in tr.events if e.name == "accel"]
    ups_fine = [e.t for e in fine.events if e.name == "accel"]
    once = len(ups) == 1 and len(ups_fine) == 1 and all(e.direction > 0 for e in tr.events)
    emit(f"{'PASS' if once else 'FAIL'} [AC9] transitions detected: {len(ups)} (need exactly 1)")
    stab = abs(ups[0] - ups_fine[0]) / ups_fine[0] if once else float("inf")
    above = tr["rho_phi"][0] > tr["rho_matter"][0]
    cross = matter.first_crossing_below(tr, "rho_phi", "rho_matter")
    order = bool(above and cross is not None and once and cross < ups[0])
    emit(f"{'PASS' if order else 'FAIL'} [AC9] rho_phi(0)={tr['rho_phi'][0]:.4g} > rho_m(0)={tr['rho_matter'][0]:.4g}, "
          f"crosses below at t={cross} before transition at t={ups[0] if ups else None}")
    ok = [once, order,
          report("AC9", "transition time change under tolerance halving", stab, 0.02),
          report("AC9", "runtime s", dt, 5.0)]
    assert all(ok)


def test_ac10_uncoupled_asymptotics():
    tr = uncoupled.uncoupled_solve_euclidean(0.1, 1.0, (1.0, 1e4))
    plateau = abs(tr.interpolate(1e3)[0] - tr["phi"][-1])
    b = 1.0
    t0, phi0 = 1.0, 0.0
    tr0 = uncoupled.uncoupled_solve_euclidean(0.0, b, (t0, 1e3), phi_start=phi0)
    # phi = phi_inf - 1/(b t) with phi_inf = phi0 + 1/(b t0)
    exact = (phi0 + 1 / (b * t0)) - 1 / (b * tr0.times)
    err = float(np.max(np.abs(tr0["phi"] - exact)))
    ok = [report("AC10", "|phi(1e3) - phi(1e4)|, lambda=0.1", float(plateau), 1e-3),
          report("AC10", "lambda=0 quadrature error", err, 1e-9)]
    assert all(ok)


def test_ac11_integrator_convergence():
    ns = (16, 32, 64, 128)
    errs = [abs(rk4_fixed(lambda t, y: y, [1.0], (0, 1), n).final[0] - math.e) for n in ns]
    order = float(np.polyfit(np.log(ns), np.log(errs), 1)[0] * -1)
    tr = adaptive_integrate(lambda t, s: np.array([s[1], -s[0]]), [1.0, 0.0], (0, 20 * math.pi), 1e-9, 1e-12)
    drift = float(np.max(np.abs(0.5 * np.sum(tr.states**2, axis=1) - 0.5)))
    ok = [report("AC11", "|rk4 empirical order - 4|", abs(order - 4.0), 0.2),
          report("AC11", "oscillator energy drift, 10 periods", drift, 1e-7)]
    emit(f"     [AC11] empirical order {order:.4f}")
    assert all(ok)


def test_ac12_determinism(tmp_path):
    configs = sorted(SCENARIOS.glob("*.ini"))
    assert configs
    same = []
    for cfg in configs:
        a, b = tmp_path / cfg.stem / "a", tmp_path / cfg.stem / "b"
        assert main(["run", str(cfg), "--out", str(a)]) == 0
        assert main(["run", str(cfg), "--out", str(b)]) == 0
        same.append((a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes())
    ok = all(same)
    emit(f"{'PASS' if ok else 'FAIL'} [AC12] byte-identical CSV on repeat runs: {sum(same)}/{len(same)} scenarios")
    assert ok
