"""Run a :class:`ScenarioConfig` and write ``trajectory.csv``, ``plot_*.svg`` and ``report.txt``."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import svg
from .config import ConfigError, ScenarioConfig
from .core import (
    BranchError,
    ConvergenceError,
    DomainError,
    MetricSignature,
    ModelParams,
    SingularityError,
    eh_residual_flat,
)
from .flatspace import (
    HodographSolution,
    ParametricFlatSolution,
    eval_parametric,
    hodograph_f,
    hodograph_jacobian,
    hodograph_radial,
    parametric_derivatives,
    radial_ode_residual,
    hodograph_radial_derivs,
)
from .flcosmo import matter, uncoupled, vacuum
from .integrate import IntegrationError, Trajectory


class NumericalFailure(RuntimeError):
    """A run that stopped before its end time; carries the failure time."""

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message)
        self.t = t


@dataclass
class RunResult:
    columns: Dict[str, np.ndarray]
    report: List[str]
    plots: Dict[str, str] = field(default_factory=dict)
    trajectory: Optional[Trajectory] = None


# -- formatting --------------------------------------------------------------


def format_value(v: float) -> str:
    return format(float(v), ".17g")


def csv_text(columns: Dict[str, np.ndarray]) -> str:
    names = list(columns)
    n = len(next(iter(columns.values())))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    cols = [np.asarray(columns[k], dtype=float) for k in names]
    for i in range(n):
        w.writerow([format_value(c[i]) for c in cols])
    return buf.getvalue()


def read_csv(path) -> Dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in row] for row in body], dtype=float).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def _rel_drift(values) -> float:
    v = np.asarray(values, dtype=float)
    ref = abs(v[0]) if v[0] != 0 else 1.0
    return float((np.max(v) - np.min(v)) / ref)


def _max_abs(values) -> float:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    return float(np.max(np.abs(v))) if len(v) else float("nan")


# -- parameter plumbing ------------------------------------------------------


def _model_params(cfg: ScenarioConfig, **extra) -> ModelParams:
    p = cfg.params
    mapping = {"lambda": "lam", "K": "K", "Lambda": "Lambda", "omega": "omega", "k": "k", "rho0": "rho0",
               "R0": "R0", "rho_rad0": "rho_rad0", "alpha": "alpha"}
    kwargs = {mapping[key]: val for key, val in p.items() if key in mapping}
    kwargs.update(extra)
    try:
        return ModelParams(**kwargs)
    except DomainError as exc:
        raise ConfigError(f"[params] {exc}") from None


def _samples(traj: Trajectory, cfg: ScenarioConfig) -> Trajectory:
    n = cfg.run.get("n_samples")
    if not n:
        return traj
    return traj.resample(np.linspace(traj.times[0], traj.times[-1], int(n)))


def _tols(cfg: ScenarioConfig, rel: float, abs_: float):
    return float(cfg.run.get("rel_tol", rel)), float(cfg.run.get("abs_tol", abs_))


def _span(cfg: ScenarioConfig):
    return float(cfg.run["t_start"]), float(cfg.run["t_end"])


def _time_plots(cols: Dict[str, np.ndarray], groups, title: str) -> Dict[str, str]:
    t = cols["t"]
    out = {}
    for name, keys, log_y in groups:
        series = [(k, t, cols[k]) for k in keys if k in cols]
        if series:
            out[name] = svg.line_chart(series, f"{title}: {', '.join(keys)}", "t", ", ".join(keys), log_y=log_y)
    return out


# -- scenarios -----------------------------------------------------------------


def _grid2d(cfg: ScenarioConfig):
    g = cfg.grid
    xs = np.linspace(g["x_min"], g["x_max"], int(g["nx"]))
    ys = np.linspace(g["y_min"], g["y_max"], int(g["ny"]))
    return xs, ys


def _flat2d(cfg: ScenarioConfig, minkowski: bool) -> RunResult:
    p = cfg.params
    sig = MetricSignature.minkowski() if minkowski else MetricSignature.euclidean()
    try:
        sol = ParametricFlatSolution(p["l"], p.get("c", 0.0), p.get("cprime", 0.0), p.get("const", 0.0), sig)
    except DomainError as exc:
        raise ConfigError(f"[params] l: {exc}") from None
    xs, ys = _grid2d(cfg)
    ylo, yhi = sol.y_range()
    ok_y = (ys > ylo) & (ys < yhi)
    X, Y = np.meshgrid(xs, ys)
    phi = np.full(X.shape, np.nan)
    P, Q, RES = phi.copy(), phi.copy(), phi.copy()
    if np.any(ok_y):
        Xi, Yi = X[ok_y], Y[ok_y]
        phi[ok_y], P[ok_y], Q[ok_y] = eval_parametric(sol, Xi, Yi)
        RES[ok_y] = eh_residual_flat(parametric_derivatives(sol, Xi, Yi), sig)
    cols = {"x": X.ravel(), "y": Y.ravel(), "phi": phi.ravel(), "p": P.ravel(), "q": Q.ravel(),
            "residual": RES.ravel()}
    outside = int(np.sum(~np.isfinite(phi)))
    report = [
        f"grid: {len(xs)} x {len(ys)}",
        f"max_eh_residual: {format_value(_max_abs(RES))}",
        f"points_outside_branch: {outside}",
    ]
    finite = phi[np.isfinite(phi)]
    plots = {}
    if len(finite):
        levels = list(np.linspace(finite.min(), finite.max(), 9)[1:-1])
        Zc = np.where(np.isfinite(phi), phi, finite.min() - 1.0)
        plots["phi_contour"] = svg.contour_chart(xs, ys, Zc, levels, f"{cfg.title}: phi contours")
    return RunResult(cols, report, plots)


def _hodograph(cfg: ScenarioConfig) -> RunResult:
    p, g = cfg.params, cfg.grid
    try:
        sol = HodographSolution(p["a"], p.get("A", 1.0), p.get("B", 0.0), p.get("normC"), p.get("form", "corrected"))
    except DomainError as exc:
        raise ConfigError(f"[params] a: {exc}") from None
    rs = np.linspace(g["r_min"], g["r_max"], int(g["nr"]))
    ths = np.linspace(g["theta_min"], g["theta_max"], int(g["ntheta"]))
    Th, Rg = np.meshgrid(ths, rs)
    f, res = hodograph_f(sol, Rg, Th)
    jac = hodograph_jacobian(sol, Rg, Th)
    radial_res = radial_ode_residual(lambda r: hodograph_radial_derivs(sol.a, r, sol.norm, sol.form), sol.a, rs)
    cols = {"r": Rg.ravel(), "theta": Th.ravel(), "u": (Rg * np.cos(Th)).ravel(), "v": (Rg * np.sin(Th)).ravel(),
            "f": f.ravel(), "residual": res.ravel(), "jacobian": jac.ravel()}
    report = [
        f"form: {sol.form}",
        f"grid: {len(rs)} x {len(ths)}",
        f"max_radial_residual: {format_value(_max_abs(radial_res))}",
        f"max_pde_residual: {format_value(_max_abs(res))}",
        f"jacobian_degenerate_points: {int(np.sum(np.abs(jac) <= 1e-12))}",
    ]
    plots = {"radial": svg.line_chart([("R(r)", rs, hodograph_radial(sol.a, rs, sol.norm, sol.form))],
                                      f"{cfg.title}: radial factor", "r", "R")}
    return RunResult(cols, report, plots)


def _uncoupled(cfg: ScenarioConfig) -> RunResult:
    lam, b = cfg.params["lambda"], cfg.params["b"]
    if lam < 0 or b <= 0:
        raise ConfigError("[params] lambda/b: need lambda >= 0 and b > 0")
    rel, abs_ = _tols(cfg, 1e-12, 1e-14)
    t0, t1 = _span(cfg)
    if t0 <= 0:
        raise ConfigError("[run] t_start: must be positive")
    traj = uncoupled.uncoupled_solve_euclidean(lam, b, (t0, t1), int(cfg.initial.get("sign", 1)),
                                               float(cfg.initial.get("phi", 0.0)), rel, abs_)
    raw = traj.columns()
    traj = _samples(traj, cfg)
    cols = traj.columns()
    report = [
        "max_constraint_residual: n/a",
        f"first_integral_drift: {format_value(_rel_drift(raw['first_integral']))}",
        f"phi_end: {format_value(raw['phi'][-1])}",
    ]
    plots = _time_plots(cols, [("phi", ["phi"], False), ("phidot", ["phidot"], False)], cfg.title)
    return RunResult(cols, report, plots, traj)


def _vacuum_flat(cfg: ScenarioConfig) -> RunResult:
    params = _model_params(cfg)
    rel, abs_ = _tols(cfg, 1e-9, 1e-12)
    y0 = float(cfg.initial["y"])
    try:
        vacuum.hubble_from_constraint(y0 * y0, params)
    except DomainError as exc:
        raise ConfigError(f"[initial] y: {exc}") from None
    traj = vacuum.integrate_vacuum_flat(params, y0, _span(cfg), int(cfg.initial.get("H_sign", 1)),
                                        float(cfg.initial.get("phi", 0.0)), rel, abs_)
    def with_integral(c):
        c["first_integral"] = c["R"] ** 3 * c["y"] * np.exp(params.lam * c["u"] / 2)
        return c

    raw = with_integral(traj.columns())
    traj = _samples(traj, cfg)
    cols = with_integral(traj.columns())
    report = [
        f"max_constraint_residual: {format_value(_max_abs(raw['constraint']))}",
        f"first_integral_drift: {format_value(_rel_drift(raw['first_integral']))}",
    ]
    plots = _time_plots(cols, [("H_y", ["H", "y"], False), ("R", ["R"], True)], cfg.title)
    return RunResult(cols, report, plots, traj)


def _vacuum_curved(cfg: ScenarioConfig) -> RunResult:
    params = _model_params(cfg)
    rel, abs_ = _tols(cfg, 1e-9, 1e-12)
    u0, z0 = float(cfg.initial["u"]), float(cfg.initial["z"])
    if not u0 > 0:
        raise ConfigError("[initial] u: must be positive")
    traj = vacuum.integrate_vacuum_curved(params, u0, z0, _span(cfg), rel, abs_)
    def with_index(c):
        # k = (k/R^2) R^2 stays fixed along a solution
        c["curvature_index"] = c["curvature"] * c["R"] ** 2
        return c

    raw = with_index(traj.columns())
    traj = _samples(traj, cfg)
    cols = with_index(traj.columns())
    report = [
        "max_constraint_residual: n/a (curvature is implied, see curvature_index)",
        f"first_integral_drift: {format_value(_rel_drift(raw['curvature_index']))}",
        f"curvature_index_start: {format_value(raw['curvature_index'][0])}",
    ]
    plots = _time_plots(cols, [("u_z", ["u", "z"], False), ("H", ["H"], False)], cfg.title)
    return RunResult(cols, report, plots, traj)


def _matter(cfg: ScenarioConfig) -> RunResult:
    close = cfg.params.get("close", "K")
    close = None if close == "none" else close
    params = _model_params(cfg)
    rel, abs_ = _tols(cfg, 1e-12, 1e-14)
    phidot0, phiddot0 = float(cfg.initial["phidot"]), float(cfg.initial["phiddot"])
    try:
        matter.matter_initial_state(params, phidot0, phiddot0, close=close)
    except (DomainError, SingularityError) as exc:
        raise ConfigError(f"[initial] phidot/phiddot: {exc}") from None
    raw = matter.integrate_matter(params, phidot0, phiddot0, _span(cfg), float(cfg.initial.get("phi", 0.0)),
                                  close, rel, abs_)
    closed = raw.meta["params"]
    traj = _samples(raw, cfg)
    cols = traj.columns()
    transitions = [e for e in raw.events if e.name == "accel" and e.direction > 0]
    cross = matter.first_crossing_below(raw, "rho_phi", "rho_matter")
    report = [
        f"closed_K: {format_value(closed.K)}",
        f"closed_rho0: {format_value(closed.rho0)}",
        f"max_constraint_residual: {format_value(_max_abs(raw['constraint']))}",
        f"first_integral_drift: {format_value(_rel_drift(raw['conservation']))}",
        f"acceleration_transitions: {len(transitions)}",
    ]
    report += [f"event accel t={format_value(e.t)}" for e in transitions]
    report.append(f"rho_phi_below_rho_matter_at: {'none' if cross is None else format_value(cross)}")
    plots = _time_plots(cols, [
        ("R", ["R"], False),
        ("Rddot", ["Rddot"], False),
        ("phidot", ["y"], False),
        ("densities", ["rho_phi", "rho_matter", "rho_rad"], True),
    ], cfg.title)
    return RunResult(cols, report, plots, traj)


RUNNERS = {
    "flat2d": lambda cfg: _flat2d(cfg, minkowski=False),
    "minkowski2d": lambda cfg: _flat2d(cfg, minkowski=True),
    "hodograph": _hodograph,
    "uncoupled": _uncoupled,
    "vacuum-flat": _vacuum_flat,
    "vacuum-curved": _vacuum_curved,
    "matter": _matter,
}


def compute_scenario(cfg: ScenarioConfig) -> RunResult:
    """Run the scenario in memory; numerical breakdowns become :class:`NumericalFailure`."""
    try:
        result = RUNNERS[cfg.scenario](cfg)
    except IntegrationError as exc:
        raise NumericalFailure(f"integration failed at t={format_value(exc.t)}: {exc}", exc.t) from exc
    except (SingularityError, BranchError, ConvergenceError, FloatingPointError) as exc:
        raise NumericalFailure(f"numerical failure: {exc}") from exc
    if result.trajectory is not None:
        term = result.trajectory.meta.get("termination")
        if term not in (None, "completed", "event"):
            t = float(result.trajectory.times[-1])
            raise NumericalFailure(f"integration stopped at t={format_value(t)} ({term})", t)
    result.report.insert(0, f"scenario: {cfg.scenario}")
    result.report.insert(1, f"rows: {len(next(iter(result.columns.values())))}")
    return result


def run_scenario(cfg: ScenarioConfig, out_dir) -> RunResult:
    """Compute ``cfg`` and write its artifacts into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = compute_scenario(cfg)
    (out / "trajectory.csv").write_text(csv_text(result.columns), encoding="utf-8")
    for name, text in result.plots.items():
        svg.write(out / f"plot_{name}.svg", text)
    (out / "report.txt").write_text("\n".join(result.report) + "\n", encoding="utf-8")
    return result
