"""Sensitivity of the matter-era acceleration transition to tolerance and initial density.

    python3 scripts/tolerance_study.py [--omega W] [--rho0 R ...]
"""

import argparse

from exphmap.flcosmo.matter import FIG3_INITIAL, FIG3_PARAMS, FIG3_SPAN, first_crossing_below, integrate_matter


def transition(params, rel_tol):
    tr = integrate_matter(params, *FIG3_INITIAL, FIG3_SPAN, rel_tol=rel_tol)
    ups = [e.t for e in tr.events if e.name == "accel"]
    return tr, ups


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega", type=float, default=0.0)
    ap.add_argument("--rho0", type=float, nargs="*", default=[0.005, 0.01, 0.02])
    args = ap.parse_args(argv)
    base = FIG3_PARAMS.replace(omega=args.omega)

    print("rel_tol      transitions  t_accel           change")
    prev = None
    for k in range(8):
        tol = 1e-8 / 2**k
        _, ups = transition(base, tol)
        t = ups[0] if ups else float("nan")
        change = abs(t - prev) / t if prev is not None else float("nan")
        print(f"{tol:<12.3e} {len(ups):<12d} {t:<17.12f} {change:.2e}")
        prev = t

    print("\nrho0     closed K        t_accel   rho_phi<rho_m at")
    for rho0 in args.rho0:
        tr, ups = transition(base.replace(rho0=rho0), 1e-10)
        cross = first_crossing_below(tr, "rho_phi", "rho_matter")
        print(f"{rho0:<8g} {tr.meta['params'].K:<15.7f} "
              f"{(ups[0] if ups else float('nan')):<9.4f} {cross if cross is not None else 'never'}")


if __name__ == "__main__":
    main()
