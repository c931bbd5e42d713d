"""Special functions and scalar root finders used by the closed forms."""

from __future__ import annotations

import math

import numpy as np

from .core import BranchError, ConvergenceError, DomainError

KUMMER_MAX_X = 50.0


def _kummer_scalar(A: float, b: float, x: float, max_terms: int) -> float:
    term = 1.0
    total = 1.0
    quiet = 0
    for n in range(max_terms):
        term *= (A + n) / (b + n) * x / (n + 1)
        total += term
        if abs(term) < 1e-16 * abs(total):
            quiet += 1
            if quiet == 3:
                return total
        else:
            quiet = 0
    raise ConvergenceError(f"1F1({A}, {b}, {x}) did not converge in {max_terms} terms")


def kummer_1f1(A: float, b: float, x, max_terms: int = 10_000):
    """Confluent hypergeometric function ``1F1(A; b; x)`` by direct series.

    Only nonnegative arguments up to about 50 are intended; every caller in
    this package stays below that, so no asymptotic branch is provided.
    """
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"1F1 undefined for b = {b}")
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0):
        raise DomainError("1F1 is only evaluated for x >= 0")
    if np.any(xs > KUMMER_MAX_X):
        raise DomainError(f"x above the series range guard {KUMMER_MAX_X}")
    if xs.ndim == 0:
        return _kummer_scalar(A, b, float(xs), max_terms)
    out = np.empty_like(xs)
    for idx, xv in np.ndenumerate(xs):
        out[idx] = _kummer_scalar(A, b, float(xv), max_terms)
    return out


def real_cbrt(w):
    """Real cube root with ``cbrt(-w) = -cbrt(w)``."""
    return np.cbrt(w)


def s_plus_minus(x, l: float, c: float):
    """The two radicals ``S+`` and ``S-`` whose sum inverts ``p**3/3 + p``.

    ``S+- = (3/2 w +- sqrt(1 + 9/4 w**2))**(1/3)`` with ``w = c + l x``.
    ``S+ * S- = -1``, so ``S-`` is taken as ``-1/S+`` to avoid cancellation.
    """
    w = c + l * np.asarray(x, dtype=float)
    sp = np.exp(np.arcsinh(1.5 * w) / 3.0)
    return sp, -1.0 / sp


def s_pm(x, l: float, c: float):
    """Real root ``p`` of ``p**3/3 + p = c + l*x``.

    Equal to ``S+ + S-``; evaluated as ``2 sinh(asinh(3w/2)/3)``, which is the
    same quantity written without the subtraction that loses digits near
    ``w = 0``.
    """
    if l == 0:
        raise DomainError("l must be nonzero")
    w = c + l * np.asarray(x, dtype=float)
    p = 2.0 * np.sinh(np.arcsinh(1.5 * w) / 3.0)
    return p if p.ndim else float(p)


def minkowski_q(w):
    """Principal root ``|q| <= 1`` of ``q - q**3/3 = w``.

    The map is monotone only on ``[-1, 1]`` with image ``[-2/3, 2/3]``.
    """
    w = np.asarray(w, dtype=float)
    if np.any(np.abs(w) > 2.0 / 3.0 + 1e-15):
        raise BranchError("value outside the principal branch image [-2/3, 2/3]")
    s = np.clip(1.5 * w, -1.0, 1.0)
    q = 2.0 * np.sin(np.arcsin(s) / 3.0)
    return q if q.ndim else float(q)


def bisect(f, lo: float, hi: float, tol: float = 1e-14, max_iter: int = 400) -> float:
    """Plain bisection; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise DomainError(f"root not bracketed on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo <= tol * max(1.0, abs(mid)):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _phidot_scalar(t: float, lam: float, b: float) -> float:
    if t == 0:
        raise DomainError("field velocity is singular at t = 0")
    target = 1.0 / (b * t * t)
    if lam == 0:
        return target
    # Newton on the log form g(v) = ln v + lam v^2/2 - ln target, increasing in v
    log_target = math.log(target)

    def g(v):
        return math.log(v) + lam * v * v / 2 - log_target

    lo, hi = 0.0, max(1.0, target, math.sqrt(2 * max(log_target, 0.0) / lam))
    v = min(target, math.sqrt(2 * abs(log_target) / lam) if log_target > 0 else target)
    for _ in range(200):
        gv = g(v)
        if gv > 0:
            hi = v
        else:
            lo = v
        nxt = v - gv / (1 / v + lam * v)
        if math.isfinite(nxt) and abs(nxt - v) <= 4e-16 * v:
            return nxt
        # rounding in g can stall Newton one ulp from the root
        if hi - lo <= 4e-16 * hi:
            return v
        if not (lo < nxt < hi) or not math.isfinite(nxt):
            nxt = 0.5 * (lo + hi)
        v = nxt
    raise ConvergenceError(f"phidot solve failed at t={t}")


def solve_phidot_implicit(t, lam: float, b: float):
    """Nonnegative root of ``v * exp(lam v**2 / 2) = 1 / (b t**2)``.

    Newton on ``ln v + lam v**2/2 = ln(1/(b t**2))``, falling back to
    bisection whenever a step leaves the current bracket.
    """
    if b <= 0:
        raise DomainError("b must be positive")
    if lam < 0:
        raise DomainError("negative lambda makes the left side non-monotone")
    ts = np.asarray(t, dtype=float)
    if ts.ndim == 0:
        return _phidot_scalar(float(ts), lam, b)
    return np.array([_phidot_scalar(float(tv), lam, b) for tv in ts.ravel()]).reshape(ts.shape)
