"""Independent numerical checks for the closed forms.

Nothing here is used to compute a bound.  The quadrature routine is an
adaptive Simpson rule built only on ``pdf``, so agreement with
``maxent.entropy`` / ``maxent.output_variance`` is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import maxent
from .channel import OpticalConstraints
from .maxent import InputKind, MaxentInput

ALPHA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20) if k != 10)
# exponential tail beyond 40 means carries < 1e-16 of the mass
EXP_CUTOFF_MEANS = 40.0


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Integrate ``f`` over [a, b] with recursive Simpson and Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2.0, depth - 1))

    # split up front so a narrow peak cannot hide between the first samples
    edges = np.linspace(a, b, 17)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        fa, fb, fm = f(lo), f(hi), f(0.5 * (lo + hi))
        total += recurse(lo, hi, fa, fm, fb, simpson(fa, fm, fb, lo, hi), tol / 16.0, max_depth)
    return total


def _interval(dist: MaxentInput) -> tuple[float, float]:
    if dist.kind is InputKind.EXPONENTIAL:
        return 0.0, EXP_CUTOFF_MEANS * dist.mean
    return 0.0, dist.peak


def quad_moments(dist: MaxentInput, tol: float = 1e-10) -> dict[str, float]:
    """Mass, mean, variance and differential entropy by quadrature."""
    a, b = _interval(dist)
    scale = b - a

    def pdf(x):
        return maxent.pdf(dist, x)

    def neg_f_log_f(x):
        v = pdf(x)
        return -v * math.log(v) if v > 0 else 0.0

    # tolerances are relative to the natural size of each integrand
    mass = adaptive_simpson(pdf, a, b, tol)
    mean = adaptive_simpson(lambda x: x * pdf(x), a, b, tol * scale)
    second = adaptive_simpson(lambda x: x * x * pdf(x), a, b, tol * scale * scale)
    ent = adaptive_simpson(neg_f_log_f, a, b, tol)
    return {"mass": mass, "mean": mean, "var": second - mean * mean, "entropy": ent}


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def solver_checks(peak: float = 1.0) -> list[Check]:
    out = []
    for alpha in ALPHA_GRID:
        c = maxent.solve_c(alpha, peak)
        res = maxent.residual(alpha, c, peak)
        anti = abs(maxent.solve_c(1.0 - alpha, peak) + c)
        sign_ok = (c > 0) == (alpha > 0.5)
        out.append(Check(f"solve_c alpha={alpha}", res < 1e-12 and anti < 1e-10 and sign_ok,
                         f"residual={res:.2e} antisym={anti:.2e} c={c:.6g}"))
    return out


def maxent_checks(n: int = 100, seed: int = 20240601, rtol: float = 1e-6) -> list[Check]:
    """Closed-form entropy / output variance against quadrature on random draws."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        xi = rng.uniform(0.05, 0.95)
        p = 10.0 ** rng.uniform(-1.0, 2.0)
        peak_limited = i % 3 != 0
        if peak_limited:
            # A in [xi P, 10 xi P] keeps alpha in [0.1, 1)
            a = xi * p / rng.uniform(0.1, 0.99)
            if i % 10 == 1:
                a = 2.0 * xi * p
            dist = maxent.maxent_input(OpticalConstraints(p, xi, a))
        else:
            dist = maxent.maxent_input(OpticalConstraints(p, xi))
        h = 10.0 ** rng.uniform(-2.0, 0.0)
        sigma = 10.0 ** rng.uniform(-2.0, 0.0)
        q = quad_moments(dist)
        h_cf = maxent.entropy(dist)
        v_cf = maxent.output_variance(dist, h, sigma)
        v_q = h * h * q["var"] + sigma * sigma
        ok = (math.isclose(h_cf, q["entropy"], rel_tol=rtol, abs_tol=1e-10)
              and math.isclose(v_cf, v_q, rel_tol=rtol))
        out.append(Check(f"maxent draw {i} ({dist.kind.value})", ok,
                         f"H={h_cf:.10g}/{q['entropy']:.10g} var={v_cf:.10g}/{v_q:.10g}"))
    return out


def selfcheck() -> list[Check]:
    return solver_checks() + maxent_checks()
