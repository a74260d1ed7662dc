"""Entropy-maximising input laws for intensity-modulated optical channels.

Under ``X >= 0`` and ``E[X] = mean`` the maximum-entropy law is exponential.
Adding a peak ``X <= A`` gives a truncated exponential on ``[0, A]`` whose
rate ``c`` is fixed by the mean, degenerating to the uniform law when the
mean sits exactly at ``A/2``.

Everything for the truncated case is written in terms of the dimensionless
shape ``b = c*A`` and ``alpha = mean/A``.  That keeps the closed forms
finite for ``|b|`` far beyond where ``exp(b)`` would overflow and makes the
high-SNR limit (A -> inf with alpha fixed) exact.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

from .channel import OpticalConstraints
from .errors import DegenerateAlphaError, DomainError

UNIFORM_TOL = 1e-9
SOLVER_RESIDUAL = 1e-12


class InputKind(str, Enum):
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"
    TRUNC_EXP = "truncexp"


@dataclass(frozen=True)
class MaxentInput:
    kind: InputKind
    mean: float
    peak: float = math.inf
    c: float = 0.0

    def __post_init__(self):
        if not self.mean > 0:
            raise DomainError("mean intensity must be > 0")
        if self.kind is not InputKind.EXPONENTIAL and not math.isfinite(self.peak):
            raise DomainError(f"{self.kind.value} input needs a finite peak")
        if self.kind is InputKind.UNIFORM and abs(self.alpha - 0.5) >= UNIFORM_TOL:
            raise DomainError(f"uniform input requires alpha = 0.5, got {self.alpha}")
        if self.kind is InputKind.TRUNC_EXP:
            if not 0 < self.alpha < 1 or self.c == 0:
                raise DomainError("truncated-exponential input needs alpha in (0,1), c != 0")

    @property
    def alpha(self) -> float:
        return self.mean / self.peak

    @property
    def b(self) -> float:
        """Dimensionless shape c*A."""
        return self.c * self.peak


def trunc_exp_mean(b: float) -> float:
    """Normalised mean 1/(1 - e^-b) - 1/b of the truncated exponential on [0, 1]."""
    if abs(b) < 1e-3:
        b2 = b * b
        return 0.5 + b / 12.0 * (1.0 - b2 / 60.0 * (1.0 - b2 / 42.0))
    if b > 0:
        return 1.0 / -math.expm1(-b) - 1.0 / b
    return math.exp(b) / math.expm1(b) - 1.0 / b


def _sinh_minus_x(h: float) -> float:
    """sinh(h) - h without cancellation for small |h|."""
    if abs(h) >= 1.0:
        return math.sinh(h) - h
    h2 = h * h
    term, total, k = h * h2 / 6.0, 0.0, 3
    while abs(term) > 1e-18 * abs(total) or total == 0.0:
        total += term
        term *= h2 / ((k + 1) * (k + 2))
        k += 2
        if term == 0.0:
            break
    return total


def trunc_exp_var(b: float) -> float:
    """Normalised variance 1/b^2 - 1/(4 sinh^2(b/2)); derivative of the mean.

    Rewritten as (s - h)(s + h) / (b s)^2 with h = b/2, s = sinh h so the
    difference of two large terms never has to be formed.
    """
    if abs(b) < 1e-3:
        b2 = b * b
        return 1.0 / 12.0 - b2 / 240.0 + b2 * b2 / 6048.0
    if abs(b) > 1400:
        return 1.0 / (b * b)
    h = abs(b) / 2.0
    s = math.sinh(h)
    return _sinh_minus_x(h) / s * ((s + h) / s) / (b * b)


def log_expm1_over(b: float) -> float:
    """ln((e^b - 1)/b), finite for any real b."""
    if b == 0:
        return 0.0
    if b > 0:
        return b + math.log(-math.expm1(-b) / b)
    return math.log(math.expm1(b) / b)


@functools.lru_cache(maxsize=4096)
def solve_b(alpha: float, max_iter: int = 400) -> float:
    """Root b of ``alpha = 1/(1 - e^-b) - 1/b`` by bracketing bisection."""
    if not (0 < alpha <= 1) or math.isnan(alpha):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if abs(alpha - 0.5) < UNIFORM_TOL:
        raise DegenerateAlphaError("alpha = 0.5: the maxent input is uniform (c = 0)")
    if alpha == 1:
        raise DegenerateAlphaError("alpha = 1: no finite c; the input is a point mass at A")

    lo, hi = -50.0, 50.0
    while trunc_exp_mean(lo) > alpha:
        lo *= 2.0
    while trunc_exp_mean(hi) < alpha:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError(f"cannot bracket alpha = {alpha}")

    # the mean is increasing in b, so plain bisection never loses the root
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = trunc_exp_mean(mid) - alpha
        if fm == 0:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    b = lo if abs(trunc_exp_mean(lo) - alpha) <= abs(trunc_exp_mean(hi) - alpha) else hi
    return b


def solve_c(alpha: float, peak: float) -> float:
    """Rate c of the truncated exponential with mean alpha*peak on [0, peak]."""
    if not peak > 0 or not math.isfinite(peak):
        raise DomainError(f"peak must be positive and finite, got {peak}")
    return solve_b(alpha) / peak


def residual(alpha: float, c: float, peak: float) -> float:
    """|alpha - (1/(1 - e^{-cA}) - 1/(cA))|."""
    return abs(alpha - trunc_exp_mean(c * peak))


def maxent_input(constraints: OpticalConstraints, peak_limited: bool = True) -> MaxentInput:
    """Entropy-maximising law for the given constraints.

    With ``peak_limited=False`` (or an infinite peak) the peak is ignored and
    the exponential law is returned.
    """
    mean = constraints.mean
    peak = constraints.peak_intensity
    if not peak_limited or not math.isfinite(peak):
        return MaxentInput(InputKind.EXPONENTIAL, mean)
    alpha = mean / peak
    if abs(alpha - 0.5) < UNIFORM_TOL:
        return MaxentInput(InputKind.UNIFORM, mean, peak)
    return MaxentInput(InputKind.TRUNC_EXP, mean, peak, solve_c(alpha, peak))


def pdf(dist: MaxentInput, x: float) -> float:
    if dist.kind is InputKind.EXPONENTIAL:
        return math.exp(-x / dist.mean) / dist.mean if x >= 0 else 0.0
    if not 0 <= x <= dist.peak:
        return 0.0
    if dist.kind is InputKind.UNIFORM:
        return 1.0 / dist.peak
    c, a = dist.c, dist.peak
    if c > 0:
        return c * math.exp(c * (x - a)) / -math.expm1(-c * a)
    return c * math.exp(c * x) / math.expm1(c * a)


def support(dist: MaxentInput) -> tuple[float, float]:
    if dist.kind is InputKind.EXPONENTIAL:
        return 0.0, math.inf
    return 0.0, dist.peak


def entropy(dist: MaxentInput) -> float:
    """Differential entropy H(X) in nats."""
    if dist.kind is InputKind.EXPONENTIAL:
        return 1.0 + math.log(dist.mean)
    if dist.kind is InputKind.UNIFORM:
        return math.log(dist.peak)
    # ln[e^{-c mean} (e^{cA} - 1)/c] = ln A + ln((e^b - 1)/b) - alpha*b
    b = dist.b
    return math.log(dist.peak) + log_expm1_over(b) - dist.alpha * b


def input_variance(dist: MaxentInput) -> float:
    if dist.kind is InputKind.EXPONENTIAL:
        return dist.mean ** 2
    if dist.kind is InputKind.UNIFORM:
        return dist.mean ** 2 / 3.0
    return dist.peak ** 2 * trunc_exp_var(dist.b)


def output_variance(dist: MaxentInput, h: float, sigma: float) -> float:
    """var(hX + Z) for Z ~ N(0, sigma^2)."""
    return h * h * input_variance(dist) + sigma * sigma
