"""Closed-form secrecy-rate bounds for SM-based VLC wiretap links.

All rates are in nats per channel use.  The per-LED terms are numpy
ufunc-style: every argument may be a scalar or an array, and they broadcast.
This lets the same code serve a single link (vector over LEDs) and a whole
receiver plane (matrix of grid points by LEDs).

A selection scheme only enters through its LED probabilities, so the
uniform, channel-adaptive and greedy variants are all ``weighted_bounds``
with different weight vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import maxent
from .channel import LinkPair, OpticalConstraints
from .errors import DomainError
from .maxent import InputKind, MaxentInput

TWO_PI_E = 2.0 * math.pi * math.e
WEIGHT_TOL = 1e-12

# high-SNR constants of the average-intensity-only bounds
AVG_LOWER_CONST = 0.5 * math.log(math.e / (2.0 * math.pi))
AVG_UPPER_CONST = 0.5 * math.log(4.0 * math.e / math.pi ** 2)
UNIFORM_LOWER_CONST = 0.5 * math.log(6.0 / (math.pi * math.e))

BRANCH_A, BRANCH_B, BRANCH_ZERO, BRANCH_NONE = "A", "B", "Z", "-"


class ScenarioKind(str, Enum):
    AVG_ONLY = "avg"
    AVG_AND_PEAK = "peak"


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    constraints: OpticalConstraints

    def __post_init__(self):
        if self.kind is ScenarioKind.AVG_AND_PEAK and not math.isfinite(self.constraints.peak_intensity):
            raise DomainError("the peak-limited scenario needs a finite peak intensity A")

    @classmethod
    def avg(cls, p: float, xi: float) -> "Scenario":
        return cls(ScenarioKind.AVG_ONLY, OpticalConstraints(p, xi))

    @classmethod
    def peak(cls, p: float, xi: float, a: float | None = None) -> "Scenario":
        """Peak-limited scenario; ``a`` defaults to A = P."""
        return cls(ScenarioKind.AVG_AND_PEAK, OpticalConstraints(p, xi, p if a is None else a))

    @property
    def mean(self) -> float:
        return self.constraints.mean

    @property
    def alpha(self) -> float:
        return self.constraints.alpha

    def input_law(self) -> MaxentInput:
        return _input_law(self.constraints, self.kind is ScenarioKind.AVG_AND_PEAK)


def _input_law(constraints: OpticalConstraints, peak_limited: bool) -> MaxentInput:
    if peak_limited and constraints.alpha >= 1.0:
        raise DomainError("alpha = 1 (xi*P = A) leaves no room for signalling")
    return maxent.maxent_input(constraints, peak_limited)


@dataclass(frozen=True)
class BoundResult:
    lower: float
    upper: float
    per_led_lower: np.ndarray
    per_led_upper: np.ndarray
    upper_branch: tuple[str, ...]
    clamped: bool
    raw_lower: float
    raw_upper: float

    @property
    def branch_code(self) -> str:
        return "".join(self.upper_branch)

    @property
    def gap(self) -> float:
        return self.raw_upper - self.raw_lower


# ---------------------------------------------------------------------------
# per-LED terms
# ---------------------------------------------------------------------------

def _check_noise(sigma_b, sigma_e):
    if np.any(np.asarray(sigma_b) <= 0) or np.any(np.asarray(sigma_e) <= 0):
        raise DomainError("noise standard deviations must be > 0")


def per_led_lower_avg(h_b, h_e, sigma_b, sigma_e, mean):
    """Lower-bound term with exponential input (average-intensity constraint)."""
    _check_noise(sigma_b, sigma_e)
    h_b, h_e, mean = np.asarray(h_b, float), np.asarray(h_e, float), np.asarray(mean, float)
    sb2, se2 = np.square(sigma_b), np.square(sigma_e)
    x2 = mean * mean
    num = math.e ** 2 * h_b * h_b * x2 + TWO_PI_E * sb2
    den = h_e * h_e * x2 + se2
    return 0.5 * np.log(se2 / (TWO_PI_E * sb2) * num / den)


def per_led_upper_avg(h_b, h_e, sigma_b, sigma_e, mean):
    """Upper-bound term (average-intensity constraint).

    Returns ``(value, is_branch_a)``.  Branch A holds while the effective
    noise spread dominates ``sigma_B/(sqrt(2 pi) h_B) + mean/2``, i.e. at
    low intensity; branch B is the intensity-free plateau.
    """
    _check_noise(sigma_b, sigma_e)
    h_b, h_e, mean = np.asarray(h_b, float), np.asarray(h_e, float), np.asarray(mean, float)
    if np.any(h_b <= 0):
        raise DomainError("upper bound needs h_B > 0")
    sigma_b = np.asarray(sigma_b, float)
    sigma_e = np.asarray(sigma_e, float)
    sb2, se2 = sigma_b ** 2, sigma_e ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = np.sqrt((sb2 / h_b ** 2 + se2 / h_e ** 2) / (2.0 * math.pi))
        rhs = sigma_b / (math.sqrt(2.0 * math.pi) * h_b) + mean / 2.0
        branch_a = lhs >= rhs
        leak = sb2 * h_e ** 2 / (se2 * h_b ** 2)
        val_a = np.log(4.0 * math.e * (sigma_b / math.sqrt(2.0 * math.pi) + h_b * mean / 2.0)
                       / np.sqrt(TWO_PI_E * sb2 * (1.0 + leak)))
        val_b = np.log(2.0 * math.sqrt(math.e) * h_b * sigma_e / (math.pi * h_e * sigma_b))
    value = np.where(branch_a, val_a, val_b)
    return value, branch_a


def per_led_lower_peak(h_b, h_e, sigma_b, sigma_e, dist: MaxentInput):
    """Lower-bound term with the maxent input under mean and peak constraints.

    Written directly from the uniform / truncated-exponential expressions.
    The truncated-exponential prefactor ``e^{-2c x} ((e^{cA}-1)/c)^2`` is
    evaluated with ``expm1`` on whichever side keeps the exponent <= 0, and
    the variance uses the normalised series near ``c = 0``; the textbook
    ``E[X^2] - mean^2`` loses about 1e-12 just off alpha = 0.5.
    """
    _check_noise(sigma_b, sigma_e)
    h_b, h_e = np.asarray(h_b, float), np.asarray(h_e, float)
    sb2, se2 = np.square(sigma_b), np.square(sigma_e)
    x, a = dist.mean, dist.peak
    if dist.kind is InputKind.UNIFORM:
        num = 3.0 * se2 * (a * a * h_b * h_b + TWO_PI_E * sb2)
        den = TWO_PI_E * sb2 * (h_e * h_e * x * x + 3.0 * se2)
        return 0.5 * np.log(num / den)
    if dist.kind is not InputKind.TRUNC_EXP:
        raise DomainError(f"peak-limited bound needs a uniform or truncated-exponential input, got {dist.kind.value}")
    c, ca = dist.c, dist.b
    if ca > 0:
        root = math.exp(c * (a - x)) * -math.expm1(-ca) / c
    else:
        root = math.exp(-c * x) * math.expm1(ca) / c
    pref = root * root
    var_x = a * a * maxent.trunc_exp_var(ca)
    num = se2 * (h_b * h_b * pref + TWO_PI_E * sb2)
    den = TWO_PI_E * sb2 * (h_e * h_e * var_x + se2)
    return 0.5 * np.log(num / den)


def per_led_lower_epi(h_b, h_e, sigma_b, sigma_e, dist: MaxentInput):
    """Generic entropy-power form assembled from the input law's H(X) and var.

    ``0.5 ln[(e^{2H} h_B^2 + 2 pi e sigma_B^2) / (2 pi e var(Y_E))] + ln(sigma_E/sigma_B)``
    """
    _check_noise(sigma_b, sigma_e)
    h_b, h_e = np.asarray(h_b, float), np.asarray(h_e, float)
    sigma_b, sigma_e = np.asarray(sigma_b, float), np.asarray(sigma_e, float)
    power = math.exp(2.0 * maxent.entropy(dist))
    var_ye = h_e * h_e * maxent.input_variance(dist) + sigma_e ** 2
    return (0.5 * np.log((power * h_b * h_b + TWO_PI_E * sigma_b ** 2) / (TWO_PI_E * var_ye))
            + np.log(sigma_e / sigma_b))


def per_led_upper_peak(h_b, h_e, sigma_b, sigma_e, peak, mean):
    """Upper-bound term under mean and peak constraints (uses E[X^2] <= A*mean)."""
    _check_noise(sigma_b, sigma_e)
    h_b, h_e = np.asarray(h_b, float), np.asarray(h_e, float)
    if np.any(h_b <= 0):
        raise DomainError("upper bound needs h_B > 0")
    sb2, se2 = np.square(sigma_b), np.square(sigma_e)
    r = h_e ** 2 / h_b ** 2
    am = peak * mean
    num = (r * sb2 + se2) * (h_b ** 2 * am + sb2)
    den = sb2 * (h_e ** 2 * am + 2.0 * r * sb2 + se2) * (1.0 + h_e ** 2 * sb2 / (h_b ** 2 * se2))
    return 0.5 * np.log(num / den)


# ---------------------------------------------------------------------------
# aggregation over LEDs
# ---------------------------------------------------------------------------

def zero_rate_mask(h_b, h_e, sigma_b, sigma_e):
    """LEDs whose main channel is strictly worse than Eve's, or silent at Bob."""
    h_b, h_e = np.asarray(h_b, float), np.asarray(h_e, float)
    return (h_b / sigma_b < h_e / sigma_e) | (h_b <= 0)


def per_led_terms(h_b, h_e, sigma_b, sigma_e, scenario: Scenario):
    """Per-LED lower and upper terms plus a branch-code array.

    Zero-rate LEDs get 0 for both terms and branch ``"Z"``.  Works on any
    broadcastable gain arrays.
    """
    h_b, h_e = np.broadcast_arrays(np.asarray(h_b, float), np.asarray(h_e, float))
    zero = zero_rate_mask(h_b, h_e, sigma_b, sigma_e)
    # substitute a harmless channel on masked entries so nothing warns
    hb_safe = np.where(zero, 1.0, h_b)
    he_safe = np.where(zero, 0.0, h_e)
    if scenario.kind is ScenarioKind.AVG_ONLY:
        lower = per_led_lower_avg(hb_safe, he_safe, sigma_b, sigma_e, scenario.mean)
        upper, branch_a = per_led_upper_avg(hb_safe, he_safe, sigma_b, sigma_e, scenario.mean)
        branch = np.where(branch_a, BRANCH_A, BRANCH_B)
    else:
        dist = scenario.input_law()
        lower = per_led_lower_peak(hb_safe, he_safe, sigma_b, sigma_e, dist)
        upper = per_led_upper_peak(hb_safe, he_safe, sigma_b, sigma_e,
                                   scenario.constraints.peak_intensity, scenario.mean)
        branch = np.full(h_b.shape, BRANCH_NONE)
    lower = np.where(zero, 0.0, lower)
    upper = np.where(zero, 0.0, upper)
    branch = np.where(zero, BRANCH_ZERO, branch)
    return lower, upper, branch


def check_weights(weights, m: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape[-1] != m:
        raise DomainError(f"expected {m} weights, got {w.shape[-1]}")
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise DomainError("weights must be finite and >= 0")
    if np.any(np.abs(w.sum(axis=-1) - 1.0) > WEIGHT_TOL):
        raise DomainError("weights must sum to 1")
    return w


def _weighted_sum(w, terms):
    # skip zero weights so an infinite term on an unused LED stays out
    with np.errstate(invalid="ignore"):
        return np.where(w > 0, w * terms, 0.0).sum(axis=-1)


def weighted_bounds(link: LinkPair, weights, scenario: Scenario) -> BoundResult:
    """Scheme-weighted lower and upper secrecy-rate bounds for one link."""
    w = check_weights(weights, link.m)
    lower_m, upper_m, branch = per_led_terms(link.h_b, link.h_e, link.sigma_b, link.sigma_e, scenario)
    raw_lower = float(_weighted_sum(w, lower_m))
    raw_upper = float(_weighted_sum(w, upper_m))
    clamped = raw_lower < 0 or raw_upper < 0
    return BoundResult(
        lower=max(raw_lower, 0.0),
        upper=max(raw_upper, 0.0),
        per_led_lower=lower_m,
        per_led_upper=upper_m,
        upper_branch=tuple(str(b) for b in branch),
        clamped=clamped,
        raw_lower=raw_lower,
        raw_upper=raw_upper,
    )


def batch_bounds(h_b, h_e, sigma_b, sigma_e, weights, scenario: Scenario):
    """Vectorised ``weighted_bounds`` over leading axes.

    ``h_b``, ``h_e`` and ``weights`` have shape ``(..., M)``.  Returns
    clamped ``(lower, upper, clamped)`` arrays of shape ``(...)``.
    """
    h_b = np.asarray(h_b, float)
    w = check_weights(weights, h_b.shape[-1])
    lower_m, upper_m, _ = per_led_terms(h_b, h_e, sigma_b, sigma_e, scenario)
    raw_lower = _weighted_sum(w, lower_m)
    raw_upper = _weighted_sum(w, upper_m)
    clamped = (raw_lower < 0) | (raw_upper < 0)
    return np.maximum(raw_lower, 0.0), np.maximum(raw_upper, 0.0), clamped


def max_term_bounds(link: LinkPair, scenario: Scenario) -> tuple[float, float]:
    """Largest per-LED lower and upper terms, each clamped at 0.

    This is the best any single-LED (one-hot) selection can guarantee; no
    probability vector can exceed it.
    """
    lower_m, upper_m, _ = per_led_terms(link.h_b, link.h_e, link.sigma_b, link.sigma_e, scenario)
    return max(float(lower_m.max()), 0.0), max(float(upper_m.max()), 0.0)


# ---------------------------------------------------------------------------
# high-SNR behaviour
# ---------------------------------------------------------------------------

def peak_lower_const(alpha: float) -> float:
    """Channel-free constant of the asymptotic peak-limited lower bound."""
    if abs(alpha - 0.5) < maxent.UNIFORM_TOL:
        return UNIFORM_LOWER_CONST
    b = maxent.solve_b(alpha)
    # ln{ e^{-alpha b} (e^b - 1) / (b sqrt(2 pi e v)) }, v = normalised variance
    return -alpha * b + maxent.log_expm1_over(b) - 0.5 * math.log(TWO_PI_E * maxent.trunc_exp_var(b))


def asymptotic_constants(scenario: Scenario) -> tuple[float, float]:
    if scenario.kind is ScenarioKind.AVG_ONLY:
        return AVG_LOWER_CONST, AVG_UPPER_CONST
    return peak_lower_const(scenario.alpha), 0.0


def asymptotic_bounds(link: LinkPair, weights, scenario: Scenario) -> tuple[float, float]:
    """High-SNR limits of ``weighted_bounds`` (P -> inf, or A -> inf at fixed alpha).

    Zero-rate LEDs contribute nothing; an active LED with ``h_E = 0``
    makes both limits ``+inf``.
    """
    w = check_weights(weights, link.m)
    lo_const, up_const = asymptotic_constants(scenario)
    zero = zero_rate_mask(link.h_b, link.h_e, link.sigma_b, link.sigma_e)
    with np.errstate(divide="ignore"):
        log_ratio = np.log(link.h_b * link.sigma_e / (link.h_e * link.sigma_b))
    lower_m = np.where(zero, 0.0, lo_const + log_ratio)
    upper_m = np.where(zero, 0.0, up_const + log_ratio)
    lower = float(_weighted_sum(w, lower_m))
    upper = float(_weighted_sum(w, upper_m))
    return max(lower, 0.0), max(upper, 0.0)


def asymptotic_gap(scenario: Scenario) -> float:
    """Channel-independent high-SNR gap between the upper and lower bounds."""
    lo_const, up_const = asymptotic_constants(scenario)
    return up_const - lo_const
