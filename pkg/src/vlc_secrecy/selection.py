"""Transmitter selection: uniform (US), channel-adaptive (CAS), greedy (GS).

LEDs are numbered 1..M in everything user-facing (sampling results, CLI
reports); probability vectors are ordinary 0-based numpy arrays.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import LinkPair
from .errors import DomainError, NoSecureLedError

log = logging.getLogger(__name__)

PROB_TOL = 1e-12


class SchemeKind(str, Enum):
    US = "us"
    CAS = "cas"
    GS = "gs"


@dataclass(frozen=True)
class SelectionScheme:
    kind: SchemeKind
    probs: np.ndarray
    # CAS only: some margins were negative and got excluded
    excluded_leds: tuple[int, ...] = ()

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size < 1 or np.any(~np.isfinite(p)) or np.any(p < 0):
            raise DomainError("selection probabilities must be finite and >= 0")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise DomainError(f"selection probabilities sum to {p.sum()}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def m(self) -> int:
        return int(self.probs.size)

    def cumulative(self) -> np.ndarray:
        q = np.cumsum(self.probs)
        q[-1] = 1.0
        return q


def us_probs(m: int) -> SelectionScheme:
    if m < 1:
        raise DomainError("need at least one LED")
    return SelectionScheme(SchemeKind.US, np.full(m, 1.0 / m))


def cas_probs(link: LinkPair) -> SelectionScheme:
    """Selection probability proportional to each LED's secrecy margin.

    LEDs with a negative margin (Eve's channel better than Bob's) would get
    a negative probability from the plain ratio; they are set to 0 instead.
    """
    margins = link.margins()
    positive = np.clip(margins, 0.0, None)
    total = positive.sum()
    if not total > 0:
        raise NoSecureLedError("no LED has a positive secrecy margin; CAS is undefined")
    excluded = tuple(int(i) + 1 for i in np.flatnonzero(margins < 0))
    if excluded:
        log.info("CAS: excluding LEDs %s with negative secrecy margin", excluded)
    probs = positive / total
    probs = probs / probs.sum()
    return SelectionScheme(SchemeKind.CAS, probs, excluded)


def gs_probs(link: LinkPair) -> SelectionScheme:
    """All probability on the LED with the largest margin (lowest index on ties)."""
    probs = np.zeros(link.m)
    probs[int(np.argmax(link.margins()))] = 1.0
    return SelectionScheme(SchemeKind.GS, probs)


def scheme_probs(kind, link: LinkPair) -> SelectionScheme:
    kind = SchemeKind(kind)
    if kind is SchemeKind.US:
        return us_probs(link.m)
    if kind is SchemeKind.CAS:
        return cas_probs(link)
    return gs_probs(link)


# ---------------------------------------------------------------------------
# batched weight construction (rows are independent links)
# ---------------------------------------------------------------------------

def batch_weights(kind, h_b, h_e, sigma_b, sigma_e) -> np.ndarray:
    """Probability matrix of shape ``(..., M)`` for many links at once.

    Rows where CAS is undefined (no positive margin) fall back to uniform
    weights; every LED is then zero-rate, so the bounds are 0 either way.
    """
    kind = SchemeKind(kind)
    h_b = np.asarray(h_b, float)
    margins = h_b / sigma_b - np.asarray(h_e, float) / sigma_e
    m = h_b.shape[-1]
    if kind is SchemeKind.US:
        return np.full(h_b.shape, 1.0 / m)
    if kind is SchemeKind.GS:
        idx = np.argmax(margins, axis=-1)
        w = np.zeros(h_b.shape)
        np.put_along_axis(w, idx[..., None], 1.0, axis=-1)
        return w
    positive = np.clip(margins, 0.0, None)
    total = positive.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(total > 0, positive / total, 1.0 / m)
    return w / w.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def select_by_threshold(scheme: SelectionScheme, r: float) -> int:
    """LED number k (1-based) with q_{k-1} < r <= q_k, q the cumulative probs.

    ``r <= q_1`` selects LED 1.  Zero-probability LEDs are never chosen.
    """
    return int(_threshold_index(scheme, np.asarray([r]))[0]) + 1


def _threshold_index(scheme: SelectionScheme, r: np.ndarray) -> np.ndarray:
    q = scheme.cumulative()
    idx = np.searchsorted(q, r, side="left")
    nonzero = np.flatnonzero(scheme.probs > 0)
    # r == 0 (or r <= q_1 with p_1 == 0) must not land on an empty slot
    idx = np.where(r <= 0, nonzero[0], idx)
    return np.clip(idx, 0, nonzero[-1])


def sample_active_led(scheme: SelectionScheme, rng: np.random.Generator) -> int:
    """Draw one active LED number (1-based) using the cumulative-threshold rule."""
    return select_by_threshold(scheme, rng.random())


def sample_active_leds(scheme: SelectionScheme, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` independent draws (1-based LED numbers)."""
    if n < 0:
        raise DomainError("number of draws must be >= 0")
    return _threshold_index(scheme, rng.random(n)) + 1


def frequencies(draws: np.ndarray, m: int) -> np.ndarray:
    counts = np.bincount(np.asarray(draws, dtype=int) - 1, minlength=m)
    return counts / max(len(draws), 1)
