"""Secrecy-rate bounds for indoor visible-light links with transmitter selection."""

from .bounds import (
    BoundResult, Scenario, ScenarioKind, asymptotic_bounds, asymptotic_gap, max_term_bounds,
    weighted_bounds,
)
from .channel import LinkPair, OpticalConstraints, geometry_link, make_ratio_link
from .errors import (
    ConfigError, DegenerateAlphaError, DomainError, NoSecureLedError, SecrecyError,
)
from .maxent import MaxentInput, maxent_input, solve_c
from .selection import SchemeKind, SelectionScheme, sample_active_led, scheme_probs

__version__ = "0.1.0"

__all__ = [
    "BoundResult", "ConfigError", "DegenerateAlphaError", "DomainError", "LinkPair",
    "MaxentInput", "NoSecureLedError", "OpticalConstraints", "Scenario", "ScenarioKind",
    "SchemeKind", "SecrecyError", "SelectionScheme", "asymptotic_bounds", "asymptotic_gap",
    "geometry_link", "make_ratio_link", "max_term_bounds", "maxent_input", "sample_active_led",
    "scheme_probs", "solve_c", "weighted_bounds",
]
