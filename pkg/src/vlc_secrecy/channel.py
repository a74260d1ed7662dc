"""Link model: LED geometry, Lambertian line-of-sight gains, noise, constraints.

Two ways of building a :class:`LinkPair` are supported.  ``geometry_link``
evaluates the Lambertian gain from each ceiling LED to Bob and Eve.
``make_ratio_link`` skips geometry and fixes the Bob/Eve gain ratio
directly, which is how most of the swept curves are parametrised.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import ConfigError, DomainError

ROOM_SIZE = (5.0, 4.0, 3.0)
RECEIVER_HEIGHT = 0.8
NOISE_DBM = -104.0

# Alice's 8 ceiling LEDs and Bob's reference position.
REFERENCE_LEDS = (
    (1.0, 2.0, 3.0), (1.0, 3.0, 3.0), (2.0, 2.0, 3.0), (2.0, 3.0, 3.0),
    (3.0, 2.0, 3.0), (3.0, 3.0, 3.0), (4.0, 2.0, 3.0), (4.0, 3.0, 3.0),
)
REFERENCE_BOB = (2.5, 1.5, 0.8)


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise DomainError(f"non-finite coordinate in {self!r}")

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @classmethod
    def of(cls, xyz) -> "Vec3":
        if isinstance(xyz, Vec3):
            return xyz
        x, y, z = xyz
        return cls(float(x), float(y), float(z))


@dataclass(frozen=True)
class LedParams:
    """One downward-facing ceiling LED plus the receiver front-end it sees.

    The photodiode parameters live here rather than on the receiver so a
    layout can describe heterogeneous fixtures; in practice all LEDs share
    them.
    """

    position: Vec3
    lambertian_order: float = 1.0
    pd_area: float = 1e-4
    fov_half_angle: float = math.radians(60.0)
    optical_filter_gain: float = 1.0
    concentrator_gain: float = 1.0

    def __post_init__(self):
        if not self.lambertian_order > 0:
            raise DomainError("lambertian_order must be > 0")
        if not self.pd_area > 0:
            raise DomainError("pd_area must be > 0")
        if not 0 < self.fov_half_angle <= math.pi / 2:
            raise DomainError("fov_half_angle must lie in (0, pi/2]")
        if self.optical_filter_gain < 0 or self.concentrator_gain < 0:
            raise DomainError("filter and concentrator gains must be >= 0")


@dataclass(frozen=True)
class LinkPair:
    """Per-LED DC gains to Bob and Eve plus the two noise standard deviations."""

    h_b: np.ndarray
    h_e: np.ndarray
    sigma_b: float
    sigma_e: float

    def __post_init__(self):
        h_b = np.asarray(self.h_b, dtype=float).reshape(-1)
        h_e = np.asarray(self.h_e, dtype=float).reshape(-1)
        if h_b.size < 1 or h_b.shape != h_e.shape:
            raise DomainError("h_b and h_e must be non-empty and of equal length")
        if not (np.all(np.isfinite(h_b)) and np.all(np.isfinite(h_e))):
            raise DomainError("channel gains must be finite")
        if np.any(h_b < 0) or np.any(h_e < 0):
            raise DomainError("channel gains must be >= 0")
        if not (self.sigma_b > 0 and self.sigma_e > 0):
            raise DomainError("noise standard deviations must be > 0")
        h_b.flags.writeable = False
        h_e.flags.writeable = False
        object.__setattr__(self, "h_b", h_b)
        object.__setattr__(self, "h_e", h_e)

    @property
    def m(self) -> int:
        return int(self.h_b.size)

    def margins(self) -> np.ndarray:
        """Per-LED secrecy margin h_B/sigma_B - h_E/sigma_E."""
        return self.h_b / self.sigma_b - self.h_e / self.sigma_e

    def select(self, index: int) -> "LinkPair":
        """Single-LED link for LED ``index`` (0-based)."""
        return LinkPair(self.h_b[index:index + 1], self.h_e[index:index + 1],
                        self.sigma_b, self.sigma_e)


@dataclass(frozen=True)
class OpticalConstraints:
    """Nominal intensity P, peak A (``inf`` when unconstrained) and dimming target."""

    nominal_intensity: float
    dimming_target: float
    peak_intensity: float = math.inf

    def __post_init__(self):
        if not self.nominal_intensity > 0:
            raise DomainError("nominal intensity P must be > 0")
        if not 0 < self.dimming_target < 1:
            raise DomainError("dimming target xi must lie in (0, 1)")
        if not self.peak_intensity > 0:
            raise DomainError("peak intensity A must be > 0")
        if math.isfinite(self.peak_intensity) and self.mean > self.peak_intensity * (1 + 1e-12):
            raise DomainError(f"mean intensity xi*P = {self.mean} exceeds peak A = {self.peak_intensity}")

    @property
    def mean(self) -> float:
        return self.dimming_target * self.nominal_intensity

    @property
    def alpha(self) -> float:
        """Average-to-peak ratio xi*P/A (0 when A is infinite)."""
        return min(self.mean / self.peak_intensity, 1.0)


def lambertian_gain(led: LedParams, receiver) -> float:
    """DC gain of the LOS path from a downward LED to an upward-facing receiver.

    With both normals vertical the irradiance angle equals the incidence
    angle, so ``cos(phi) = cos(psi) = dz / d``.
    """
    receiver = Vec3.of(receiver)
    diff = led.position - receiver
    d = diff.norm()
    if d == 0.0:
        raise DomainError("LED and receiver positions coincide")
    if diff.z <= 0:
        raise DomainError("receiver must be strictly below the LED plane")
    cos_angle = diff.z / d
    if math.acos(min(cos_angle, 1.0)) > led.fov_half_angle:
        return 0.0
    m = led.lambertian_order
    return ((m + 1) * led.pd_area / (2 * math.pi * d * d) * cos_angle ** m
            * led.optical_filter_gain * led.concentrator_gain * cos_angle)


def dbm_to_watts(x: float) -> float:
    return 10.0 ** ((x - 30.0) / 10.0)


def db_to_linear(x: float) -> float:
    """Power-style dB: 10 dB is a factor of 10."""
    return 10.0 ** (x / 10.0)


def default_sigma() -> float:
    """Noise standard deviation for a -104 dBm noise variance."""
    return math.sqrt(dbm_to_watts(NOISE_DBM))


def make_ratio_link(ratio: float, m: int, sigma: float, h_b: float = 1.0) -> LinkPair:
    """Identical LEDs with Bob/Eve gain ratio ``ratio`` and equal noise.

    ``h_b`` is the absolute Bob gain; it defaults to 1 so that P is measured
    in units of received optical intensity.
    """
    if not ratio > 0 or not math.isfinite(ratio):
        raise DomainError(f"gain ratio must be positive and finite, got {ratio}")
    if m < 1:
        raise DomainError("need at least one LED")
    if not h_b > 0:
        raise DomainError("h_b must be > 0")
    return LinkPair(np.full(m, float(h_b)), np.full(m, h_b / ratio), sigma, sigma)


def geometry_link(leds, bob, eve, sigma_b: float, sigma_e: float) -> LinkPair:
    leds = list(leds)
    if not leds:
        raise DomainError("need at least one LED")
    h_b = [lambertian_gain(led, bob) for led in leds]
    h_e = [lambertian_gain(led, eve) for led in leds]
    return LinkPair(np.array(h_b), np.array(h_e), sigma_b, sigma_e)


def bob_gains(leds, bob) -> np.ndarray:
    return np.array([lambertian_gain(led, bob) for led in leds])


def reference_leds(**led_kwargs) -> list[LedParams]:
    return [LedParams(Vec3.of(p), **led_kwargs) for p in REFERENCE_LEDS]


@dataclass(frozen=True)
class Layout:
    """Room, LEDs and receiver positions as read from a layout file."""

    leds: list[LedParams]
    bob: Vec3
    eve: Vec3 | None = None
    room: tuple[float, float, float] = ROOM_SIZE
    sigma_dbm: float = NOISE_DBM
    extra: dict = field(default_factory=dict)

    @property
    def sigma(self) -> float:
        return math.sqrt(dbm_to_watts(self.sigma_dbm))

    def link(self) -> LinkPair:
        if self.eve is None:
            raise ConfigError("layout has no eve.pos", key="eve.pos")
        return geometry_link(self.leds, self.bob, self.eve, self.sigma, self.sigma)


_LED_KEY = re.compile(r"^led\[(\d+)\]\.pos$")


def layout_from_kv(cfg: dict[str, str]) -> Layout:
    """Build a :class:`Layout` from parsed ``key = value`` pairs.

    Missing LED entries fall back to the reference positions; missing
    photodiode parameters fall back to the :class:`LedParams` defaults.
    """
    led_kwargs = {}
    if "lambertian_order" in cfg:
        led_kwargs["lambertian_order"] = config.get_float(cfg, "lambertian_order")
    if "pd_area" in cfg:
        led_kwargs["pd_area"] = config.get_float(cfg, "pd_area")
    if "fov_deg" in cfg:
        led_kwargs["fov_half_angle"] = math.radians(config.get_float(cfg, "fov_deg"))

    positions = {}
    for key, value in cfg.items():
        m = _LED_KEY.match(key)
        if m:
            positions[int(m.group(1))] = config.parse_floats(value, key, n=3)
    if positions:
        expected = list(range(len(positions)))
        if sorted(positions) != expected:
            raise ConfigError("LED indices must be contiguous from 0", key="led[i].pos")
        pos_list = [positions[i] for i in expected]
    else:
        pos_list = [list(p) for p in REFERENCE_LEDS]

    try:
        leds = [LedParams(Vec3.of(p), **led_kwargs) for p in pos_list]
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    room = tuple(config.parse_floats(cfg["room"], "room", n=3)) if "room" in cfg else ROOM_SIZE
    bob = Vec3.of(config.parse_floats(cfg["bob.pos"], "bob.pos", n=3)) if "bob.pos" in cfg \
        else Vec3.of(REFERENCE_BOB)
    eve = Vec3.of(config.parse_floats(cfg["eve.pos"], "eve.pos", n=3)) if "eve.pos" in cfg else None
    sigma_dbm = config.get_float(cfg, "sigma_dbm", NOISE_DBM)
    return Layout(leds=leds, bob=bob, eve=eve, room=room, sigma_dbm=sigma_dbm)


LAYOUT_KEYS = ("room", "bob.pos", "eve.pos", "sigma_dbm", "lambertian_order", "pd_area", "fov_deg")


def load_layout(path) -> Layout:
    cfg = config.load_kv(path)
    unknown = sorted(k for k in cfg if k not in LAYOUT_KEYS and not _LED_KEY.match(k))
    if unknown:
        raise ConfigError("unknown layout key", key=unknown[0])
    return layout_from_kv(cfg)
