"""Parameter sweeps, gap tables and receiver-plane averages.

Sweep tables are lists of :class:`Row`; the CSV written by :func:`emit_csv`
is the stable output contract::

    x,scheme,lower_nats,upper_nats,clamped,branch

Numbers are written with 17 significant digits so a parsed file compares
equal to the in-memory table.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import config
from .bounds import Scenario, ScenarioKind, batch_bounds, weighted_bounds
from .channel import (
    NOISE_DBM, RECEIVER_HEIGHT, ROOM_SIZE, Layout, LinkPair, bob_gains, db_to_linear,
    dbm_to_watts, layout_from_kv, load_layout, make_ratio_link, reference_leds,
)
from .errors import ConfigError, DomainError
from .selection import SchemeKind, batch_weights

CSV_HEADER = ("x", "scheme", "lower_nats", "upper_nats", "clamped", "branch")
SWEEP_VARIABLES = ("p_db", "xi", "ratio_db", "a_db")
THREADS_ENV = "VLC_SECRECY_THREADS"


@dataclass(frozen=True)
class Row:
    x: float
    scheme: str
    lower: float
    upper: float
    clamped: bool
    branch: str


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable, everything else held fixed.

    ``a_db=None`` ties the peak to the nominal intensity (A = P), as in the
    peak-limited figures.  In geometry mode the link comes from ``layout``;
    if the layout has no Eve position, Eve's gains are Bob's divided by the
    gain ratio.
    """

    scenario: ScenarioKind
    sweep: str
    range: tuple[float, float, float]
    p_db: float = 25.0
    a_db: float | None = None
    xi: float = 0.5
    ratio_db: float = 30.0
    m: int = 8
    sigma_dbm: float = NOISE_DBM
    h_b: float = 1.0
    schemes: tuple[str, ...] = ("us",)
    mode: str = "ratio"
    layout: Layout | None = None

    def __post_init__(self):
        if self.sweep not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.sweep!r}", key="sweep")
        start, stop, step = self.range
        if not step > 0:
            raise ConfigError("step must be > 0", key="range")
        if stop < start:
            raise ConfigError("range is empty", key="range")
        if self.mode not in ("ratio", "geometry"):
            raise ConfigError(f"unknown mode {self.mode!r}", key="mode")
        if self.mode == "geometry" and self.layout is None:
            raise ConfigError("geometry mode needs a layout", key="layout")
        if not self.schemes:
            raise ConfigError("no schemes selected", key="schemes")
        for s in self.schemes:
            if s not in {k.value for k in SchemeKind}:
                raise ConfigError(f"unknown scheme {s!r}", key="schemes")
        if self.sweep == "a_db" and self.scenario is ScenarioKind.AVG_ONLY:
            raise ConfigError("sweeping A needs the peak-limited scenario", key="sweep")

    def values(self) -> list[float]:
        start, stop, step = self.range
        return config.parse_range(f"{start!r}:{stop!r}:{step!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(dbm_to_watts(self.sigma_dbm))

    def point(self, x: float) -> "SweepSpec":
        """Fixed-parameter spec with the swept variable set to ``x``."""
        return replace(self, **{self.sweep: x}, range=(x, x, 1.0))


def point_scenario(spec: SweepSpec) -> Scenario:
    p = db_to_linear(spec.p_db)
    if spec.scenario is ScenarioKind.AVG_ONLY:
        return Scenario.avg(p, spec.xi)
    a = p if spec.a_db is None else db_to_linear(spec.a_db)
    return Scenario.peak(p, spec.xi, a)


def point_link(spec: SweepSpec) -> LinkPair:
    ratio = db_to_linear(spec.ratio_db)
    if spec.mode == "ratio":
        return make_ratio_link(ratio, spec.m, spec.sigma, spec.h_b)
    layout = spec.layout
    if layout.eve is not None:
        return layout.link()
    h_b = bob_gains(layout.leds, layout.bob)
    return LinkPair(h_b, h_b / ratio, layout.sigma, layout.sigma)


def evaluate_point(spec: SweepSpec, x: float) -> list[Row]:
    pt = spec.point(x)
    scenario = point_scenario(pt)
    link = point_link(pt)
    rows = []
    for name in spec.schemes:
        # same fallback as the plane runner: CAS with no secure LED -> uniform
        w = batch_weights(name, link.h_b, link.h_e, link.sigma_b, link.sigma_e)
        result = weighted_bounds(link, w, scenario)
        rows.append(Row(x, name, result.lower, result.upper, result.clamped, result.branch_code))
    return rows


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"must be an integer, got {raw!r}", key=THREADS_ENV) from None
    return max(1, n)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[Row]:
    """Evaluate every grid point; rows ordered by x, then by scheme order."""
    xs = spec.values()
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(xs) < 2:
        chunks = [evaluate_point(spec, x) for x in xs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map keeps input order, so the merge is deterministic
            chunks = list(pool.map(lambda x: evaluate_point(spec, x), xs))
    return [row for chunk in chunks for row in chunk]


# ---------------------------------------------------------------------------
# gap tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapTable:
    p_db: list[float]
    ratios: list[float]
    gaps: np.ndarray  # shape (len(p_db), len(ratios))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p_db"] + [f"ratio_{_fmt_num(r)}" for r in self.ratios])
        for p, row in zip(self.p_db, self.gaps):
            w.writerow([_fmt_num(p)] + [_fmt(v) for v in row])
        return buf.getvalue()


def gap_table(scenario: ScenarioKind, ratios, p_db, xi: float, m: int = 8,
              sigma: float | None = None, a_db: float | None = None) -> GapTable:
    """Raw (pre-clamp) upper minus lower bound under uniform selection.

    ``ratios`` are linear h_B/h_E values.  In the peak-limited scenario
    A = P unless ``a_db`` is given.
    """
    scenario = ScenarioKind(scenario)
    sigma = math.sqrt(dbm_to_watts(NOISE_DBM)) if sigma is None else sigma
    ratios = [float(r) for r in ratios]
    p_db = [float(p) for p in p_db]
    gaps = np.empty((len(p_db), len(ratios)))
    w = np.full(m, 1.0 / m)
    for i, pd in enumerate(p_db):
        p = db_to_linear(pd)
        if scenario is ScenarioKind.AVG_ONLY:
            sc = Scenario.avg(p, xi)
        else:
            sc = Scenario.peak(p, xi, p if a_db is None else db_to_linear(a_db))
        for j, ratio in enumerate(ratios):
            res = weighted_bounds(make_ratio_link(ratio, m, sigma), w, sc)
            gaps[i, j] = res.raw_upper - res.raw_lower
    return GapTable(p_db, ratios, gaps)


# ---------------------------------------------------------------------------
# receiver-plane averages
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneSpec:
    """Bob swept over a grid of the receiver plane; Eve fixed by a gain ratio.

    Grid samples sit at cell centres of an ``nx`` by ``ny`` partition of the
    floor rectangle at ``height``.
    """

    scenario: ScenarioKind
    xi_values: tuple[float, ...]
    p_db: float = 25.0
    a_db: float | None = None
    ratio: float = 1000.0
    grid: tuple[int, int] = (50, 40)
    leds: tuple = field(default_factory=lambda: tuple(reference_leds()))
    room: tuple[float, float, float] = ROOM_SIZE
    height: float = RECEIVER_HEIGHT
    sigma_dbm: float = NOISE_DBM
    schemes: tuple[str, ...] = ("us", "cas", "gs")

    def __post_init__(self):
        nx, ny = self.grid
        if nx < 1 or ny < 1:
            raise ConfigError("grid must be at least 1x1", key="grid")
        if not self.ratio > 0:
            raise ConfigError("gain ratio must be > 0", key="ratio_db")
        if not self.xi_values:
            raise ConfigError("no xi values", key="range")

    @property
    def sigma(self) -> float:
        return math.sqrt(dbm_to_watts(self.sigma_dbm))

    def points(self) -> np.ndarray:
        nx, ny = self.grid
        xs = (np.arange(nx) + 0.5) * self.room[0] / nx
        ys = (np.arange(ny) + 0.5) * self.room[1] / ny
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, self.height)])

    def gains(self, points: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        pts = self.points() if points is None else points
        h_b = np.array([bob_gains(self.leds, p) for p in pts])
        return h_b, h_b / self.ratio


def plane_scenario(spec: PlaneSpec, xi: float) -> Scenario:
    p = db_to_linear(spec.p_db)
    if spec.scenario is ScenarioKind.AVG_ONLY:
        return Scenario.avg(p, xi)
    return Scenario.peak(p, xi, p if spec.a_db is None else db_to_linear(spec.a_db))


def plane_average(spec: PlaneSpec, points: np.ndarray | None = None) -> list[Row]:
    """Mean clamped bounds over the plane, one row per (xi, scheme).

    ``clamped`` on a row is true if any grid point had a negative raw bound.
    The result does not depend on the order of the grid points.
    """
    h_b, h_e = spec.gains(points)
    sigma = spec.sigma
    weights = {s: batch_weights(s, h_b, h_e, sigma, sigma) for s in spec.schemes}
    rows = []
    for xi in spec.xi_values:
        scenario = plane_scenario(spec, xi)
        for s in spec.schemes:
            lower, upper, clamped = batch_bounds(h_b, h_e, sigma, sigma, weights[s], scenario)
            rows.append(Row(float(xi), s, float(lower.mean()), float(upper.mean()),
                            bool(clamped.any()), "-"))
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _fmt_num(v: float) -> str:
    return format(float(v), "g")


def table_to_csv(rows, scale: float = 1.0) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(r.x), r.scheme, _fmt(r.lower * scale), _fmt(r.upper * scale),
                    int(r.clamped), r.branch])
    return buf.getvalue()


def emit_csv(rows, path, scale: float = 1.0) -> None:
    path = Path(path)
    try:
        path.write_text(table_to_csv(rows, scale), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def parse_csv(text: str) -> list[Row]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header {header!r}")
    return [Row(float(x), s, float(lo), float(up), bool(int(c)), b) for x, s, lo, up, c, b in reader]


def read_csv(path) -> list[Row]:
    return parse_csv(Path(path).read_text(encoding="utf-8"))


_COLORS = {"us": "#1f77b4", "cas": "#2ca02c", "gs": "#d62728"}


def table_to_svg(rows, xlabel: str = "x", ylabel: str = "secrecy rate (nats)",
                 width: int = 640, height: int = 420) -> str:
    """Standalone SVG line plot, one polyline per (scheme, bound)."""
    series: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for r in rows:
        series.setdefault((r.scheme, "lower"), []).append((r.x, r.lower))
        series.setdefault((r.scheme, "upper"), []).append((r.x, r.upper))
    pad_l, pad_r, pad_t, pad_b = 60, 120, 20, 45
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b
    xs = [p[0] for pts in series.values() for p in pts] or [0.0, 1.0]
    ys = [p[1] for pts in series.values() for p in pts if math.isfinite(p[1])] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def sx(x):
        return pad_l + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return pad_t + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{pad_t + ph + 15}" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{pad_l - 5}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.4g}</text>')
    out.append(f'<text x="{pad_l + pw / 2}" y="{height - 8}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{pad_t + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {pad_t + ph / 2})">{ylabel}</text>')
    for k, ((scheme, bound), pts) in enumerate(sorted(series.items())):
        color = _COLORS.get(scheme, "#555")
        dash = ' stroke-dasharray="5,3"' if bound == "upper" else ""
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts if math.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{coords}"/>')
        ly = pad_t + 14 * (k + 1)
        out.append(f'<line x1="{width - pad_r + 10}" y1="{ly}" x2="{width - pad_r + 30}" y2="{ly}" '
                   f'stroke="{color}"{dash}/>')
        out.append(f'<text x="{width - pad_r + 35}" y="{ly + 4}">{scheme} {bound}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(rows, path, **kwargs) -> None:
    path = Path(path)
    try:
        path.write_text(table_to_svg(rows, **kwargs), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# experiment spec files
# ---------------------------------------------------------------------------

def _schemes(text: str) -> tuple[str, ...]:
    return tuple(s.strip().lower() for s in text.split(",") if s.strip())


def spec_from_kv(cfg: dict[str, str], base_dir: Path | None = None):
    """Build a :class:`SweepSpec` or, when ``grid`` is present, a :class:`PlaneSpec`.

    Returns ``(spec, seed)``.
    """
    known = {"scenario", "sweep", "range", "xi", "ratio_db", "schemes", "mode", "grid",
             "seed", "p_db", "a_db", "m", "sigma_dbm", "layout", "h_b"}
    unknown = sorted(set(cfg) - known - {k for k in cfg if k.startswith(("led[", "bob.", "eve."))}
                     - {"room", "lambertian_order", "pd_area", "fov_deg"})
    if unknown:
        raise ConfigError("unknown key", key=unknown[0])

    try:
        scenario = ScenarioKind(cfg.get("scenario", "avg").strip().lower())
    except ValueError:
        raise ConfigError(f"must be 'avg' or 'peak', got {cfg['scenario']!r}", key="scenario") from None
    seed = int(config.get_float(cfg, "seed", 0.0))
    p_db = config.get_float(cfg, "p_db", 25.0)
    a_db = config.get_float(cfg, "a_db") if "a_db" in cfg else None
    ratio_db = config.get_float(cfg, "ratio_db", 30.0)
    sigma_dbm = config.get_float(cfg, "sigma_dbm", NOISE_DBM)
    schemes = _schemes(cfg.get("schemes", "us,cas,gs"))

    if "grid" in cfg:
        grid = config.parse_floats(cfg["grid"].replace("x", ","), "grid", n=2)
        xi_values = tuple(config.parse_range(cfg.get("range", "0.05:0.95:0.05"), "range"))
        layout = _layout(cfg, base_dir)
        spec = PlaneSpec(scenario=scenario, xi_values=xi_values, p_db=p_db, a_db=a_db,
                         ratio=db_to_linear(ratio_db), grid=(int(grid[0]), int(grid[1])),
                         leds=tuple(layout.leds), room=layout.room, sigma_dbm=sigma_dbm,
                         schemes=schemes)
        return spec, seed

    if "sweep" not in cfg:
        raise ConfigError("missing required key", key="sweep")
    if "range" not in cfg:
        raise ConfigError("missing required key", key="range")
    parts = cfg["range"].split(":")
    if len(parts) != 3:
        raise ConfigError("range must be start:stop:step", key="range")
    rng = tuple(config.parse_float(p, "range") for p in parts)
    mode = cfg.get("mode", "ratio").strip().lower()
    layout = _layout(cfg, base_dir) if mode == "geometry" else None
    spec = SweepSpec(
        scenario=scenario, sweep=cfg["sweep"].strip().lower(), range=rng, p_db=p_db,
        a_db=a_db, xi=config.get_float(cfg, "xi", 0.5), ratio_db=ratio_db,
        m=int(config.get_float(cfg, "m", 8.0)), sigma_dbm=sigma_dbm,
        h_b=config.get_float(cfg, "h_b", 1.0), schemes=schemes, mode=mode, layout=layout,
    )
    return spec, seed


def _layout(cfg: dict[str, str], base_dir: Path | None) -> Layout:
    if "layout" in cfg:
        path = Path(cfg["layout"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_layout(path)
    return layout_from_kv(cfg)


def load_spec(path):
    path = Path(path)
    cfg = config.load_kv(path)
    try:
        return spec_from_kv(cfg, base_dir=path.parent)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
