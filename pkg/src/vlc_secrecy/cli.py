"""Command-line front end.

Verbs: ``bounds``, ``sweep``, ``gap-table``, ``plane``, ``sample``, ``selfcheck``.
Tables go to stdout unless ``--out`` is given.  Exit codes: 0 success,
1 configuration/usage error, 2 numerical-domain error (including a failing
``selfcheck``).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import config, experiments, oracles
from .bounds import Scenario, ScenarioKind, weighted_bounds
from .channel import NOISE_DBM, LinkPair, db_to_linear, dbm_to_watts, make_ratio_link
from .errors import ConfigError, DomainError
from .experiments import PlaneSpec, Row, SweepSpec
from .selection import frequencies, sample_active_leds, scheme_probs

DEFAULT_SEED = 20240601
EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2

log = logging.getLogger(__name__)


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; we want 1 and our own handling
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _scenario(text: str) -> ScenarioKind:
    try:
        return ScenarioKind(text.strip().lower())
    except ValueError:
        raise ConfigError(f"must be 'avg' or 'peak', got {text!r}", key="--scenario") from None


def _common(p: argparse.ArgumentParser, p_db_default: str | None = "25") -> None:
    p.add_argument("--scenario", default="avg", help="avg (average only) or peak (average and peak)")
    p.add_argument("--xi", default="0.5", help="dimming target in (0, 1)")
    p.add_argument("--p-db", default=p_db_default, help="nominal intensity P in dB")
    p.add_argument("--a-db", default=None, help="peak intensity A in dB (default: A = P)")
    p.add_argument("--sigma-dbm", type=float, default=NOISE_DBM, help="noise variance in dBm")
    p.add_argument("--bits", action="store_true", help="report bits instead of nats")
    p.add_argument("--out", default=None, help="write the table here instead of stdout")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vlc-secrecy", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="lower/upper bound at one operating point")
    _common(p)
    p.add_argument("--ratio-db", default="30", help="Bob/Eve gain ratio in dB")
    p.add_argument("--scheme", default="us", help="us, cas or gs")
    p.add_argument("--m", type=int, default=8, help="number of LEDs")
    p.add_argument("--h-b", default=None, help="comma list of Bob gains (overrides ratio mode)")
    p.add_argument("--h-e", default=None, help="comma list of Eve gains (with --h-b)")

    p = sub.add_parser("sweep", help="bounds over one swept variable")
    _common(p)
    p.add_argument("--spec", default=None, help="experiment spec file (key = value)")
    p.add_argument("--sweep", default="p_db", help="p_db, xi, ratio_db or a_db")
    p.add_argument("--range", default=None, help="start:stop:step of the swept variable")
    p.add_argument("--ratio-db", default="30")
    p.add_argument("--scheme", default="us", help="comma list of schemes")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--plot", default=None, help="also write an SVG plot here")

    p = sub.add_parser("gap-table", help="upper minus lower bound over P and gain ratio")
    _common(p, p_db_default="30:80:10")
    p.add_argument("--ratios", default="10,100,1000", help="comma list of linear gain ratios")
    p.add_argument("--m", type=int, default=8)

    p = sub.add_parser("plane", help="bounds averaged over Bob positions on the receiver plane")
    _common(p)
    p.add_argument("--spec", default=None)
    p.add_argument("--xi-range", default="0.05:0.95:0.05")
    p.add_argument("--ratio-db", default="30")
    p.add_argument("--grid", default="50x40", help="NXxNY cell-centre grid")
    p.add_argument("--scheme", default="us,cas,gs")

    p = sub.add_parser("sample", help="draw active LEDs with the cumulative-threshold rule")
    p.add_argument("--scheme", default="us")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--ratio-db", default="30")
    p.add_argument("--h-b", default=None)
    p.add_argument("--h-e", default=None)
    p.add_argument("--sigma-dbm", type=float, default=NOISE_DBM)
    p.add_argument("--out", default=None)

    p = sub.add_parser("selfcheck", help="closed forms against quadrature and solver checks")
    p.add_argument("--out", default=None)
    return parser


def _float(text, key):
    return config.parse_float(str(text), key)


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _scale(args) -> float:
    return 1.0 / math.log(2.0) if getattr(args, "bits", False) else 1.0


def _link(args) -> LinkPair:
    sigma = math.sqrt(dbm_to_watts(args.sigma_dbm))
    if args.h_b is not None:
        h_b = config.parse_floats(args.h_b, "--h-b")
        if args.h_e is None:
            raise ConfigError("required with --h-b", key="--h-e")
        h_e = config.parse_floats(args.h_e, "--h-e", n=len(h_b))
        return LinkPair(np.array(h_b), np.array(h_e), sigma, sigma)
    if args.h_e is not None:
        raise ConfigError("needs --h-b", key="--h-e")
    return make_ratio_link(db_to_linear(_float(args.ratio_db, "--ratio-db")), args.m, sigma)


def cmd_bounds(args) -> int:
    kind = _scenario(args.scenario)
    p_db = _float(args.p_db, "--p-db")
    p, xi = db_to_linear(p_db), _float(args.xi, "--xi")
    if kind is ScenarioKind.AVG_ONLY:
        scenario = Scenario.avg(p, xi)
    else:
        a = p if args.a_db is None else db_to_linear(_float(args.a_db, "--a-db"))
        scenario = Scenario.peak(p, xi, a)
    link = _link(args)
    rows = []
    for name in experiments._schemes(args.scheme):
        res = weighted_bounds(link, scheme_probs(name, link).probs, scenario)
        rows.append(Row(p_db, name, res.lower, res.upper, res.clamped, res.branch_code))
    _emit(experiments.table_to_csv(rows, _scale(args)), args.out)
    return EXIT_OK


def _sweep_spec(args) -> SweepSpec:
    if args.spec is not None:
        spec, _ = experiments.load_spec(args.spec)
        if not isinstance(spec, SweepSpec):
            raise ConfigError("spec describes a plane average; use the plane verb", key="--spec")
        return spec
    if args.range is None:
        raise ConfigError("required unless --spec is given", key="--range")
    parts = args.range.split(":")
    if len(parts) != 3:
        raise ConfigError("must be start:stop:step", key="--range")
    return SweepSpec(
        scenario=_scenario(args.scenario), sweep=args.sweep,
        range=tuple(_float(v, "--range") for v in parts),
        p_db=_float(args.p_db, "--p-db"),
        a_db=None if args.a_db is None else _float(args.a_db, "--a-db"),
        xi=_float(args.xi, "--xi"), ratio_db=_float(args.ratio_db, "--ratio-db"),
        m=args.m, sigma_dbm=args.sigma_dbm, schemes=experiments._schemes(args.scheme),
    )


def cmd_sweep(args) -> int:
    spec = _sweep_spec(args)
    rows = experiments.run_sweep(spec)
    _emit(experiments.table_to_csv(rows, _scale(args)), args.out)
    if args.plot:
        scale = _scale(args)
        scaled = [Row(r.x, r.scheme, r.lower * scale, r.upper * scale, r.clamped, r.branch)
                  for r in rows]
        experiments.emit_plot(scaled, args.plot, xlabel=spec.sweep,
                              ylabel="secrecy rate (bits)" if args.bits else "secrecy rate (nats)")
    return EXIT_OK


def cmd_gap_table(args) -> int:
    table = experiments.gap_table(
        _scenario(args.scenario), config.parse_floats(args.ratios, "--ratios"),
        config.parse_range(args.p_db, "--p-db"), _float(args.xi, "--xi"), m=args.m,
        sigma=math.sqrt(dbm_to_watts(args.sigma_dbm)),
        a_db=None if args.a_db is None else _float(args.a_db, "--a-db"),
    )
    if args.bits:
        table = experiments.GapTable(table.p_db, table.ratios, table.gaps * _scale(args))
    _emit(table.to_csv(), args.out)
    return EXIT_OK


def cmd_plane(args) -> int:
    if args.spec is not None:
        spec, _ = experiments.load_spec(args.spec)
        if not isinstance(spec, PlaneSpec):
            raise ConfigError("spec has no grid; use the sweep verb", key="--spec")
    else:
        grid = config.parse_floats(args.grid.replace("x", ","), "--grid", n=2)
        spec = PlaneSpec(
            scenario=_scenario(args.scenario),
            xi_values=tuple(config.parse_range(args.xi_range, "--xi-range")),
            p_db=_float(args.p_db, "--p-db"),
            a_db=None if args.a_db is None else _float(args.a_db, "--a-db"),
            ratio=db_to_linear(_float(args.ratio_db, "--ratio-db")),
            grid=(int(grid[0]), int(grid[1])), sigma_dbm=args.sigma_dbm,
            schemes=experiments._schemes(args.scheme),
        )
    rows = experiments.plane_average(spec)
    _emit(experiments.table_to_csv(rows, _scale(args)), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    link = _link(args)
    scheme = scheme_probs(args.scheme.strip().lower(), link)
    rng = np.random.default_rng(args.seed)
    draws = sample_active_leds(scheme, rng, args.draws)
    freq = frequencies(draws, scheme.m)
    counts = np.bincount(draws - 1, minlength=scheme.m)
    lines = ["led,prob,count,freq"]
    for k in range(scheme.m):
        lines.append(f"{k + 1},{scheme.probs[k]:.17g},{counts[k]},{freq[k]:.17g}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    checks = oracles.selfcheck()
    lines = [f"{'PASS' if c.ok else 'FAIL'} {c.name}: {c.detail}" for c in checks]
    failed = sum(not c.ok for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if failed == 0 else EXIT_DOMAIN


COMMANDS = {
    "bounds": cmd_bounds, "sweep": cmd_sweep, "gap-table": cmd_gap_table,
    "plane": cmd_plane, "sample": cmd_sample, "selfcheck": cmd_selfcheck,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr, end="")
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
