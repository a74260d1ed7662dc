"""Plain-text ``key = value`` config files.

Both the room layout files and the experiment spec files use this format::

    # comment
    room = 5, 4, 3
    led[0].pos = 1, 2, 3
    scenario = peak

Blank lines and ``#`` comments are ignored.  Keys are case-sensitive and
must be unique.  Values are kept as strings; the typed accessors below do
the parsing and raise :class:`ConfigError` naming the offending key.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

from .errors import ConfigError

_LINE = re.compile(r"^\s*([A-Za-z_][\w.\[\]-]*)\s*=\s*(.*?)\s*$")


def parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = m.group(1), m.group(2)
        if key in out:
            raise ConfigError("duplicate key", key=key)
        out[key] = value
    return out


def load_kv(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_kv(text)


def get_float(cfg: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError("missing required key", key=key)
        return default
    return parse_float(cfg[key], key)


def parse_float(text: str, key: str | None = None) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}", key=key) from None
    if math.isnan(value):
        raise ConfigError("NaN is not allowed", key=key)
    return value


def parse_floats(text: str, key: str | None = None, n: int | None = None) -> list[float]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    values = [parse_float(p, key) for p in parts]
    if not values:
        raise ConfigError("empty list", key=key)
    if n is not None and len(values) != n:
        raise ConfigError(f"expected {n} values, got {len(values)}", key=key)
    return values


def parse_range(text: str, key: str | None = None) -> list[float]:
    """Expand ``start:stop:step`` (stop inclusive) or a single number."""
    parts = text.split(":")
    if len(parts) == 1:
        return [parse_float(parts[0], key)]
    if len(parts) != 3:
        raise ConfigError(f"range must be start:stop:step, got {text!r}", key=key)
    start, stop, step = (parse_float(p, key) for p in parts)
    if step <= 0:
        raise ConfigError("range step must be > 0", key=key)
    if stop < start:
        raise ConfigError("range is empty (stop < start)", key=key)
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    # round away the accumulation noise so 0.1-step grids print cleanly
    return [round(start + i * step, 12) for i in range(n)]
