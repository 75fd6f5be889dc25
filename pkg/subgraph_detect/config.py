# subgraph_detect/config.py
"""Flat ``key=value`` run configuration.

Files look like a ``.env``: one assignment per line, ``#`` comments, blank
lines ignored, an optional ``export`` prefix and optional quotes around the
value. Command-line ``key=value`` overrides are merged on top.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

from subgraph_detect.errors import MissingKeyError, OutputError, ParseError

THREADS_ENV = "SUBGRAPH_DETECT_THREADS"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def default_threads() -> int:
    raw = os.getenv(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ParseError(f"{THREADS_ENV} must be an integer, got {raw!r}")


def _parse_line(line: str, lineno: int, source: str) -> Optional[tuple]:
    line = line.strip()
    if not line or line.startswith("#"):
        return None
    if line.startswith("export "):
        line = line[len("export "):].lstrip()
    if "=" not in line:
        raise ParseError(f"{source}:{lineno}: expected key=value, got {line!r}")
    key, value = line.split("=", 1)
    key, value = key.strip(), value.strip()
    if not key:
        raise ParseError(f"{source}:{lineno}: empty key")
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ("'", '"'):
        value = value[1:-1]
    return key, value


class RunConfig:
    """Typed read access to a flat string mapping."""

    def __init__(self, values: Optional[Mapping[str, str]] = None, source: str = "<config>"):
        self.values: Dict[str, str] = dict(values or {})
        self.source = source

    @classmethod
    def load(cls, path: Union[str, Path], overrides: Iterable[str] = ()) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot read config file {path}: {exc}") from exc
        values: Dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            parsed = _parse_line(line, lineno, str(path))
            if parsed:
                values[parsed[0]] = parsed[1]
        cfg = cls(values, source=str(path))
        cfg.apply_overrides(overrides)
        return cfg

    @classmethod
    def from_pairs(cls, pairs: Iterable[str]) -> "RunConfig":
        cfg = cls(source="<command line>")
        cfg.apply_overrides(pairs)
        return cfg

    def apply_overrides(self, pairs: Iterable[str]) -> None:
        for i, pair in enumerate(pairs, start=1):
            parsed = _parse_line(pair, i, "<override>")
            if parsed:
                self.values[parsed[0]] = parsed[1]

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def _raw(self, key: str, default: Optional[object]) -> Optional[str]:
        if key in self.values:
            return self.values[key]
        if default is None:
            raise MissingKeyError(f"{self.source}: required key '{key}' is missing")
        return None

    def _convert(self, key: str, raw: str, kind):
        try:
            return kind(raw)
        except ValueError:
            raise ParseError(f"{self.source}: key '{key}' expects {kind.__name__}, got {raw!r}")

    def get_str(self, key: str, default: Optional[str] = None) -> str:
        raw = self._raw(key, default)
        return default if raw is None else raw

    def get_int(self, key: str, default: Optional[int] = None) -> int:
        raw = self._raw(key, default)
        return default if raw is None else self._convert(key, raw, int)

    def get_float(self, key: str, default: Optional[float] = None) -> float:
        raw = self._raw(key, default)
        return default if raw is None else self._convert(key, raw, float)

    def get_bool(self, key: str, default: Optional[bool] = None) -> bool:
        raw = self._raw(key, default)
        if raw is None:
            return default
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ParseError(f"{self.source}: key '{key}' expects a boolean, got {raw!r}")

    def get_list(self, key: str, default: Optional[List[str]] = None, sep: str = ",") -> List[str]:
        raw = self._raw(key, default)
        if raw is None:
            return list(default)
        return [item.strip() for item in raw.split(sep) if item.strip()]

    def get_float_list(self, key: str, default: Optional[List[float]] = None) -> List[float]:
        return [self._convert(key, item, float) for item in self.get_list(key, None if default is None else [str(x) for x in default])]

    def as_dict(self) -> Dict[str, str]:
        return dict(sorted(self.values.items()))
