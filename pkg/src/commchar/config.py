"""Pipeline configuration: INI file, environment overrides, validation.

File schema (every key optional)::

    [pipeline]
    edges = edges.csv              ; relative paths resolve against the file
    attrs = attrs.csv
    out = run/
    min_sup = 0.02
    min_community_size = 2
    seed = 42
    max_patterns = 10
    threads = 1
    max_candidates = 2000000

    [descriptors]
    measures = degree, transitivity, embeddedness, z, participation
    attributes = *                 ; '*' = every attribute in the data, or a list
    aggregate_attributes = total_conf, total_journal
    venue_breakpoints = 1, 2, 3, 4, 5
    aggregate_breakpoints = 5, 10, 20, 50

    [descriptor.degree]            ; per-descriptor override
    breakpoints = 3, 10, 30
    emit_zero = true

Environment variables ``COMMCHAR_<KEY>`` (e.g. ``COMMCHAR_MIN_SUP``)
override ``[pipeline]`` keys; command-line flags override both.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .measures import MEASURES
from .sequences import DescriptorSpec, default_specs

ENV_PREFIX = "COMMCHAR_"

_DEFAULT_MEASURE_SPECS = {s.id: s for s in default_specs()}
_DEFAULT_MEASURES = tuple(_DEFAULT_MEASURE_SPECS)
# available on request only; binned like degree
_DEFAULT_MEASURE_SPECS["internal_degree"] = DescriptorSpec("internal_degree", "measure", (3, 10, 30))


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class PipelineConfig:
    edges: Path | None = None
    attrs: Path | None = None
    out: Path | None = None
    min_sup: float = 0.02
    min_community_size: int = 2
    seed: int = 42
    max_patterns: int = 10
    threads: int = 1
    max_candidates: int = 2_000_000
    measures: tuple[str, ...] = _DEFAULT_MEASURES
    attributes: tuple[str, ...] | None = None  # None = all attributes in the data
    aggregate_attributes: tuple[str, ...] = ("total_conf", "total_journal")
    venue_breakpoints: tuple[float, ...] = (1, 2, 3, 4, 5)
    aggregate_breakpoints: tuple[float, ...] = (5, 10, 20, 50)
    overrides: tuple[DescriptorSpec, ...] = field(default_factory=tuple)

    def descriptor_specs(self, attribute_names) -> list[DescriptorSpec]:
        over = {s.id: s for s in self.overrides}
        specs = []
        for m in self.measures:
            specs.append(over.get(m, _DEFAULT_MEASURE_SPECS[m]))
        names = sorted(attribute_names) if self.attributes is None else list(self.attributes)
        for a in names:
            if a in over:
                specs.append(over[a])
            elif a in self.aggregate_attributes:
                specs.append(DescriptorSpec(a, "attribute", self.aggregate_breakpoints, emit_zero=False))
            else:
                specs.append(DescriptorSpec(a, "attribute", self.venue_breakpoints, emit_zero=False))
        return specs

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["pipeline"] = {
            k: str(getattr(self, k))
            for k in ("min_sup", "min_community_size", "seed", "max_patterns", "threads", "max_candidates")
        }
        for k in ("edges", "attrs", "out"):
            if getattr(self, k) is not None:
                cp["pipeline"][k] = str(getattr(self, k))
        cp["descriptors"] = {
            "measures": ", ".join(self.measures),
            "attributes": "*" if self.attributes is None else ", ".join(self.attributes),
            "aggregate_attributes": ", ".join(self.aggregate_attributes),
            "venue_breakpoints": _floats_text(self.venue_breakpoints),
            "aggregate_breakpoints": _floats_text(self.aggregate_breakpoints),
        }
        for s in self.overrides:
            cp[f"descriptor.{s.id}"] = {
                "kind": s.kind,
                "breakpoints": _floats_text(s.breakpoints),
                "emit_zero": str(s.emit_zero).lower(),
            }
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _floats_text(xs) -> str:
    return ", ".join(repr(float(x)) for x in xs)


def _names(raw: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in raw.split(",") if x.strip())


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in _names(raw))


_PIPELINE_KEYS = {
    "edges": Path, "attrs": Path, "out": Path,
    "min_sup": float, "min_community_size": int, "seed": int,
    "max_patterns": int, "threads": int, "max_candidates": int,
}
_DESCRIPTOR_KEYS = {"measures", "attributes", "aggregate_attributes", "venue_breakpoints", "aggregate_breakpoints"}


def _coerce(key, raw, errors, base: Path | None):
    kind = _PIPELINE_KEYS[key]
    try:
        if kind is Path:
            p = Path(raw).expanduser()
            return (base / p) if base is not None and not p.is_absolute() else p
        return kind(raw)
    except ValueError:
        errors.append(f"[pipeline] {key}: cannot parse {raw!r} as {kind.__name__}")
        return None


def _parse(text: str, base: Path | None, errors: list[str]) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        errors.append(f"unparseable config: {exc}".replace("\n", " "))
        return {}
    values: dict = {}
    overrides = []
    for section in cp.sections():
        if section == "pipeline":
            for key, raw in cp[section].items():
                if key not in _PIPELINE_KEYS:
                    errors.append(f"[pipeline] unknown key {key!r}")
                    continue
                v = _coerce(key, raw, errors, base)
                if v is not None:
                    values[key] = v
        elif section == "descriptors":
            for key, raw in cp[section].items():
                if key not in _DESCRIPTOR_KEYS:
                    errors.append(f"[descriptors] unknown key {key!r}")
                elif key in ("venue_breakpoints", "aggregate_breakpoints"):
                    try:
                        values[key] = _floats(raw)
                    except ValueError:
                        errors.append(f"[descriptors] {key}: breakpoints must be numbers")
                elif key == "attributes":
                    values[key] = None if raw.strip() == "*" else _names(raw)
                else:
                    values[key] = _names(raw)
        elif section.startswith("descriptor."):
            did = section[len("descriptor."):]
            sec = cp[section]
            unknown = set(sec) - {"breakpoints", "emit_zero", "kind"}
            for key in sorted(unknown):
                errors.append(f"[{section}] unknown key {key!r}")
            try:
                bps = _floats(sec.get("breakpoints", ""))
            except ValueError:
                errors.append(f"descriptor {did!r}: breakpoints must be numbers")
                continue
            try:
                emit_zero = sec.getboolean("emit_zero", fallback=None)
            except ValueError:
                errors.append(f"descriptor {did!r}: emit_zero must be a boolean")
                continue
            kind = sec.get("kind", "measure" if did in MEASURES else "attribute")
            if emit_zero is None:
                emit_zero = kind == "measure"
            try:
                overrides.append(DescriptorSpec(did, kind, bps, emit_zero))
            except ValueError as exc:
                errors.append(str(exc))
        else:
            errors.append(f"unknown section [{section}]")
    if overrides:
        values["overrides"] = tuple(sorted(overrides, key=lambda s: s.id))
    return values


def _check(cfg: PipelineConfig, errors: list[str]) -> None:
    if not 0 < cfg.min_sup <= 1:
        errors.append(f"min_sup must lie in (0, 1], got {cfg.min_sup}")
    if cfg.min_community_size < 1:
        errors.append("min_community_size must be >= 1")
    if cfg.max_patterns < 1:
        errors.append("max_patterns must be >= 1")
    if cfg.threads < 1:
        errors.append("threads must be >= 1")
    if cfg.max_candidates < 1:
        errors.append("max_candidates must be >= 1")
    for m in cfg.measures:
        if m not in MEASURES:
            errors.append(f"unknown measure {m!r}")
    for name, bps in (("venue_breakpoints", cfg.venue_breakpoints), ("aggregate_breakpoints", cfg.aggregate_breakpoints)):
        try:
            DescriptorSpec(name, "attribute", bps)
        except ValueError as exc:
            errors.append(str(exc))
    for key in ("edges", "attrs"):
        p = getattr(cfg, key)
        if p is not None and not (p.is_file() and os.access(p, os.R_OK)):
            errors.append(f"{key}: {p} is not a readable file")


def resolve(path=None, env=None, **flags) -> PipelineConfig:
    """Defaults < config file < ``COMMCHAR_*`` environment < explicit flags.

    Raises :class:`ConfigError` carrying every problem found.
    """
    errors: list[str] = []
    values: dict = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError([f"cannot read config {path}: {exc.strerror}"]) from None
        values.update(_parse(text, path.parent.resolve(), errors))
    env = os.environ if env is None else env
    for key in _PIPELINE_KEYS:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            v = _coerce(key, raw, errors, None)
            if v is not None:
                values[key] = v
    for key, v in flags.items():
        if v is None:
            continue
        if key not in {f.name for f in fields(PipelineConfig)}:
            errors.append(f"unknown option {key!r}")
            continue
        values[key] = Path(v) if _PIPELINE_KEYS.get(key) is Path else v
    cfg = replace(PipelineConfig(), **values)
    _check(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg


def validate_config(path) -> PipelineConfig:
    """Fully resolved config from one file, defaults applied, no environment."""
    return resolve(path, env={})


def loads(text: str) -> PipelineConfig:
    errors: list[str] = []
    cfg = replace(PipelineConfig(), **_parse(text, None, errors))
    _check(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg
