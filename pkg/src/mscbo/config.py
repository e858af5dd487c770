"""Experiment specifications: parsing, serialization and named presets.

A configuration document is a flat YAML (or JSON) mapping. Algorithm parameters use
the field names of :class:`~mscbo.dynamics.RunConfig`; the interaction potential is
spelled out flat as ``R, A, r, a, R_f, A_f, r_f, a_f``. Missing keys take their
defaults, unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Optional

import yaml

from .dynamics import RunConfig
from .interaction import PotentialParams
from .problems import get_problem, problem_names

EMIT_FLAGS = ("front_csv", "weights_csv", "diagnostics_csv", "summary_json")

_POTENTIAL_KEYS = tuple(f.name for f in fields(PotentialParams))
_RUN_KEYS = tuple(f.name for f in fields(RunConfig) if f.name not in ("potential", "seed"))
_SPEC_KEYS = ("preset", "problem", "seed", "seeds", "resolution", "out", "emit")
KNOWN_KEYS = _SPEC_KEYS + _RUN_KEYS + _POTENTIAL_KEYS

_INT_KEYS = {"K", "N_bar"}
_STR_KEYS = {"variant", "weight_init", "interaction", "kernel"}


class ConfigError(ValueError):
    """Invalid experiment configuration (a usage error, not a runtime failure)."""


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str = "schaffer1"
    run: RunConfig = field(default_factory=RunConfig)
    seeds: tuple = (0,)
    resolution: Optional[int] = None  # reference-front resolution, None picks a per-problem default
    out: str = "mscbo-out"
    emit: tuple = EMIT_FLAGS

    def __post_init__(self):
        self.validate()
        # The run config always carries the first seed; each run replaces it.
        if self.run.seed != self.seeds[0]:
            object.__setattr__(self, "run", replace(self.run, seed=self.seeds[0]))

    def validate(self) -> None:
        try:
            get_problem(self.problem)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        if len(self.seeds) < 1:
            raise ConfigError("at least one seed is required")
        for s in self.seeds:
            if not isinstance(s, int) or isinstance(s, bool) or not 0 <= s < 2**64:
                raise ConfigError(f"seed {s!r} is not a 64-bit unsigned integer")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.resolution is not None and self.resolution < 2:
            raise ConfigError("resolution must be at least 2")
        bad = [e for e in self.emit if e not in EMIT_FLAGS]
        if bad:
            raise ConfigError(f"unknown emit flag {bad[0]!r}; expected a subset of {', '.join(EMIT_FLAGS)}")
        if not self.out:
            raise ConfigError("out must name a directory")

    def with_seeds(self, seeds) -> "ExperimentSpec":
        return replace(self, seeds=tuple(int(s) for s in seeds))


# --- coercion helpers ---------------------------------------------------------------


def _as_int(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(value)


def _as_float(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _as_weights(value):
    if value is None:
        return None
    try:
        rows = tuple(tuple(float(w) for w in row) for row in value)
    except TypeError:
        raise ConfigError("weights must be a list of weight vectors") from None
    return rows


def _coerce_run(key, value):
    if key in _INT_KEYS:
        return _as_int(key, value)
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    if key == "weights":
        return _as_weights(value)
    return _as_float(key, value)


def _emit_list(value) -> tuple:
    if isinstance(value, str):
        value = [v for v in value.replace(" ", "").split(",") if v]
    if not isinstance(value, (list, tuple)):
        raise ConfigError("emit must be a list of output names")
    out = []
    for item in value:
        name = str(item)
        if name == "all":
            return EMIT_FLAGS
        if name in ("front", "weights", "diagnostics"):
            name += "_csv"
        elif name == "summary":
            name = "summary_json"
        if name not in EMIT_FLAGS:
            raise ConfigError(f"unknown emit flag {item!r}; expected a subset of {', '.join(EMIT_FLAGS)}")
        if name not in out:
            out.append(name)
    return tuple(out)


def _seed_list(value) -> tuple:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, (list, tuple)):
        raise ConfigError("seeds must be an integer or a list of integers")
    return tuple(_as_int("seeds", s) for s in value)


# --- public API -----------------------------------------------------------------------


def apply_settings(base: ExperimentSpec, settings: dict[str, Any]) -> ExperimentSpec:
    """Overlay a flat mapping of settings onto ``base``; raises :class:`ConfigError`."""
    unknown = [k for k in settings if k not in KNOWN_KEYS]
    if unknown:
        raise ConfigError(f"unknown configuration key {unknown[0]!r}")
    spec_changes: dict[str, Any] = {}
    run_changes: dict[str, Any] = {}
    pot_changes: dict[str, Any] = {}
    for key, value in settings.items():
        if key == "preset":
            continue
        if key == "problem":
            spec_changes["problem"] = str(value)
        elif key in ("seed", "seeds"):
            spec_changes["seeds"] = _seed_list(value)
        elif key == "resolution":
            spec_changes["resolution"] = None if value is None else _as_int(key, value)
        elif key == "out":
            spec_changes["out"] = str(value)
        elif key == "emit":
            spec_changes["emit"] = _emit_list(value)
        elif key in _POTENTIAL_KEYS:
            pot_changes[key] = _as_float(key, value)
        else:
            run_changes[key] = _coerce_run(key, value)
    try:
        if pot_changes:
            run_changes["potential"] = replace(base.run.potential, **pot_changes)
        run = replace(base.run, **run_changes)
        return replace(base, run=run, **spec_changes)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_document(text: str) -> dict:
    try:
        doc = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration document: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a key-value mapping")
    return doc


def parse_config(text: str, base: Optional[ExperimentSpec] = None) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from a YAML/JSON document.

    A ``preset`` key selects the starting point; otherwise defaults are used.
    """
    doc = load_document(text)
    if base is None:
        base = preset(str(doc["preset"])) if "preset" in doc else ExperimentSpec()
    return apply_settings(base, doc)


def spec_to_dict(spec: ExperimentSpec) -> dict:
    run = spec.run
    doc: dict[str, Any] = {
        "problem": spec.problem,
        "seeds": list(spec.seeds),
        "resolution": spec.resolution,
        "out": spec.out,
        "emit": list(spec.emit),
    }
    for key in _RUN_KEYS:
        value = getattr(run, key)
        if key == "weights" and value is not None:
            value = [list(row) for row in value]
        doc[key] = value
    for key in _POTENTIAL_KEYS:
        doc[key] = getattr(run.potential, key)
    return doc


def serialize_config(spec: ExperimentSpec) -> str:
    # PyYAML writes floats with repr(), which round-trips exactly.
    return yaml.safe_dump(spec_to_dict(spec), sort_keys=False, default_flow_style=None)


# --- presets ---------------------------------------------------------------------------


def _biobjective(problem: str) -> ExperimentSpec:
    return ExperimentSpec(
        problem=problem,
        run=RunConfig(K=30, N_bar=20, variant="full", beta=10.0, weight_init="equidistant"),
    )


PRESETS = {
    "paper-schaffer1": lambda: _biobjective("schaffer1"),
    "paper-dent": lambda: _biobjective("dent"),
    "paper-schaffer2": lambda: _biobjective("schaffer2"),
    "paper-three": lambda: ExperimentSpec(
        problem="three",
        run=RunConfig(K=50, N_bar=20, variant="full", beta=10.0, weight_init="simplex-uniform"),
    ),
    # Adaptive weights on the convex example, without penalty or sampling noise.
    "paper-weights-demo": lambda: ExperimentSpec(
        problem="schaffer1",
        run=RunConfig(K=20, N_bar=50, variant="adaptive", beta=0.0, weight_init="equidistant"),
    ),
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def preset(name: str) -> ExperimentSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available presets: {', '.join(preset_names())}") from None


def registered_problems() -> list[str]:
    return problem_names()
