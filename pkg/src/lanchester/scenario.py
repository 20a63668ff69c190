"""JSON scenario files: parsing with field-path errors, and serialization.

A scenario looks like::

    {
      "model": "aimed",
      "params": {"r": 1, "g": 3},
      "initial": {"red": 2, "green": 1},
      "sim": {"dt": 1e-4, "t_max": 10, "stop_threshold": 1e-6},
      "tactics": {"divide": 2},
      "precision": 9
    }

``sim``, ``tactics`` and ``precision`` are optional.  ``tactics`` is either
``{"divide": n}`` or ``{"support": {"n": N, "kappa": k, "f0": f}}``.  Mixed
models take ``initial`` as ``{"red", "green1", "green2"}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import Optional, Union

from .models import MODEL_TYPES, ForceState, MixedParams, MixedState, ModelSpec, State

DEFAULT_PRECISION = 9

# Per-model parameter constraints: True means strictly positive, False any finite real.
PARAM_FIELDS: dict[str, dict[str, bool]] = {
    "aimed": {"r": True, "g": True},
    "unaimed": {"r": True, "g": True, "area_red": True, "area_green": True},
    "constant": {"r": True, "g": True},
    "mixed": {"r": True, "g1": True, "g2": True},
    "bracken": {"r": True, "g": True, "p": False, "q": False},
    "asymmetric": {"r": True, "g": True, "red_ref": True},
}

TOP_LEVEL = ("model", "params", "initial", "sim", "tactics", "precision")


class ScenarioError(ValueError):
    """Malformed or invalid scenario.  ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(frozen=True)
class SimSettings:
    dt: Optional[float] = None
    t_max: Optional[float] = None
    stop_threshold: Optional[float] = None


@dataclass(frozen=True)
class DivideTactic:
    n: int


@dataclass(frozen=True)
class SupportTactic:
    n: int
    kappa: float
    f0: float


Tactic = Union[DivideTactic, SupportTactic]


@dataclass(frozen=True)
class Scenario:
    model: ModelSpec
    initial: State
    sim: SimSettings = SimSettings()
    tactics: Optional[Tactic] = None
    precision: int = DEFAULT_PRECISION


def _number(value, path: str, *, positive=False, nonneg=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"expected a number, got {json.dumps(value)}")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError(path, "must be finite")
    if positive and value <= 0:
        raise ScenarioError(path, f"must be > 0, got {value:g}")
    if nonneg and value < 0:
        raise ScenarioError(path, f"must be >= 0, got {value:g}")
    return value


def _integer(value, path: str, lo: int, hi: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ScenarioError(path, f"expected an integer, got {json.dumps(value)}")
    value = int(value)
    if value < lo or (hi is not None and value > hi):
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ScenarioError(path, f"must be {bound}, got {value}")
    return value


def _object(value, path: str, allowed, required=()) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(path, "expected an object")
    for key in value:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}" if path else key, "unknown field")
    for key in required:
        if key not in value:
            raise ScenarioError(f"{path}.{key}" if path else key, "missing required field")
    return value


def _parse_initial(kind: str, raw) -> State:
    names = ("red", "green1", "green2") if kind == "mixed" else ("red", "green")
    if isinstance(raw, dict) and set(raw) != set(names):
        raise ScenarioError(
            "initial",
            f"{kind} model needs exactly the fields {', '.join(names)}; got {', '.join(sorted(raw)) or 'none'}",
        )
    obj = _object(raw, "initial", names, names)
    values = [_number(obj[n], f"initial.{n}", nonneg=True) for n in names]
    return MixedState(*values) if kind == "mixed" else ForceState(*values)


def _parse_params(kind: str, raw) -> ModelSpec:
    wanted = PARAM_FIELDS[kind]
    obj = _object(raw, "params", wanted, wanted)
    values = {
        name: _number(obj[name], f"params.{name}", positive=positive)
        for name, positive in wanted.items()
    }
    return MODEL_TYPES[kind](**values)


def _parse_sim(raw) -> SimSettings:
    obj = _object(raw, "sim", ("dt", "t_max", "stop_threshold"))
    settings = SimSettings(
        dt=_number(obj["dt"], "sim.dt", positive=True) if "dt" in obj else None,
        t_max=_number(obj["t_max"], "sim.t_max", positive=True) if "t_max" in obj else None,
        stop_threshold=(
            _number(obj["stop_threshold"], "sim.stop_threshold", nonneg=True)
            if "stop_threshold" in obj
            else None
        ),
    )
    if settings.dt is not None and settings.t_max is not None and settings.dt > settings.t_max:
        raise ScenarioError("sim.dt", "must not exceed sim.t_max")
    return settings


def _parse_tactics(raw) -> Tactic:
    obj = _object(raw, "tactics", ("divide", "support"))
    if len(obj) != 1:
        raise ScenarioError("tactics", "expected exactly one of 'divide' or 'support'")
    if "divide" in obj:
        return DivideTactic(_integer(obj["divide"], "tactics.divide", 1))
    sup = _object(obj["support"], "tactics.support", ("n", "kappa", "f0"), ("n", "kappa", "f0"))
    kappa = _number(sup["kappa"], "tactics.support.kappa", nonneg=True)
    if kappa >= 2:
        raise ScenarioError("tactics.support.kappa", f"must be < 2, got {kappa:g}")
    return SupportTactic(
        n=_integer(sup["n"], "tactics.support.n", 1),
        kappa=kappa,
        f0=_number(sup["f0"], "tactics.support.f0", positive=True),
    )


def scenario_from_dict(doc) -> Scenario:
    obj = _object(doc, "", TOP_LEVEL, ("model", "params", "initial"))
    kind = obj["model"]
    if kind not in PARAM_FIELDS:
        raise ScenarioError("model", f"expected one of {', '.join(PARAM_FIELDS)}, got {json.dumps(kind)}")
    initial = _parse_initial(kind, obj["initial"])
    model = _parse_params(kind, obj["params"])
    return Scenario(
        model=model,
        initial=initial,
        sim=_parse_sim(obj["sim"]) if "sim" in obj else SimSettings(),
        tactics=_parse_tactics(obj["tactics"]) if "tactics" in obj else None,
        precision=(
            _integer(obj["precision"], "precision", 1, 17)
            if "precision" in obj
            else DEFAULT_PRECISION
        ),
    )


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("", f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def scenario_to_dict(sc: Scenario) -> dict:
    doc = {
        "model": sc.model.kind,
        "params": {f.name: getattr(sc.model, f.name) for f in fields(sc.model)},
        "initial": {
            name: value
            for name, value in zip(
                ("red", "green1", "green2") if isinstance(sc.model, MixedParams) else ("red", "green"),
                sc.initial.components,
            )
        },
    }
    sim = {f.name: getattr(sc.sim, f.name) for f in fields(sc.sim) if getattr(sc.sim, f.name) is not None}
    if sim:
        doc["sim"] = sim
    if isinstance(sc.tactics, DivideTactic):
        doc["tactics"] = {"divide": sc.tactics.n}
    elif isinstance(sc.tactics, SupportTactic):
        doc["tactics"] = {"support": {"n": sc.tactics.n, "kappa": sc.tactics.kappa, "f0": sc.tactics.f0}}
    doc["precision"] = sc.precision
    return doc


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"
