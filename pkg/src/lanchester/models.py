"""Force states, model parameter sets and the instantaneous attrition laws.

Every model is a frozen dataclass carrying its own ``kind`` tag; a
``ModelSpec`` is simply any one of them.  States are nonnegative strengths,
real valued.  All rates are returned as time derivatives, so each component
is ``<= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, ClassVar, Union

from .errors import DomainError, UnsupportedModelError

# Relative band around a zero invariant inside which a battle is called a draw.
DRAW_EPS = 1e-12

# |alpha| below this is treated as the logarithmic (alpha == 0) case.
ALPHA_ZERO_TOL = 1e-12


def _check_strength(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a finite nonnegative strength, got {value!r}")
    return value


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")
    return value


class Verdict(str, Enum):
    RED = "red"
    GREEN = "green"
    DRAW = "draw"


@dataclass(frozen=True)
class ForceState:
    red: float
    green: float

    def __post_init__(self):
        object.__setattr__(self, "red", _check_strength("red", self.red))
        object.__setattr__(self, "green", _check_strength("green", self.green))

    @property
    def components(self) -> tuple[float, float]:
        return (self.red, self.green)

    @property
    def total_green(self) -> float:
        return self.green

    def scaled(self, factor: float) -> ForceState:
        return ForceState(self.red * factor, self.green * factor)


@dataclass(frozen=True)
class MixedState:
    """Red against a green force made of two unit types."""

    red: float
    green1: float
    green2: float

    def __post_init__(self):
        for name in ("red", "green1", "green2"):
            object.__setattr__(self, name, _check_strength(name, getattr(self, name)))

    @property
    def components(self) -> tuple[float, float, float]:
        return (self.red, self.green1, self.green2)

    @property
    def green(self) -> float:
        return self.green1 + self.green2

    @property
    def total_green(self) -> float:
        return self.green1 + self.green2

    def scaled(self, factor: float) -> MixedState:
        return MixedState(self.red * factor, self.green1 * factor, self.green2 * factor)


State = Union[ForceState, MixedState]


def state_from_components(model: "ModelSpec", comps) -> State:
    if isinstance(model, MixedParams):
        return MixedState(*comps)
    return ForceState(*comps)


@dataclass(frozen=True)
class AimedParams:
    """Directed fire: each side's losses are proportional to enemy numbers."""

    kind: ClassVar[str] = "aimed"
    r: float
    g: float

    def __post_init__(self):
        object.__setattr__(self, "r", _check_positive("r", self.r))
        object.__setattr__(self, "g", _check_positive("g", self.g))


@dataclass(frozen=True)
class UnaimedParams:
    """Area fire into a zone of known size.

    ``area_red`` is the area red is dispersed over (it dilutes green's fire),
    ``area_green`` the area green is dispersed over.
    """

    kind: ClassVar[str] = "unaimed"
    r: float
    g: float
    area_red: float
    area_green: float

    def __post_init__(self):
        for name in ("r", "g", "area_red", "area_green"):
            object.__setattr__(self, name, _check_positive(name, getattr(self, name)))


@dataclass(frozen=True)
class ConstantParams:
    """Hand-to-hand combat: each side loses units at a fixed rate.

    ``r`` is the rate at which red destroys green, ``g`` the reverse.
    """

    kind: ClassVar[str] = "constant"
    r: float
    g: float

    def __post_init__(self):
        object.__setattr__(self, "r", _check_positive("r", self.r))
        object.__setattr__(self, "g", _check_positive("g", self.g))


@dataclass(frozen=True)
class MixedParams:
    kind: ClassVar[str] = "mixed"
    r: float
    g1: float
    g2: float

    def __post_init__(self):
        for name in ("r", "g1", "g2"):
            object.__setattr__(self, name, _check_positive(name, getattr(self, name)))


@dataclass(frozen=True)
class BrackenParams:
    """Generalized law dR/dt = -g R^q G^p, dG/dt = -r R^p G^q."""

    kind: ClassVar[str] = "bracken"
    r: float
    g: float
    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "r", _check_positive("r", self.r))
        object.__setattr__(self, "g", _check_positive("g", self.g))
        for name in ("p", "q"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def alpha(self) -> float:
        return alpha(self.p, self.q)


@dataclass(frozen=True)
class AsymmetricParams:
    """Target-rich regime: green's kill rate scales with red density R/R0."""

    kind: ClassVar[str] = "asymmetric"
    r: float
    g: float
    red_ref: float

    def __post_init__(self):
        for name in ("r", "g", "red_ref"):
            object.__setattr__(self, name, _check_positive(name, getattr(self, name)))


ModelSpec = Union[
    AimedParams, UnaimedParams, ConstantParams, MixedParams, BrackenParams, AsymmetricParams
]

MODEL_TYPES: dict[str, type] = {
    cls.kind: cls
    for cls in (
        AimedParams,
        UnaimedParams,
        ConstantParams,
        MixedParams,
        BrackenParams,
        AsymmetricParams,
    )
}


def check_shape(model: ModelSpec, state: State) -> None:
    if not isinstance(model, tuple(MODEL_TYPES.values())):
        raise TypeError(f"not a model: {model!r}")
    mixed_model = isinstance(model, MixedParams)
    if mixed_model and not isinstance(state, MixedState):
        raise ValueError("mixed model requires a MixedState (red, green1, green2)")
    if not mixed_model and not isinstance(state, ForceState):
        raise ValueError(f"{model.kind} model requires a ForceState (red, green)")


def _power(base: float, exponent: float, what: str) -> float:
    if base == 0.0 and exponent < 0:
        raise DomainError(f"{what}: zero strength raised to negative exponent {exponent}")
    return base**exponent


def alpha(p: float, q: float) -> float:
    """Conservation exponent implied by the Bracken exponents."""
    return 1.0 + p - q


def rate_function(model: ModelSpec) -> Callable[[tuple], tuple]:
    """Return ``f(components) -> derivatives`` for the model, on plain tuples.

    This is the hot path used by the integrator; ``rate`` wraps it.
    """
    if isinstance(model, AimedParams):
        r, g = model.r, model.g

        def f(y):
            return (-g * y[1], -r * y[0])

    elif isinstance(model, UnaimedParams):
        gr = model.g / model.area_red
        rg = model.r / model.area_green

        def f(y):
            hit = y[0] * y[1]
            return (-gr * hit, -rg * hit)

    elif isinstance(model, ConstantParams):
        r, g = model.r, model.g

        def f(y):
            return (-g, -r)

    elif isinstance(model, MixedParams):
        r, g1, g2 = model.r, model.g1, model.g2

        def f(y):
            red, a, b = y
            total = a + b
            if total == 0.0:
                return (-(g1 * a + g2 * b), 0.0, 0.0)
            # fractions first: a tiny total must not overflow the share
            fire = r * red
            return (-(g1 * a + g2 * b), -fire * (a / total), -fire * (b / total))

    elif isinstance(model, BrackenParams):
        r, g, p, q = model.r, model.g, model.p, model.q

        def f(y):
            red, green = y
            dr = g * (_power(red, q, "red**q") * _power(green, p, "green**p"))
            dg = r * (_power(red, p, "red**p") * _power(green, q, "green**q"))
            return (-dr, -dg)

    elif isinstance(model, AsymmetricParams):
        r, g, ref = model.r, model.g, model.red_ref

        def f(y):
            return (-g * y[1] * y[0] / ref, -r * y[1])

    else:
        raise TypeError(f"not a model: {model!r}")
    return f


def rate(model: ModelSpec, state: State) -> tuple[float, ...]:
    """Instantaneous time derivatives, as a tuple ordered like ``state.components``."""
    check_shape(model, state)
    return rate_function(model)(state.components)


def strength_terms(model: ModelSpec, comps) -> tuple[float, float]:
    """Red and green fighting strengths whose difference is conserved."""
    if isinstance(model, AimedParams):
        red, green = comps
        return model.r * (red * red), model.g * (green * green)
    if isinstance(model, UnaimedParams):
        red, green = comps
        return (model.r / model.area_green) * red, (model.g / model.area_red) * green
    if isinstance(model, ConstantParams):
        red, green = comps
        return model.r * red, model.g * green
    if isinstance(model, MixedParams):
        red, a, b = comps
        return model.r * (red * red), (model.g1 * a + model.g2 * b) * (a + b)
    if isinstance(model, BrackenParams):
        red, green = comps
        a = model.alpha
        if abs(a) < ALPHA_ZERO_TOL:
            if red <= 0.0 or green <= 0.0:
                raise DomainError("log-form invariant (alpha = 0) needs both strengths > 0")
            return model.r * math.log(red), model.g * math.log(green)
        return (
            model.r * _power(red, a, "red**alpha"),
            model.g * _power(green, a, "green**alpha"),
        )
    if isinstance(model, AsymmetricParams):
        raise UnsupportedModelError("asymmetric model has no conserved quantity")
    raise TypeError(f"not a model: {model!r}")


def invariant_function(model: ModelSpec) -> Callable[[tuple], float]:
    """Return ``inv(components)``, dispatch-free where the form allows.

    Each closure evaluates exactly the arithmetic of ``strength_terms``.
    """
    if isinstance(model, AsymmetricParams):
        raise UnsupportedModelError("asymmetric model has no conserved quantity")
    if isinstance(model, AimedParams):
        r, g = model.r, model.g
        return lambda y: r * (y[0] * y[0]) - g * (y[1] * y[1])
    if isinstance(model, UnaimedParams):
        rr, gg = model.r / model.area_green, model.g / model.area_red
        return lambda y: rr * y[0] - gg * y[1]
    if isinstance(model, ConstantParams):
        r, g = model.r, model.g
        return lambda y: r * y[0] - g * y[1]
    if isinstance(model, MixedParams):
        r, g1, g2 = model.r, model.g1, model.g2
        return lambda y: r * (y[0] * y[0]) - (g1 * y[1] + g2 * y[2]) * (y[1] + y[2])
    if isinstance(model, BrackenParams) and model.alpha >= ALPHA_ZERO_TOL:
        r, g, a = model.r, model.g, model.alpha
        return lambda y: r * y[0] ** a - g * y[1] ** a

    def inv(comps) -> float:
        red_term, green_term = strength_terms(model, comps)
        return red_term - green_term

    return inv


def invariant(model: ModelSpec, state: State) -> float:
    """Conserved quantity, oriented red minus green.

    For alpha > 0 a positive value means green is annihilated first.  For
    Bracken models with alpha <= 0 the value is still conserved but neither
    side is eliminated in finite time.
    """
    check_shape(model, state)
    return invariant_function(model)(state.components)


def average_effectiveness(params: MixedParams, state: MixedState) -> float:
    total = state.green1 + state.green2
    if total <= 0:
        raise DomainError("average effectiveness undefined with no green units")
    return (params.g1 * state.green1 + params.g2 * state.green2) / total


def predict_winner(model: ModelSpec, state: State) -> Verdict:
    check_shape(model, state)
    if isinstance(model, BrackenParams) and model.alpha <= ALPHA_ZERO_TOL:
        raise UnsupportedModelError(
            f"alpha = {model.alpha:g} <= 0: neither side is annihilated in finite time"
        )
    red_term, green_term = strength_terms(model, state.components)
    value = red_term - green_term
    band = DRAW_EPS * abs(red_term)
    if value > band:
        return Verdict.RED
    if value < -band:
        return Verdict.GREEN
    return Verdict.DRAW


def rescale_units(
    params: AimedParams, initial: ForceState, n: float
) -> tuple[AimedParams, ForceState]:
    """Re-express green in groups of ``n`` units.

    Green's count drops by ``n``, its effectiveness rises by ``n`` and red's
    effectiveness against the bigger groups falls by ``n``; the invariant
    shrinks by exactly ``1/n`` and the outcome is unchanged.
    """
    if not n >= 1:
        raise ValueError(f"group size must be >= 1, got {n!r}")
    return (
        AimedParams(params.r / n, params.g * n),
        ForceState(initial.red, initial.green / n),
    )
