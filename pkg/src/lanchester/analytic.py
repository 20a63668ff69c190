"""Closed-form solutions for the aimed-fire and asymmetric models."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .models import (
    AimedParams,
    AsymmetricParams,
    ForceState,
    Verdict,
    predict_winner,
    strength_terms,
)


@dataclass(frozen=True)
class TerminalResult:
    """How an aimed-fire battle ends.

    ``end_time`` is ``None`` for a draw: both sides decay together and are
    only annihilated in the limit.
    """

    verdict: Verdict
    end_time: Optional[float]
    survivors: float


def _artanh(m: float) -> float:
    return 0.5 * math.log((1.0 + m) / (1.0 - m))


def aimed_terminal(params: AimedParams, initial: ForceState) -> TerminalResult:
    if initial.red == 0 and initial.green == 0:
        raise ValueError("both initial strengths are zero")
    verdict = predict_winner(params, initial)
    if verdict is Verdict.DRAW:
        return TerminalResult(verdict, None, 0.0)

    red_term, green_term = strength_terms(params, initial.components)
    k = math.sqrt(params.r * params.g)
    if verdict is Verdict.RED:
        survivors = math.sqrt((red_term - green_term) / params.r)
        m = math.sqrt(params.g) * initial.green / (math.sqrt(params.r) * initial.red)
    else:
        survivors = math.sqrt((green_term - red_term) / params.g)
        m = math.sqrt(params.r) * initial.red / (math.sqrt(params.g) * initial.green)
    return TerminalResult(verdict, _artanh(m) / k, survivors)


def aimed_state_at(params: AimedParams, initial: ForceState, t: float) -> ForceState:
    """Hyperbolic solution of the aimed-fire equations at time ``t``.

    Past the moment one side is wiped out the terminal state is returned
    (loser at 0, winner at its survivor level) instead of continuing the
    hyperbolae into negative strengths.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    if initial.red == 0 and initial.green == 0:
        return initial
    end = aimed_terminal(params, initial)
    if end.end_time is not None and t >= end.end_time:
        if end.verdict is Verdict.RED:
            return ForceState(end.survivors, 0.0)
        return ForceState(0.0, end.survivors)

    r, g = params.r, params.g
    kt = math.sqrt(r * g) * t
    c, s = math.cosh(kt), math.sinh(kt)
    red = initial.red * c - math.sqrt(g / r) * initial.green * s
    green = initial.green * c - math.sqrt(r / g) * initial.red * s
    return ForceState(max(red, 0.0), max(green, 0.0))


def _check_reference(params: AsymmetricParams, initial: ForceState) -> None:
    if not math.isclose(initial.red, params.red_ref, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(
            f"initial red {initial.red!r} must equal the reference strength red_ref={params.red_ref!r}"
        )


def asym_state_at(params: AsymmetricParams, initial: ForceState, t: float) -> ForceState:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    _check_reference(params, initial)
    r, g, ref = params.r, params.g, params.red_ref
    green = initial.green * math.exp(-r * t)
    red = initial.red * math.exp(g * initial.green / (r * ref) * math.expm1(-r * t))
    return ForceState(red, green)


def asym_limit(params: AsymmetricParams, initial: ForceState) -> float:
    """Red strength left once green has decayed away entirely."""
    _check_reference(params, initial)
    return initial.red * math.exp(-params.g * initial.green / (params.r * params.red_ref))
