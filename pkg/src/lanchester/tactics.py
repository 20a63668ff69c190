"""Tactical calculators: defeating a divided enemy, and sizing support troops."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import TerminalResult, aimed_terminal
from .models import AimedParams, ForceState, Verdict


@dataclass(frozen=True)
class Phase:
    red_committed: float
    green_entering: float
    green_surviving: float
    red_surviving: float
    result: TerminalResult | None  # None when green was already gone


@dataclass(frozen=True)
class DivisionPlan:
    """Green fights ``n_parts`` equal red detachments one after another.

    ``final_invariant`` is ``r*R_F**2 - g*G_F**2`` for the surviving totals,
    so when green wins every phase it equals ``-g*G_F**2``.
    """

    n_parts: int
    phases: tuple[Phase, ...]
    final_red: float
    final_green: float
    final_invariant: float


def divide_and_conquer(
    params: AimedParams, red_total: float, green_total: float, n: int
) -> DivisionPlan:
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if red_total < 0 or green_total < 0:
        raise ValueError("force totals must be nonnegative")
    part = red_total / n
    green = float(green_total)
    red_left = 0.0
    phases = []
    for _ in range(n):
        if green <= 0.0:
            phases.append(Phase(part, 0.0, 0.0, part, None))
            red_left += part
            continue
        res = aimed_terminal(params, ForceState(part, green))
        if res.verdict is Verdict.GREEN:
            survivors_red, survivors_green = 0.0, res.survivors
        elif res.verdict is Verdict.RED:
            survivors_red, survivors_green = res.survivors, 0.0
        else:
            survivors_red = survivors_green = 0.0
        phases.append(Phase(part, green, survivors_green, survivors_red, res))
        red_left += survivors_red
        green = survivors_green
    final_inv = params.r * red_left**2 - params.g * green**2
    return DivisionPlan(n, tuple(phases), red_left, green, final_inv)


@dataclass(frozen=True)
class SupportSplit:
    total: float
    fighting: float
    support: float
    kappa: float
    base_eff: float
    effectiveness: float
    strength: float


def _check_kappa(kappa: float) -> None:
    if not 0 <= kappa < 2:
        raise ValueError(f"kappa must lie in [0, 2), got {kappa!r}")


def support_strength(n_total: float, p_fighting: float, f0: float, kappa: float) -> SupportSplit:
    """Fighting strength ``f*P**2`` when ``N - P`` troops support ``P`` fighters.

    Support lifts effectiveness as ``f = f0 * ((N - P)/P)**kappa``.
    """
    if not 0 < p_fighting <= n_total:
        raise ValueError(f"need 0 < P <= N, got P={p_fighting!r}, N={n_total!r}")
    if f0 <= 0:
        raise ValueError(f"f0 must be > 0, got {f0!r}")
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa!r}")
    support = n_total - p_fighting
    eff = f0 * (support / p_fighting) ** kappa
    return SupportSplit(
        total=n_total,
        fighting=p_fighting,
        support=support,
        kappa=kappa,
        base_eff=f0,
        effectiveness=eff,
        strength=eff * p_fighting**2,
    )


def optimal_fighting_fraction(kappa: float) -> float:
    _check_kappa(kappa)
    return 1.0 - kappa / 2.0


def optimal_support_ratio(kappa: float) -> float:
    """Support units per fighter at the optimum, ``(kappa/2) / (1 - kappa/2)``."""
    _check_kappa(kappa)
    return (kappa / 2.0) / (1.0 - kappa / 2.0)


def optimal_split(n_total: int, f0: float, kappa: float) -> SupportSplit:
    """Best integer number of fighters: the better of floor and ceiling of the continuum optimum."""
    _check_kappa(kappa)
    if n_total < 1 or int(n_total) != n_total:
        raise ValueError(f"N must be a positive integer, got {n_total!r}")
    ideal = optimal_fighting_fraction(kappa) * n_total
    candidates = {min(max(c, 1), int(n_total)) for c in (math.floor(ideal), math.ceil(ideal))}
    splits = [support_strength(n_total, c, f0, kappa) for c in sorted(candidates)]
    return max(splits, key=lambda s: s.strength)


def total_effectiveness_at_ratio(s: float, kappa: float, f0: float = 1.0) -> float:
    """Effectiveness per unit of *total* numbers squared, ``f*P**2/N**2``.

    With support ratio ``s = (N - P)/P`` this is ``f0 * s**kappa / (1 + s)**2``.
    """
    if s < 0:
        raise ValueError(f"support ratio must be >= 0, got {s!r}")
    _check_kappa(kappa)
    return f0 * s**kappa / (1.0 + s) ** 2


def infer_kappa(optimal_ratio: float) -> float:
    """Exponent under which ``optimal_ratio`` support per fighter is optimal."""
    if not optimal_ratio > 0:
        raise ValueError(f"optimal ratio must be > 0, got {optimal_ratio!r}")
    return 2.0 * optimal_ratio / (1.0 + optimal_ratio)
