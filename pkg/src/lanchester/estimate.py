"""Recover Bracken exponents and coefficients from a recorded battle.

The generalized law is log-linear,

    ln(-dR/dt) = ln g + q ln R + p ln G
    ln(-dG/dt) = ln r + p ln R + q ln G

so both equations are stacked into one least-squares problem with shared
exponents ``(p, q)`` and separate intercepts.  Rates come from central
differences on interior samples.

The fitter is agnostic about what a "unit" is: re-expressing a side in
groups changes ``r`` and ``g`` but leaves ``p`` and ``q`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError, DomainError, InsufficientDataError
from .models import BrackenParams, ForceState, invariant
from .simulate import Trajectory

MIN_SAMPLES = 8

# Losses below this fraction of the side's initial strength are treated as zero.
LOSS_FLOOR = 1e-12

# Smallest admissible ratio of extreme singular values of the scaled design.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class FitResult:
    params: BrackenParams
    alpha: float
    residual: float
    samples_used: int


def _central_difference(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Second-order derivative estimate at interior points of a nonuniform grid."""
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    return (h0**2 * y[2:] - h1**2 * y[:-2] + (h1**2 - h0**2) * y[1:-1]) / (h0 * h1 * (h0 + h1))


def _window(traj: Trajectory) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = np.asarray(traj.times, dtype=float)
    red = np.asarray(traj.red, dtype=float)
    green = np.asarray(traj.green, dtype=float)
    if len(t) < MIN_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_SAMPLES} samples, got {len(t)}")
    if not (np.all(np.isfinite(red)) and np.all(np.isfinite(green))):
        raise DomainError("trajectory contains non-finite strengths")
    if np.any(red < 0) or np.any(green < 0):
        raise DomainError("trajectory contains negative strengths")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")
    # A side reaching zero ends the battle; trailing eliminated rows are dropped.
    alive = (red > 0) & (green > 0)
    end = len(t)
    while end > 0 and not alive[end - 1]:
        end -= 1
    if not np.all(alive[:end]):
        raise DomainError("zero strength inside the fitting window")
    return t[:end], red[:end], green[:end]


def fit_bracken(traj: Trajectory) -> FitResult:
    t, red, green = _window(traj)
    if len(t) < 3:
        raise InsufficientDataError(f"only {len(t)} samples with both sides present")

    loss_red = -_central_difference(t, red)
    loss_green = -_central_difference(t, green)
    r_mid, g_mid = red[1:-1], green[1:-1]
    usable = (loss_red > LOSS_FLOOR * red[0]) & (loss_green > LOSS_FLOOR * green[0])
    n = int(usable.sum())
    if n < MIN_SAMPLES:
        raise InsufficientDataError(
            f"only {n} interior samples with measurable losses on both sides (need {MIN_SAMPLES})"
        )

    ln_r, ln_g = np.log(r_mid[usable]), np.log(g_mid[usable])
    zeros, ones = np.zeros(n), np.ones(n)
    # Columns: ln g, ln r, p, q.
    design = np.vstack(
        [
            np.column_stack([ones, zeros, ln_g, ln_r]),
            np.column_stack([zeros, ones, ln_r, ln_g]),
        ]
    )
    target = np.concatenate([np.log(loss_red[usable]), np.log(loss_green[usable])])

    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0):
        raise DegenerateFitError("rank-deficient design: an all-zero column")
    scaled = design / norms
    sv = np.linalg.svd(scaled, compute_uv=False)
    if sv[-1] <= RANK_TOL * sv[0]:
        raise DegenerateFitError(
            "rank-deficient design: ln R and ln G are collinear "
            "(constant force ratio), so p and q cannot be separated"
        )
    coef, *_ = np.linalg.lstsq(scaled, target, rcond=None)
    ln_g_hat, ln_r_hat, p_hat, q_hat = coef / norms
    resid = target - design @ (coef / norms)
    rms = float(np.sqrt(np.mean(resid**2)))

    params = BrackenParams(r=math.exp(ln_r_hat), g=math.exp(ln_g_hat), p=float(p_hat), q=float(q_hat))
    return FitResult(params=params, alpha=params.alpha, residual=rms, samples_used=n)


def implied_invariant(fit: FitResult, state: ForceState) -> float:
    """Conserved quantity implied by the fitted law, red minus green."""
    return invariant(fit.params, state)
