"""Fixed-step RK4 integration of any attrition model, and the salvo recursion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NumericalFailure, UnsupportedModelError
from .models import (
    AimedParams,
    ForceState,
    MixedParams,
    MixedState,
    ModelSpec,
    State,
    Verdict,
    check_shape,
    invariant_function,
    rate_function,
    state_from_components,
)

MAX_SAMPLES = 100_000

# Bisection stops once the termination step is pinned down to this fraction of dt.
EVENT_RESOLUTION = 1e-3

DEFAULT_RELATIVE_THRESHOLD = 1e-6

HORIZON_EFOLDS = 200.0


@dataclass(frozen=True)
class SimControls:
    """Step size, horizon and elimination level for ``integrate``.

    ``stop_threshold=None`` means each side is eliminated once it falls to
    1e-6 of its own initial strength.
    """

    dt: float
    t_max: float
    stop_threshold: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt!r}")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be finite and > 0, got {self.t_max!r}")
        if self.dt > self.t_max:
            raise ValueError(f"dt ({self.dt}) must not exceed t_max ({self.t_max})")
        if self.stop_threshold is not None and not (
            math.isfinite(self.stop_threshold) and self.stop_threshold >= 0
        ):
            raise ValueError(f"stop_threshold must be >= 0, got {self.stop_threshold!r}")


def _per_capita_losses(model: ModelSpec, comps: tuple) -> list[float]:
    f = rate_function(model)
    d = f(comps)
    if isinstance(model, MixedParams):
        sides = [(comps[0], d[0]), (comps[1] + comps[2], d[1] + d[2])]
    else:
        sides = list(zip(comps, d))
    return [-dx / x for x, dx in sides if x > 0 and dx < 0]


def default_controls(model: ModelSpec, initial: State) -> SimControls:
    """Controls scaled to the battle's own timescale.

    The fastest initial per-capita loss rate sets ``dt`` (a thousand steps per
    e-folding); the slowest sets the horizon, with room for loss rates that
    decay as the battle goes on.
    """
    check_shape(model, initial)
    rates = [x for x in _per_capita_losses(model, initial.components) if math.isfinite(x)]
    if not rates:
        return SimControls(1e-3, 1.0)
    return SimControls(1e-3 / max(rates), HORIZON_EFOLDS / min(rates))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-stamped strengths; one row of ``states`` per entry of ``times``.

    Columns of ``states`` follow the state's ``components`` order.
    ``model`` is ``None`` for trajectories loaded from outside.
    """

    times: np.ndarray
    states: np.ndarray
    model: Optional[ModelSpec] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 2 or len(states) != len(times):
            raise ValueError("states must be a 2-D array with one row per time")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def columns(self) -> tuple[str, ...]:
        if self.states.shape[1] == 3:
            return ("red", "green1", "green2")
        return ("red", "green")

    @property
    def red(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def green(self) -> np.ndarray:
        """Total green strength."""
        return self.states[:, 1:].sum(axis=1)

    @property
    def samples(self) -> list[tuple[float, State]]:
        make = MixedState if self.states.shape[1] == 3 else ForceState
        return [(float(t), make(*(float(v) for v in row))) for t, row in zip(self.times, self.states)]


@dataclass(frozen=True)
class SimOutcome:
    """Result of a run.  ``verdict`` is ``None`` when the horizon was hit first.

    ``max_drift`` is ``None`` for models without a conserved quantity.
    ``identity_error`` is only filled by ``run_salvos``: the largest per-salvo
    residual of ``inv(next) = (1 - r*g) * inv(prev)``, relative to the size
    of the strength terms ``r*R**2 + g*G**2`` (the ratio itself is
    ill-conditioned near a draw).
    """

    verdict: Optional[Verdict]
    end_time: float
    final: State
    max_drift: Optional[float]
    identity_error: Optional[float] = None

    @property
    def timed_out(self) -> bool:
        return self.verdict is None

    @property
    def survivors(self) -> float:
        if self.verdict is Verdict.RED:
            return self.final.red
        if self.verdict is Verdict.GREEN:
            return self.final.total_green
        return 0.0


class _DriftTracker:
    def __init__(self, model: ModelSpec, comps: tuple):
        self.inv = None
        self.ref = None
        self.max_drift = None
        try:
            self.inv = invariant_function(model)
        except UnsupportedModelError:
            return
        try:
            self.ref = self.inv(comps)
        except DomainError:
            return
        self.scale = max(1.0, abs(self.ref))
        self.max_drift = 0.0

    def update(self, comps: tuple) -> None:
        if self.max_drift is None:
            return
        try:
            value = self.inv(comps)
        except DomainError:
            return
        drift = abs(value - self.ref) / self.scale
        if drift > self.max_drift:
            self.max_drift = drift


def _decimate(times: list, states: list) -> tuple[list, list]:
    n = len(times)
    if n <= MAX_SAMPLES:
        return times, states
    keep = np.unique(np.round(np.linspace(0, n - 1, MAX_SAMPLES)).astype(int))
    return [times[i] for i in keep], [states[i] for i in keep]


def _stepper_2(f):
    """RK4 step for two-component models, fused with the failure check and
    the clamp at zero.  Unrolled because this is the hot loop."""

    def step(t, y, h):
        a, b = y
        hh = 0.5 * h
        try:
            k1a, k1b = f(y)
            u, v = a + hh * k1a, b + hh * k1b
            k2a, k2b = f((u if u > 0.0 else 0.0, v if v > 0.0 else 0.0))
            u, v = a + hh * k2a, b + hh * k2b
            k3a, k3b = f((u if u > 0.0 else 0.0, v if v > 0.0 else 0.0))
            u, v = a + h * k3a, b + h * k3b
            k4a, k4b = f((u if u > 0.0 else 0.0, v if v > 0.0 else 0.0))
        except (OverflowError, ZeroDivisionError) as exc:
            raise NumericalFailure(f"step at t={t} failed: {exc}", (t, y)) from exc
        h6 = h / 6.0
        u = a + h6 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        v = b + h6 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        if not math.isfinite(u + v):
            raise NumericalFailure(f"non-finite state after step at t={t}", (t, y))
        return (u if u > 0.0 else 0.0, v if v > 0.0 else 0.0)

    return step


def _stepper_n(f):
    """Generic RK4 step with stage clamping, failure check and clamp at zero."""

    def step(t, y, h):
        try:
            k1 = f(y)
            k2 = f(tuple(max(0.0, a + 0.5 * h * b) for a, b in zip(y, k1)))
            k3 = f(tuple(max(0.0, a + 0.5 * h * b) for a, b in zip(y, k2)))
            k4 = f(tuple(max(0.0, a + h * b) for a, b in zip(y, k3)))
        except (OverflowError, ZeroDivisionError) as exc:
            raise NumericalFailure(f"step at t={t} failed: {exc}", (t, y)) from exc
        out = tuple(
            a + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
        )
        if not math.isfinite(sum(out)):
            raise NumericalFailure(f"non-finite state after step at t={t}", (t, y))
        return tuple(v if v > 0.0 else 0.0 for v in out)

    return step


def _bisect_event(step, finished, t, y, h, dt):
    """Shrink the final step until it lands just past the elimination."""
    lo, hi = 0.0, h
    y_hit = None
    while hi - lo > dt * EVENT_RESOLUTION:
        mid = 0.5 * (lo + hi)
        y_mid = step(t, y, mid)
        if finished(y_mid):
            hi, y_hit = mid, y_mid
        else:
            lo = mid
    return hi, y_hit


def _march(step, finished, inv, ref, y0, dt, t_max):
    """Fixed steps from 0 until a side is eliminated or ``t_max`` is reached.

    Returns the samples, the final time and state, and the largest absolute
    invariant deviation seen (0 when ``inv`` is None).
    """
    times, states = [0.0], [y0]
    t, y = 0.0, y0
    worst = 0.0
    done = finished(y)
    i = 0
    while not done and t < t_max:
        i += 1
        t_next = i * dt
        if t_next > t_max:
            t_next = t_max
        h = t_next - t
        y_next = step(t, y, h)
        done = finished(y_next)
        if done:
            hi, y_hit = _bisect_event(step, finished, t, y, h, dt)
            t_next = t + hi
            if y_hit is not None:
                y_next = y_hit
        t, y = t_next, y_next
        times.append(t)
        states.append(y)
        if inv is not None:
            try:
                d = abs(inv(y) - ref)
            except DomainError:
                continue
            if d > worst:
                worst = d
    return times, states, t, y, worst


def integrate(
    model: ModelSpec, initial: State, controls: Optional[SimControls] = None
) -> tuple[Trajectory, SimOutcome]:
    """Classical RK4 with clamping at zero and a bisected elimination event.

    Stage states are clamped to the nonnegative orthant before the rate law
    is evaluated, so fractional powers never see a negative base.
    """
    check_shape(model, initial)
    if controls is None:
        controls = default_controls(model, initial)
    f = rate_function(model)
    mixed = isinstance(model, MixedParams)
    y0 = initial.components

    if controls.stop_threshold is None:
        red_stop = DEFAULT_RELATIVE_THRESHOLD * initial.red
        green_stop = DEFAULT_RELATIVE_THRESHOLD * initial.total_green
    else:
        red_stop = green_stop = controls.stop_threshold

    def losers(y) -> tuple[bool, bool]:
        green = y[1] + y[2] if mixed else y[1]
        return y[0] <= red_stop, green <= green_stop

    if mixed:
        def finished(y) -> bool:
            return y[0] <= red_stop or y[1] + y[2] <= green_stop
    else:
        def finished(y) -> bool:
            return y[0] <= red_stop or y[1] <= green_stop

    step = _stepper_2(f) if len(y0) == 2 else _stepper_n(f)

    drift = _DriftTracker(model, y0)
    tracking = drift.max_drift is not None
    times, states, t, y, worst = _march(
        step, finished, drift.inv if tracking else None, drift.ref, y0, controls.dt, controls.t_max
    )

    if tracking:
        drift.max_drift = worst / drift.scale
    out = losers(y)
    red_out, green_out = out
    if red_out and green_out:
        verdict = Verdict.DRAW
    elif red_out:
        verdict = Verdict.GREEN
    elif green_out:
        verdict = Verdict.RED
    else:
        verdict = None

    times, states = _decimate(times, states)
    traj = Trajectory(np.array(times), np.array(states), model)
    outcome = SimOutcome(verdict, t, state_from_components(model, y), drift.max_drift)
    return traj, outcome


def drift_report(traj: Trajectory) -> list[tuple[float, float]]:
    """Relative invariant drift of every sample against the first one."""
    if traj.model is None:
        raise ValueError("trajectory carries no model; drift is undefined")
    inv = invariant_function(traj.model)
    rows = [tuple(float(v) for v in row) for row in traj.states]
    ref = inv(rows[0])
    scale = max(1.0, abs(ref))
    return [(float(t), abs(inv(row) - ref) / scale) for t, row in zip(traj.times, rows)]


def _salvo_raw(params: AimedParams, red: float, green: float) -> tuple[float, float]:
    return red - params.g * green, green - params.r * red


def _term_scale(params: AimedParams, y) -> float:
    return params.r * (y[0] * y[0]) + params.g * (y[1] * y[1])


def discrete_step(params: AimedParams, state: ForceState) -> ForceState:
    """One simultaneous salvo exchange, clamped at zero."""
    red, green = _salvo_raw(params, state.red, state.green)
    return ForceState(max(red, 0.0), max(green, 0.0))


def run_salvos(
    params: AimedParams, initial: ForceState, max_salvos: int
) -> tuple[Trajectory, SimOutcome]:
    if max_salvos < 1:
        raise ValueError(f"max_salvos must be >= 1, got {max_salvos!r}")
    inv = invariant_function(params)
    factor = 1.0 - params.r * params.g
    drift = _DriftTracker(params, initial.components)
    identity_error = 0.0

    y = initial.components
    states = [y]
    n = 0
    while n < max_salvos and y[0] > 0 and y[1] > 0:
        raw = _salvo_raw(params, *y)
        scale = max(_term_scale(params, y), _term_scale(params, raw))
        residual = abs(inv(raw) - factor * inv(y))
        identity_error = max(identity_error, residual / scale)
        y = (max(raw[0], 0.0), max(raw[1], 0.0))
        states.append(y)
        drift.update(y)
        n += 1

    if y[0] == 0 and y[1] == 0:
        verdict = Verdict.DRAW
    elif y[0] == 0:
        verdict = Verdict.GREEN
    elif y[1] == 0:
        verdict = Verdict.RED
    else:
        verdict = None

    traj = Trajectory(np.arange(len(states), dtype=float), np.array(states), params)
    outcome = SimOutcome(verdict, float(n), ForceState(*y), drift.max_drift, identity_error)
    return traj, outcome
