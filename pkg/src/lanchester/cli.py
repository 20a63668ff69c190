"""Command-line front end.

    lanchester predict  --scenario battle.json
    lanchester simulate --scenario battle.json --out traj.csv [--dt ..] [--t-max ..] [--threshold ..]
    lanchester tactics  --scenario battle.json
    lanchester fit      traj.csv

Exit codes: 0 success, 1 invalid input or unsupported request, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analytic import aimed_terminal
from .errors import (
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    NumericalFailure,
    UnsupportedModelError,
)
from .estimate import fit_bracken
from .models import AimedParams, invariant, predict_winner, rate
from .scenario import DEFAULT_PRECISION, DivideTactic, Scenario, ScenarioError, parse_scenario, scenario_to_dict
from .simulate import SimControls, Trajectory, default_controls, integrate
from .tactics import (
    divide_and_conquer,
    optimal_fighting_fraction,
    optimal_split,
    optimal_support_ratio,
    total_effectiveness_at_ratio,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

CURVE_POINTS = 41


class UsageError(Exception):
    """Bad input detected by the CLI itself; maps to exit code 1."""


def _round(x: Optional[float], precision: int) -> Optional[float]:
    if x is None:
        return None
    return float(f"{x:.{precision}g}")


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}g}"


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_scenario(text)


def _report(sc: Scenario, verdict, end_time, survivors, inv0, max_drift, final=None) -> dict:
    p = sc.precision
    doc = {
        "scenario": scenario_to_dict(sc),
        "verdict": verdict,
        "end_time": _round(end_time, p),
        "survivors": _round(survivors, p),
        "invariant_initial": _round(inv0, p),
        "max_drift": _round(max_drift, p),
    }
    if final is not None:
        doc["final"] = {k: _round(v, p) for k, v in final.items()}
    doc["version"] = __version__
    return doc


def cmd_predict(args) -> int:
    sc = _load_scenario(args.scenario)
    try:
        verdict = predict_winner(sc.model, sc.initial)
        inv0 = invariant(sc.model, sc.initial)
    except UnsupportedModelError as exc:
        raise UsageError(f"cannot predict: {exc} (no conserved quantity available)") from None
    end_time = survivors = None
    if isinstance(sc.model, AimedParams) and any(sc.initial.components):
        term = aimed_terminal(sc.model, sc.initial)
        end_time, survivors = term.end_time, term.survivors
    _emit(_report(sc, verdict.value, end_time, survivors, inv0, None))
    return EXIT_OK


def _controls(sc: Scenario, args) -> SimControls:
    base = default_controls(sc.model, sc.initial)
    dt = args.dt if args.dt is not None else sc.sim.dt if sc.sim.dt is not None else base.dt
    t_max = args.t_max if args.t_max is not None else sc.sim.t_max if sc.sim.t_max is not None else base.t_max
    threshold = args.threshold if args.threshold is not None else sc.sim.stop_threshold
    try:
        return SimControls(dt, t_max, threshold)
    except ValueError as exc:
        raise UsageError(f"invalid simulation controls: {exc}") from None


def write_csv(traj: Trajectory, path: str, precision: int = DEFAULT_PRECISION) -> None:
    """Write atomically: a temp file in the target directory, then rename."""
    header = ",".join(("t",) + traj.columns)
    lines = [header]
    for t, row in zip(traj.times, traj.states):
        lines.append(",".join(_fmt(float(v), precision) for v in (t, *row)))
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".traj-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_simulate(args) -> int:
    sc = _load_scenario(args.scenario)
    try:
        rate(sc.model, sc.initial)
    except (DomainError, OverflowError) as exc:
        raise UsageError(f"initial state is outside the model's domain: {exc}") from None
    controls = _controls(sc, args)
    try:
        traj, outcome = integrate(sc.model, sc.initial, controls)
    except (NumericalFailure, DomainError) as exc:
        doc = {"error": "numerical-failure", "message": str(exc)}
        if isinstance(exc, NumericalFailure):
            t, comps = exc.last_good
            doc["last_good"] = {"t": t, "state": list(comps)}
        sys.stderr.write(json.dumps(doc) + "\n")
        return EXIT_NUMERICAL
    write_csv(traj, args.out, sc.precision)
    try:
        inv0 = invariant(sc.model, sc.initial)
    except (UnsupportedModelError, DomainError):
        inv0 = None
    verdict = "timeout" if outcome.timed_out else outcome.verdict.value
    final = dict(zip(traj.columns, outcome.final.components))
    _emit(_report(sc, verdict, outcome.end_time, outcome.survivors, inv0, outcome.max_drift, final))
    return EXIT_OK


def cmd_tactics(args) -> int:
    sc = _load_scenario(args.scenario)
    p = sc.precision
    tac = sc.tactics
    if tac is None:
        raise UsageError("scenario has no tactics block")
    if isinstance(tac, DivideTactic):
        if not isinstance(sc.model, AimedParams):
            raise UsageError("force division needs the aimed model")
        red0, green0 = sc.initial.red, sc.initial.green
        plan = divide_and_conquer(sc.model, red0, green0, tac.n)
        doc = {
            "tactic": "divide",
            "n_parts": plan.n_parts,
            "phases": [
                {
                    "red_committed": _round(ph.red_committed, p),
                    "green_entering": _round(ph.green_entering, p),
                    "green_surviving": _round(ph.green_surviving, p),
                    "red_surviving": _round(ph.red_surviving, p),
                    "winner": ph.result.verdict.value if ph.result else None,
                }
                for ph in plan.phases
            ],
            "final_red": _round(plan.final_red, p),
            "final_green": _round(plan.final_green, p),
            "final_green_fraction": _round(plan.final_green / green0, p) if green0 > 0 else None,
            "final_invariant": _round(plan.final_invariant, p),
        }
    else:
        best = optimal_split(tac.n, tac.f0, tac.kappa)
        s_star = optimal_support_ratio(tac.kappa)
        s_hi = max(2.0, 3.0 * s_star)
        curve = [
            {"s": _round(s, p), "f_tot": _round(total_effectiveness_at_ratio(s, tac.kappa, tac.f0), p)}
            for s in np.linspace(0.0, s_hi, CURVE_POINTS)
        ]
        doc = {
            "tactic": "support",
            "optimal_fraction": _round(optimal_fighting_fraction(tac.kappa), p),
            "optimal_ratio": _round(s_star, p),
            "optimum": {
                "total": best.total,
                "fighting": best.fighting,
                "support": best.support,
                "kappa": _round(best.kappa, p),
                "base_eff": _round(best.base_eff, p),
                "effectiveness": _round(best.effectiveness, p),
                "strength": _round(best.strength, p),
            },
            "f_tot_at_optimum": _round(total_effectiveness_at_ratio(s_star, tac.kappa, tac.f0), p),
            "curve": curve,
        }
    doc["version"] = __version__
    _emit(doc)
    return EXIT_OK


def read_csv(path: str) -> Trajectory:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if not rows or [c.strip() for c in rows[0]] != ["t", "red", "green"]:
        raise UsageError("validation error: CSV header must be t,red,green")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise UsageError(f"validation error: line {lineno} has {len(row)} fields, expected 3")
        try:
            t, red, green = (float(c) for c in row)
        except ValueError:
            raise UsageError(f"validation error: line {lineno} is not numeric") from None
        if not all(np.isfinite((t, red, green))):
            raise UsageError(f"validation error: line {lineno} has a non-finite value")
        if red < 0 or green < 0:
            raise UsageError(f"validation error: line {lineno} has a negative strength")
        data.append((t, red, green))
    if not data:
        raise InsufficientDataError("CSV has no data rows")
    arr = np.array(data)
    return Trajectory(arr[:, 0], arr[:, 1:], None)


def cmd_fit(args) -> int:
    traj = read_csv(args.csv)
    p = args.precision
    try:
        fit = fit_bracken(traj)
    except DomainError as exc:
        raise UsageError(f"validation error: {exc}") from None
    _emit(
        {
            "p": _round(fit.params.p, p),
            "q": _round(fit.params.q, p),
            "r": _round(fit.params.r, p),
            "g": _round(fit.params.g, p),
            "alpha": _round(fit.alpha, p),
            "residual": _round(fit.residual, p),
            "samples_used": fit.samples_used,
            "version": __version__,
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lanchester", description="Lanchester attrition models")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="winner from the conserved quantity, no simulation")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="integrate the scenario, write a CSV trajectory")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--threshold", type=float, help="elimination strength for both sides")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tactics", help="force division or support-ratio analysis")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_tactics)

    p = sub.add_parser("fit", help="fit Bracken exponents to a t,red,green CSV")
    p.add_argument("csv")
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION, choices=range(1, 18), metavar="1-17")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; 2 is reserved for numerical failure here.
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except ScenarioError as exc:
        sys.stderr.write(f"invalid scenario: {exc}\n")
    except (InsufficientDataError, DegenerateFitError) as exc:
        sys.stderr.write(f"{exc.name}: {exc}\n")
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
