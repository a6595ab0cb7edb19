"""Command-line interface.

    sparselqr simulate      one scenario, three policies -> trajectory.csv
    sparselqr sweep         first-action gap over (T, k)  -> sweep.csv
    sparselqr diagnose      table-coefficient decay       -> diagnostics.csv
    sparselqr verify-bounds Monte Carlo bound check       -> bounds.csv
    sparselqr show-model    print the resolved, validated config

Without --config every command runs the built-in planar double integrator.
Config files are YAML (JSON works too); see the README for the schema.
Exit codes: 0 success, 2 invalid config or arguments, 3 stability-margin
assumption violated without --override-assumption-check.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from .lqr import (
    DefinitenessError,
    ModelDimensionError,
    SystemModel,
    riccati_backward,
    validate_model,
)
from .disturbance import ProbabilityModel
from .bounds import AssumptionViolatedError
from .experiments import (
    ExperimentConfig,
    builtin_double_integrator,
    run_bound_verification,
    run_convergence_diagnostics,
    run_sweep,
    run_trajectory_experiment,
)


def _model_from_doc(doc: dict) -> SystemModel:
    if "builtin" in doc:
        if doc["builtin"] != "double_integrator":
            raise ValueError(f"unknown builtin model {doc['builtin']!r}")
        from .experiments import _double_integrator

        return _double_integrator(int(doc.get("horizon", 1000)), float(doc.get("dt", 0.005)))
    missing = [k for k in ("A", "B", "Q", "Q_T", "R", "horizon") if k not in doc]
    if missing:
        raise ValueError(f"model section is missing {missing}")
    return SystemModel(
        A=np.array(doc["A"], dtype=float),
        B=np.array(doc["B"], dtype=float),
        Q=np.array(doc["Q"], dtype=float),
        Q_T=np.array(doc["Q_T"], dtype=float),
        R=np.array(doc["R"], dtype=float),
        T=int(doc["horizon"]),
    )


def config_from_file(path: str | Path) -> ExperimentConfig:
    """Parse a YAML/JSON config file into an ExperimentConfig."""
    doc = yaml.safe_load(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must hold a mapping")

    model = _model_from_doc(doc.get("model", {"builtin": "double_integrator"}))
    _, base = builtin_double_integrator(model.T)
    cfg = dataclasses.replace(base, model=model)

    if "x0" in doc:
        cfg.x0 = np.array(doc["x0"], dtype=float)
    for key in ("seed", "trials"):
        if key in doc:
            setattr(cfg, key, int(doc[key]))
    if "out_dir" in doc:
        cfg.out_dir = Path(doc["out_dir"])
    if "budgets" in doc:
        cfg.budgets = tuple(int(b) for b in doc["budgets"])
    if "override_assumption_check" in doc:
        cfg.override_assumption_check = bool(doc["override_assumption_check"])

    dist = doc.get("disturbances", {})
    if "w_hat" in dist:
        cfg.w_hat = float(dist["w_hat"])
    if "count" in dist:
        cfg.count = int(dist["count"])
    if "value_law" in dist:
        cfg.value_law = str(dist["value_law"])
    if "times" in dist and dist["times"] is not None:
        cfg.times = tuple(int(t) for t in dist["times"])
        cfg.count = len(cfg.times)
    if "values" in dist and dist["values"] is not None:
        cfg.values = np.array(dist["values"], dtype=float)
    if "scenario_file" in dist and dist["scenario_file"] is not None:
        cfg.scenario_file = str(dist["scenario_file"])

    prob = doc.get("probability_model")
    if prob is not None:
        if isinstance(prob, str):
            kind, table = prob, None
        else:
            kind, table = prob.get("kind", "uniform_conditional"), prob.get("table")
        if kind == "uniform_conditional":
            cfg.probability = ProbabilityModel.uniform()
        else:
            cfg.probability = ProbabilityModel.from_table(np.array(table, dtype=float))

    sweep = doc.get("sweep", {})
    if "horizons" in sweep:
        cfg.sweep_horizons = tuple(int(t) for t in sweep["horizons"])
    if "budgets" in sweep:
        cfg.sweep_budgets = tuple(int(k) for k in sweep["budgets"])

    diag = doc.get("diagnostics", {})
    if "horizons" in diag:
        cfg.diag_horizons = tuple(int(t) for t in diag["horizons"])
    if "max_k" in diag:
        cfg.diag_max_k = int(diag["max_k"])

    return cfg


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = Path(args.out)
    if args.trials is not None:
        cfg.trials = args.trials
    if args.horizon is not None:
        cfg.model = dataclasses.replace(cfg.model, T=args.horizon)
    if args.budget is not None:
        if args.command == "simulate":
            cfg.count = args.budget
            cfg.times = None  # a new count invalidates explicit times
        elif args.command == "sweep":
            cfg.sweep_budgets = tuple(range(0, args.budget + 1))
        elif args.command == "diagnose":
            cfg.diag_max_k = args.budget
        else:
            cfg.budgets = (args.budget,)
    if args.override_assumption_check:
        cfg.override_assumption_check = True
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparselqr",
        description="Finite-horizon LQR under sparse disturbances: simulation and bound checks.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML/JSON config file (default: built-in model)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="override the output directory")
    common.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    common.add_argument("--horizon", type=int, help="override the model horizon T")
    common.add_argument(
        "--budget", type=int,
        help="disturbance budget: scenario size (simulate), grid maximum "
        "(sweep/diagnose), or the single D to verify (verify-bounds)",
    )
    common.add_argument(
        "--override-assumption-check", action="store_true",
        help="proceed when the closed loop is not a contraction; only the "
        "disturbance-gap bound is then checked",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common],
                   help="roll out all three policies on one scenario")
    sub.add_parser("sweep", parents=[common],
                   help="first-action gap between aware and blind over (T, k)")
    sub.add_parser("diagnose", parents=[common],
                   help="decay of the anticipation coefficients with horizon")
    sub.add_parser("verify-bounds", parents=[common],
                   help="Monte Carlo check of the closed-form bounds")
    sub.add_parser("show-model", parents=[common],
                   help="print the resolved, validated configuration")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfg = config_from_file(args.config)
        else:
            _, cfg = builtin_double_integrator()
        cfg = _apply_overrides(cfg, args)
        validate_model(cfg.model)

        if args.command == "show-model":
            doc = cfg.canonical_dict()
            riccati = riccati_backward(cfg.model)
            doc["derived"] = {
                "n": cfg.model.n,
                "m": cfg.model.m,
                "gamma_hat": riccati.gamma_hat,
                "p_hat": riccati.p_hat,
                "unstable_steps": riccati.unstable_steps,
            }
            print(json.dumps(doc, indent=2))
            return 0

        runner = {
            "simulate": run_trajectory_experiment,
            "sweep": run_sweep,
            "diagnose": run_convergence_diagnostics,
            "verify-bounds": run_bound_verification,
        }[args.command]
        path = runner(cfg)
        print(f"wrote {path}")
        return 0
    except AssumptionViolatedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ModelDimensionError, DefinitenessError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
