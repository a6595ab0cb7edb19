"""Experiment harness: configs, deterministic CSV output, and the runners.

Four experiments, one CSV schema each (column order is fixed and documented
in the README):

    trajectory.csv   t, policy, x0..x{n-1}, u0..u{m-1}, stage_cost, disturbed
    sweep.csv        T, k, norm_diff
    diagnostics.csv  T, k, r0_norm, r_max_norm
    bounds.csv       trial, D, w_hat, emp_blind_vs_offline,
                     emp_blind_vs_nominal, emp_nominal_vs_offline,
                     thm3, thm4, thm5, ratio3, ratio4, ratio5,
                     assumption1_ok, degenerate

Every CSV gets a sidecar <name>.meta.json recording the package version,
the seed, and a hash of the resolved configuration; floats are written with
17 significant digits so identical configs reproduce identical bytes.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lqr import SystemModel, riccati_backward
from .disturbance import (
    DisturbanceScenario,
    ProbabilityModel,
    load_scenario,
    sample_scenario,
)
from .policies import (
    blind_action,
    da_action,
    da_precompute,
    offline_precompute,
    values_reverse_chronological,
)
from .simulate import rollout
from .bounds import verify_bounds

TRAJECTORY_CSV = "trajectory.csv"
SWEEP_CSV = "sweep.csv"
DIAGNOSTICS_CSV = "diagnostics.csv"
BOUNDS_CSV = "bounds.csv"


def _double_integrator(T: int, dt: float = 0.005) -> SystemModel:
    A = np.array([
        [1.0, dt, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, dt],
        [0.0, 0.0, 0.0, 1.0],
    ])
    B = np.array([
        [0.0, 0.0],
        [dt, 0.0],
        [0.0, 0.0],
        [0.0, dt],
    ])
    Q = np.diag([2.0, 1e-3, 1.0, 1e-3])
    R = np.diag([1e-2, 1e-2])
    return SystemModel(A=A, B=B, Q=Q, Q_T=Q.copy(), R=R, T=T)


@dataclass
class ExperimentConfig:
    """Everything a runner needs; resolved once, hashed into the sidecar.

    The disturbance block drives the simulate runner: explicit times and/or
    values pin the scenario, otherwise a single disturbance defaults to the
    horizon midpoint with a sampled value.  The sweep/diagnostic blocks hold
    their grid ranges; verify-bounds uses budgets and trials.
    """

    model: SystemModel
    x0: np.ndarray
    seed: int = 1234
    out_dir: Path = Path("out")
    trials: int = 500
    budgets: tuple[int, ...] = (1, 2, 4)
    w_hat: float = 0.3
    count: int = 1
    value_law: str = "sphere_surface"
    times: tuple[int, ...] | None = None
    values: np.ndarray | None = None
    scenario_file: str | None = None
    probability: ProbabilityModel = field(default_factory=ProbabilityModel.uniform)
    sweep_horizons: tuple[int, ...] = tuple(range(200, 4001, 200))
    sweep_budgets: tuple[int, ...] = tuple(range(0, 11))
    diag_horizons: tuple[int, ...] = (200, 400, 800, 1600, 3200)
    diag_max_k: int = 5
    override_assumption_check: bool = False

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        self.out_dir = Path(self.out_dir)

    def canonical_dict(self) -> dict:
        """JSON-ready view of everything that affects output content.

        out_dir is deliberately excluded: where files land does not change
        what is in them.
        """
        prob = {"kind": self.probability.kind}
        if self.probability.table is not None:
            prob["table"] = self.probability.table.tolist()
        return {
            "model": {
                "A": self.model.A.tolist(),
                "B": self.model.B.tolist(),
                "Q": self.model.Q.tolist(),
                "Q_T": self.model.Q_T.tolist(),
                "R": self.model.R.tolist(),
                "T": int(self.model.T),
            },
            "x0": self.x0.tolist(),
            "seed": int(self.seed),
            "trials": int(self.trials),
            "budgets": [int(b) for b in self.budgets],
            "disturbances": {
                "w_hat": float(self.w_hat),
                "count": int(self.count),
                "value_law": self.value_law,
                "times": None if self.times is None else [int(t) for t in self.times],
                "values": None if self.values is None else np.asarray(self.values).tolist(),
                "scenario_file": self.scenario_file,
            },
            "probability_model": prob,
            "sweep": {
                "horizons": [int(t) for t in self.sweep_horizons],
                "budgets": [int(k) for k in self.sweep_budgets],
            },
            "diagnostics": {
                "horizons": [int(t) for t in self.diag_horizons],
                "max_k": int(self.diag_max_k),
            },
            "override_assumption_check": bool(self.override_assumption_check),
        }

    def config_hash(self) -> str:
        doc = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(doc.encode()).hexdigest()


def builtin_double_integrator(T: int = 1000) -> tuple[SystemModel, ExperimentConfig]:
    """The planar double-integrator study: model plus its default config.

    Positions and velocities interleave as (y, vy, z, vz) with dt = 0.005;
    disturbances are position kicks of magnitude 0.3 on the unit circle in
    the (y, z) plane, one per run by default, landing mid-horizon.
    """
    model = _double_integrator(T)
    config = ExperimentConfig(model=model, x0=np.array([1.0, 0.0, 1.0, 0.0]))
    return model, config


# ---------------------------------------------------------------------------
# CSV plumbing

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_meta(csv_path: Path, config: ExperimentConfig, generator: str, extra: dict | None = None) -> None:
    from . import __version__

    meta = {
        "generator": generator,
        "version": __version__,
        "seed": int(config.seed),
        "config_hash": config.config_hash(),
    }
    if extra:
        meta.update(extra)
    meta_path = csv_path.with_suffix(".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Scenario resolution

def resolve_scenario(config: ExperimentConfig) -> DisturbanceScenario:
    """Turn the config's disturbance block into a concrete scenario.

    Priority: scenario_file, then explicit times/values, then sampling.  A
    single disturbance with no explicit time defaults to the horizon
    midpoint.
    """
    model = config.model
    if config.scenario_file is not None:
        return load_scenario(config.scenario_file)

    times = config.times
    if times is None:
        if config.count == 1:
            times = (model.T // 2,)
        else:
            scen = sample_scenario(
                config.seed, config.count, model, config.w_hat,
                value_law=config.value_law,
                values=config.values,
                stream=(0,),
            )
            return scen

    if config.values is not None:
        vals = np.atleast_2d(np.asarray(config.values, dtype=float))
    else:
        drawn = sample_scenario(
            config.seed, len(times), model, config.w_hat,
            value_law=config.value_law, stream=(0,),
        )
        vals = drawn.values
    return DisturbanceScenario(
        horizon=model.T, times=tuple(times), values=vals, w_hat=config.w_hat
    )


def _sample_values_by_k(config: ExperimentConfig, count: int, ref_T: int) -> np.ndarray:
    """Fixed per-budget disturbance values shared across a horizon grid.

    One kick is sampled from the master seed and repeated for every
    pending-count level, so the per-k series differ only through the
    occurrence model and never through kick directions partially cancelling;
    row k-1 is the value pending when k remain.
    """
    if count == 0:
        return np.zeros((0, config.model.n))
    model = dataclasses.replace(config.model, T=ref_T)
    scen = sample_scenario(config.seed, 1, model, config.w_hat, stream=(1,))
    return np.tile(scen.values, (count, 1))


# ---------------------------------------------------------------------------
# Runners

def run_trajectory_experiment(config: ExperimentConfig) -> Path:
    """Roll out all three policies on one scenario and write trajectory.csv."""
    model = config.model
    riccati = riccati_backward(model)
    scenario = resolve_scenario(config)
    aux = offline_precompute(scenario, riccati)
    tables = da_precompute(
        values_reverse_chronological(scenario), config.probability, riccati,
        max_k=scenario.count,
    )
    results = {
        "blind": rollout("blind", scenario, config.x0, model, riccati),
        "disturbance_aware": rollout(
            "disturbance_aware", scenario, config.x0, model, riccati, tables
        ),
        "offline": rollout("offline", scenario, config.x0, model, riccati, aux),
    }

    n, m, T = model.n, model.m, model.T
    header = (
        ["t", "policy"]
        + [f"x{i}" for i in range(n)]
        + [f"u{j}" for j in range(m)]
        + ["stage_cost", "disturbed"]
    )
    rows = []
    for t in range(T + 1):
        for policy in sorted(results):
            res = results[policy]
            if t < T:
                controls = list(res.controls[t])
                disturbed = bool(res.disturbed[t])
            else:
                controls = [""] * m  # no control at the terminal state
                disturbed = False
            rows.append(
                [t, policy] + list(res.states[t]) + controls
                + [res.stage_costs[t], disturbed]
            )

    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / TRAJECTORY_CSV
    _write_csv(path, header, rows)
    _write_meta(path, config, "simulate", {
        "scenario_times": list(scenario.times),
        "scenario_values": scenario.values.tolist(),
        "total_costs": {p: results[p].total_cost for p in sorted(results)},
    })
    return path


def run_sweep(config: ExperimentConfig) -> Path:
    """First-step action gap between disturbance-aware and blind.

    For every horizon T and budget k on the grid, writes
    ||u_da(0, x0, k) - u_blind(0, x0)||; the disturbance values per budget
    are fixed across horizons.  Pairs with k > T are skipped and listed in
    the sidecar.
    """
    kmax = max(config.sweep_budgets, default=0)
    ref_T = max(config.sweep_horizons, default=config.model.T)
    values_by_k = _sample_values_by_k(config, kmax, ref_T)

    rows = []
    skipped = []
    for T in config.sweep_horizons:
        model = dataclasses.replace(config.model, T=T)
        riccati = riccati_backward(model)
        tables = da_precompute(values_by_k, config.probability, riccati, max_k=kmax)
        u_blind = blind_action(0, config.x0, riccati)
        for k in config.sweep_budgets:
            if k > T:
                skipped.append({"T": int(T), "k": int(k)})
                continue
            u_da = da_action(0, config.x0, k, tables, riccati)
            rows.append([int(T), int(k), float(np.linalg.norm(u_da - u_blind))])

    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / SWEEP_CSV
    _write_csv(path, ["T", "k", "norm_diff"], rows)
    _write_meta(path, config, "sweep", {
        "value_law": config.value_law,
        "values_by_k": values_by_k.tolist(),
        "skipped_pairs": skipped,
    })
    return path


def run_convergence_diagnostics(config: ExperimentConfig) -> Path:
    """Table-coefficient decay across horizons: ||r_0^k|| and max_t ||r_t^k||."""
    kmax = config.diag_max_k
    ref_T = max(config.diag_horizons)
    values_by_k = _sample_values_by_k(config, kmax, ref_T)

    rows = []
    for T in config.diag_horizons:
        model = dataclasses.replace(config.model, T=T)
        riccati = riccati_backward(model)
        tables = da_precompute(values_by_k, config.probability, riccati, max_k=kmax)
        norms = np.linalg.norm(tables.r, axis=2)  # (T+1, kmax+1)
        for k in range(1, kmax + 1):
            rows.append([
                int(T), int(k),
                float(norms[0, k]),
                float(norms[:, k].max()),
            ])

    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / DIAGNOSTICS_CSV
    _write_csv(path, ["T", "k", "r0_norm", "r_max_norm"], rows)
    _write_meta(path, config, "diagnose", {
        "value_law": config.value_law,
        "values_by_k": values_by_k.tolist(),
    })
    return path


def run_bound_verification(config: ExperimentConfig) -> Path:
    """Monte Carlo bound check per budget in config.budgets; writes bounds.csv."""
    model = config.model
    riccati = riccati_backward(model)
    header = [
        "trial", "D", "w_hat",
        "emp_blind_vs_offline", "emp_blind_vs_nominal", "emp_nominal_vs_offline",
        "thm3", "thm4", "thm5", "ratio3", "ratio4", "ratio5",
        "assumption1_ok", "degenerate",
    ]
    rows = []
    for D in config.budgets:
        table = verify_bounds(
            model, riccati, config.trials, int(D), config.w_hat, config.x0,
            config.seed, override_assumption_check=config.override_assumption_check,
        )
        for row in table:
            rows.append([row[col] for col in header])

    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / BOUNDS_CSV
    _write_csv(path, header, rows)
    _write_meta(path, config, "verify-bounds", {
        "gamma_hat": riccati.gamma_hat,
        "p_hat": riccati.p_hat,
        "unstable_steps": riccati.unstable_steps,
    })
    return path
