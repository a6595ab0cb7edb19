"""Sparse disturbance scenarios and occurrence-probability models.

A scenario is a small set of (time, value) impulses inside a horizon: the
plant sees x_{t+1} = A x_t + B u_t + w at each listed time and no input
otherwise.  The disturbance-aware policy never sees the times, only a
probability model: p_t^k is the chance that a disturbance lands at step t
given k of them still remain.  The canonical model, uniform_conditional,
is the law induced by drawing the time set uniformly among size-k subsets
of the remaining steps: p_t^k = min(1, k / (T - t)).
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lqr import SystemModel, _freeze

# Slack for the |w| <= w_hat check: sphere sampling can land a hair above
# the radius in the last bit.
_NORM_SLACK = 1e-9


def philox_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator with reproducible sub-streams.

    Philox is stateless-counter based, so (seed, stream...) fully determines
    the draw sequence on every platform; per-trial streams are derived with
    spawn keys instead of jumping a shared state.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class DisturbanceScenario:
    """A fixed assignment of disturbance times and values.

    Attributes:
        horizon: number of control steps T; times live in [0, T).
        times: strictly increasing step indices, one per disturbance.
        values: array of shape (len(times), n), one row per disturbance.
        w_hat: magnitude cap; every row satisfies ||w|| <= w_hat.
    """

    horizon: int
    times: tuple[int, ...]
    values: np.ndarray
    w_hat: float

    def __post_init__(self):
        times = tuple(int(t) for t in self.times)
        values = np.array(self.values, dtype=float)
        if len(times) == 0:
            width = values.shape[-1] if values.ndim >= 2 else 0
            values = values.reshape(0, width)
        else:
            values = np.atleast_2d(values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "w_hat", float(self.w_hat))
        if self.horizon < 1:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if len(times) != self.values.shape[0]:
            raise ValueError(
                f"{len(times)} times but {self.values.shape[0]} value rows"
            )
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"times must be strictly increasing, got {times}")
        if times and (times[0] < 0 or times[-1] >= self.horizon):
            raise ValueError(f"times must lie in [0, {self.horizon}), got {times}")
        if self.w_hat < 0:
            raise ValueError(f"w_hat must be nonnegative, got {self.w_hat}")
        if len(times):
            norms = np.linalg.norm(self.values, axis=1)
            worst = float(norms.max())
            if worst > self.w_hat * (1 + _NORM_SLACK) + 1e-300:
                raise ValueError(
                    f"disturbance norm {worst} exceeds w_hat = {self.w_hat}"
                )

    @property
    def count(self) -> int:
        return len(self.times)

    def value_at(self, t: int) -> np.ndarray | None:
        """The disturbance entering between t and t+1, or None."""
        i = bisect.bisect_left(self.times, t)
        if i < len(self.times) and self.times[i] == t:
            return self.values[i]
        return None


def uniform_conditional(t: int, k: int, T: int) -> float:
    """Occurrence probability at step t with k disturbances left in [t, T).

    This is the conditional law of a uniformly random size-k subset of the
    remaining steps: min(1, k / (T - t)), and 0 when k = 0.
    """
    if not 0 <= t < T:
        raise ValueError(f"t must lie in [0, {T}), got {t}")
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k == 0:
        return 0.0
    return min(1.0, k / (T - t))


@dataclass(frozen=True)
class ProbabilityModel:
    """Occurrence probabilities p_t^k on the (time, remaining-count) grid.

    kind is either "uniform_conditional" (closed form, no table) or "table"
    (explicit grid of shape (T, max_k + 1)).  Tables must have a zero k = 0
    column and entries in [0, 1].
    """

    kind: str
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("uniform_conditional", "table"):
            raise ValueError(f"unknown probability model kind {self.kind!r}")
        if self.kind == "table":
            if self.table is None:
                raise ValueError("table kind requires an explicit table")
            tab = np.array(self.table, dtype=float)
            if tab.ndim != 2:
                raise ValueError(f"table must be 2-D (T, max_k+1), got shape {tab.shape}")
            if np.any(tab < 0) or np.any(tab > 1):
                raise ValueError("table entries must lie in [0, 1]")
            if np.any(tab[:, 0] != 0):
                raise ValueError("table column k = 0 must be identically zero")
            object.__setattr__(self, "table", _freeze(tab))
        elif self.table is not None:
            raise ValueError("uniform_conditional takes no table")

    @classmethod
    def uniform(cls) -> "ProbabilityModel":
        return cls(kind="uniform_conditional")

    @classmethod
    def from_table(cls, table) -> "ProbabilityModel":
        return cls(kind="table", table=table)

    def prob(self, t: int, k: int, T: int) -> float:
        """p_t^k for horizon T."""
        if self.kind == "uniform_conditional":
            return uniform_conditional(t, k, T)
        if not 0 <= t < T:
            raise ValueError(f"t must lie in [0, {T}), got {t}")
        if t >= self.table.shape[0] or k >= self.table.shape[1]:
            raise ValueError(
                f"(t={t}, k={k}) outside table of shape {self.table.shape}"
            )
        return float(self.table[t, k])

    def grid(self, T: int, max_k: int) -> np.ndarray:
        """Materialize p_t^k for t in [0, T), k in [0, max_k]."""
        if self.kind == "uniform_conditional":
            t = np.arange(T)[:, None]
            k = np.arange(max_k + 1)[None, :]
            g = np.minimum(1.0, k / (T - t))  # T - t >= 1 on this grid
            g[:, 0] = 0.0
            return g
        if self.table.shape[0] < T or self.table.shape[1] < max_k + 1:
            raise ValueError(
                f"table of shape {self.table.shape} does not cover "
                f"(T={T}, max_k={max_k})"
            )
        return np.array(self.table[:T, : max_k + 1])


def certain_model(scenario: DisturbanceScenario) -> ProbabilityModel:
    """Degenerate table that puts probability 1 on the true times.

    With k disturbances remaining the next one is the (count - k)-th
    chronological entry, so p_t^k = 1 exactly at its time.  Under this model
    the disturbance-aware policy has full information and must reproduce the
    offline policy.
    """
    T, D = scenario.horizon, scenario.count
    tab = np.zeros((T, D + 1))
    for i, t in enumerate(scenario.times):
        k = D - i  # disturbances remaining when this one is imminent
        tab[t, k] = 1.0
    return ProbabilityModel.from_table(tab)


def remaining_count(scenario: DisturbanceScenario, t: int) -> int:
    """Number of scenario disturbances at times >= t (the imminent one counts)."""
    return len(scenario.times) - bisect.bisect_left(scenario.times, t)


def _planar_position_indices(model: SystemModel) -> tuple[int, int] | None:
    # The built-in planar double integrator carries positions at state
    # indices 0 and 2; disturbances there are position kicks only.
    A, B = model.A, model.B
    if A.shape != (4, 4) or B.shape != (4, 2):
        return None
    dt = A[0, 1]
    if dt <= 0:
        return None
    A_ref = np.array([[1, dt, 0, 0], [0, 1, 0, 0], [0, 0, 1, dt], [0, 0, 0, 1]], float)
    B_ref = np.array([[0, 0], [dt, 0], [0, 0], [0, dt]], float)
    if np.array_equal(A, A_ref) and np.array_equal(B, B_ref):
        return (0, 2)
    return None


def sample_scenario(
    rng_seed: int,
    count: int,
    model: SystemModel,
    w_hat: float,
    value_law: str = "sphere_surface",
    values=None,
    stream: tuple[int, ...] = (),
) -> DisturbanceScenario:
    """Draw a scenario: uniform time subset plus values from the chosen law.

    Times are a uniformly random size-count subset of [0, T).  Values are
    either drawn on the radius-w_hat sphere ("sphere_surface"; restricted to
    a position-only circle when the model is the built-in double integrator)
    or taken verbatim from `values` ("fixed_list").

    Args:
        rng_seed: seed; together with `stream` it fully determines the draw.
        count: number of disturbances; must satisfy 0 <= count <= T.
        model: the plant, for the horizon and state dimension.
        w_hat: magnitude of every sampled value.
        value_law: "sphere_surface" or "fixed_list".
        values: required for "fixed_list"; one vector per disturbance.
        stream: optional sub-stream indices for per-trial derivation.
    """
    T, n = model.T, model.n
    if not 0 <= count <= T:
        raise ValueError(f"count must lie in [0, {T}], got {count}")
    rng = philox_rng(rng_seed, *stream)
    times = np.sort(rng.choice(T, size=count, replace=False)).tolist()

    if value_law == "fixed_list":
        if values is None:
            raise ValueError("fixed_list requires explicit values")
        vals = np.atleast_2d(np.array(values, dtype=float))
        if vals.shape != (count, n):
            raise ValueError(
                f"fixed_list values must have shape ({count}, {n}), got {vals.shape}"
            )
    elif value_law == "sphere_surface":
        vals = np.zeros((count, n))
        pos = _planar_position_indices(model)
        for i in range(count):
            if pos is not None:
                theta = rng.uniform(0.0, 2.0 * np.pi)
                vals[i, pos[0]] = w_hat * np.cos(theta)
                vals[i, pos[1]] = w_hat * np.sin(theta)
            else:
                g = rng.standard_normal(n)
                norm = np.linalg.norm(g)
                while norm == 0.0:
                    g = rng.standard_normal(n)
                    norm = np.linalg.norm(g)
                vals[i] = w_hat * g / norm
    else:
        raise ValueError(f"unknown value law {value_law!r}")

    return DisturbanceScenario(horizon=T, times=tuple(times), values=vals, w_hat=w_hat)


def save_scenario(scenario: DisturbanceScenario, path) -> None:
    """Write a scenario as JSON: horizon, times, values, w_hat."""
    doc = {
        "horizon": scenario.horizon,
        "times": list(scenario.times),
        "values": scenario.values.tolist(),
        "w_hat": scenario.w_hat,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_scenario(path) -> DisturbanceScenario:
    doc = json.loads(Path(path).read_text())
    return DisturbanceScenario(
        horizon=doc["horizon"],
        times=tuple(doc["times"]),
        values=np.array(doc["values"], dtype=float).reshape(len(doc["times"]), -1),
        w_hat=doc["w_hat"],
    )
