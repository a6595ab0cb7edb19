"""Closed-loop simulation of the three policies on a disturbance scenario.

The rollout applies x_{t+1} = A x_t + B u_t + d_t literally, with d_t taken
from the scenario (zero elsewhere), and records states, controls, per-step
stage costs, and which steps were disturbed.  Every policy is driven through
the same loop: the action is -K_t x minus a per-step correction vector that
is zero for the blind policy, so identical scenarios produce bitwise
identical trajectories whenever the corrections vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .lqr import RiccatiData, SystemModel
from .disturbance import DisturbanceScenario, remaining_count
from .policies import (
    DisturbanceAwareTables,
    OfflineAuxiliary,
    offline_precompute,
)

POLICIES = ("blind", "disturbance_aware", "offline")


@dataclass(frozen=True)
class RolloutResult:
    """One closed-loop trajectory.

    states has shape (T+1, n), controls (T, m), stage_costs (T+1,) with the
    terminal cost in the last slot, and disturbed (T,) flags the steps where
    a scenario disturbance entered the dynamics.
    """

    policy: str
    states: np.ndarray
    controls: np.ndarray
    stage_costs: np.ndarray
    disturbed: np.ndarray
    total_cost: float


def _corrections(
    policy: str,
    scenario: DisturbanceScenario,
    riccati: RiccatiData,
    aux,
) -> np.ndarray:
    """Per-step control corrections: u_t = -K_t x_t - corr[t]."""
    T, m = riccati.T, riccati.model.m
    if policy == "blind":
        if aux is not None:
            raise TypeError("blind rollout takes no auxiliary data")
        return np.zeros((T, m))
    if policy == "offline":
        if not isinstance(aux, OfflineAuxiliary):
            raise TypeError("offline rollout requires an OfflineAuxiliary")
        drive = 0.5 * aux.v[1:]  # (T, n)
        corr = np.einsum("tmn,tn->tm", riccati.corr_gain, drive)
        for i, t in enumerate(scenario.times):
            d = scenario.values[i]
            corr[t] += riccati.corr_gain[t] @ (riccati.P[t + 1] @ d)
        return corr
    if policy == "disturbance_aware":
        if not isinstance(aux, DisturbanceAwareTables):
            raise TypeError("disturbance_aware rollout requires DisturbanceAwareTables")
        k_path = np.array([remaining_count(scenario, t) for t in range(T)])
        if k_path.size and int(k_path.max()) > aux.max_k:
            raise ValueError(
                f"scenario has {int(k_path.max())} disturbances remaining at t=0 "
                f"but the tables stop at max_k = {aux.max_k}"
            )
        drive = aux.drive[np.arange(T), k_path]
        return np.einsum("tmn,tn->tm", riccati.corr_gain, drive)
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def rollout(
    policy: str,
    scenario: DisturbanceScenario,
    x0: np.ndarray,
    model: SystemModel,
    riccati: RiccatiData,
    aux=None,
) -> RolloutResult:
    """Simulate one policy on one scenario.

    Args:
        policy: "blind", "disturbance_aware", or "offline".
        scenario: disturbance times and values; horizon must match the model.
        x0: initial state, shape (n,).
        model: the plant.
        riccati: output of riccati_backward(model).
        aux: None for blind, OfflineAuxiliary for offline,
            DisturbanceAwareTables for disturbance_aware.
    """
    T, n, m = model.T, model.n, model.m
    if scenario.horizon != T:
        raise ValueError(f"scenario horizon {scenario.horizon} != model horizon {T}")
    if riccati.T != T:
        raise ValueError(f"Riccati horizon {riccati.T} != model horizon {T}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"x0 must have shape ({n},), got {x0.shape}")

    corr = _corrections(policy, scenario, riccati, aux)
    A, B, Q, R = model.A, model.B, model.Q, model.R
    K = riccati.K

    states = np.empty((T + 1, n))
    controls = np.empty((T, m))
    disturbed = np.zeros(T, dtype=bool)
    states[0] = x0
    x = x0
    for t in range(T):
        u = -(K[t] @ x) - corr[t]
        controls[t] = u
        xn = A @ x + B @ u
        d = scenario.value_at(t)
        if d is not None:
            xn = xn + d
            disturbed[t] = True
        states[t + 1] = xn
        x = xn

    stage_costs = np.empty(T + 1)
    stage_costs[:T] = np.einsum("tn,nk,tk->t", states[:-1], Q, states[:-1])
    stage_costs[:T] += np.einsum("tm,mk,tk->t", controls, R, controls)
    stage_costs[T] = states[T] @ (model.Q_T @ states[T])
    total = float(stage_costs.sum())

    for arr in (states, controls, stage_costs, disturbed):
        arr.flags.writeable = False
    return RolloutResult(
        policy=policy, states=states, controls=controls,
        stage_costs=stage_costs, disturbed=disturbed, total_cost=total,
    )


class RegretSample(NamedTuple):
    """Realized costs of blind with/without the disturbances and offline."""

    blind_with: float
    blind_without: float
    offline_with: float
    regret: float


def empirical_regret(
    scenario: DisturbanceScenario,
    x0: np.ndarray,
    model: SystemModel,
    riccati: RiccatiData,
) -> RegretSample:
    """Realized blind and offline costs on one scenario.

    regret = blind_with - offline_with; it is exactly 0.0 for an empty
    scenario because all three rollouts then follow the identical closed
    loop.
    """
    empty = DisturbanceScenario(
        horizon=scenario.horizon,
        times=(),
        values=np.zeros((0, model.n)),
        w_hat=scenario.w_hat,
    )
    blind_w = rollout("blind", scenario, x0, model, riccati).total_cost
    blind_0 = rollout("blind", empty, x0, model, riccati).total_cost
    aux = offline_precompute(scenario, riccati)
    off_w = rollout("offline", scenario, x0, model, riccati, aux).total_cost
    return RegretSample(
        blind_with=blind_w,
        blind_without=blind_0,
        offline_with=off_w,
        regret=blind_w - off_w,
    )
