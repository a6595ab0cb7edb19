"""Closed-form bounds on the cost gaps between the three policies.

All three bounds are functions of scenario summaries only: the disturbance
count D, the magnitude cap w_hat, the initial state norm, the cost-to-go
curvature bound p_hat = max(1, max_t ||P_t||), and (for the two bounds that
need a contractive closed loop) the margin gamma with
sigma_max(A - B K_t) <= 1 - gamma for every t, ||B||, and the smallest
eigenvalue of R.

    theorem4: blind-with vs blind-without disturbances,
        2 D w p (||x0|| + w + D w p)
    theorem5: blind-without vs offline-with,
        2 ||x0|| D p w + D^2 w p (3 w + (3 p w + 1/gamma^2) ||B||^2 / lmin(R))
    theorem3: blind-with vs offline-with (the regret),
        2 D w p (2||x0|| + w) + D^2 w^2 (2 p^2 + 3 p)
        + D^2 w p (3 p w + 1/gamma^2) ||B||^2 / lmin(R)

theorem3 is exactly theorem4 + theorem5 by the triangle inequality; the
algebraic identity is kept as a test invariant.  theorem4 needs no margin
and is evaluated even when gamma_hat <= 0; the other two are then reported
as not applicable (NaN in tables) rather than computed from an invalid
premise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lqr import RiccatiData, SystemModel
from .disturbance import sample_scenario
from .simulate import empirical_regret


class AssumptionViolatedError(RuntimeError):
    """The closed loop is not a per-step contraction (gamma_hat <= 0)."""


def _check_common(D: int, w_hat: float, x0_norm: float, p_hat: float) -> None:
    if not isinstance(D, (int, np.integer)) or D < 0:
        raise ValueError(f"D must be a nonnegative integer, got {D!r}")
    if w_hat < 0:
        raise ValueError(f"w_hat must be nonnegative, got {w_hat}")
    if x0_norm < 0:
        raise ValueError(f"x0_norm must be nonnegative, got {x0_norm}")
    if p_hat < 1:
        raise ValueError(f"p_hat must be at least 1, got {p_hat}")


def theorem4_bound(D: int, w_hat: float, x0_norm: float, p_hat: float) -> float:
    """Bound on |cost(blind, with disturbances) - cost(blind, without)|.

    Needs no stability margin: the blind closed loop is the same either way
    and the gap is driven purely by the injected kicks.
    """
    _check_common(D, w_hat, x0_norm, p_hat)
    return 2.0 * D * w_hat * p_hat * (x0_norm + w_hat + D * w_hat * p_hat)


def _check_margin(gamma: float, norm_B: float, lambda_min_R: float) -> None:
    if gamma <= 0:
        raise AssumptionViolatedError(
            f"stability margin gamma = {gamma:.6g} is not positive; "
            "this bound requires a per-step contraction"
        )
    if norm_B < 0:
        raise ValueError(f"norm_B must be nonnegative, got {norm_B}")
    if lambda_min_R <= 0:
        raise ValueError(f"lambda_min_R must be positive, got {lambda_min_R}")


def theorem5_bound(
    D: int,
    w_hat: float,
    x0_norm: float,
    p_hat: float,
    gamma: float,
    norm_B: float,
    lambda_min_R: float,
) -> float:
    """Bound on |cost(blind, without) - cost(offline, with disturbances)|."""
    _check_common(D, w_hat, x0_norm, p_hat)
    _check_margin(gamma, norm_B, lambda_min_R)
    tail = (3.0 * p_hat * w_hat + gamma ** -2) * norm_B**2 / lambda_min_R
    return 2.0 * x0_norm * D * p_hat * w_hat + D**2 * w_hat * p_hat * (3.0 * w_hat + tail)


def theorem3_bound(
    D: int,
    w_hat: float,
    x0_norm: float,
    p_hat: float,
    gamma: float,
    norm_B: float,
    lambda_min_R: float,
) -> float:
    """Bound on the regret of the blind policy against the offline optimum."""
    _check_common(D, w_hat, x0_norm, p_hat)
    _check_margin(gamma, norm_B, lambda_min_R)
    tail = (3.0 * p_hat * w_hat + gamma ** -2) * norm_B**2 / lambda_min_R
    return (
        2.0 * D * w_hat * p_hat * (2.0 * x0_norm + w_hat)
        + D**2 * w_hat**2 * (2.0 * p_hat**2 + 3.0 * p_hat)
        + D**2 * w_hat * p_hat * tail
    )


@dataclass(frozen=True)
class BoundReport:
    """All bound inputs and values for one (model, D, w_hat, x0) tuple.

    thm3 and thm5 are NaN when assumption1_ok is false; thm4 is always a
    real number.  unstable_steps counts the closed-loop steps whose spectral
    norm reaches 1.
    """

    p_hat: float
    gamma_hat: float
    lambda_min_R: float
    norm_B: float
    norm_x0: float
    D_count: int
    w_hat: float
    thm3: float
    thm4: float
    thm5: float
    assumption1_ok: bool
    unstable_steps: int


def compute_bound_report(
    model: SystemModel,
    riccati: RiccatiData,
    D: int,
    w_hat: float,
    x0: np.ndarray,
) -> BoundReport:
    """Evaluate every applicable bound for a scenario class."""
    x0 = np.asarray(x0, dtype=float)
    norm_x0 = float(np.linalg.norm(x0))
    norm_B = float(np.linalg.norm(model.B, 2))
    lambda_min_R = float(np.linalg.eigvalsh(model.R)[0])
    p_hat = riccati.p_hat
    gamma_hat = riccati.gamma_hat
    ok = gamma_hat > 0.0
    thm4 = theorem4_bound(D, w_hat, norm_x0, p_hat)
    if ok:
        thm3 = theorem3_bound(D, w_hat, norm_x0, p_hat, gamma_hat, norm_B, lambda_min_R)
        thm5 = theorem5_bound(D, w_hat, norm_x0, p_hat, gamma_hat, norm_B, lambda_min_R)
    else:
        thm3 = math.nan
        thm5 = math.nan
    return BoundReport(
        p_hat=p_hat, gamma_hat=gamma_hat, lambda_min_R=lambda_min_R,
        norm_B=norm_B, norm_x0=norm_x0, D_count=int(D), w_hat=float(w_hat),
        thm3=thm3, thm4=thm4, thm5=thm5, assumption1_ok=ok,
        unstable_steps=riccati.unstable_steps,
    )


def _ratio(emp: float, bound: float) -> tuple[float, bool]:
    """emp / bound with the 0/0 case defined as 0 and flagged degenerate."""
    if math.isnan(bound):
        return math.nan, False
    if bound == 0.0:
        return (0.0, True) if emp == 0.0 else (math.inf, True)
    return emp / bound, False


def verify_bounds(
    model: SystemModel,
    riccati: RiccatiData,
    trials: int,
    D: int,
    w_hat: float,
    x0: np.ndarray,
    rng_seed: int,
    override_assumption_check: bool = False,
) -> list[dict]:
    """Monte Carlo check of the bounds against realized costs.

    Each trial samples a scenario (uniform times, sphere-surface values) with
    a per-trial deterministic sub-stream of rng_seed, rolls out blind with
    and without the disturbances and offline with them, and compares the
    absolute cost gaps to the bounds.  Returns one dict per trial plus a
    final summary row (trial = "summary") holding max ratios.

    Raises:
        AssumptionViolatedError: when gamma_hat <= 0 and the override flag
            is not set.  With the override, thm4 is still checked and thm3 /
            thm5 are reported as NaN.
    """
    if trials < 0:
        raise ValueError(f"trials must be nonnegative, got {trials}")
    report = compute_bound_report(model, riccati, D, w_hat, x0)
    if not report.assumption1_ok and not override_assumption_check:
        raise AssumptionViolatedError(
            f"gamma_hat = {report.gamma_hat:.6g} <= 0 "
            f"({report.unstable_steps} of {riccati.T} closed-loop steps have "
            "spectral norm >= 1); only the disturbance-gap bound is valid. "
            "Set the override flag to proceed with it alone."
        )

    rows: list[dict] = []
    max3 = max4 = max5 = -math.inf
    for i in range(trials):
        scen = sample_scenario(rng_seed, D, model, w_hat, stream=(D, i))
        sample = empirical_regret(scen, x0, model, riccati)
        emp_bo = abs(sample.regret)
        emp_bn = abs(sample.blind_with - sample.blind_without)
        emp_no = abs(sample.blind_without - sample.offline_with)
        r3, d3 = _ratio(emp_bo, report.thm3)
        r4, d4 = _ratio(emp_bn, report.thm4)
        r5, d5 = _ratio(emp_no, report.thm5)
        rows.append({
            "trial": i,
            "D": int(D),
            "w_hat": float(w_hat),
            "emp_blind_vs_offline": emp_bo,
            "emp_blind_vs_nominal": emp_bn,
            "emp_nominal_vs_offline": emp_no,
            "thm3": report.thm3,
            "thm4": report.thm4,
            "thm5": report.thm5,
            "ratio3": r3,
            "ratio4": r4,
            "ratio5": r5,
            "assumption1_ok": report.assumption1_ok,
            "degenerate": d3 or d4 or d5,
        })
        if not math.isnan(r3):
            max3 = max(max3, r3)
        max4 = max(max4, r4)
        if not math.isnan(r5):
            max5 = max(max5, r5)

    rows.append({
        "trial": "summary",
        "D": int(D),
        "w_hat": float(w_hat),
        "emp_blind_vs_offline": math.nan,
        "emp_blind_vs_nominal": math.nan,
        "emp_nominal_vs_offline": math.nan,
        "thm3": report.thm3,
        "thm4": report.thm4,
        "thm5": report.thm5,
        "ratio3": max3 if max3 > -math.inf else math.nan,
        "ratio4": max4 if max4 > -math.inf else math.nan,
        "ratio5": max5 if max5 > -math.inf else math.nan,
        "assumption1_ok": report.assumption1_ok,
        "degenerate": False,
    })
    return rows
