"""The three control policies: blind, clairvoyant offline, disturbance-aware.

Blind is the plain LQR law u = -K_t x; it never reacts to a disturbance
until the state has already been kicked.

Offline knows every disturbance time and value d_t.  Its cost-to-go keeps
the Riccati quadratic and gains an affine correction,
V_t(x) = x'P_t x + v_t'x + q_t, with v_T = 0, q_T = 0 and

    u_t  = -K_t x - G_t^{-1} B' (P_{t+1} d_t + v_{t+1}/2)
    v_t  = 2 A'S_t d_t + (A - B K_t)' v_{t+1}
    q_t  = q_{t+1} + d_t'S_t d_t + v_{t+1}'(I - F_t P_{t+1}) d_t
           - v_{t+1}'F_t v_{t+1} / 4

where G_t = R + B'P_{t+1}B.  The closed-loop transpose and (I - F_t P_{t+1})
factors are the inversion-free forms of A'S_t P_{t+1}^{-1} and
P_{t+1}^{-1} S_t; the equivalence P_{t+1}^{-1} S_t A = A - B K_t holds
whenever P_{t+1} is invertible, which is checked up front (min eigenvalue
at least TOL_PD on every step whose correction is propagated).  The q
recurrence uses S_t, the only index for which the recursion is defined at
t = T - 1; it is pinned down by the identity that the realized cost of the
policy equals V_0(x_0).

Disturbance-aware knows the disturbance values but only a probability model
of their timing: with k disturbances remaining, the next one has value w_k
(note the reverse-chronological indexing) and lands at the current step
with probability p = p_t^k.  The expected cost-to-go is
J_t^k(x) = x'P_t x + 2 r_t^k'x + c_t^k with r_T^k = c_T^k = 0 and

    rbar  = (1-p) r_{t+1}^k + p r_{t+1}^{k-1}
    s     = rbar + p P_{t+1} w_k                     (drive vector)
    u     = -K_t x - G_t^{-1} B' s
    r_t^k = (A - B K_t)' s
    c_t^k = (1-p) c_{t+1}^k + p c_{t+1}^{k-1} - s'F_t s
            + p w_k'P_{t+1} w_k + 2 p r_{t+1}^{k-1}'w_k

The mixture weight is the occurrence probability of the current step,
applied to the two next-step value functions (disturbance lands / does
not).  The k = 0 slice is identically zero, so a disturbance-aware
controller with nothing left to anticipate is exactly blind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lqr import RiccatiData, TOL_PD
from .disturbance import DisturbanceScenario, ProbabilityModel


class SingularCostToGoError(RuntimeError):
    """A P_t needed in inverted form is numerically singular."""


def _check_t(t: int, T: int, inclusive: bool = False) -> None:
    hi = T if inclusive else T - 1
    if not 0 <= t <= hi:
        raise ValueError(f"t must lie in [0, {hi}], got {t}")


def blind_action(t: int, x: np.ndarray, riccati: RiccatiData) -> np.ndarray:
    """The disturbance-ignoring LQR action -K_t x."""
    _check_t(t, riccati.T)
    return -(riccati.K[t] @ x)


@dataclass(frozen=True)
class OfflineAuxiliary:
    """Affine cost-to-go corrections for the clairvoyant policy.

    v has shape (T+1, n) and q shape (T+1,); both are zero at and after the
    last disturbance time + 1.
    """

    v: np.ndarray
    q: np.ndarray


def offline_precompute(scenario: DisturbanceScenario, riccati: RiccatiData) -> OfflineAuxiliary:
    """Backward pass for the affine corrections of the offline policy.

    Raises:
        ValueError: if the scenario horizon or state width disagrees with
            the Riccati data.
        SingularCostToGoError: if some P_{t+1} whose inverse the correction
            propagation needs has an eigenvalue below TOL_PD.
    """
    T, n = riccati.T, riccati.model.n
    if scenario.horizon != T:
        raise ValueError(
            f"scenario horizon {scenario.horizon} != Riccati horizon {T}"
        )
    if scenario.count and scenario.values.shape[1] != n:
        raise ValueError(
            f"scenario values have width {scenario.values.shape[1]}, expected {n}"
        )

    v = np.zeros((T + 1, n))
    q = np.zeros(T + 1)
    if scenario.count:
        t_last = scenario.times[-1]
        # Steps 0..t_last-1 propagate v_{t+1} through P_{t+1}^{-1} S_t; the
        # closed-loop form below is only the equivalent of that product when
        # P_{t+1} is genuinely invertible.
        if t_last > 0:
            lam = float(riccati.p_min_eig[1 : t_last + 1].min())
            if lam < TOL_PD:
                step = 1 + int(np.argmin(riccati.p_min_eig[1 : t_last + 1]))
                raise SingularCostToGoError(
                    f"P_{step} has min eigenvalue {lam:.3e} < {TOL_PD}; "
                    "the affine correction is not well defined"
                )
        A = riccati.model.A
        for t in range(t_last, -1, -1):
            v1 = v[t + 1]
            vt = riccati.a_cl[t].T @ v1
            qt = q[t + 1] - 0.25 * float(v1 @ (riccati.F[t] @ v1))
            d = scenario.value_at(t)
            if d is not None:
                Sd = riccati.S[t] @ d
                vt = vt + 2.0 * (A.T @ Sd)
                qt += float(d @ Sd)
                qt += float(v1 @ (d - riccati.F[t] @ (riccati.P[t + 1] @ d)))
            v[t] = vt
            q[t] = qt

    v.flags.writeable = False
    q.flags.writeable = False
    return OfflineAuxiliary(v=v, q=q)


def offline_action(
    t: int,
    x: np.ndarray,
    aux: OfflineAuxiliary,
    scenario: DisturbanceScenario,
    riccati: RiccatiData,
) -> np.ndarray:
    """Optimal action given full knowledge of the disturbance sequence."""
    _check_t(t, riccati.T)
    drive = 0.5 * aux.v[t + 1]
    d = scenario.value_at(t)
    if d is not None:
        drive = drive + riccati.P[t + 1] @ d
    return -(riccati.K[t] @ x) - riccati.corr_gain[t] @ drive


def offline_cost_to_go(t: int, x: np.ndarray, aux: OfflineAuxiliary, riccati: RiccatiData) -> float:
    """V_t(x) = x'P_t x + v_t'x + q_t."""
    _check_t(t, riccati.T, inclusive=True)
    return float(x @ (riccati.P[t] @ x) + aux.v[t] @ x + aux.q[t])


@dataclass(frozen=True)
class DisturbanceAwareTables:
    """Expected-cost tables over the (time, remaining-count) grid.

    r has shape (T+1, max_k+1, n) and c shape (T+1, max_k+1); the k = 0
    slices are identically zero.  w_by_k[k] is the value of the next
    disturbance when k remain (row 0 unused).  drive[t, k] is the vector s
    the action correction applies at (t, k), and p_grid the materialized
    occurrence probabilities.
    """

    r: np.ndarray
    c: np.ndarray
    w_by_k: np.ndarray
    p_grid: np.ndarray
    drive: np.ndarray

    @property
    def max_k(self) -> int:
        return self.r.shape[1] - 1


def values_reverse_chronological(scenario: DisturbanceScenario) -> np.ndarray:
    """Scenario values re-indexed by remaining count.

    Row k-1 is the value of the next disturbance when k remain, i.e. the
    chronological order reversed: the last scheduled disturbance is the one
    pending when only k = 1 remains.
    """
    return scenario.values[::-1].copy()


def da_precompute(
    values_by_k,
    prob: ProbabilityModel,
    riccati: RiccatiData,
    max_k: int | None = None,
) -> DisturbanceAwareTables:
    """Backward pass over the (t, k) grid for the disturbance-aware policy.

    Args:
        values_by_k: array of shape (K, n); row k-1 is the disturbance value
            pending when k remain (see values_reverse_chronological).
        prob: occurrence probability model, defined on the full grid.
        riccati: output of riccati_backward for the same horizon.
        max_k: largest remaining count to tabulate; defaults to K.
    """
    model = riccati.model
    T, n = riccati.T, model.n
    vals = np.asarray(values_by_k, dtype=float)
    if vals.size == 0:
        vals = vals.reshape(0, n)
    vals = np.atleast_2d(vals)
    if max_k is None:
        max_k = vals.shape[0]
    if max_k < 0:
        raise ValueError(f"max_k must be nonnegative, got {max_k}")
    if max_k > vals.shape[0]:
        raise ValueError(
            f"max_k = {max_k} but only {vals.shape[0]} disturbance values supplied"
        )
    if max_k and vals.shape[1] != n:
        raise ValueError(f"disturbance values have width {vals.shape[1]}, expected {n}")

    w = np.zeros((max_k + 1, n))
    if max_k:
        w[1:] = vals[:max_k]
    p = prob.grid(T, max_k)

    r = np.zeros((T + 1, max_k + 1, n))
    c = np.zeros((T + 1, max_k + 1))
    drive = np.zeros((T, max_k + 1, n))
    rsh = np.zeros((max_k + 1, n))
    csh = np.zeros(max_k + 1)
    for t in range(T - 1, -1, -1):
        r1, c1 = r[t + 1], c[t + 1]
        rsh[1:] = r1[:-1]  # r_{t+1}^{k-1}
        csh[1:] = c1[:-1]
        pt = p[t]
        ptc = pt[:, None]
        Pw = w @ riccati.P[t + 1]  # row k = P_{t+1} w_k
        s = (1.0 - ptc) * r1 + ptc * rsh + ptc * Pw
        drive[t] = s
        r[t] = s @ riccati.a_cl[t]
        quad = np.einsum("kn,kn->k", s, s @ riccati.F[t])
        wPw = np.einsum("kn,kn->k", w, Pw)
        rw = np.einsum("kn,kn->k", rsh, w)
        c[t] = (1.0 - pt) * c1 + pt * csh - quad + pt * wPw + 2.0 * pt * rw

    for arr in (r, c, w, p, drive):
        arr.flags.writeable = False
    return DisturbanceAwareTables(r=r, c=c, w_by_k=w, p_grid=p, drive=drive)


def _check_k(k: int, tables: DisturbanceAwareTables) -> None:
    if not 0 <= k <= tables.max_k:
        raise ValueError(f"k_remaining must lie in [0, {tables.max_k}], got {k}")


def da_action(
    t: int,
    x: np.ndarray,
    k_remaining: int,
    tables: DisturbanceAwareTables,
    riccati: RiccatiData,
) -> np.ndarray:
    """Expected-cost-optimal action with k disturbances still to come."""
    _check_t(t, riccati.T)
    _check_k(k_remaining, tables)
    return -(riccati.K[t] @ x) - riccati.corr_gain[t] @ tables.drive[t, k_remaining]


def da_expected_cost(
    t: int,
    x: np.ndarray,
    k: int,
    tables: DisturbanceAwareTables,
    riccati: RiccatiData,
) -> float:
    """J_t^k(x) = x'P_t x + 2 r_t^k'x + c_t^k."""
    _check_t(t, riccati.T, inclusive=True)
    _check_k(k, tables)
    return float(x @ (riccati.P[t] @ x) + 2.0 * (tables.r[t, k] @ x) + tables.c[t, k])
