"""Finite-horizon LQR core: model validation and the backward Riccati recursion.

The plant is x_{t+1} = A x_t + B u_t (+ d_t, handled elsewhere) with stage cost
x'Qx + u'Ru over t = 0..T-1 and terminal cost x'Q_T x.  The recursion runs
backward from P_T = Q_T:

    G_t = R + B' P_{t+1} B
    K_t = G_t^{-1} B' P_{t+1} A
    S_t = P_{t+1} - P_{t+1} B G_t^{-1} B' P_{t+1}
    P_t = A' S_t A + Q
    F_t = B G_t^{-1} B'

All per-step matrices are stored because the policy layers reuse them heavily:
S_t and F_t drive the affine value-function corrections, and the closed-loop
matrix A - B K_t propagates them without ever forming P_{t+1}^{-1} explicitly
(P_{t+1}^{-1} S_t A = A - B K_t whenever P_{t+1} is invertible).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

# Eigenvalue tolerances for validation.  PSD checks scale with the matrix norm
# so that badly scaled but honest inputs pass; the PD floor for R is absolute.
TOL_PSD = 1e-8
TOL_PD = 1e-10
TOL_SYM = 1e-9


class ModelDimensionError(ValueError):
    """A system matrix has the wrong shape."""


class DefinitenessError(ValueError):
    """A cost matrix fails its symmetry or definiteness requirement."""


class RiccatiNumericalError(RuntimeError):
    """The control-cost factorization failed inside the recursion."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SystemModel:
    """Time-invariant linear plant with quadratic costs over a fixed horizon.

    Attributes:
        A: state transition matrix, (n, n).
        B: control input matrix, (n, m).
        Q: stage state cost, symmetric PSD, (n, n).
        Q_T: terminal state cost, symmetric PSD, (n, n).
        R: stage control cost, symmetric PD, (m, m).
        T: horizon length in steps.
    """

    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    Q_T: np.ndarray
    R: np.ndarray
    T: int

    def __post_init__(self):
        for name in ("A", "B", "Q", "Q_T", "R"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1] if self.B.ndim == 2 else 1


def _check_symmetric(M: np.ndarray, name: str) -> None:
    scale = max(1.0, float(np.abs(M).max())) if M.size else 1.0
    asym = float(np.abs(M - M.T).max()) if M.size else 0.0
    if asym > TOL_SYM * scale:
        raise DefinitenessError(f"{name} is not symmetric: max |{name} - {name}'| = {asym:.3e}")


def validate_model(model: SystemModel) -> SystemModel:
    """Check shapes, symmetry, and definiteness; return the model unchanged.

    Raises:
        ModelDimensionError: if any matrix shape is inconsistent or T < 1.
        DefinitenessError: if Q or Q_T is not symmetric PSD (eigenvalue below
            -TOL_PSD scaled by the matrix norm) or R is not symmetric PD
            (eigenvalue below TOL_PD).  The message names the matrix and the
            violating eigenvalue.
    """
    A, B, Q, Q_T, R = model.A, model.B, model.Q, model.Q_T, model.R
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ModelDimensionError(f"A must be square, got shape {A.shape}")
    n = A.shape[0]
    if B.ndim != 2 or B.shape[0] != n:
        raise ModelDimensionError(f"B must have shape ({n}, m), got {B.shape}")
    m = B.shape[1]
    if Q.shape != (n, n):
        raise ModelDimensionError(f"Q must have shape ({n}, {n}), got {Q.shape}")
    if Q_T.shape != (n, n):
        raise ModelDimensionError(f"Q_T must have shape ({n}, {n}), got {Q_T.shape}")
    if R.shape != (m, m):
        raise ModelDimensionError(f"R must have shape ({m}, {m}), got {R.shape}")
    if not isinstance(model.T, (int, np.integer)) or isinstance(model.T, bool) or model.T < 1:
        raise ModelDimensionError(f"T must be a positive integer, got {model.T!r}")

    for M, name in ((Q, "Q"), (Q_T, "Q_T"), (R, "R")):
        _check_symmetric(M, name)
        if not np.all(np.isfinite(M)):
            raise DefinitenessError(f"{name} contains non-finite entries")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise ModelDimensionError("A and B must be finite")

    for M, name in ((Q, "Q"), (Q_T, "Q_T")):
        lam = float(np.linalg.eigvalsh(M)[0])
        floor = -TOL_PSD * max(1.0, float(np.linalg.norm(M, 2)))
        if lam < floor:
            raise DefinitenessError(f"{name} is not positive semidefinite: min eigenvalue {lam:.3e}")
    lam_r = float(np.linalg.eigvalsh(R)[0])
    if lam_r < TOL_PD:
        raise DefinitenessError(f"R is not positive definite: min eigenvalue {lam_r:.3e}")
    return model


@dataclass(frozen=True)
class RiccatiData:
    """Everything the backward recursion produces, indexed by time.

    P has T+1 entries (P[T] = Q_T); K, S, F, a_cl, and corr_gain have T
    entries each.  a_cl[t] = A - B K_t is the closed-loop matrix; corr_gain[t]
    = G_t^{-1} B' maps value-function drive vectors to control corrections.
    p_min_eig[t] is the smallest eigenvalue of P[t], kept so downstream code
    can refuse to apply P^{-1} when the cost-to-go is numerically singular.
    """

    model: SystemModel
    P: np.ndarray
    K: np.ndarray
    S: np.ndarray
    F: np.ndarray
    a_cl: np.ndarray
    corr_gain: np.ndarray
    p_min_eig: np.ndarray
    cl_norms: np.ndarray
    gamma_hat: float
    p_hat: float

    @property
    def T(self) -> int:
        return self.P.shape[0] - 1

    @property
    def assumption_ok(self) -> bool:
        """True when every closed-loop step is a spectral-norm contraction."""
        return self.gamma_hat > 0.0

    @property
    def unstable_steps(self) -> int:
        return int(np.sum(self.cl_norms >= 1.0))


def _sym_spectral_norms(stack: np.ndarray) -> np.ndarray:
    # largest |eigenvalue| per symmetric matrix in the stack
    eigs = np.linalg.eigvalsh(stack)
    return np.maximum(np.abs(eigs[..., 0]), np.abs(eigs[..., -1]))


def riccati_backward(model: SystemModel) -> RiccatiData:
    """Run the backward recursion and collect per-step data.

    The model is validated first.  P_t is re-symmetrized each step so the
    floating-point drift of A'S_tA never accumulates into asymmetry.

    Raises:
        RiccatiNumericalError: if R + B'P_{t+1}B cannot be Cholesky-factored
            (impossible for a validated model unless the recursion has blown
            up); the message reports the condition number.
    """
    validate_model(model)
    A, B, Q, R = model.A, model.B, model.Q, model.R
    T, n, m = model.T, model.n, model.m

    P = np.empty((T + 1, n, n))
    K = np.empty((T, m, n))
    S = np.empty((T, n, n))
    F = np.empty((T, n, n))
    a_cl = np.empty((T, n, n))
    corr_gain = np.empty((T, m, n))

    P[T] = model.Q_T
    for t in range(T - 1, -1, -1):
        P1 = P[t + 1]
        BtP = B.T @ P1
        G = R + BtP @ B
        G = 0.5 * (G + G.T)
        try:
            cf = cho_factor(G, lower=True)
        except np.linalg.LinAlgError as exc:
            raise RiccatiNumericalError(
                f"control cost factorization failed at t={t}: "
                f"cond(R + B'PB) = {np.linalg.cond(G):.3e}"
            ) from exc
        corr_gain[t] = cho_solve(cf, B.T)
        K[t] = cho_solve(cf, BtP @ A)
        St = P1 - BtP.T @ cho_solve(cf, BtP)
        S[t] = 0.5 * (St + St.T)
        F[t] = B @ corr_gain[t]
        a_cl[t] = A - B @ K[t]
        Pt = A.T @ S[t] @ A + Q
        P[t] = 0.5 * (Pt + Pt.T)

    eigs = np.linalg.eigvalsh(P)
    p_min_eig = eigs[:, 0].copy()
    p_hat = max(1.0, float(np.maximum(np.abs(eigs[:, 0]), np.abs(eigs[:, -1])).max()))
    cl_norms = np.linalg.svd(a_cl, compute_uv=False)[:, 0]
    gamma_hat = 1.0 - float(cl_norms.max())

    for arr in (P, K, S, F, a_cl, corr_gain, p_min_eig, cl_norms):
        arr.flags.writeable = False
    return RiccatiData(
        model=model, P=P, K=K, S=S, F=F, a_cl=a_cl, corr_gain=corr_gain,
        p_min_eig=p_min_eig, cl_norms=cl_norms, gamma_hat=gamma_hat, p_hat=p_hat,
    )


def stability_margin(riccati: RiccatiData, model: SystemModel) -> float:
    """Contraction margin of the closed loop: 1 - max_t sigma_max(A - B K_t).

    Positive means every step shrinks the state in Euclidean norm; a value
    <= 0 does not imply instability (the spectral norm can exceed 1 while
    products of the closed-loop matrices still decay) but it does void the
    closed-form bound guarantees, so callers must surface it as a warning.
    """
    cl = model.A - np.matmul(model.B, riccati.K)
    return 1.0 - float(np.linalg.svd(cl, compute_uv=False)[:, 0].max())


def p_hat_bound(riccati: RiccatiData) -> float:
    """max(1, max_t sigma_max(P_t)): the cost-to-go curvature bound.

    Clamped below by 1 so it can sit in denominators and products of the
    closed-form bounds without degenerating.
    """
    return max(1.0, float(_sym_spectral_norms(riccati.P).max()))
