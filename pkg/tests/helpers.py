"""Shared builders for the test suite."""

import numpy as np

from sparselqr import SystemModel


def random_system(rng, n=None, m=None, T=8, stable=True, spectral_radius=0.9):
    """A random model with PSD costs; A scaled to the given spectral radius."""
    n = int(n if n is not None else rng.integers(1, 5))
    m = int(m if m is not None else rng.integers(1, n + 1))
    A = rng.normal(size=(n, n))
    if stable:
        rho = max(abs(np.linalg.eigvals(A)))
        if rho > 0:
            A *= spectral_radius / rho
    B = rng.normal(size=(n, m))
    MQ = rng.normal(size=(n, n))
    MT = rng.normal(size=(n, n))
    MR = rng.normal(size=(m, m))
    Q = MQ.T @ MQ / n
    Q_T = MT.T @ MT / n
    R = MR.T @ MR / m + 0.1 * np.eye(m)
    return SystemModel(A=A, B=B, Q=Q, Q_T=Q_T, R=R, T=int(T))


def random_scalar_system(rng, T=4):
    """Scalar plant with |A| < 1 and positive costs."""
    return SystemModel(
        A=[[float(rng.uniform(-0.95, 0.95))]],
        B=[[float(rng.uniform(0.2, 2.0))]],
        Q=[[float(rng.uniform(0.1, 3.0))]],
        Q_T=[[float(rng.uniform(0.1, 3.0))]],
        R=[[float(rng.uniform(0.1, 3.0))]],
        T=int(T),
    )


def random_scenario(rng, model, count, w_hat=1.0):
    """Scenario with uniformly chosen times and ball-uniform values."""
    times = np.sort(rng.choice(model.T, size=count, replace=False))
    vals = rng.normal(size=(count, model.n))
    norms = np.linalg.norm(vals, axis=1, keepdims=True)
    vals = np.where(norms > 0, vals / norms, vals) * w_hat * rng.uniform(0.2, 1.0, size=(count, 1))
    import sparselqr

    return sparselqr.DisturbanceScenario(
        horizon=model.T, times=tuple(int(t) for t in times), values=vals, w_hat=w_hat
    )
