"""Independent reference implementations used only by the tests.

None of these touch the library's recurrence code: the scalar tree oracle
backward-inducts raw quadratic coefficients over the occurrence tree, the
dense QP oracle solves the clairvoyant control problem as one linear system,
and the path enumerator walks every disturbance-timing realization with its
probability.
"""

import numpy as np


def scalar_tree_dp(A, B, Q, R, QT, T, p_grid, w_by_k):
    """Exact value quadratics for the scalar anticipating controller.

    At node (t, k) the next value is V(x) = min_u { Q x^2 + R u^2
    + (1-p) V_{t+1,k}(Ax+Bu) + p V_{t+1,k-1}(Ax+Bu+w_k) } with p = p_grid[t, k].
    Value functions are raw quadratics a x^2 + b x + c.

    Args:
        p_grid: occurrence probabilities, shape (T, K+1).
        w_by_k: w_by_k[k] is the pending value with k remaining, shape (K+1,).

    Returns:
        (a, b, c, act): coefficient arrays of shape (T+1, K+1) and a function
        act(t, k, x) evaluating the minimizing action.
    """
    K = p_grid.shape[1] - 1
    a = np.zeros((T + 1, K + 1))
    b = np.zeros((T + 1, K + 1))
    c = np.zeros((T + 1, K + 1))
    a[T, :] = QT
    amix = np.zeros((T, K + 1))
    bmix = np.zeros((T, K + 1))
    for t in range(T - 1, -1, -1):
        for k in range(K + 1):
            pk = p_grid[t, k]
            a1, b1, c1 = a[t + 1, k], b[t + 1, k], c[t + 1, k]
            if k > 0:
                a2, b2, c2 = a[t + 1, k - 1], b[t + 1, k - 1], c[t + 1, k - 1]
                w = w_by_k[k]
            else:
                a2 = b2 = c2 = w = 0.0
            # expectation of the two next-step quadratics evaluated at
            # y = Ax + Bu and y + w respectively, as a quadratic in y
            am = (1 - pk) * a1 + pk * a2
            bm = (1 - pk) * b1 + pk * (b2 + 2.0 * a2 * w)
            cm = (1 - pk) * c1 + pk * (c2 + a2 * w * w + b2 * w)
            den = R + am * B * B
            a[t, k] = Q + am * A * A - (am * A * B) ** 2 / den
            b[t, k] = bm * A - (am * A * B) * (bm * B) / den
            c[t, k] = cm - (bm * B) ** 2 / (4.0 * den)
            amix[t, k] = am
            bmix[t, k] = bm

    def act(t, k, x):
        den = R + amix[t, k] * B * B
        return -(2.0 * amix[t, k] * A * B * x + bmix[t, k] * B) / (2.0 * den)

    return a, b, c, act


def offline_qp(model, scenario, x0):
    """Clairvoyant optimum as a dense QP; small horizons only.

    Builds the affine maps x_t = Phi_t x0 + G_t U + delta_t over the stacked
    control vector U and minimizes the full quadratic cost with one solve.

    Returns:
        (U, cost): optimal controls of shape (T, m) and the optimal cost.
    """
    A, B, Q, QT, R = model.A, model.B, model.Q, model.Q_T, model.R
    T, n, m = model.T, model.n, model.m
    x0 = np.asarray(x0, dtype=float)

    Phi = np.zeros((T + 1, n, n))
    G = np.zeros((T + 1, T, n, m))
    delta = np.zeros((T + 1, n))
    Phi[0] = np.eye(n)
    dmap = {int(t): scenario.values[i] for i, t in enumerate(scenario.times)}
    for t in range(T):
        Phi[t + 1] = A @ Phi[t]
        G[t + 1] = np.matmul(A, G[t])
        G[t + 1][t] = B
        delta[t + 1] = A @ delta[t] + dmap.get(t, np.zeros(n))

    H = np.kron(np.eye(T), R)
    g = np.zeros(T * m)
    c0 = 0.0
    for t, W in [(t, Q) for t in range(T)] + [(T, QT)]:
        Gt = G[t].transpose(1, 0, 2).reshape(n, T * m)
        e = Phi[t] @ x0 + delta[t]
        H += Gt.T @ W @ Gt
        g += Gt.T @ (W @ e)
        c0 += float(e @ W @ e)

    U = -np.linalg.solve(H, g)
    cost = float(U @ H @ U + 2.0 * g @ U + c0)
    return U.reshape(T, m), cost


def occurrence_paths(p_grid, max_k):
    """Every disturbance-timing realization with its probability.

    Returns a list of (times, ks, prob): the steps where a disturbance
    landed, the pending count k at each landing (so its value is w_by_k[k]),
    and the path probability.  Zero-probability branches are pruned, so the
    probabilities sum to 1.
    """
    T = p_grid.shape[0]
    out = []

    def rec(t, k, prob, times, ks):
        if t == T:
            out.append((tuple(times), tuple(ks), prob))
            return
        pk = p_grid[t, k] if k > 0 else 0.0
        if pk < 1.0:
            rec(t + 1, k, prob * (1.0 - pk), times, ks)
        if k > 0 and pk > 0.0:
            rec(t + 1, k - 1, prob * pk, times + [t], ks + [k])

    rec(0, max_k, 1.0, [], [])
    return out
