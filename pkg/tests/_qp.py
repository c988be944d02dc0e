"""Projected-gradient QP oracle for the SVM dual, shared across test modules.

Maximizes sum(a) - a.Qa/2 over the box [0, C]^n intersected with y.a = 0.
The projection onto that set is computed exactly from the sorted breakpoints
of the piecewise-linear constraint function, so the only approximation is
the gradient iteration itself.
"""

import numpy as np


def project_box_hyperplane(v, y, C):
    """Exact Euclidean projection of v onto {0 <= a <= C, y.a = 0}."""
    v = np.asarray(v, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)

    def value(nu):
        return float(y @ np.clip(v - nu * y, 0.0, C))

    # a_i(nu) = clip(v_i - nu*y_i, 0, C) changes slope where the clip
    # saturates; with y_i = +-1 those knots sit at these nu values.
    knots = np.concatenate([(v - C) * y, v * y])
    knots.sort()
    lo, hi = knots[0] - 1.0, knots[-1] + 1.0
    g_lo, g_hi = value(lo), value(hi)
    for nu in knots:
        g = value(nu)
        if g >= 0.0:
            lo, g_lo = nu, g
        if g <= 0.0 and nu < hi:
            hi, g_hi = nu, g
            break
    if g_lo == g_hi:
        nu = lo
    else:
        nu = lo + (hi - lo) * g_lo / (g_lo - g_hi)
    return np.clip(v - nu * y, 0.0, C)


def qp_oracle(K, y, C, max_iters=60_000, stall=1e-13):
    """Projected-gradient ascent on the SVM dual."""
    y = np.asarray(y, dtype=np.float64)
    Q = K * np.outer(y, y)
    step = 1.0 / (np.linalg.eigvalsh((Q + Q.T) / 2).max() + 1.0)
    a = project_box_hyperplane(np.full(len(y), C / 2.0), y, C)
    for _ in range(max_iters):
        nxt = project_box_hyperplane(a + step * (1.0 - Q @ a), y, C)
        if np.abs(nxt - a).max() < stall:
            a = nxt
            break
        a = nxt
    return a


def dual_objective(K, y, a):
    y = np.asarray(y, dtype=np.float64)
    Q = K * np.outer(y, y)
    return float(a.sum() - 0.5 * a @ Q @ a)
