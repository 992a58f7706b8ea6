"""Exact discrete optimal transport, used as a reference for the sliced estimates."""

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog

from .errors import NumericFailure


def exact_transport_cost(cost, a=None, b=None):
    """Optimal value of ``min_P <P, cost>`` over couplings of ``a`` and ``b``.

    Uniform marginals of equal size reduce to an assignment problem; anything
    else is solved as a linear program.
    """
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    if a is None and b is None and n == m:
        rows, cols = linear_sum_assignment(cost)
        return float(cost[rows, cols].mean())
    a = np.full(n, 1.0 / n) if a is None else np.asarray(a, dtype=float)
    b = np.full(m, 1.0 / m) if b is None else np.asarray(b, dtype=float)
    eq_rows = np.kron(np.eye(n), np.ones((1, m)))
    eq_cols = np.kron(np.ones((1, n)), np.eye(m))
    res = linprog(
        cost.ravel(),
        A_eq=np.vstack([eq_rows, eq_cols]),
        b_eq=np.concatenate([a, b]),
        bounds=(0, None),
        method="highs-ds",
    )
    if res.status != 0:
        raise NumericFailure(f"transport LP failed: {res.message}")
    plan = res.x.reshape(n, m)
    return float(np.sum(plan * cost))


def exact_wasserstein(manifold, x, y, p=2.0, x_weights=None, y_weights=None):
    """``W_p`` between two discrete measures under the manifold's geodesic distance."""
    cost = manifold.pairwise_dist(x, y) ** p
    return exact_transport_cost(cost, x_weights, y_weights) ** (1.0 / p)
