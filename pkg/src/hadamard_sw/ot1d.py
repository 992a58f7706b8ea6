"""One-dimensional optimal transport in closed form.

All functions take samples along the last axis and broadcast over any
leading axes, so a ``(L, n)`` table of projections is handled in one call.
Weights, when given, are 1-D and shared by every row.
"""

import numpy as np


def _check_weights(w, n):
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"expected {n} weights, got shape {w.shape}")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be nonnegative and sum to one")
    return w


def _uniform(n):
    return np.full(n, 1.0 / n)


def w1d_sorted(x, y, p=2.0):
    """``W_p^p`` between two uniform samples of equal size by sorting."""
    x = np.sort(np.asarray(x, dtype=float), axis=-1, kind="stable")
    y = np.sort(np.asarray(y, dtype=float), axis=-1, kind="stable")
    if x.shape[-1] != y.shape[-1]:
        raise ValueError("w1d_sorted needs equal sample counts")
    return np.mean(np.abs(x - y) ** p, axis=-1)


def _w1d_row(xs, cx, ys, cy, p):
    # integrate |F_x^{-1}(u) - F_y^{-1}(u)|^p over the merged breakpoints of both
    # piecewise-constant quantile functions
    u = np.concatenate([[0.0], np.sort(np.concatenate([cx, cy]), kind="stable")])
    du = np.diff(u)
    mid = 0.5 * (u[:-1] + u[1:])
    ix = np.minimum(np.searchsorted(cx, mid, side="left"), len(xs) - 1)
    iy = np.minimum(np.searchsorted(cy, mid, side="left"), len(ys) - 1)
    return np.sum(du * np.abs(xs[ix] - ys[iy]) ** p)


def w1d_weighted(x, y, p=2.0, x_weights=None, y_weights=None):
    """``W_p^p`` between two weighted samples via their quantile functions."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = x.shape[-1], y.shape[-1]
    wx = _uniform(n) if x_weights is None else _check_weights(x_weights, n)
    wy = _uniform(m) if y_weights is None else _check_weights(y_weights, m)
    lead = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
    xb = np.broadcast_to(x, lead + (n,)).reshape(-1, n)
    yb = np.broadcast_to(y, lead + (m,)).reshape(-1, m)
    out = np.empty(xb.shape[0])
    for r in range(xb.shape[0]):
        px = np.argsort(xb[r], kind="stable")
        py = np.argsort(yb[r], kind="stable")
        out[r] = _w1d_row(xb[r, px], np.cumsum(wx[px]), yb[r, py], np.cumsum(wy[py]), p)
    return out.reshape(lead)


def wasserstein_1d(x, y, p=2.0, x_weights=None, y_weights=None):
    """Dispatch to the sorted fast path when both samples are uniform and equal-sized."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x_weights is None and y_weights is None and x.shape[-1] == y.shape[-1]:
        return w1d_sorted(x, y, p)
    return w1d_weighted(x, y, p, x_weights, y_weights)


def _knots(values, weights):
    """Sorted support and cumulative weights, zero-weight atoms and ties merged."""
    order = np.argsort(values, kind="stable")
    xs = values[order]
    cs = np.cumsum(weights[order])
    keep = weights[order] > 0
    xs, cs = xs[keep], cs[keep]
    # for tied values keep the largest cumulative weight, i.e. P(X <= t)
    last = np.append(xs[1:] != xs[:-1], True)
    return xs[last], cs[last]


def _rows(values, other, weights):
    values = np.asarray(values, dtype=float)
    other = np.asarray(other, dtype=float)
    n = values.shape[-1]
    w = _uniform(n) if weights is None else _check_weights(weights, n)
    lead = np.broadcast_shapes(values.shape[:-1], other.shape[:-1])
    vb = np.broadcast_to(values, lead + (n,)).reshape(-1, n)
    ob = np.broadcast_to(other, lead + other.shape[-1:]).reshape(vb.shape[0], -1)
    return vb, ob, w, lead + other.shape[-1:]


def interp_cdf(values, t, weights=None):
    """Piecewise-linear CDF through the knots ``(x_(i), w_(1) + ... + w_(i))``.

    Zero below the smallest atom and one from the largest atom on.
    """
    vb, tb, w, shape = _rows(values, t, weights)
    out = np.empty(tb.shape)
    for r in range(vb.shape[0]):
        xs, cs = _knots(vb[r], w)
        out[r] = np.interp(tb[r], xs, cs, left=0.0, right=1.0)
        out[r][tb[r] < xs[0]] = 0.0
    return out.reshape(shape)


def interp_quantile(values, u, weights=None):
    """Inverse of :func:`interp_cdf`, clamped to the extreme atoms outside the knots."""
    vb, ub, w, shape = _rows(values, u, weights)
    out = np.empty(ub.shape)
    for r in range(vb.shape[0]):
        xs, cs = _knots(vb[r], w)
        out[r] = np.interp(ub[r], cs, xs)
    return out.reshape(shape)


def potential_derivative(mu, nu, t, mu_weights=None, nu_weights=None):
    """Derivative of the Kantorovich potential, ``t - F_nu^{-1}(F_mu(t))``."""
    t = np.asarray(t, dtype=float)
    return t - interp_quantile(nu, interp_cdf(mu, t, mu_weights), nu_weights)
