"""Hyperbolic multidimensional scaling on the Lorentz model (curvature -1).

Each point is parameterised by a tangent vector ``w`` at the origin,
``z = (cosh r, sinh r * w / r)`` with ``r = |w|``, so the constraint holds
by construction and the stress is minimised with plain gradient descent.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, SchemaError


@dataclass
class MdsProblem:
    delta: np.ndarray
    scale: float = 1.0
    target_dim: int = 2
    max_iters: int = 5000
    step_size: float = 0.1
    seed: int = 0
    tol: float = 1e-9
    init: str = "spectral"

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=float)
        if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
            raise SchemaError("distance matrix must be square")
        if np.any(delta < 0) or np.any(np.diag(delta) != 0):
            raise SchemaError("distance matrix needs a zero diagonal and nonnegative entries")
        if np.max(np.abs(delta - delta.T), initial=0.0) > 1e-10 * max(1.0, np.max(delta)):
            raise SchemaError("distance matrix must be symmetric")
        if not self.scale > 0:
            raise SchemaError("scale must be positive")
        if self.init not in ("spectral", "random"):
            raise SchemaError(f"unknown MDS initialisation {self.init!r}")
        self.delta = 0.5 * (delta + delta.T)


@dataclass
class MdsResult:
    points: np.ndarray
    tangent: np.ndarray
    loss: float
    iterations: int
    losses: list


def _embed_parts(w):
    r = np.sqrt(np.sum(w * w, axis=-1, keepdims=True))
    small = r < 1e-9
    rs = np.where(small, 1.0, r)
    sinhc = np.where(small, 1.0 + r * r / 6.0, np.sinh(rs) / rs)
    return r, small, sinhc


def to_hyperboloid(w):
    """Map tangent coordinates to points of the Lorentz model."""
    w = np.asarray(w, dtype=float)
    r, _, sinhc = _embed_parts(w)
    return np.concatenate([np.cosh(r), sinhc * w], axis=-1)


def _pair_terms(z):
    diff = z[:, None, :] - z[None, :, :]
    q = np.sum(diff[..., 1:] ** 2, axis=-1) - diff[..., 0] ** 2
    q = np.maximum(q, 0.0)
    dist = 2.0 * np.arcsinh(np.sqrt(q) / 2.0)
    return q, dist


def mds_loss(w, problem):
    """Stress ``sum_{i<j} (d(z_i, z_j) - scale * delta_ij)^2``."""
    z = to_hyperboloid(w)
    _, dist = _pair_terms(z)
    res = np.triu(dist - problem.scale * problem.delta, 1)
    return float(np.sum(res * res))


def mds_grad(w, problem):
    w = np.asarray(w, dtype=float)
    z = to_hyperboloid(w)
    q, dist = _pair_terms(z)
    res = dist - problem.scale * problem.delta
    np.fill_diagonal(res, 0.0)
    sinh_d = np.sqrt(q * (q + 4.0)) / 2.0
    coef = np.where(sinh_d > 1e-12, 2.0 * res / np.where(sinh_d > 1e-12, sinh_d, 1.0), 0.0)
    # d(dist_ij)/dz_i = -J z_j / sinh(dist_ij), J = diag(-1, 1, ..., 1)
    jz = z.copy()
    jz[:, 0] *= -1.0
    gz = -coef @ jz
    r, small, sinhc = _embed_parts(w)
    rs = np.where(small, 1.0, r)
    u = w / rs
    g0 = gz[:, :1]
    gs = gz[:, 1:]
    ug = np.sum(u * gs, axis=-1, keepdims=True)
    # (cosh r - sinh r / r) vanishes like r^2 / 3
    tail = np.where(small, r * r / 3.0, np.cosh(r) - sinhc)
    return g0 * sinhc * w + sinhc * gs + tail * ug * u


def spectral_init(problem):
    """Tangent coordinates from the Lorentzian Gram matrix ``cosh(scale * delta)``.

    For exactly hyperbolic data the Gram matrix has one positive eigenvalue
    (the time axis) and ``target_dim`` negative ones (the space axes); their
    eigenvectors recover the points up to an isometry.
    """
    gram = np.cosh(np.minimum(problem.scale * problem.delta, 700.0))
    lam, vec = np.linalg.eigh(gram)
    k = int(problem.target_dim)
    neg = np.maximum(-lam[:k], 0.0)
    space = vec[:, :k] * np.sqrt(neg)
    nrm = np.sqrt(np.sum(space * space, axis=-1, keepdims=True))
    r = np.arcsinh(nrm)
    return np.where(nrm > 1e-12, r / np.where(nrm > 1e-12, nrm, 1.0), 1.0) * space


def mds_fit(problem, init=None):
    """Gradient descent with backtracking on the stress.

    ``init`` overrides the starting tangent coordinates; otherwise they come
    from :func:`spectral_init` or, with ``problem.init == "random"``, from a
    small Gaussian drawn with ``problem.seed``.
    """
    n = problem.delta.shape[0]
    if init is not None:
        w = np.array(init, dtype=float)
    elif problem.init == "spectral":
        w = spectral_init(problem)
    else:
        rng = np.random.default_rng(int(problem.seed))
        w = 0.1 * rng.standard_normal((n, int(problem.target_dim)))
    loss = mds_loss(w, problem)
    lr = float(problem.step_size)
    losses = [loss]
    it = 0
    for it in range(1, int(problem.max_iters) + 1):
        g = mds_grad(w, problem)
        accepted = False
        for _ in range(60):
            cand = w - lr * g
            new = mds_loss(cand, problem)
            if not np.isfinite(new):
                lr *= 0.5
                continue
            if new <= loss:
                accepted = True
                break
            lr *= 0.5
        if not accepted:
            break
        change = loss - new
        w, loss = cand, new
        losses.append(loss)
        lr *= 1.1
        if change <= problem.tol * max(loss, 1e-300) or loss == 0.0:
            break
    if not np.isfinite(loss):
        raise DivergenceError("MDS stress is not finite", step=it)
    return MdsResult(to_hyperboloid(w), w, loss, it, losses)
