"""Euclidean space and the Mahalanobis pullback ``x -> A^{1/2} x``."""

import numpy as np

from .. import linalg
from ..errors import DomainError
from .base import Manifold


class Euclidean(Manifold):
    kind = "euclidean"
    has_geodesic_closed_form = True
    has_busemann_closed_form = True
    has_geodesic_grad = True
    has_busemann_grad = True

    def __init__(self, dim):
        if int(dim) < 1:
            raise DomainError("dimension must be positive")
        self.dim = int(dim)
        self.point_shape = (self.dim,)

    def origin(self):
        return np.zeros(self.dim)

    def dist(self, x, y):
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def exp(self, x, u):
        return np.asarray(x, dtype=float) + u

    def log(self, x, y):
        return np.asarray(y, dtype=float) - x

    def inner(self, x, u, v):
        return np.sum(np.asarray(u) * v, axis=-1)

    def random_tangent_origin(self, rng, n):
        return rng.standard_normal((n, self.dim))

    def geodesic_coord(self, v, x):
        return np.sum(np.asarray(x, dtype=float) * v, axis=-1)

    def busemann_coord(self, v, x):
        return -self.geodesic_coord(v, x)

    def grad_geodesic_coord(self, v, x):
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(v), np.shape(x))).copy()

    def grad_busemann_coord(self, v, x):
        return -self.grad_geodesic_coord(v, x)


class Mahalanobis(Manifold):
    """``R^d`` with the metric ``<u, v>_x = u^T A v``."""

    kind = "mahalanobis"
    has_geodesic_closed_form = True
    has_busemann_closed_form = True
    has_geodesic_grad = True
    has_busemann_grad = True

    def __init__(self, a):
        a = linalg.symmetrize(np.asarray(a, dtype=float))
        if a.ndim != 2:
            raise DomainError("metric matrix must be two-dimensional")
        linalg.check_spd(a)
        self.a = a
        self.dim = a.shape[0]
        self.point_shape = (self.dim,)
        u, lam = linalg.sym_eigen(a)
        self.a_sqrt = linalg.eig_apply(u, lam, np.sqrt)
        self.a_inv_sqrt = linalg.eig_apply(u, lam, lambda w: 1.0 / np.sqrt(w))

    def _params(self):
        return {"a": self.a.tolist()}

    def origin(self):
        return np.zeros(self.dim)

    def dist(self, x, y):
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return np.sqrt(np.maximum(np.sum(diff * (diff @ self.a), axis=-1), 0.0))

    def exp(self, x, u):
        return np.asarray(x, dtype=float) + u

    def log(self, x, y):
        return np.asarray(y, dtype=float) - x

    def inner(self, x, u, v):
        return np.sum((np.asarray(u) @ self.a) * v, axis=-1)

    def random_tangent_origin(self, rng, n):
        return rng.standard_normal((n, self.dim)) @ self.a_inv_sqrt

    def geodesic_coord(self, v, x):
        return np.sum(np.asarray(x, dtype=float) * (np.asarray(v) @ self.a), axis=-1)

    def busemann_coord(self, v, x):
        return -self.geodesic_coord(v, x)

    def grad_geodesic_coord(self, v, x):
        # A^{-1/2} A^{-1/2} (A v) = v
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(v), np.shape(x))).copy()

    def grad_busemann_coord(self, v, x):
        return -self.grad_geodesic_coord(v, x)


def mahalanobis_dist(a, x, y):
    return Mahalanobis(a).dist(x, y)
