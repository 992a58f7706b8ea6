"""Finite products of Cartan-Hadamard manifolds.

Points, tangent vectors and directions are flat concatenations of the
component blocks. A product direction ``v = (v_1, ..., v_n)`` has component
weights ``lam_i = |v_i|``; the unit-speed product geodesic moves along
component ``i`` at speed ``lam_i``.
"""

import numpy as np

from ..errors import DescriptorMismatch, DomainError
from .base import Manifold

#: component weight under which a block is treated as absent from a direction
ZERO_WEIGHT = 1e-12


class Product(Manifold):
    kind = "product"
    has_geodesic_closed_form = True  # numeric minimisation, see geodesic_coord
    has_geodesic_grad = False

    def __init__(self, components):
        components = list(components)
        if len(components) < 2:
            raise DomainError("a product manifold needs at least two components")
        self.components = components
        sizes = [c.n_coords for c in components]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        self.point_shape = (int(self.offsets[-1]),)
        self.has_busemann_closed_form = all(c.has_busemann_closed_form for c in components)
        self.has_busemann_grad = all(c.has_busemann_grad for c in components)

    def descriptor(self):
        return {
            "kind": self.kind,
            "dim": self.n_coords,
            "params": {"components": [c.descriptor() for c in self.components]},
        }

    def split(self, x):
        """Component blocks of ``x``, each reshaped to its component's point shape."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_coords:
            raise DescriptorMismatch(f"expected {self.n_coords} coordinates, got {x.shape[-1]}")
        return [
            c.from_flat(x[..., a:b])
            for c, a, b in zip(self.components, self.offsets[:-1], self.offsets[1:])
        ]

    def join(self, blocks):
        flat = [c.to_flat(b) for c, b in zip(self.components, blocks)]
        shape = np.broadcast_shapes(*[f.shape[:-1] for f in flat])
        return np.concatenate([np.broadcast_to(f, shape + f.shape[-1:]) for f in flat], axis=-1)

    def _map(self, fn, *args):
        parts = [self.split(a) for a in args]
        return [fn(c, *(p[i] for p in parts)) for i, c in enumerate(self.components)]

    # ---- geometry -----------------------------------------------------------
    def origin(self):
        return self.join([c.origin() for c in self.components])

    def dist(self, x, y):
        d = self._map(lambda c, a, b: c.dist(a, b), x, y)
        return np.sqrt(sum(di * di for di in d))

    def exp(self, x, u):
        return self.join(self._map(lambda c, a, b: c.exp(a, b), x, u))

    def log(self, x, y):
        return self.join(self._map(lambda c, a, b: c.log(a, b), x, y))

    def inner(self, x, u, v):
        return sum(self._map(lambda c, a, b, w: c.inner(a, b, w), x, u, v))

    def project(self, x):
        return self.join(self._map(lambda c, a: c.project(a), x))

    def to_tangent(self, x, z):
        return self.join(self._map(lambda c, a, b: c.to_tangent(a, b), x, z))

    def check_point(self, x):
        super().check_point(x)
        self._map(lambda c, a: c.check_point(a), x)

    # ---- directions ---------------------------------------------------------
    def direction_tangent(self, v):
        return self.join(self._map(lambda c, a: c.direction_tangent(a), v))

    def component_weights(self, v):
        """``lam_i = |v_i|_{o_i}`` for every component, stacked on the last axis."""
        return np.stack(self._map(lambda c, a: c.direction_norm(a), v), axis=-1)

    def random_tangent_origin(self, rng, n):
        return self.join([c.random_tangent_origin(rng, n) for c in self.components])

    # ---- projections --------------------------------------------------------
    def geodesic_coord(self, v, x):
        # no closed form: minimise t -> d(gamma(t), x)^2 numerically
        return self.numeric_geodesic_coord(v, x)

    def _unit_blocks(self, v):
        lam = self.component_weights(v)
        blocks = self.split(v)
        out = []
        for i, b in enumerate(blocks):
            li = lam[..., i]
            safe = np.where(li < ZERO_WEIGHT, 1.0, li)
            out.append(b / safe.reshape(safe.shape + (1,) * self.components[i].point_ndim))
        return lam, out

    def busemann_coord(self, v, x):
        lam, units = self._unit_blocks(v)
        xs = self.split(x)
        total = 0.0
        for i, c in enumerate(self.components):
            li = lam[..., i]
            term = c.busemann_coord(units[i], xs[i])
            total = total + np.where(li < ZERO_WEIGHT, 0.0, li * term)
        return total

    def grad_busemann_coord(self, v, x):
        lam, units = self._unit_blocks(v)
        xs = self.split(x)
        blocks = []
        for i, c in enumerate(self.components):
            li = lam[..., i]
            g = c.grad_busemann_coord(units[i], xs[i])
            scale = np.where(li < ZERO_WEIGHT, 0.0, li)
            blocks.append(scale.reshape(scale.shape + (1,) * c.point_ndim) * g)
        return self.join(blocks)

    def numeric_busemann(self, v, x, t_max=20.0):
        # component i sits at time lam_i * t_max on its own unit-speed geodesic
        lam, units = self._unit_blocks(v)
        xs = self.split(x)
        total = 0.0
        for i, c in enumerate(self.components):
            ti = lam[..., i] * t_max
            di = c.numeric_busemann(units[i], xs[i], ti) + ti
            total = total + di * di
        return np.sqrt(total) - t_max
