"""Common manifold interface and the generic numeric oracles.

Points, tangent vectors and directions are plain numpy arrays. A manifold
with ``point_shape == (k,)`` stores a batch of ``n`` points as an ``(n, k)``
array; SPD manifolds use ``(n, d, d)``. All geometric operations broadcast
over leading axes, so ``geodesic_coord(V[:, None], X[None])`` yields the
``(L, n)`` table of coordinates for ``L`` directions and ``n`` points.
"""

import numpy as np

from ..errors import ConstraintViolation, DivergenceError, UnsupportedProjection

GEODESIC = "geodesic"
HOROSPHERICAL = "horospherical"
PROJECTIONS = (GEODESIC, HOROSPHERICAL)


class Manifold:
    """Cartan-Hadamard manifold with a distinguished origin.

    Subclasses implement the geometry (``dist``, ``exp``, ``log``, ``inner``)
    and whichever closed-form coordinates exist for them.
    """

    kind = None
    point_shape = ()
    has_geodesic_closed_form = False
    has_busemann_closed_form = False
    has_geodesic_grad = False
    has_busemann_grad = False

    # ---- layout -----------------------------------------------------------
    @property
    def point_ndim(self):
        return len(self.point_shape)

    @property
    def n_coords(self):
        return int(np.prod(self.point_shape))

    def descriptor(self):
        """JSON-compatible description used by file headers."""
        return {"kind": self.kind, "dim": self.n_coords, "params": self._params()}

    def _params(self):
        return {}

    def __eq__(self, other):
        return type(self) is type(other) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(repr(self.descriptor()))

    def __repr__(self):
        return f"{type(self).__name__}({self._params()})"

    def to_flat(self, x):
        x = np.asarray(x, dtype=float)
        return x.reshape(x.shape[: x.ndim - self.point_ndim] + (self.n_coords,))

    def from_flat(self, flat):
        flat = np.asarray(flat, dtype=float)
        return flat.reshape(flat.shape[:-1] + self.point_shape)

    def _sum(self, a):
        """Reduce the trailing point axes of an elementwise product."""
        axes = tuple(range(-self.point_ndim, 0))
        return np.sum(a, axis=axes)

    # ---- geometry ---------------------------------------------------------
    def origin(self):
        raise NotImplementedError

    def dist(self, x, y):
        raise NotImplementedError

    def exp(self, x, u):
        raise NotImplementedError

    def log(self, x, y):
        raise NotImplementedError

    def inner(self, x, u, v):
        """Riemannian inner product of tangent vectors ``u`` and ``v`` at ``x``."""
        raise NotImplementedError

    def norm(self, x, u):
        return np.sqrt(np.maximum(self.inner(x, u, u), 0.0))

    def pairwise_dist(self, x, y):
        """Matrix of distances between two batches of points."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.dist(x[:, None], y[None])

    def project(self, x):
        """Pull points that drifted numerically back onto the manifold."""
        return np.asarray(x, dtype=float)

    def to_tangent(self, x, z):
        """Project an ambient vector onto the tangent space at ``x``."""
        return np.asarray(z, dtype=float)

    # ---- validation -------------------------------------------------------
    def check_point(self, x):
        """Raise :class:`ConstraintViolation` unless ``x`` lies on the manifold."""
        x = np.asarray(x, dtype=float)
        if x.shape[x.ndim - self.point_ndim :] != self.point_shape:
            raise ConstraintViolation(
                f"{self.kind}: expected trailing shape {self.point_shape}, got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise ConstraintViolation(f"{self.kind}: non-finite coordinates")

    def check_tangent(self, x, u):
        u = np.asarray(u, dtype=float)
        if u.shape[u.ndim - self.point_ndim :] != self.point_shape:
            raise ConstraintViolation(f"{self.kind}: bad tangent shape {u.shape}")

    def check_direction(self, v, tol=1e-10):
        self.check_tangent(self.origin(), v)
        nrm = self.direction_norm(v)
        if np.any(np.abs(nrm - 1.0) > tol):
            raise ConstraintViolation(
                f"{self.kind}: direction not unit norm (max deviation "
                f"{np.max(np.abs(nrm - 1.0)):.2e})"
            )

    # ---- directions -------------------------------------------------------
    def random_tangent_origin(self, rng, n):
        """Isotropic Gaussian tangent vectors at the origin (w.r.t. the metric there)."""
        raise NotImplementedError

    def direction_tangent(self, v):
        """Unit tangent vector at the origin that a stored direction stands for."""
        return np.asarray(v, dtype=float)

    def direction_norm(self, v):
        v = np.asarray(v, dtype=float)
        return self.norm(self.origin(), self.direction_tangent(v))

    def normalize_direction(self, v):
        nrm = self.direction_norm(v)
        return np.asarray(v, dtype=float) / nrm.reshape(nrm.shape + (1,) * self.point_ndim)

    def sample_directions(self, rng, n):
        """Draw ``n`` directions uniformly from the unit tangent sphere at the origin."""
        return self.normalize_direction(self.random_tangent_origin(rng, n))

    def geodesic(self, v, t):
        """Point ``exp_o(t v)`` on the geodesic through the origin along direction ``v``."""
        t = np.asarray(t, dtype=float)
        u = self.direction_tangent(v)
        return self.exp(self.origin(), t.reshape(t.shape + (1,) * self.point_ndim) * u)

    def random_tangent(self, rng, x):
        """Random unit tangent vectors at each point of ``x``."""
        x = np.asarray(x, dtype=float)
        z = rng.standard_normal(x.shape)
        u = self.to_tangent(x, z)
        nrm = self.norm(x, u)
        return u / nrm.reshape(nrm.shape + (1,) * self.point_ndim)

    def random_points(self, rng, n, radius=1.0):
        """Points ``exp_o(r v)`` with ``v`` uniform on the unit sphere and ``r ~ U[0, radius]``."""
        v = self.sample_directions(rng, n)
        r = rng.uniform(0.0, radius, size=n)
        return self.geodesic(v, r)

    # ---- projections ------------------------------------------------------
    def geodesic_coord(self, v, x):
        """Coordinate of the geodesic projection of ``x`` on the geodesic along ``v``."""
        raise UnsupportedProjection(f"{self.kind}: no closed-form geodesic projection")

    def busemann_coord(self, v, x):
        """Busemann function of the geodesic ray along ``v`` evaluated at ``x``."""
        raise UnsupportedProjection(f"{self.kind}: no closed-form Busemann function")

    def grad_geodesic_coord(self, v, x):
        raise UnsupportedProjection(f"{self.kind}: no geodesic-projection gradient")

    def grad_busemann_coord(self, v, x):
        raise UnsupportedProjection(f"{self.kind}: no Busemann gradient")

    def supports(self, projection, gradient=False):
        if projection == GEODESIC:
            return self.has_geodesic_grad if gradient else self.has_geodesic_closed_form
        if projection == HOROSPHERICAL:
            return self.has_busemann_grad if gradient else self.has_busemann_closed_form
        raise ValueError(f"unknown projection {projection!r}")

    def coord(self, v, x, projection):
        """Slice coordinate: geodesic coordinate or the Busemann value."""
        if projection == GEODESIC:
            return self.geodesic_coord(v, x)
        if projection == HOROSPHERICAL:
            return self.busemann_coord(v, x)
        raise ValueError(f"unknown projection {projection!r}")

    def grad_coord(self, v, x, projection):
        if projection == GEODESIC:
            return self.grad_geodesic_coord(v, x)
        if projection == HOROSPHERICAL:
            return self.grad_busemann_coord(v, x)
        raise ValueError(f"unknown projection {projection!r}")

    def coord_matrix(self, v, x, projection):
        """``(L, n)`` table of coordinates of ``n`` points along ``L`` directions."""
        v = np.asarray(v, dtype=float)
        x = np.asarray(x, dtype=float)
        return self.coord(v[:, None], x[None], projection)

    def weighted_grad_sum(self, v, x, coeffs, projection):
        """``sum_l coeffs[l, i] * grad coord(v_l, x_i)`` for every point ``x_i``."""
        v = np.asarray(v, dtype=float)
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for ell in range(v.shape[0]):
            g = self.grad_coord(v[ell], x, projection)
            out += coeffs[ell].reshape((-1,) + (1,) * self.point_ndim) * g
        return out

    def project_point(self, v, x, projection=GEODESIC):
        """Map ``x`` to its projection on the geodesic along ``v``.

        Horospherical projections land on ``exp_o(-B(x) v)``.
        """
        c = self.coord(v, x, projection)
        if projection == HOROSPHERICAL:
            c = -c
        return self.geodesic(v, c)

    # ---- numeric oracles --------------------------------------------------
    def _geodesic_slope_sign(self, v, t, x):
        # sign of d/dt d(gamma(t), x)^2 = -2 <gamma'(t), log_gamma(t) x>
        g = self.geodesic(v, t)
        g1 = self.geodesic(v, t + 1.0)
        vel = self.log(g, g1)
        return -self.inner(g, vel, self.log(g, x))

    def numeric_geodesic_coord(self, v, x, tol=1e-10, max_expand=60):
        """Minimize ``t -> d(exp_o(t v), x)^2`` by bracketing and bisection.

        The derivative of the objective is obtained from the first-order
        optimality condition ``<gamma'(t), log_{gamma(t)}(x)> = 0`` evaluated
        with the manifold's own ``log`` and ``inner``.
        """
        v = np.asarray(v, dtype=float)
        x = np.asarray(x, dtype=float)
        nd = self.point_ndim
        shape = np.broadcast_shapes(v.shape[: v.ndim - nd], x.shape[: x.ndim - nd])
        v = np.broadcast_to(v, shape + self.point_shape)
        x = np.broadcast_to(x, shape + self.point_shape)
        lo = -np.ones(shape)
        hi = np.ones(shape)
        for _ in range(max_expand):
            bad = self._geodesic_slope_sign(v, lo, x) > 0
            if not np.any(bad):
                break
            lo = np.where(bad, 2.0 * lo, lo)
        else:
            raise DivergenceError("numeric geodesic projection: bracket expansion diverged")
        for _ in range(max_expand):
            bad = self._geodesic_slope_sign(v, hi, x) < 0
            if not np.any(bad):
                break
            hi = np.where(bad, 2.0 * hi, hi)
        else:
            raise DivergenceError("numeric geodesic projection: bracket expansion diverged")
        while np.max(hi - lo) > tol:
            mid = 0.5 * (lo + hi)
            s = self._geodesic_slope_sign(v, mid, x)
            lo = np.where(s < 0, mid, lo)
            hi = np.where(s < 0, hi, mid)
        return 0.5 * (lo + hi)

    def numeric_busemann(self, v, x, t_max=20.0):
        """Truncated Busemann limit ``d(x, exp_o(t_max v)) - t_max``."""
        return self.dist(x, self.geodesic(v, t_max)) - t_max


def fd_directional(manifold, f, x, u, eps=1e-5):
    """Central difference of ``f`` along the geodesic ``t -> exp_x(t u)``."""
    plus = f(manifold.exp(x, eps * u))
    minus = f(manifold.exp(x, -eps * u))
    return (plus - minus) / (2.0 * eps)
