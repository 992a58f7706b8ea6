"""Hyperbolic space of curvature ``K < 0``: Lorentz model and Poincare ball.

Lorentz points have ``d + 1`` ambient coordinates ``(x_0, ..., x_d)`` with
``<x, x>_L = 1/K`` and ``x_0 > 0``; the origin is ``(1/sqrt(-K), 0, ..., 0)``.
Lorentz directions are ``(0, v)`` with ``v`` on the Euclidean unit sphere.
Poincare points lie in the ball ``|x|^2 < -1/K`` and Poincare directions are
ideal points, i.e. Euclidean unit vectors.
"""

import numpy as np

from ..errors import ConstraintViolation, DomainError
from .base import Manifold


def _check_curvature(k):
    k = float(k)
    if not k < 0:
        raise DomainError(f"hyperbolic curvature must be negative, got {k}")
    return k


def _arccosh1p(u):
    """``arccosh(1 + u)`` for ``u >= 0`` without cancellation near 0."""
    u = np.maximum(u, 0.0)
    return np.log1p(u + np.sqrt(u * (u + 2.0)))


def _sinhc(s):
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < 1e-6
    safe = np.where(small, 1.0, s)
    return np.where(small, 1.0 + s * s / 6.0, np.sinh(safe) / safe)


def minkowski_inner(x, y):
    """``-x_0 y_0 + sum_i x_i y_i`` along the last axis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sum(x[..., 1:] * y[..., 1:], axis=-1) - x[..., 0] * y[..., 0]


def lorentz_origin(d, k=-1.0):
    x0 = np.zeros(d + 1)
    x0[0] = 1.0 / np.sqrt(-k)
    return x0


def lorentz_dist(x, y, k=-1.0):
    k = _check_curvature(k)
    c = -k
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = k * minkowski_inner(x, y)
    if np.any(z < 1.0 - 1e-6):
        raise ConstraintViolation(
            f"arccosh argument {np.min(z):.8f} below 1: points are off the hyperboloid"
        )
    diff = x - y
    # chordal form is accurate for nearby points, arccosh for distant ones
    chord = np.sqrt(np.maximum(minkowski_inner(diff, diff), 0.0))
    near = 2.0 * np.arcsinh(np.sqrt(c) * chord / 2.0)
    far = _arccosh1p(np.maximum(z, 1.0) - 1.0)
    return np.where(z < 2.0, near, far) / np.sqrt(c)


def poincare_dist(x, y, k=-1.0):
    k = _check_curvature(k)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = 1.0 + k * np.sum(x * x, axis=-1)
    ny = 1.0 + k * np.sum(y * y, axis=-1)
    if np.any(nx <= 0) or np.any(ny <= 0):
        raise ConstraintViolation("point on or outside the Poincare ball boundary")
    if np.any(nx < 1e-9) or np.any(ny < 1e-9):
        return lorentz_dist(ball_to_lorentz(x, k), ball_to_lorentz(y, k), k)
    diff = x - y
    u = -2.0 * k * np.sum(diff * diff, axis=-1) / (nx * ny)
    return _arccosh1p(u) / np.sqrt(-k)


def lorentz_to_ball(x, k=-1.0):
    """Stereographic projection from the hyperboloid onto the ball."""
    sc = np.sqrt(-_check_curvature(k))
    x = np.asarray(x, dtype=float)
    return x[..., 1:] / (1.0 + sc * x[..., :1])


def ball_to_lorentz(b, k=-1.0):
    """Inverse of :func:`lorentz_to_ball`."""
    k = _check_curvature(k)
    c = -k
    b = np.asarray(b, dtype=float)
    nb = np.sum(b * b, axis=-1, keepdims=True)
    den = 1.0 - c * nb
    if np.any(den <= 0):
        raise ConstraintViolation("point on or outside the Poincare ball boundary")
    x0 = (1.0 + c * nb) / (np.sqrt(c) * den)
    return np.concatenate([x0, 2.0 * b / den], axis=-1)


def lorentz_to_ball_differential(x, u, k=-1.0):
    """Push a tangent vector at a Lorentz point through :func:`lorentz_to_ball`."""
    sc = np.sqrt(-_check_curvature(k))
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    den = 1.0 + sc * x[..., :1]
    return u[..., 1:] / den - x[..., 1:] * sc * u[..., :1] / den**2


def ball_to_lorentz_differential(b, w, k=-1.0):
    """Push a tangent vector at a ball point through :func:`ball_to_lorentz`."""
    k = _check_curvature(k)
    c = -k
    b = np.asarray(b, dtype=float)
    w = np.asarray(w, dtype=float)
    nb = np.sum(b * b, axis=-1, keepdims=True)
    bw = np.sum(b * w, axis=-1, keepdims=True)
    den = 1.0 - c * nb
    d0 = 4.0 * np.sqrt(c) * bw / den**2
    dx = 2.0 * w / den + 4.0 * c * b * bw / den**2
    return np.concatenate([d0, dx], axis=-1)


def lorentz_geodesic_coord(v, x, k=-1.0):
    k = _check_curvature(k)
    sc = np.sqrt(-k)
    x = np.asarray(x, dtype=float)
    x0 = lorentz_origin(x.shape[-1] - 1, k)
    arg = -minkowski_inner(x, v) / minkowski_inner(x, x0) / sc
    arg = np.clip(arg, -1.0 + 1e-15, 1.0 - 1e-15)
    return np.arctanh(arg) / sc


def lorentz_busemann_coord(v, x, k=-1.0):
    k = _check_curvature(k)
    sc = np.sqrt(-k)
    x = np.asarray(x, dtype=float)
    x0 = lorentz_origin(x.shape[-1] - 1, k)
    arg = -sc * minkowski_inner(x, sc * x0 + np.asarray(v, dtype=float))
    if np.any(arg <= 0):
        raise ConstraintViolation("non-positive Busemann log argument: corrupted point or direction")
    return np.log(arg) / sc


def lorentz_grad_busemann(v, x, k=-1.0):
    k = _check_curvature(k)
    sc = np.sqrt(-k)
    x = np.asarray(x, dtype=float)
    w = sc * lorentz_origin(x.shape[-1] - 1, k) + np.asarray(v, dtype=float)
    den = minkowski_inner(x, w)[..., None]
    # tangent projection of the ambient gradient w / (sqrt(c) <x, w>)
    return (w / den - k * x) / sc


def lorentz_grad_geodesic(v, x, k=-1.0):
    k = _check_curvature(k)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    x0 = lorentz_origin(x.shape[-1] - 1, k)
    xo = minkowski_inner(x, x0)[..., None]
    xv = minkowski_inner(x, v)[..., None]
    return (xo * v - xv * x0) / (xv * xv + k * xo * xo)


def _ball_s(v, x, k):
    c = -k
    x = np.asarray(x, dtype=float)
    p = np.sum(x * v, axis=-1)
    a = 1.0 + c * np.sum(x * x, axis=-1)
    # rationalized root of c p s^2 - a s + p = 0, free of cancellation
    s = 2.0 * p / (a + np.sqrt(np.maximum(a * a - 4.0 * c * p * p, 0.0)))
    tiny = np.abs(p) <= 1e-12 * np.sqrt(np.sum(x * x, axis=-1))
    return np.where(tiny, 0.0, s)


def poincare_geodesic_coord(v, x, k=-1.0):
    k = _check_curvature(k)
    sc = np.sqrt(-k)
    return 2.0 / sc * np.arctanh(np.clip(sc * _ball_s(v, x, k), -1.0 + 1e-16, 1.0 - 1e-16))


def poincare_busemann_coord(v, x, k=-1.0):
    k = _check_curvature(k)
    sc = np.sqrt(-k)
    x = np.asarray(x, dtype=float)
    den = 1.0 + k * np.sum(x * x, axis=-1)
    if np.any(den <= 0):
        raise ConstraintViolation("point on or outside the Poincare ball boundary")
    diff = np.asarray(v, dtype=float) - sc * x
    return np.log(np.sum(diff * diff, axis=-1) / den) / sc


def poincare_grad_busemann(v, x):
    """Riemannian gradient of the Poincare Busemann function at curvature -1.

    The Euclidean gradient ``2 (x / (1 - |x|^2) - (v - x) / |v - x|^2)`` is
    rescaled by the inverse metric ``((1 - |x|^2) / 2)^2``.
    """
    x = np.asarray(x, dtype=float)
    nx = np.sum(x * x, axis=-1, keepdims=True)
    diff = np.asarray(v, dtype=float) - x
    nd = np.sum(diff * diff, axis=-1, keepdims=True)
    if np.any(nd == 0):
        raise ConstraintViolation("point collides with the ideal point")
    egrad = 2.0 * (x / (1.0 - nx) - diff / nd)
    return ((1.0 - nx) / 2.0) ** 2 * egrad


def _ball_grad_via_lorentz(lorentz_grad, v, x, k):
    x = np.asarray(x, dtype=float)
    y = ball_to_lorentz(x, k)
    g = lorentz_grad(ball_direction_to_lorentz(v), y, k)
    return lorentz_to_ball_differential(y, g, k)


def parallel_transport_from_origin(mean, u, k=-1.0):
    """Transport ``u`` in the tangent space at the origin to ``mean`` along their geodesic."""
    k = _check_curvature(k)
    mean = np.asarray(mean, dtype=float)
    u = np.asarray(u, dtype=float)
    x0 = lorentz_origin(mean.shape[-1] - 1, k)
    coef = -k * minkowski_inner(mean, u) / (1.0 + k * minkowski_inner(x0, mean))
    return u + coef[..., None] * (x0 + mean)


class Lorentz(Manifold):
    kind = "lorentz"
    has_geodesic_closed_form = True
    has_busemann_closed_form = True
    has_geodesic_grad = True
    has_busemann_grad = True

    def __init__(self, d, k=-1.0):
        self.d = int(d)
        if self.d < 1:
            raise DomainError("dimension must be positive")
        self.k = _check_curvature(k)
        self.point_shape = (self.d + 1,)

    def _params(self):
        return {"curvature": self.k}

    @property
    def sqrt_c(self):
        return np.sqrt(-self.k)

    def origin(self):
        return lorentz_origin(self.d, self.k)

    def dist(self, x, y):
        return lorentz_dist(x, y, self.k)

    def inner(self, x, u, v):
        return minkowski_inner(u, v)

    def exp(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        n = np.sqrt(np.maximum(minkowski_inner(u, u), 0.0))[..., None]
        s = self.sqrt_c * n
        return np.cosh(s) * x + _sinhc(s) * u

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        diff = y - x
        # y - K<x,y>x rewritten through y - x to avoid cancellation
        u = diff + (self.k / 2.0) * minkowski_inner(diff, diff)[..., None] * x
        s = self.sqrt_c * self.dist(x, y)[..., None]
        return u / _sinhc(s)

    def to_tangent(self, x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        return z - self.k * minkowski_inner(x, z)[..., None] * x

    def project(self, x):
        x = np.array(x, dtype=float)
        x[..., 0] = np.sqrt(-1.0 / self.k + np.sum(x[..., 1:] ** 2, axis=-1))
        return x

    def constraint_residual(self, x):
        x = np.asarray(x, dtype=float)
        return np.abs(minkowski_inner(x, x) - 1.0 / self.k)

    def check_point(self, x, tol=1e-8):
        super().check_point(x)
        x = np.asarray(x, dtype=float)
        scale = np.maximum(1.0, x[..., 0] ** 2)
        if np.any(self.constraint_residual(x) > tol * scale) or np.any(x[..., 0] <= 0):
            raise ConstraintViolation("point is not on the upper hyperboloid sheet")

    def check_tangent(self, x, u, tol=1e-8):
        super().check_tangent(x, u)
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        scale = np.maximum(1.0, np.abs(x[..., 0]) * np.max(np.abs(u), axis=-1))
        if np.any(np.abs(minkowski_inner(x, u)) > tol * scale):
            raise ConstraintViolation("vector is not tangent to the hyperboloid")

    def random_tangent_origin(self, rng, n):
        z = rng.standard_normal((n, self.d))
        return np.concatenate([np.zeros((n, 1)), z], axis=-1)

    def geodesic_coord(self, v, x):
        return lorentz_geodesic_coord(v, x, self.k)

    def busemann_coord(self, v, x):
        return lorentz_busemann_coord(v, x, self.k)

    def grad_geodesic_coord(self, v, x):
        return lorentz_grad_geodesic(v, x, self.k)

    def grad_busemann_coord(self, v, x):
        return lorentz_grad_busemann(v, x, self.k)

    def to_ball(self, x):
        return lorentz_to_ball(x, self.k)


class Poincare(Manifold):
    kind = "poincare"
    has_geodesic_closed_form = True
    has_busemann_closed_form = True
    has_geodesic_grad = True
    has_busemann_grad = True

    def __init__(self, d, k=-1.0):
        self.d = int(d)
        if self.d < 1:
            raise DomainError("dimension must be positive")
        self.k = _check_curvature(k)
        self.point_shape = (self.d,)

    def _params(self):
        return {"curvature": self.k}

    @property
    def sqrt_c(self):
        return np.sqrt(-self.k)

    def origin(self):
        return np.zeros(self.d)

    def _lambda(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 / (1.0 + self.k * np.sum(x * x, axis=-1))

    def _mobius_add(self, x, y):
        c = -self.k
        xy = np.sum(x * y, axis=-1, keepdims=True)
        xx = np.sum(x * x, axis=-1, keepdims=True)
        yy = np.sum(y * y, axis=-1, keepdims=True)
        num = (1.0 + 2.0 * c * xy + c * yy) * x + (1.0 - c * xx) * y
        return num / (1.0 + 2.0 * c * xy + c * c * xx * yy)

    def dist(self, x, y):
        return poincare_dist(x, y, self.k)

    def inner(self, x, u, v):
        return self._lambda(x) ** 2 * np.sum(np.asarray(u) * v, axis=-1)

    def exp(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        sc = self.sqrt_c
        nu = np.sqrt(np.sum(u * u, axis=-1, keepdims=True))
        lam = self._lambda(x)[..., None]
        s = sc * lam * nu / 2.0
        # tanh(s) / (sqrt(c) |u|) = (lam / 2) tanh(s) / s
        safe = np.where(s < 1e-8, 1.0, s)
        ratio = np.where(s < 1e-8, 1.0 - s * s / 3.0, np.tanh(safe) / safe)
        step = ratio * lam / 2.0 * u
        return self._mobius_add(x, step)

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        sc = self.sqrt_c
        w = self._mobius_add(-x, y)
        nw = np.sqrt(np.sum(w * w, axis=-1, keepdims=True))
        lam = self._lambda(x)[..., None]
        z = sc * nw
        # |log| = d(x, y) / lam; the distance stays accurate near the boundary
        # where arctanh(sqrt(c) |w|) would saturate
        d = self.dist(x, y)[..., None]
        safe = np.where(z < 1e-8, 1.0, nw)
        far = d / (lam * safe) * w
        near = 2.0 / lam * (1.0 + z * z / 3.0) * w
        return np.where(z < 1e-8, near, far)

    def check_point(self, x):
        super().check_point(x)
        x = np.asarray(x, dtype=float)
        if np.any(np.sum(x * x, axis=-1) >= -1.0 / self.k):
            raise ConstraintViolation("point on or outside the Poincare ball boundary")

    def random_tangent_origin(self, rng, n):
        return rng.standard_normal((n, self.d))

    def direction_tangent(self, v):
        # the unit-speed geodesic towards ideal point v leaves 0 with velocity v / lambda_0
        return np.asarray(v, dtype=float) / 2.0

    def geodesic_coord(self, v, x):
        return poincare_geodesic_coord(v, x, self.k)

    def busemann_coord(self, v, x):
        return poincare_busemann_coord(v, x, self.k)

    def grad_busemann_coord(self, v, x):
        if self.k == -1.0:
            return poincare_grad_busemann(v, x)
        # other curvatures: push the Lorentz gradient through the isometry
        return _ball_grad_via_lorentz(lorentz_grad_busemann, v, x, self.k)

    def grad_geodesic_coord(self, v, x):
        return _ball_grad_via_lorentz(lorentz_grad_geodesic, v, x, self.k)

    def to_lorentz(self, x):
        return ball_to_lorentz(x, self.k)


def lorentz_direction_to_ball(v):
    """Identify a Lorentz direction ``(0, v)`` with the ideal point ``v``."""
    return np.asarray(v, dtype=float)[..., 1:]


def ball_direction_to_lorentz(v):
    v = np.asarray(v, dtype=float)
    return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)
