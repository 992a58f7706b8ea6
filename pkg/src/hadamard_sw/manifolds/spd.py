"""Symmetric positive definite matrices under four Riemannian metrics.

Three of them are pullbacks of a flat space through a diffeomorphism ``phi``:

* Log-Euclidean, ``phi = log`` into symmetric matrices,
* O(n)-invariant Log-Euclidean, ``phi = F o log`` with
  ``F(A) = q A + (p - q) / d Tr(A) I``,
* Log-Cholesky, ``phi(X) = strict_lower(L) + log diag(L)`` into lower
  triangular matrices, where ``X = L L^T``.

For these, ``dist(X, Y) = |phi(X) - phi(Y)|_F`` and the geodesic coordinate
along ``A`` is ``<phi(X), phi_{*,I}(A)>_F``. The affine-invariant metric has no
closed-form geodesic projection, only the Busemann function.
"""

import numpy as np

from .. import linalg
from ..errors import DegenerateDirection, DomainError
from .base import Manifold


def _diag(x):
    return np.diagonal(x, axis1=-2, axis2=-1)


def _diag_embed(v):
    v = np.asarray(v, dtype=float)
    return v[..., :, None] * np.eye(v.shape[-1])


def _tril_strict(x):
    return np.tril(x, -1)


def _frob(a, b):
    return np.sum(a * b, axis=(-2, -1))


def _t(x):
    return np.swapaxes(x, -1, -2)


def lower_to_vec(w):
    """Flatten lower-triangular matrices: diagonal first, then the strict lower part."""
    w = np.asarray(w, dtype=float)
    d = w.shape[-1]
    il = np.tril_indices(d, -1)
    return np.concatenate([_diag(w), w[..., il[0], il[1]]], axis=-1)


def vec_to_lower(vec, d):
    vec = np.asarray(vec, dtype=float)
    out = np.zeros(vec.shape[:-1] + (d, d))
    idx = np.arange(d)
    out[..., idx, idx] = vec[..., :d]
    il = np.tril_indices(d, -1)
    out[..., il[0], il[1]] = vec[..., d:]
    return out


class _SPDBase(Manifold):
    def __init__(self, d):
        self.d = int(d)
        if self.d < 1:
            raise DomainError("matrix size must be positive")
        self.point_shape = (self.d, self.d)

    def origin(self):
        return np.eye(self.d)

    def project(self, x):
        return linalg.symmetrize(x, warn=False)

    def to_tangent(self, x, z):
        return linalg.symmetrize(z, warn=False)

    def check_point(self, x):
        super().check_point(x)
        linalg.check_spd(x)

    def check_tangent(self, x, u):
        super().check_tangent(x, u)
        if not linalg.is_symmetric(u):
            raise DomainError(f"{self.kind}: tangent vector is not symmetric")


class SPDPullback(_SPDBase):
    """SPD matrices with a metric pulled back from a flat matrix space."""

    has_geodesic_closed_form = True
    has_busemann_closed_form = True
    has_geodesic_grad = True
    has_busemann_grad = True

    # ---- chart, implemented by subclasses ------------------------------------
    def phi(self, x):
        raise NotImplementedError

    def phi_inv(self, w):
        raise NotImplementedError

    def dphi(self, x, v):
        """Differential ``phi_{*,x}(v)``."""
        raise NotImplementedError

    def dphi_inv(self, x, w):
        raise NotImplementedError

    def chart_to_vec(self, w):
        """Isometric flattening of the chart space into ``R^m``."""
        return linalg.sym_to_vec(w)

    def dphi_origin(self, a):
        return self.dphi(self.origin(), a)

    # ---- geometry -----------------------------------------------------------
    def chart(self, x):
        """Flat image of ``x``: Euclidean distances here equal manifold distances."""
        return self.chart_to_vec(self.phi(x))

    def chart_direction(self, a):
        return self.chart_to_vec(self.dphi_origin(a))

    def dist(self, x, y):
        diff = self.phi(x) - self.phi(y)
        return np.sqrt(_frob(diff, diff))

    def exp(self, x, u):
        return self.phi_inv(self.phi(x) + self.dphi(x, u))

    def log(self, x, y):
        return self.dphi_inv(x, self.phi(y) - self.phi(x))

    def inner(self, x, u, v):
        return _frob(self.dphi(x, u), self.dphi(x, v))

    def direction_norm(self, v):
        w = self.dphi_origin(v)
        return np.sqrt(_frob(w, w))

    def random_tangent_origin(self, rng, n):
        # isotropic Gaussian in the chart at phi(I), pulled back
        return self.dphi_inv(self.origin(), self._random_chart(rng, n))

    def _random_chart(self, rng, n):
        return linalg.random_symmetric(rng, n, self.d)

    # ---- projections --------------------------------------------------------
    def geodesic_coord(self, v, x):
        return _frob(self.phi(x), self.dphi_origin(v))

    def busemann_coord(self, v, x):
        return -self.geodesic_coord(v, x)

    def grad_geodesic_coord(self, v, x):
        a = self.dphi_origin(v)
        x, a = np.broadcast_arrays(np.asarray(x, dtype=float), a)
        return self.dphi_inv(x, a)

    def grad_busemann_coord(self, v, x):
        return -self.grad_geodesic_coord(v, x)

    def numeric_busemann(self, v, x, t_max=20.0):
        # phi maps the geodesic to the straight line t * phi_{*,I}(v); measuring
        # in the chart avoids forming exp(t v), whose conditioning grows like e^t
        t = np.asarray(t_max, dtype=float)
        diff = self.phi(x) - t[..., None, None] * self.dphi_origin(v)
        return np.sqrt(_frob(diff, diff)) - t

    def coord_matrix(self, v, x, projection):
        feats = self.chart(x)
        table = self.chart_direction(v) @ feats.T
        return -table if projection == "horospherical" else table

    def weighted_grad_sum(self, v, x, coeffs, projection):
        # the gradient is linear in the direction, so sum directions first
        a = np.einsum("ln,lij->nij", coeffs, self.dphi_origin(v))
        g = self.dphi_inv(x, a)
        return -g if projection == "horospherical" else g


class SPDLogEuclidean(SPDPullback):
    kind = "spd_log_euclidean"

    def phi(self, x):
        return linalg.spd_log(x)

    def phi_inv(self, w):
        return linalg.sym_exp(w)

    def dphi(self, x, v):
        return linalg.log_differential(x, v)

    def dphi_inv(self, x, w):
        return linalg.log_differential_inverse(x, w)

    def dphi_origin(self, a):
        return np.asarray(a, dtype=float)


class SPDOnq(SPDPullback):
    """O(n)-invariant Log-Euclidean metric with parameters ``p, q > 0``."""

    kind = "spd_onq"

    def __init__(self, d, p=1.0, q=1.0):
        super().__init__(d)
        self.p = float(p)
        self.q = float(q)
        if not (self.p > 0 and self.q > 0):
            raise DomainError(f"spd_onq needs p > 0 and q > 0, got p={self.p}, q={self.q}")

    def _params(self):
        return {"p": self.p, "q": self.q}

    def f(self, a):
        a = np.asarray(a, dtype=float)
        tr = np.trace(a, axis1=-2, axis2=-1)[..., None, None]
        return self.q * a + (self.p - self.q) / self.d * tr * np.eye(self.d)

    def f_inv(self, b):
        b = np.asarray(b, dtype=float)
        tr = np.trace(b, axis1=-2, axis2=-1)[..., None, None]
        return b / self.q + (1.0 / self.p - 1.0 / self.q) / self.d * tr * np.eye(self.d)

    def phi(self, x):
        return self.f(linalg.spd_log(x))

    def phi_inv(self, w):
        return linalg.sym_exp(self.f_inv(w))

    def dphi(self, x, v):
        return self.f(linalg.log_differential(x, v))

    def dphi_inv(self, x, w):
        return linalg.log_differential_inverse(x, self.f_inv(w))

    def dphi_origin(self, a):
        return self.f(a)


class SPDLogCholesky(SPDPullback):
    kind = "spd_log_cholesky"

    def phi(self, x):
        low = linalg.cholesky_lower(x)
        return _tril_strict(low) + _diag_embed(np.log(_diag(low)))

    def phi_inv(self, w):
        w = np.asarray(w, dtype=float)
        low = _tril_strict(w) + _diag_embed(np.exp(_diag(w)))
        return low @ _t(low)

    def dphi(self, x, v):
        low = linalg.cholesky_lower(x)
        linv = np.linalg.inv(low)
        z = linv @ np.asarray(v, dtype=float) @ _t(linv)
        ldot = low @ (_tril_strict(z) + 0.5 * _diag_embed(_diag(z)))
        return _tril_strict(ldot) + _diag_embed(_diag(ldot) / _diag(low))

    def dphi_inv(self, x, w):
        low = linalg.cholesky_lower(x)
        w = np.asarray(w, dtype=float)
        ldot = _tril_strict(w) + _diag_embed(_diag(low) * _diag(w))
        return ldot @ _t(low) + low @ _t(ldot)

    def dphi_origin(self, a):
        a = np.asarray(a, dtype=float)
        return _tril_strict(a) + 0.5 * _diag_embed(_diag(a))

    def chart_to_vec(self, w):
        return lower_to_vec(w)

    def _random_chart(self, rng, n):
        return vec_to_lower(rng.standard_normal((n, self.d * (self.d + 1) // 2)), self.d)


class SPDAffineInvariant(_SPDBase):
    """Affine-invariant metric ``<U, V>_X = Tr(X^{-1} U X^{-1} V)``."""

    kind = "spd_affine_invariant"
    has_busemann_closed_form = True

    #: smallest admissible relative gap between eigenvalues of a direction
    eig_gap = 1e-8

    def dist(self, x, y):
        return ai_dist(x, y)

    def exp(self, x, u):
        s = linalg.spd_sqrt(x)
        si = linalg.spd_inv(s)
        return s @ linalg.sym_exp(linalg.symmetrize(si @ u @ si, warn=False)) @ s

    def log(self, x, y):
        s = linalg.spd_sqrt(x)
        si = linalg.spd_inv(s)
        return s @ linalg.spd_log(linalg.symmetrize(si @ y @ si, warn=False)) @ s

    def inner(self, x, u, v):
        xi = linalg.spd_inv(x)
        return np.trace(xi @ u @ xi @ v, axis1=-2, axis2=-1)

    def direction_norm(self, v):
        v = np.asarray(v, dtype=float)
        return np.sqrt(_frob(v, v))

    def random_tangent_origin(self, rng, n):
        return linalg.random_symmetric(rng, n, self.d)

    def geodesic(self, v, t):
        t = np.asarray(t, dtype=float)
        return linalg.sym_exp(t[..., None, None] * np.asarray(v, dtype=float))

    def busemann_coord(self, v, x):
        return ai_busemann_coord(v, x, self.eig_gap)

    def numeric_busemann(self, v, x, t_max=20.0):
        """Truncated limit ``d(x, exp(t A)) - t`` evaluated in the eigenframe of ``A``.

        By affine invariance ``d(x, exp(t A)) = |log(D^{-1/2} P^T x P D^{-1/2})|_F``
        with ``D = exp(t lam)``. The scaled matrix is formed entrywise and is
        graded, so its eigenvalues are taken as squared singular values of its
        Cholesky factor, which keeps them relatively accurate.
        """
        pvec, lam = linalg.sym_eigen(v)
        t = np.asarray(t_max, dtype=float)
        s = np.exp(-0.5 * t[..., None] * lam)
        m = (_t(pvec) @ np.asarray(x, dtype=float) @ pvec) * s[..., :, None] * s[..., None, :]
        m = linalg.symmetrize(m, warn=False)
        low = linalg.cholesky_lower(m[..., ::-1, ::-1])
        logeig = 2.0 * np.log(np.linalg.svd(low, compute_uv=False))
        return np.sqrt(np.sum(logeig * logeig, axis=-1)) - t


def le_dist(x, y):
    return SPDLogEuclidean(np.shape(x)[-1]).dist(x, y)


def le_coord(a, x):
    return _frob(linalg.spd_log(x), a)


def le_grad_coord(a, x):
    return linalg.log_differential_inverse(x, np.broadcast_to(a, np.shape(x)))


def onq_coord(a, x, p, q):
    m = SPDOnq(np.shape(x)[-1], p, q)
    return m.geodesic_coord(a, x)


def lc_coord(a, x):
    return SPDLogCholesky(np.shape(x)[-1]).geodesic_coord(a, x)


def ai_dist(x, y):
    """``|log(X^{-1/2} Y X^{-1/2})|_F``."""
    si = linalg.spd_inv_sqrt(x)
    m = linalg.symmetrize(si @ np.asarray(y, dtype=float) @ si, warn=False)
    lg = linalg.spd_log(m)
    return np.sqrt(_frob(lg, lg))


def ai_busemann_coord(a, m, eig_gap=1e-8):
    """Busemann function of the affine-invariant geodesic ``t -> exp(t A)`` at ``M``.

    In the eigenbasis of ``A`` (eigenvalues strictly decreasing), factor the
    rotated ``M`` as ``g D g^T`` with ``g`` unit upper triangular; the value is
    ``-<diag(eigenvalues of A), log D>``.
    """
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    pvec, lam = linalg.sym_eigen(a)
    if lam.shape[-1] > 1:
        gaps = lam[..., :-1] - lam[..., 1:]
        scale = np.maximum(np.max(np.abs(lam), axis=-1, keepdims=True), 1e-300)
        if np.any(gaps <= eig_gap * scale):
            raise DegenerateDirection(
                "direction has repeated eigenvalues; Busemann function undefined for this construction"
            )
    mt = _t(pvec) @ m @ pvec
    _, dd = linalg.udu_unit_upper(linalg.symmetrize(mt, warn=False))
    return -np.sum(lam * np.log(dd), axis=-1)
