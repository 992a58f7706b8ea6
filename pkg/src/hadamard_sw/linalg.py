"""Dense symmetric-matrix kernels.

Every routine accepts stacks of matrices with shape ``(..., d, d)`` and
operates on the trailing two axes.
"""

import logging
import warnings

import numpy as np

from .errors import DomainError, NotPositiveDefinite, NumericFailure

logger = logging.getLogger(__name__)

#: relative eigenvalue gap under which the Loewner divided difference
#: switches to its second-order expansion
TAU_EIG = 1e-7
#: smallest admissible ``lambda_min / lambda_max`` for an SPD matrix
SPD_FLOOR = 1e-12
SYM_TOL = 1e-10


def _fro(x):
    return np.sqrt(np.sum(x * x, axis=(-2, -1)))


def symmetrize(x, warn=True):
    """Return ``(x + x^T) / 2``, warning when ``x`` was noticeably asymmetric."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != x.shape[-2]:
        raise DomainError(f"expected square matrices, got shape {x.shape}")
    asym = np.max(np.abs(x - np.swapaxes(x, -1, -2)), initial=0.0)
    scale = max(1.0, float(np.max(_fro(x), initial=0.0)))
    if warn and asym > SYM_TOL * scale:
        warnings.warn(
            f"symmetrizing input with asymmetry {asym:.3e}", RuntimeWarning, stacklevel=2
        )
    return 0.5 * (x + np.swapaxes(x, -1, -2))


def is_symmetric(x, tol=SYM_TOL):
    x = np.asarray(x, dtype=float)
    scale = np.maximum(1.0, _fro(x))
    asym = np.max(np.abs(x - np.swapaxes(x, -1, -2)), axis=(-2, -1))
    return bool(np.all(asym <= tol * scale))


def sym_eigen(x):
    """Eigendecomposition of symmetric matrices.

    Parameters
    ----------
    x : array-like, shape (..., d, d)

    Returns
    -------
    u : ndarray, shape (..., d, d)
        Orthogonal matrices whose columns are eigenvectors.
    lam : ndarray, shape (..., d)
        Eigenvalues sorted in descending order.
    """
    x = np.asarray(x, dtype=float)
    try:
        lam, u = np.linalg.eigh(x)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigendecomposition did not converge: {exc}") from exc
    lam = lam[..., ::-1]
    u = u[..., ::-1]
    recon = (u * lam[..., None, :]) @ np.swapaxes(u, -1, -2)
    residual = float(np.max(_fro(recon - x) / np.maximum(1.0, _fro(x)), initial=0.0))
    if not np.isfinite(residual) or residual > 1e-8:
        raise NumericFailure("eigendecomposition residual too large", residual=residual)
    return u, lam


def _check_positive(lam):
    lmax = lam[..., :1]
    bad = (lam[..., -1:] <= SPD_FLOOR * lmax) | (lmax <= 0)
    if np.any(bad):
        raise NotPositiveDefinite(
            f"matrix is not positive definite (smallest eigenvalue {np.min(lam):.3e})"
        )


def eig_apply(u, lam, f):
    """Rebuild ``U diag(f(lam)) U^T``."""
    return (u * f(lam)[..., None, :]) @ np.swapaxes(u, -1, -2)


def spd_log(x):
    """Matrix logarithm of SPD matrices."""
    u, lam = sym_eigen(x)
    _check_positive(lam)
    return eig_apply(u, lam, np.log)


def sym_exp(a):
    """Matrix exponential of symmetric matrices."""
    u, lam = sym_eigen(a)
    return eig_apply(u, lam, np.exp)


def spd_sqrt(x):
    u, lam = sym_eigen(x)
    _check_positive(lam)
    return eig_apply(u, lam, np.sqrt)


def spd_inv_sqrt(x):
    u, lam = sym_eigen(x)
    _check_positive(lam)
    return eig_apply(u, lam, lambda w: 1.0 / np.sqrt(w))


def spd_inv(x):
    u, lam = sym_eigen(x)
    _check_positive(lam)
    return eig_apply(u, lam, lambda w: 1.0 / w)


def check_spd(x):
    """Raise unless every matrix in the stack is symmetric positive definite."""
    x = np.asarray(x, dtype=float)
    if not is_symmetric(x):
        raise DomainError("matrix is not symmetric")
    _, lam = sym_eigen(x)
    _check_positive(lam)


def cholesky_lower(x):
    """Lower Cholesky factor ``L`` with positive diagonal, ``L L^T = x``."""
    try:
        return np.linalg.cholesky(np.asarray(x, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky failed: {exc}") from exc


def udu_unit_upper(m):
    """Factor ``m = g diag(d) g^T`` with ``g`` unit upper triangular.

    Runs the Cholesky recursion from the last row upward, i.e. an LDL
    factorization of the index-reversed matrix.

    Returns
    -------
    g : ndarray, shape (..., d, d)
    d : ndarray, shape (..., d)
    """
    m = np.asarray(m, dtype=float)
    rev = m[..., ::-1, ::-1]
    low = cholesky_lower(rev)
    up = low[..., ::-1, ::-1]
    diag = np.diagonal(up, axis1=-2, axis2=-1)
    g = up / diag[..., None, :]
    return g, diag * diag


def loewner(lam):
    """Divided-difference matrix of the logarithm at eigenvalues ``lam``.

    ``gamma[i, j] = (log l_i - log l_j) / (l_i - l_j)`` off the diagonal and
    ``1 / l_i`` on it. Nearly coincident pairs use the second-order expansion
    about ``l_j``.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise DomainError("Loewner matrix of the logarithm needs positive eigenvalues")
    li = lam[..., :, None]
    lj = lam[..., None, :]
    delta = li - lj
    close = np.abs(delta) <= TAU_EIG * np.maximum(li, lj)
    safe = np.where(close, 1.0, delta)
    # log1p keeps the numerator accurate when l_i and l_j are close
    direct = np.log1p(safe / lj) / safe
    r = delta / lj
    series = (1.0 - r / 2.0 + r * r / 3.0) / lj
    return np.where(close, series, direct)


def _eig_or(x, eig):
    if eig is None:
        u, lam = sym_eigen(x)
        _check_positive(lam)
        return u, lam
    return eig


def log_differential(x, v, eig=None):
    """Differential of the matrix logarithm at ``x`` applied to ``v``."""
    u, lam = _eig_or(x, eig)
    ut = np.swapaxes(u, -1, -2)
    return u @ ((ut @ v @ u) * loewner(lam)) @ ut


def log_differential_inverse(x, w, eig=None):
    """Inverse of :func:`log_differential` at ``x`` applied to ``w``."""
    u, lam = _eig_or(x, eig)
    ut = np.swapaxes(u, -1, -2)
    return u @ ((ut @ w @ u) / loewner(lam)) @ ut


def sym_to_vec(a):
    """Isometric embedding of symmetric matrices into R^{d(d+1)/2}.

    Diagonal entries first, then the strict upper triangle scaled by sqrt(2),
    so that Euclidean and Frobenius inner products agree.
    """
    a = np.asarray(a, dtype=float)
    d = a.shape[-1]
    iu = np.triu_indices(d, 1)
    diag = np.diagonal(a, axis1=-2, axis2=-1)
    return np.concatenate([diag, np.sqrt(2.0) * a[..., iu[0], iu[1]]], axis=-1)


def vec_to_sym(vec, d):
    """Inverse of :func:`sym_to_vec`."""
    vec = np.asarray(vec, dtype=float)
    out = np.zeros(vec.shape[:-1] + (d, d))
    idx = np.arange(d)
    out[..., idx, idx] = vec[..., :d]
    iu = np.triu_indices(d, 1)
    off = vec[..., d:] / np.sqrt(2.0)
    out[..., iu[0], iu[1]] = off
    out[..., iu[1], iu[0]] = off
    return out


def random_symmetric(rng, size, d):
    """Isotropic Gaussian symmetric matrices (standard normal in the isometric embedding)."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    z = rng.standard_normal(shape + (d * (d + 1) // 2,))
    return vec_to_sym(z, d)


def random_spd(rng, d, cond=10.0, size=None):
    """Random SPD matrices with prescribed condition number."""
    shape = () if size is None else ((size,) if np.isscalar(size) else tuple(size))
    q, _ = np.linalg.qr(rng.standard_normal(shape + (d, d)))
    lam = np.exp(np.linspace(0.0, np.log(cond), d))
    if d > 1:
        lam = rng.permutation(lam)
    return (q * lam) @ np.swapaxes(q, -1, -2)
