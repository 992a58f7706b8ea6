"""Samplers for synthetic source and target measures."""

import numpy as np

from . import linalg
from .errors import NotPositiveDefinite, SchemaError
from .manifolds.hyperbolic import Lorentz, parallel_transport_from_origin


def _cov_factor(cov, d):
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (d, d):
        raise SchemaError(f"covariance must be {d}x{d}, got {cov.shape}")
    try:
        return np.linalg.cholesky(linalg.symmetrize(cov))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("covariance is not positive definite") from exc


def sample_gaussian(mean, cov, n, rng):
    mean = np.asarray(mean, dtype=float)
    chol = _cov_factor(cov, mean.shape[-1])
    return mean + rng.standard_normal((n, mean.shape[-1])) @ chol.T


def sample_wrapped_normal(manifold, mean, cov, n, rng):
    """Wrapped normal on the Lorentz model.

    A Gaussian tangent vector at the origin is transported to ``mean`` along
    the connecting geodesic and mapped through ``exp_mean``.
    """
    if not isinstance(manifold, Lorentz):
        raise SchemaError("wrapped normals are sampled on the Lorentz model")
    mean = np.asarray(mean, dtype=float)
    manifold.check_point(mean)
    chol = _cov_factor(cov, manifold.d)
    z = rng.standard_normal((n, manifold.d)) @ chol.T
    u = np.concatenate([np.zeros((n, 1)), z], axis=-1)
    u = parallel_transport_from_origin(mean, u, manifold.k)
    return manifold.exp(mean, u)


def sample_mixture(manifold, components, n, rng):
    """Mixture of wrapped normals given as ``(weight, mean, cov)`` triples."""
    components = list(components)
    if not components:
        raise SchemaError("mixture needs at least one component")
    w = np.array([c[0] for c in components], dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise SchemaError("mixture weights must be nonnegative and sum to one")
    labels = rng.choice(len(components), size=n, p=w)
    out = np.empty((n, manifold.n_coords))
    for j, (_, mean, cov) in enumerate(components):
        idx = np.flatnonzero(labels == j)
        if len(idx):
            out[idx] = sample_wrapped_normal(manifold, mean, cov, len(idx), rng)
    return out


def sample_spd_log_gaussian(base, scale, n, rng):
    """``exp(log(base) + scale * S)`` with ``S`` isotropic Gaussian symmetric."""
    if not scale > 0:
        raise SchemaError("scale must be positive")
    base = linalg.symmetrize(base)
    d = base.shape[-1]
    s = linalg.random_symmetric(rng, n, d)
    return linalg.sym_exp(linalg.spd_log(base) + scale * s)
