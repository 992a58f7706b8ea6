"""Manifold implementations and the descriptor-based factory."""

import math

from ..errors import SchemaError
from .base import GEODESIC, HOROSPHERICAL, PROJECTIONS, Manifold, fd_directional
from .euclidean import Euclidean, Mahalanobis
from .hyperbolic import Lorentz, Poincare
from .product import Product
from .spd import SPDAffineInvariant, SPDLogCholesky, SPDLogEuclidean, SPDOnq

KINDS = (
    "euclidean",
    "mahalanobis",
    "lorentz",
    "poincare",
    "spd_log_euclidean",
    "spd_onq",
    "spd_log_cholesky",
    "spd_affine_invariant",
    "product",
)

_SPD = {
    "spd_log_euclidean": SPDLogEuclidean,
    "spd_log_cholesky": SPDLogCholesky,
    "spd_affine_invariant": SPDAffineInvariant,
}


def _matrix_size(kind, dim):
    d = math.isqrt(dim)
    if d * d != dim:
        raise SchemaError(f"{kind}: dim {dim} is not a square number of matrix entries")
    return d


def make_manifold(desc):
    """Build a manifold from a ``{"kind", "dim", "params"}`` descriptor."""
    if isinstance(desc, Manifold):
        return desc
    if not isinstance(desc, dict) or "kind" not in desc:
        raise SchemaError("manifold descriptor must be an object with a 'kind' field")
    kind = desc["kind"]
    params = desc.get("params") or {}
    dim = desc.get("dim")
    if kind not in KINDS:
        raise SchemaError(f"unknown manifold kind {kind!r}")
    if kind == "product":
        comps = params.get("components")
        if not isinstance(comps, list) or len(comps) < 2:
            raise SchemaError("product descriptor needs at least two components")
        m = Product([make_manifold(c) for c in comps])
    else:
        if not isinstance(dim, int) or dim < 1:
            raise SchemaError(f"{kind}: 'dim' must be a positive integer")
        if kind == "euclidean":
            m = Euclidean(dim)
        elif kind == "mahalanobis":
            if "a" not in params:
                raise SchemaError("mahalanobis descriptor needs params.a")
            m = Mahalanobis(params["a"])
        elif kind in ("lorentz", "poincare"):
            k = params.get("curvature", -1.0)
            if kind == "lorentz":
                if dim < 2:
                    raise SchemaError("lorentz: dim counts the d + 1 ambient coordinates")
                m = Lorentz(dim - 1, k)
            else:
                m = Poincare(dim, k)
        elif kind == "spd_onq":
            m = SPDOnq(_matrix_size(kind, dim), params.get("p", 1.0), params.get("q", 1.0))
        else:
            m = _SPD[kind](_matrix_size(kind, dim))
    if dim is not None and m.n_coords != dim:
        raise SchemaError(f"{kind}: descriptor dim {dim} does not match {m.n_coords} coordinates")
    return m


__all__ = [
    "GEODESIC",
    "HOROSPHERICAL",
    "PROJECTIONS",
    "KINDS",
    "Manifold",
    "Euclidean",
    "Mahalanobis",
    "Lorentz",
    "Poincare",
    "SPDLogEuclidean",
    "SPDOnq",
    "SPDLogCholesky",
    "SPDAffineInvariant",
    "Product",
    "make_manifold",
    "fd_directional",
]
