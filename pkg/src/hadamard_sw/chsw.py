"""Monte-Carlo sliced Wasserstein estimators on Cartan-Hadamard manifolds.

Every direction ``l`` is drawn from its own generator seeded with
``(seed, l)``, and directions are processed in fixed-size chunks whose
results are concatenated in order. The estimate is therefore bitwise
independent of how many worker threads evaluate the chunks.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ot1d
from .errors import DescriptorMismatch, SchemaError, UnsupportedProjection
from .manifolds import PROJECTIONS, make_manifold

#: directions per work unit; fixed so results never depend on the thread count
CHUNK = 16


class DiscreteMeasure:
    """Weighted point cloud on a manifold.

    ``weights=None`` means uniform weights and enables the sorted fast path.
    """

    def __init__(self, manifold, points, weights=None, validate=True):
        self.manifold = make_manifold(manifold)
        points = np.asarray(points, dtype=float)
        if points.ndim == self.manifold.point_ndim:
            points = points[None]
        if points.shape[0] == 0:
            raise SchemaError("empty measure")
        if validate:
            self.manifold.check_point(points)
        self.points = points
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (len(points),):
                raise SchemaError(f"expected {len(points)} weights, got shape {weights.shape}")
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
                raise SchemaError("weights must be nonnegative and sum to one")
        self.weights = weights

    def __len__(self):
        return len(self.points)

    @property
    def is_uniform(self):
        return self.weights is None

    def weight_vector(self):
        n = len(self.points)
        return np.full(n, 1.0 / n) if self.weights is None else self.weights


@dataclass
class ChswConfig:
    p: float = 2.0
    num_projections: int = 64
    projection: str = "geodesic"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.p < 1:
            raise SchemaError("p must be at least 1")
        if int(self.num_projections) < 1:
            raise SchemaError("num_projections must be positive")
        if self.projection not in PROJECTIONS:
            raise SchemaError(f"unknown projection {self.projection!r}")
        if int(self.seed) < 0:
            raise SchemaError("seed must be a nonnegative integer")


@dataclass
class ChswEstimate:
    value: float
    value_p: float
    per_direction: np.ndarray = field(repr=False)
    directions_used: int
    stderr: float


def direction_stream(manifold, seed, count, stream=(), start=0):
    """Directions ``start, ..., start + count - 1`` of the counter-based stream."""
    out = []
    for ell in range(start, start + count):
        rng = np.random.default_rng([int(seed), *stream, ell])
        out.append(manifold.sample_directions(rng, 1)[0])
    return np.stack(out)


def _check_pair(mu, nu, projection, gradient=False):
    if mu.manifold != nu.manifold:
        raise DescriptorMismatch(
            f"measures live on different manifolds: {mu.manifold.descriptor()} "
            f"vs {nu.manifold.descriptor()}"
        )
    m = mu.manifold
    if projection not in PROJECTIONS:
        raise SchemaError(f"unknown projection {projection!r}")
    if not m.supports(projection, gradient):
        raise UnsupportedProjection(f"{m.kind} does not support the {projection} projection")


def _chunk_costs(mu, nu, p, projection, directions):
    m = mu.manifold
    px = m.coord_matrix(directions, mu.points, projection)
    py = m.coord_matrix(directions, nu.points, projection)
    return ot1d.wasserstein_1d(px, py, p, mu.weights, nu.weights)


def _map_chunks(fn, n_items, threads):
    bounds = [(a, min(a + CHUNK, n_items)) for a in range(0, n_items, CHUNK)]
    if threads is None or threads <= 1 or len(bounds) == 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bounds))
    return np.concatenate(parts)


def _estimate(per):
    per = np.asarray(per, dtype=float)
    value_p = float(np.mean(per))
    stderr = float(np.std(per, ddof=1) / np.sqrt(len(per))) if len(per) > 1 else 0.0
    return value_p, stderr


def chsw_with_directions(mu, nu, p, directions, projection, threads=1):
    """Sliced estimate over caller-supplied directions."""
    _check_pair(mu, nu, projection)
    directions = np.asarray(directions, dtype=float)
    if directions.ndim == mu.manifold.point_ndim:
        directions = directions[None]
    per = _map_chunks(
        lambda a, b: _chunk_costs(mu, nu, p, projection, directions[a:b]),
        len(directions),
        threads,
    )
    value_p, stderr = _estimate(per)
    return ChswEstimate(max(value_p, 0.0) ** (1.0 / p), value_p, per, len(per), stderr)


def chsw(mu, nu, cfg):
    """Monte-Carlo estimate of the sliced distance with ``cfg.num_projections`` directions."""
    _check_pair(mu, nu, cfg.projection)
    m = mu.manifold
    L = int(cfg.num_projections)

    def work(a, b):
        dirs = direction_stream(m, cfg.seed, b - a, start=a)
        return _chunk_costs(mu, nu, cfg.p, cfg.projection, dirs)

    per = _map_chunks(work, L, cfg.threads)
    value_p, stderr = _estimate(per)
    return ChswEstimate(max(value_p, 0.0) ** (1.0 / cfg.p), value_p, per, L, stderr)


def gaussian_kernel(mu, nu, gamma, cfg):
    """``exp(-gamma * CHSW_2^2(mu, nu))``."""
    if not gamma > 0:
        raise SchemaError("gamma must be positive")
    if cfg.p != 2:
        raise SchemaError("the Gaussian kernel is defined for p = 2")
    return float(np.exp(-gamma * chsw(mu, nu, cfg).value_p))


def gram_matrix(measures, gamma, cfg):
    """Kernel matrix of a collection of measures, all pairs sharing one direction set."""
    if not gamma > 0:
        raise SchemaError("gamma must be positive")
    if cfg.p != 2:
        raise SchemaError("the Gaussian kernel is defined for p = 2")
    measures = list(measures)
    if not measures:
        raise SchemaError("empty collection of measures")
    m = measures[0].manifold
    for mu in measures[1:]:
        _check_pair(measures[0], mu, cfg.projection)
    dirs = direction_stream(m, cfg.seed, int(cfg.num_projections))
    k = len(measures)
    gram = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            est = chsw_with_directions(measures[i], measures[j], 2.0, dirs, cfg.projection, cfg.threads)
            gram[i, j] = gram[j, i] = np.exp(-gamma * est.value_p)
    return gram
