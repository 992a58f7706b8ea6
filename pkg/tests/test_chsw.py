import numpy as np
import pytest

from helpers import sliced_reference
from hadamard_sw.chsw import (
    ChswConfig,
    DiscreteMeasure,
    chsw,
    chsw_with_directions,
    direction_stream,
    gaussian_kernel,
    gram_matrix,
)
from hadamard_sw.errors import DescriptorMismatch, SchemaError, UnsupportedProjection
from hadamard_sw.manifolds import Euclidean, Lorentz, SPDAffineInvariant, SPDLogEuclidean


def test_identical_measures_give_zero(rng):
    m = Lorentz(2)
    x = m.random_points(rng, 30, 2.0)
    for proj in ("geodesic", "horospherical"):
        est = chsw(DiscreteMeasure(m, x), DiscreteMeasure(m, x), ChswConfig(projection=proj))
        assert est.value == 0.0


def test_euclidean_matches_reference_sliced_wasserstein(rng):
    m = Euclidean(4)
    x = rng.normal(size=(50, 4))
    y = rng.normal(size=(50, 4)) + 1.0
    est = chsw(DiscreteMeasure(m, x), DiscreteMeasure(m, y), ChswConfig(num_projections=40, seed=3))
    ref = sliced_reference(x, y, direction_stream(m, 3, 40))
    np.testing.assert_allclose(est.per_direction, ref, atol=1e-12)
    assert est.value_p == pytest.approx(ref.mean(), abs=1e-12)
    assert est.value == pytest.approx(np.sqrt(est.value_p))
    assert est.directions_used == 40


def test_horospherical_euclidean_equals_geodesic(rng):
    m = Euclidean(3)
    x = rng.normal(size=(20, 3))
    y = rng.normal(size=(25, 3))
    g = chsw(DiscreteMeasure(m, x), DiscreteMeasure(m, y), ChswConfig(projection="geodesic"))
    h = chsw(DiscreteMeasure(m, x), DiscreteMeasure(m, y), ChswConfig(projection="horospherical"))
    assert g.value == pytest.approx(h.value, rel=1e-12)


def test_seed_determinism_and_thread_independence(rng):
    m = Lorentz(2)
    mu = DiscreteMeasure(m, m.random_points(rng, 40, 2.0))
    nu = DiscreteMeasure(m, m.random_points(rng, 30, 2.0))
    a = chsw(mu, nu, ChswConfig(num_projections=100, seed=11))
    b = chsw(mu, nu, ChswConfig(num_projections=100, seed=11, threads=8))
    c = chsw(mu, nu, ChswConfig(num_projections=100, seed=12))
    np.testing.assert_array_equal(a.per_direction, b.per_direction)
    assert a.value != c.value


def test_direction_stream_prefix_property():
    m = SPDLogEuclidean(2)
    long = direction_stream(m, 4, 40)
    np.testing.assert_array_equal(direction_stream(m, 4, 10, start=30), long[30:])
    m.check_direction(long)


def test_weighted_measure_equals_duplicated_points(rng):
    m = Lorentz(2)
    x = m.random_points(rng, 6, 1.0)
    y = m.random_points(rng, 5, 1.0)
    w = np.array([2, 1, 1, 1, 1, 2]) / 8.0
    dup = np.concatenate([x, x[[0, 5]]])
    cfg = ChswConfig(num_projections=16)
    a = chsw(DiscreteMeasure(m, x, w), DiscreteMeasure(m, y), cfg)
    b = chsw(DiscreteMeasure(m, dup), DiscreteMeasure(m, y), cfg)
    assert a.value_p == pytest.approx(b.value_p, abs=1e-12)


def test_errors(rng):
    lor = Lorentz(2)
    x = lor.random_points(rng, 5, 1.0)
    with pytest.raises(DescriptorMismatch):
        chsw(DiscreteMeasure(lor, x), DiscreteMeasure(Lorentz(2, -0.5), Lorentz(2, -0.5).random_points(rng, 5, 1.0)), ChswConfig())
    ai = SPDAffineInvariant(2)
    s = ai.random_points(rng, 4, 1.0)
    with pytest.raises(UnsupportedProjection):
        chsw(DiscreteMeasure(ai, s), DiscreteMeasure(ai, s), ChswConfig(projection="geodesic"))
    with pytest.raises(SchemaError):
        DiscreteMeasure(lor, np.empty((0, 3)))
    with pytest.raises(SchemaError):
        DiscreteMeasure(lor, x, np.full(5, 0.3))
    with pytest.raises(SchemaError):
        ChswConfig(p=0.5)
    with pytest.raises(SchemaError):
        ChswConfig(num_projections=0)


def test_affine_invariant_horospherical_runs(rng):
    ai = SPDAffineInvariant(3)
    a = DiscreteMeasure(ai, ai.random_points(rng, 10, 1.0))
    b = DiscreteMeasure(ai, ai.random_points(rng, 10, 1.0))
    est = chsw(a, b, ChswConfig(projection="horospherical", num_projections=20))
    assert est.value > 0


def test_kernel_and_gram(rng):
    m = Euclidean(2)
    ms = [DiscreteMeasure(m, rng.normal(size=(10, 2)) + i) for i in range(4)]
    cfg = ChswConfig(num_projections=20)
    gram = gram_matrix(ms, 0.5, cfg)
    np.testing.assert_allclose(np.diag(gram), 1.0)
    np.testing.assert_allclose(gram, gram.T)
    dirs = direction_stream(m, cfg.seed, 20)
    k01 = np.exp(-0.5 * chsw_with_directions(ms[0], ms[1], 2.0, dirs, "geodesic").value_p)
    assert gram[0, 1] == pytest.approx(k01)
    assert gaussian_kernel(ms[0], ms[1], 0.5, cfg) == pytest.approx(k01)
    with pytest.raises(SchemaError):
        gaussian_kernel(ms[0], ms[1], -1.0, cfg)
