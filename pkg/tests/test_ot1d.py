import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_sw.ot1d import (
    interp_cdf,
    interp_quantile,
    potential_derivative,
    w1d_sorted,
    w1d_weighted,
    wasserstein_1d,
)

floats = st.floats(-10, 10, allow_nan=False, allow_subnormal=False)


def test_frozen_weighted_example():
    assert w1d_weighted([0.0], [0.0, 1.0], 1.0) == pytest.approx(0.5, abs=1e-15)


def test_frozen_cdf_midpoint():
    assert interp_cdf([0.0, 1.0], 0.5) == pytest.approx(0.75, abs=1e-15)


def test_two_diracs():
    for p in (1.0, 2.0, 3.5):
        assert w1d_sorted([1.0], [-2.0], p) == pytest.approx(3.0**p)


def test_sorted_matches_permutation_brute_force(rng):
    x = rng.normal(size=6)
    y = rng.normal(size=6)
    best = min(np.mean((x - y[list(perm)]) ** 2) for perm in itertools.permutations(range(6)))
    assert w1d_sorted(x, y, 2.0) == pytest.approx(best, abs=1e-12)


def test_batched_rows(rng):
    x = rng.normal(size=(4, 7))
    y = rng.normal(size=(4, 5))
    out = wasserstein_1d(x, y, 2.0)
    assert out.shape == (4,)
    np.testing.assert_allclose(out[2], w1d_weighted(x[2], y[2], 2.0))


def test_splitting_an_atom(rng):
    x = rng.normal(size=5)
    y = rng.normal(size=4)
    w = rng.dirichlet(np.ones(4))
    split_y = np.concatenate([y, y[:1]])
    split_w = np.concatenate([w[:1] / 2, w[1:], w[:1] / 2])
    assert w1d_weighted(x, split_y, 2.0, None, split_w) == pytest.approx(w1d_weighted(x, y, 2.0, None, w), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(floats, min_size=1, max_size=6), st.lists(floats, min_size=1, max_size=6), st.lists(floats, min_size=1, max_size=6))
def test_weighted_is_a_metric(a, b, c):
    p = 2.0
    d = lambda u, v: w1d_weighted(u, v, p) ** (1 / p)
    assert d(a, b) == pytest.approx(d(b, a), abs=1e-12)
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-10
    assert d(a, a) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(floats, min_size=2, max_size=8, unique=True))
def test_quantile_inverts_cdf_inside_support(vals):
    vals = np.array(vals)
    t = np.linspace(vals.min(), vals.max(), 25)[1:-1]
    cdf = interp_cdf(vals, t)
    assert np.all(np.diff(cdf) >= -1e-15)
    np.testing.assert_allclose(interp_quantile(vals, cdf), t, atol=1e-9)


def test_cdf_and_quantile_clamp():
    vals = np.array([0.0, 1.0, 3.0])
    np.testing.assert_allclose(interp_cdf(vals, [-5.0, 10.0]), [0.0, 1.0])
    np.testing.assert_allclose(interp_quantile(vals, [0.0, 1.0]), [0.0, 3.0])


def test_single_atom():
    assert interp_cdf([2.0], 1.9) == 0.0
    assert interp_cdf([2.0], 2.0) == 1.0
    np.testing.assert_allclose(interp_quantile([2.0], [0.1, 0.9]), 2.0)


def test_potential_derivative_examples(rng):
    assert potential_derivative([0.0], [1.0], 0.0) == pytest.approx(-1.0)
    x = rng.normal(size=30)
    np.testing.assert_allclose(potential_derivative(x, x, x), 0.0, atol=1e-12)
    a = rng.normal(size=4000)
    b = rng.normal(size=4000) + 2.0
    t = np.linspace(-1.0, 1.0, 11)
    np.testing.assert_allclose(potential_derivative(a, b, t), -2.0, atol=0.15)


def test_one_step_full_transport(rng):
    x = rng.normal(size=40)
    y = rng.normal(size=40) * 2 + 1
    moved = x - potential_derivative(x, y, x)
    assert w1d_sorted(moved, y) == pytest.approx(0.0, abs=1e-9)


def test_bad_weights():
    with pytest.raises(ValueError):
        w1d_weighted([0.0, 1.0], [0.0], 2.0, [0.5, 0.6])
    with pytest.raises(ValueError):
        w1d_sorted([0.0, 1.0], [0.0], 2.0)
