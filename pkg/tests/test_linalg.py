import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_sw import linalg
from hadamard_sw.errors import DomainError, NotPositiveDefinite


def test_loewner_frozen_values():
    gamma = linalg.loewner(np.array([np.e, 1.0]))
    assert gamma[0, 1] == pytest.approx(1.0 / (np.e - 1.0), rel=1e-14)
    assert gamma[1, 0] == pytest.approx(1.0 / (np.e - 1.0), rel=1e-14)
    assert gamma[0, 0] == pytest.approx(1.0 / np.e, rel=1e-14)
    assert gamma[1, 1] == pytest.approx(1.0, rel=1e-14)


def test_loewner_near_ties_are_continuous():
    lam = np.array([2.0, 2.0 * (1.0 + 1e-9)])
    assert linalg.loewner(lam)[0, 1] == pytest.approx(0.5, rel=1e-8)


def test_loewner_rejects_nonpositive():
    with pytest.raises(DomainError):
        linalg.loewner(np.array([1.0, 0.0]))


def test_udu_frozen_example():
    g, d = linalg.udu_unit_upper(np.array([[2.0, 1.0], [1.0, 1.0]]))
    np.testing.assert_allclose(g, [[1.0, 1.0], [0.0, 1.0]], atol=1e-15)
    np.testing.assert_allclose(d, [1.0, 1.0], atol=1e-15)


def test_udu_reconstructs(rng):
    m = linalg.random_spd(rng, 4, cond=50.0, size=10)
    g, d = linalg.udu_unit_upper(m)
    np.testing.assert_allclose(np.tril(g, -1), 0.0, atol=0)
    np.testing.assert_allclose(np.diagonal(g, axis1=-2, axis2=-1), 1.0)
    np.testing.assert_allclose((g * d[..., None, :]) @ np.swapaxes(g, -1, -2), m, atol=1e-12)


def test_log_exp_roundtrip_against_scipy(rng):
    x = linalg.random_spd(rng, 3, cond=100.0, size=5)
    logs = linalg.spd_log(x)
    for xi, li in zip(x, logs):
        np.testing.assert_allclose(li, np.real(scipy.linalg.logm(xi)), atol=1e-11)
    np.testing.assert_allclose(linalg.sym_exp(logs), x, atol=1e-11)


def test_sqrt_and_inverse(rng):
    x = linalg.random_spd(rng, 3, size=4)
    s = linalg.spd_sqrt(x)
    np.testing.assert_allclose(s @ s, x, atol=1e-12)
    np.testing.assert_allclose(linalg.spd_inv(x) @ x, np.broadcast_to(np.eye(3), x.shape), atol=1e-12)
    np.testing.assert_allclose(linalg.spd_inv_sqrt(x) @ s, np.broadcast_to(np.eye(3), x.shape), atol=1e-12)


def test_log_differential_matches_finite_differences(rng):
    x = linalg.random_spd(rng, 3, cond=20.0)
    v = linalg.random_symmetric(rng, (), 3)
    h = 1e-6
    fd = (linalg.spd_log(x + h * v) - linalg.spd_log(x - h * v)) / (2 * h)
    np.testing.assert_allclose(linalg.log_differential(x, v), fd, atol=1e-8)


def test_log_differential_inverse(rng):
    x = linalg.random_spd(rng, 4, cond=1e3, size=3)
    v = linalg.random_symmetric(rng, 3, 4)
    w = linalg.log_differential(x, v)
    np.testing.assert_allclose(linalg.log_differential_inverse(x, w), v, atol=1e-10)


def test_log_differential_at_identity_is_identity(rng):
    v = linalg.random_symmetric(rng, (), 3)
    np.testing.assert_allclose(linalg.log_differential(np.eye(3), v), v, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6))
def test_sym_vec_isometry(vals):
    a = linalg.vec_to_sym(np.array(vals), 3)
    np.testing.assert_allclose(a, a.T)
    np.testing.assert_allclose(linalg.sym_to_vec(a), vals, atol=1e-12)
    assert np.sum(a * a) == pytest.approx(np.sum(np.square(vals)), rel=1e-12, abs=1e-12)


def test_check_spd_rejects():
    with pytest.raises(NotPositiveDefinite):
        linalg.check_spd(np.diag([1.0, -1.0]))
    with pytest.raises(DomainError):
        linalg.check_spd(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        linalg.spd_log(np.diag([1.0, 1e-14]))


def test_symmetrize_warns_on_large_asymmetry():
    with pytest.warns(RuntimeWarning):
        linalg.symmetrize(np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_random_spd_condition(rng):
    x = linalg.random_spd(rng, 4, cond=30.0)
    lam = np.linalg.eigvalsh(x)
    assert lam[-1] / lam[0] == pytest.approx(30.0, rel=1e-10)
