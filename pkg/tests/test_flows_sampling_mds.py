import numpy as np
import pytest

from hadamard_sw.chsw import direction_stream
from hadamard_sw.errors import DivergenceError, SchemaError, UnsupportedProjection
from hadamard_sw.flows import FlowConfig, FlowState, flow_objective, flow_step, run_flow, velocity
from hadamard_sw.manifolds import Euclidean, Lorentz, Poincare, SPDAffineInvariant, SPDLogEuclidean
from hadamard_sw.mds import MdsProblem, mds_fit, mds_grad, mds_loss, spectral_init, to_hyperboloid
from hadamard_sw.sampling import sample_gaussian, sample_mixture, sample_spd_log_gaussian, sample_wrapped_normal


@pytest.mark.parametrize(
    "m,proj",
    [(Euclidean(2), "geodesic"), (Lorentz(2), "geodesic"), (Lorentz(2), "horospherical"), (Poincare(2, -0.5), "horospherical"), (SPDLogEuclidean(2), "geodesic")],
)
def test_velocity_is_scaled_negative_gradient(m, proj, rng):
    n = 12
    x = m.random_points(rng, n, 1.0)
    y = m.random_points(rng, n, 1.5)
    dirs = direction_stream(m, 0, 8)
    v = velocity(m, x, y, dirs, proj)
    i = 3
    u = m.random_tangent(rng, x[i : i + 1])[0]
    h = 1e-6

    def obj(t):
        moved = x.copy()
        moved[i] = m.exp(x[i], t * u)
        return flow_objective(m, moved, y, dirs, proj)

    fd = (obj(h) - obj(-h)) / (2 * h)
    assert fd == pytest.approx(-m.inner(x[i], v[i], u) / n, rel=1e-5, abs=1e-9)


def test_one_euclidean_step_with_unit_step_in_one_dimension(rng):
    m = Euclidean(1)
    x = rng.normal(size=(30, 1))
    y = rng.normal(size=(30, 1)) + 3
    cfg = FlowConfig(step_size=1.0, num_projections=1)
    state = flow_step(m, FlowState(x), y, cfg)
    np.testing.assert_allclose(np.sort(state.particles[:, 0]), np.sort(y[:, 0]), atol=1e-12)


def test_flow_is_deterministic_and_logs(rng):
    m = Lorentz(2)
    x = m.random_points(rng, 20, 1.0)
    y = m.random_points(rng, 20, 1.0)
    cfg = FlowConfig(num_steps=15, num_projections=10, eval_every=5, record_w2=True)
    a = run_flow(m, x, y, cfg)
    b = run_flow(m, x, y, cfg)
    np.testing.assert_array_equal(a.particles, b.particles)
    assert [h["step"] for h in a.history] == [0, 5, 10, 15]
    assert all("w2_exact" in h for h in a.history)
    frozen = run_flow(m, x, y, FlowConfig(num_steps=5, num_projections=10, resample_directions=False))
    assert frozen.step == 5


def test_flow_callback_and_zero_step(rng):
    m = Euclidean(2)
    x = rng.normal(size=(10, 2))
    seen = []
    state = run_flow(m, x, x + 1, FlowConfig(step_size=0.0, num_steps=4, eval_every=2), callback=lambda s: seen.append(s.step))
    assert seen == [0, 2, 4]
    np.testing.assert_array_equal(state.particles, x)


def test_flow_rejects_bad_inputs(rng):
    ai = SPDAffineInvariant(2)
    s = ai.random_points(rng, 5, 1.0)
    with pytest.raises(UnsupportedProjection):
        run_flow(ai, s, s, FlowConfig(projection="horospherical", num_steps=1))
    with pytest.raises(SchemaError):
        FlowConfig(step_size=-1.0)
    with pytest.raises(SchemaError):
        FlowConfig(num_steps=0)


def test_flow_divergence_is_reported(rng):
    m = Lorentz(2)
    x = m.random_points(rng, 10, 1.0)
    y = m.random_points(rng, 10, 1.0)
    with pytest.raises(DivergenceError) as info:
        run_flow(m, x, y, FlowConfig(step_size=1e6, num_steps=3, num_projections=4))
    assert info.value.step == 1


def test_spd_velocity_clipping(rng):
    m = SPDLogEuclidean(2)
    x = m.random_points(rng, 8, 0.5)
    y = sample_spd_log_gaussian(np.diag([np.exp(10.0), np.exp(-10.0)]), 0.1, 8, rng)
    state = flow_step(m, FlowState(x), y, FlowConfig(step_size=1.0, num_projections=8))
    assert np.all(m.dist(x, state.particles) <= 10.0 + 1e-6)


def test_wrapped_normal_statistics(rng):
    m = Lorentz(2)
    mean = m.exp(m.origin(), np.array([0.0, 1.0, -0.5]))
    x = sample_wrapped_normal(m, mean, np.diag([0.2, 0.05]), 4000, rng)
    m.check_point(x)
    # the log map at the mean recovers a centered sample with the given covariance
    u = m.log(np.broadcast_to(mean, x.shape), x)
    assert np.max(np.abs(-mean[0] * u[:, 0] + u[:, 1:] @ mean[1:])) < 1e-8
    r2 = m.inner(np.broadcast_to(mean, x.shape), u, u)
    assert np.mean(r2) == pytest.approx(0.25, rel=0.05)


def test_wrapped_normal_at_origin_is_exp_of_gaussian(rng):
    m = Lorentz(3, -0.5)
    a = sample_wrapped_normal(m, m.origin(), np.eye(3), 5, np.random.default_rng(1))
    z = np.random.default_rng(1).standard_normal((5, 3))
    b = m.exp(m.origin(), np.concatenate([np.zeros((5, 1)), z], axis=1))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_mixture_and_gaussian(rng):
    m = Lorentz(2)
    far = m.exp(m.origin(), np.array([0.0, 3.0, 0.0]))
    comps = [(0.25, m.origin(), 0.01 * np.eye(2)), (0.75, far, 0.01 * np.eye(2))]
    x = sample_mixture(m, comps, 2000, rng)
    near = m.dist(x, m.origin()) < 1.5
    assert np.mean(near) == pytest.approx(0.25, abs=0.04)
    with pytest.raises(SchemaError):
        sample_mixture(m, [(0.5, m.origin(), np.eye(2))], 3, rng)
    g = sample_gaussian([1.0, -1.0], np.diag([4.0, 1.0]), 5000, rng)
    np.testing.assert_allclose(g.mean(axis=0), [1.0, -1.0], atol=0.1)
    np.testing.assert_allclose(np.cov(g.T), np.diag([4.0, 1.0]), atol=0.25)


def test_spd_log_gaussian_is_spd(rng):
    x = sample_spd_log_gaussian(np.diag([2.0, 0.5, 1.0]), 0.5, 50, rng)
    SPDLogEuclidean(3).check_point(x)


def test_mds_loss_examples(rng):
    m = Lorentz(2)
    w = np.array([[0.3, -0.2], [1.0, 0.5]])
    z = to_hyperboloid(w)
    d = m.dist(z[0], z[1])
    assert mds_loss(w, MdsProblem(np.array([[0.0, d / 2], [d / 2, 0.0]]), scale=2.0)) == pytest.approx(0.0, abs=1e-24)
    assert mds_loss(np.zeros((3, 2)), MdsProblem(np.zeros((3, 3)))) == 0.0
    np.testing.assert_allclose(to_hyperboloid(np.zeros((1, 2))), [[1.0, 0.0, 0.0]])
    delta = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.5], [2.0, 1.5, 0.0]])
    w = rng.normal(size=(3, 2))
    z = to_hyperboloid(w)
    direct = sum((m.dist(z[i], z[j]) - delta[i, j]) ** 2 for i in range(3) for j in range(i + 1, 3))
    assert mds_loss(w, MdsProblem(delta)) == pytest.approx(direct, rel=1e-12)


def test_mds_gradient_matches_finite_differences(rng):
    delta = np.abs(rng.normal(size=(6, 6)))
    delta = delta + delta.T
    np.fill_diagonal(delta, 0.0)
    prob = MdsProblem(delta, scale=0.7)
    w = rng.normal(size=(6, 2))
    w[2] = 1e-12
    g = mds_grad(w, prob)
    h = 1e-6
    for i in range(6):
        for j in range(2):
            e = np.zeros_like(w)
            e[i, j] = h
            fd = (mds_loss(w + e, prob) - mds_loss(w - e, prob)) / (2 * h)
            assert fd == pytest.approx(g[i, j], rel=1e-4, abs=1e-7)


def test_mds_loss_is_monotone_and_random_init_works(rng):
    delta = np.abs(rng.normal(size=(8, 8))) + 1
    delta = np.triu(delta, 1) + np.triu(delta, 1).T
    res = mds_fit(MdsProblem(delta, init="random", seed=4, max_iters=300))
    assert np.all(np.diff(res.losses) <= 0)
    Lorentz(2).check_point(res.points)
    res2 = mds_fit(MdsProblem(delta, init="random", seed=4, max_iters=300))
    np.testing.assert_array_equal(res.points, res2.points)


def test_spectral_init_recovers_exact_data(rng):
    m = Lorentz(3)
    pts = m.random_points(rng, 12, 2.0)
    delta = m.pairwise_dist(pts, pts)
    np.fill_diagonal(delta, 0.0)
    w = spectral_init(MdsProblem(delta, target_dim=3))
    z = to_hyperboloid(w)
    got = m.pairwise_dist(z, z)
    np.fill_diagonal(got, 0.0)
    np.testing.assert_allclose(got, delta, atol=1e-6)


def test_mds_problem_validation():
    with pytest.raises(SchemaError):
        MdsProblem(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(SchemaError):
        MdsProblem(np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(SchemaError):
        MdsProblem(np.zeros((2, 2)), scale=0.0)
    with pytest.raises(SchemaError):
        MdsProblem(np.zeros((2, 3)))
