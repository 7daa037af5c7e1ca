import numpy as np
import pytest

from pdapa.signals import (
    NodeSignalModel,
    default_signal_models,
    desired_signal,
    gen_noise,
    gen_regressors,
    make_optimal_weights,
    observe,
    sample_blocks,
    stack_block,
    tapped_regressor,
)

T = 100_000


def lag1(u):
    u = u - u.mean()
    return float(u[1:] @ u[:-1] / (u @ u))


def test_white_input(rng):
    u = gen_regressors(NodeSignalModel(0.0, 1.0, 1e-3), T, rng)
    assert abs(lag1(u)) < 0.05


def test_ar_autocorrelation(rng):
    u = gen_regressors(NodeSignalModel(0.9, 1.0, 1e-3), T, rng)
    assert abs(lag1(u) - 0.9) < 0.02


@pytest.mark.parametrize("a", [0.0, 0.5])
def test_stationary_variance(rng, a):
    u = gen_regressors(NodeSignalModel(a, 1.7, 1e-3), T, rng)
    assert abs(u.var() / 1.7 - 1) < 0.03


def test_stationary_from_the_first_sample(rng):
    u = gen_regressors(NodeSignalModel(0.9, 2.0, 1e-3), 3, rng, batch=(50_000,))
    assert abs(u[:, 0].var() / 2.0 - 1) < 0.03


def test_noise_statistics(rng):
    v = gen_noise(NodeSignalModel(0.0, 1.0, 4e-3), T, rng)
    assert abs(v.mean()) < 5 * np.sqrt(4e-3 / T)
    assert abs(v.var() / 4e-3 - 1) < 0.03


def test_same_seed_same_stream():
    m = NodeSignalModel(0.3, 1.0, 1e-3)
    a = gen_regressors(m, 500, np.random.default_rng(7))
    b = gen_regressors(m, 500, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_model_validation():
    with pytest.raises(ValueError):
        NodeSignalModel(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        NodeSignalModel(0.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        NodeSignalModel(0.1, 1.0, -1e-3)
    assert not gen_noise(NodeSignalModel(0.1, 1.0, 0.0), 10, np.random.default_rng(0)).any()


def test_default_models_in_range(rng):
    for m in default_signal_models(50, rng):
        assert 0 <= m.ar_coeff <= 0.5
        assert 0.8 <= m.input_var <= 1.2
        assert 1e-3 <= m.noise_var <= 1e-2


def test_observe():
    u = np.array([0.3, -1.0, 2.0])
    assert observe(np.array([1.0, 0, 0]), u, 0.0) == 0.3
    assert observe(np.zeros(3), u, 0.3) == 0.3
    w = np.array([0.5, 0.25, -1.0])
    assert observe(w, u, 0.125) - u @ w == 0.125
    with pytest.raises(ValueError):
        observe(np.zeros(2), u, 0.0)


def test_cluster_optima(nine, rng):
    opt = make_optimal_weights(8, (0.025, -0.025, 0.015), rng)
    assert np.isclose(np.linalg.norm(opt.w0), 1.0)
    W = opt.per_node(nine.cluster_of)
    for q in (1, 2, 3):
        rows = W[nine.cluster_members(q)]
        assert np.array_equal(rows, np.broadcast_to(rows[0], rows.shape))
    assert np.allclose(W[0], opt.w0 + 0.025 * opt.w_cluster[0])


def test_stack_block_shapes_and_padding(rng):
    u = rng.standard_normal(50)
    d = rng.standard_normal(50)
    b = stack_block(u, d, 20, 8, 6)
    assert b.U.shape == (8, 6) and b.d.shape == (8,)
    assert np.array_equal(b.U[3], tapped_regressor(u, 17, 6))
    one = stack_block(u, d, 20, 1, 6)
    assert np.array_equal(one.U[0], u[20:14:-1]) and one.d[0] == d[20]
    start = stack_block(u, d, 0, 4, 3)
    assert not start.U[1:].any() and np.array_equal(start.U[0], [u[0], 0, 0])


def test_desired_signal_matches_observe(rng):
    L = 5
    u = rng.standard_normal(40)
    v = rng.standard_normal(40) * 0.1
    w = rng.standard_normal(L)
    d = desired_signal(u, w, v)
    for n in (0, 3, 39):
        assert np.isclose(d[n], observe(w, tapped_regressor(u, n, L), v[n]))


def test_sample_blocks_are_toeplitz(rng):
    U = sample_blocks(NodeSignalModel(0.5, 1.0, 1e-3), 3, 4, 10, rng)
    assert U.shape == (10, 3, 4)
    # entry (i, j) depends on i + j only
    assert np.array_equal(U[:, 1, :-1], U[:, 0, 1:])
