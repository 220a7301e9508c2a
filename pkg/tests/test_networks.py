import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbpinn.networks import (MlpParams, NumericalFailureError, eval_batch,
                             eval_with_input_derivative, init_params,
                             loss_gradient, params_from_jsonable,
                             params_to_jsonable)


def fd_input_derivative(params, x, h=1e-6):
    up, _ = eval_batch(params, [x + h])
    dn, _ = eval_batch(params, [x - h])
    return (up[0] - dn[0]) / (2 * h)


def fd_param_gradient(params, x_hat, loss_fn, h=1e-6):
    """Central differences in every parameter entry."""
    grads = []
    for arr in params.arrays():
        g = np.zeros_like(arr)
        flat = arr.ravel()
        gflat = g.ravel()
        for k in range(flat.size):
            old = flat[k]
            flat[k] = old + h
            up = loss_fn(*eval_batch(params, x_hat))[0]
            flat[k] = old - h
            dn = loss_fn(*eval_batch(params, x_hat))[0]
            flat[k] = old
            gflat[k] = (up - dn) / (2 * h)
        grads.append(g)
    return grads


def quadratic_loss(weights_u, weights_d):
    """sum wu u^2 + wd du^2, exercising both output channels."""
    def loss_fn(u, du):
        loss = float(weights_u @ (u * u) + weights_d @ (du * du))
        return loss, 2 * weights_u * u, 2 * weights_d * du
    return loss_fn


def rel_err(a, b):
    denom = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-12)
    return np.max(np.abs(a - b)) / denom


def test_init_shapes_and_determinism():
    p = init_params([1, 8, 8, 1], seed=3)
    assert [w.shape for w in p.weights] == [(8, 1), (8, 8), (1, 8)]
    assert [b.shape for b in p.biases] == [(8,), (8,), (1,)]
    assert p.layer_sizes == [1, 8, 8, 1]
    assert all(np.all(b == 0) for b in p.biases)
    q = init_params([1, 8, 8, 1], seed=3)
    for a, b in zip(p.arrays(), q.arrays()):
        assert np.array_equal(a, b)
    r = init_params([1, 8, 8, 1], seed=4)
    assert any(not np.array_equal(a, b) for a, b in zip(p.arrays(), r.arrays()))


def test_init_glorot_bounds():
    p = init_params([1, 50, 1], seed=0)
    bound = np.sqrt(6.0 / 51)
    assert np.all(np.abs(p.weights[0]) <= bound)
    assert np.all(np.abs(p.weights[1]) <= bound)


def test_init_rejects_bad_sizes():
    for bad in ([1], [1, 0, 1], [1, 4, 2], [2, 4, 1], [1, 3.5, 1]):
        with pytest.raises(ValueError):
            init_params(bad, seed=0)


def test_single_tanh_unit_exact():
    # u(x) = tanh(x) for unit weights, zero biases
    p = MlpParams([np.array([[1.0]]), np.array([[1.0]])],
                  [np.zeros(1), np.zeros(1)])
    u, du = eval_batch(p, [0.0, 0.7])
    assert u[0] == 0.0 and du[0] == 1.0
    assert u[1] == np.tanh(0.7)
    assert du[1] == 1.0 - np.tanh(0.7) ** 2


def test_forward_frozen_values():
    # zero init biases make u(0) = 0 and du(0) = W1 @ W0 exactly
    p = init_params([1, 4, 1], seed=0)
    u, du = eval_batch(p, [0.0, 0.5, -1.25])
    assert u[0] == 0.0
    assert du[0] == float(p.weights[1][0] @ p.weights[0][:, 0])
    np.testing.assert_allclose(
        u, [0.0, -0.47351643553967604, 0.8938998055590252], rtol=0, atol=1e-15)
    np.testing.assert_allclose(
        du, [-1.0176944959616336, -0.8184582358089684, -0.3310262441291504],
        rtol=0, atol=1e-15)


def test_input_derivative_vs_finite_differences():
    rng = np.random.default_rng(7)
    for sizes in ([1, 1], [1, 6, 1], [1, 16, 16, 1]):
        p = init_params(sizes, seed=int(rng.integers(100)))
        for x in rng.uniform(-2, 2, size=5):
            got = eval_with_input_derivative(p, x).dvalue_dx
            assert abs(got - fd_input_derivative(p, x)) < 1e-6


def test_eval_with_input_derivative_matches_batch():
    p = init_params([1, 5, 1], seed=2)
    u, du = eval_batch(p, [0.3])
    r = eval_with_input_derivative(p, 0.3)
    assert r.value == u[0] and r.dvalue_dx == du[0]
    with pytest.raises(ValueError):
        eval_with_input_derivative(p, np.nan)


def test_loss_gradient_vs_finite_differences():
    rng = np.random.default_rng(11)
    for sizes in ([1, 4, 1], [1, 8, 8, 1]):
        p = init_params(sizes, seed=int(rng.integers(100)))
        x = rng.uniform(-1.5, 1.5, size=7)
        loss_fn = quadratic_loss(rng.uniform(0.5, 2, 7), rng.uniform(0.5, 2, 7))
        loss, grad = loss_gradient(p, x, loss_fn)
        u, du = eval_batch(p, x)
        assert loss == pytest.approx(loss_fn(u, du)[0])
        fd = fd_param_gradient(p, x, loss_fn)
        for g, f in zip(grad.arrays(), fd):
            assert rel_err(g, f) < 1e-6


def test_loss_gradient_pure_derivative_loss():
    # loss touching only du still reaches every parameter (mixed d2u/dx dtheta);
    # asymmetric grid so no gradient vanishes by symmetry
    p = init_params([1, 6, 1], seed=5)
    x = np.linspace(-1, 1, 9) + 0.1

    def loss_fn(u, du):
        return float(np.sum(du * du)), np.zeros_like(u), 2 * du

    _, grad = loss_gradient(p, x, loss_fn)
    fd = fd_param_gradient(p, x, loss_fn)
    for g, f in zip(grad.arrays(), fd):
        np.testing.assert_allclose(g, f, rtol=1e-5, atol=1e-8)
    assert all(np.any(g != 0) for g in grad.arrays()[:2])


@given(w=st.floats(-3, 3), b=st.floats(-3, 3),
       x=st.floats(-5, 5))
@settings(max_examples=50, deadline=None)
def test_affine_net_is_exact(w, b, x):
    # no hidden layer: u = w x + b, du = w, both exact in floating point
    p = MlpParams([np.array([[w]])], [np.array([b])])
    u, du = eval_batch(p, [x])
    assert u[0] == w * x + b
    assert du[0] == w


def test_batch_matches_pointwise():
    # batched BLAS may reorder sums, so agreement is to rounding, not bitwise
    p = init_params([1, 16, 16, 1], seed=9)
    xs = np.linspace(-1, 1, 11)
    u, du = eval_batch(p, xs)
    for k, x in enumerate(xs):
        r = eval_with_input_derivative(p, x)
        np.testing.assert_allclose([r.value, r.dvalue_dx], [u[k], du[k]],
                                   rtol=1e-13, atol=0)


def test_copy_is_deep():
    p = init_params([1, 4, 1], seed=1)
    q = p.copy()
    q.weights[0][0, 0] += 1.0
    assert p.weights[0][0, 0] != q.weights[0][0, 0]


def test_serialization_round_trip_bitwise():
    p = init_params([1, 16, 16, 1], seed=13)
    q = params_from_jsonable(params_to_jsonable(p))
    assert q.layer_sizes == p.layer_sizes
    for a, b in zip(p.arrays(), q.arrays()):
        assert np.array_equal(a, b)


def test_deserialization_rejects_malformed():
    good = params_to_jsonable(init_params([1, 4, 1], seed=0))
    with pytest.raises(ValueError):
        params_from_jsonable([])
    bad = [dict(layer) for layer in good]
    bad[0]["bias"] = bad[0]["bias"][:-1]
    with pytest.raises(ValueError):
        params_from_jsonable(bad)
    bad = [dict(layer) for layer in good]
    bad[1]["weights"][0] = float("inf")
    with pytest.raises(ValueError):
        params_from_jsonable(bad)
    bad = [dict(layer) for layer in good]
    del bad[0]["shape"]
    with pytest.raises(ValueError):
        params_from_jsonable(bad)
    # fan mismatch between consecutive layers
    bad = [dict(good[0]), dict(good[0])]
    with pytest.raises(ValueError):
        params_from_jsonable(bad)


def test_loss_gradient_raises_on_nonfinite_output():
    p = init_params([1, 4, 1], seed=0)
    p.weights[0][0, 0] = np.inf
    loss_fn = quadratic_loss(np.ones(3), np.ones(3))
    with pytest.raises(NumericalFailureError) as exc:
        loss_gradient(p, [0.1, 0.2, 0.3], loss_fn)
    assert exc.value.point is not None


def test_loss_gradient_raises_on_nonfinite_loss():
    p = init_params([1, 4, 1], seed=0)

    def loss_fn(u, du):
        return np.nan, np.zeros_like(u), np.zeros_like(du)

    with pytest.raises(NumericalFailureError):
        loss_gradient(p, [0.0], loss_fn)
