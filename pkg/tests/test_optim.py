"""AdamW update semantics and the shared training configuration."""

import numpy as np
import pytest

from lfolab.errors import ParameterError
from lfolab.nn import AdamWState, TrainConfig, adamw_update


def naive_adamw(params, grad_steps, cfg):
    """Textbook reference: decoupled decay, bias-corrected moments."""
    params = {k: v.astype(np.float64).copy() for k, v in params.items()}
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(x) for k, x in params.items()}
    for t, grads in enumerate(grad_steps, start=1):
        for k in params:
            g = grads[k]
            m[k] = cfg.beta1 * m[k] + (1 - cfg.beta1) * g
            v[k] = cfg.beta2 * v[k] + (1 - cfg.beta2) * g * g
            mhat = m[k] / (1 - cfg.beta1**t)
            vhat = v[k] / (1 - cfg.beta2**t)
            params[k] -= cfg.lr * (
                mhat / (np.sqrt(vhat) + cfg.eps) + cfg.weight_decay * params[k]
            )
    return params


def test_first_step_is_signed_unit_step_plus_decay():
    cfg = TrainConfig(lr=0.1, weight_decay=0.01)
    params = {"w": np.array([1.0])}
    state = AdamWState(params)
    adamw_update(params, {"w": np.array([2.0])}, state, cfg)
    # mhat / (sqrt(vhat) + eps) ~= sign(g) on the first step.
    assert params["w"][0] == pytest.approx(1.0 - 0.1 * (1.0 + 0.01), abs=1e-8)


def test_zero_grad_without_decay_is_identity():
    cfg = TrainConfig(lr=0.1, weight_decay=0.0)
    params = {"w": np.array([0.7, -0.3])}
    state = AdamWState(params)
    adamw_update(params, {"w": np.zeros(2)}, state, cfg)
    np.testing.assert_array_equal(params["w"], [0.7, -0.3])


def test_zero_grad_with_decay_shrinks_weights():
    cfg = TrainConfig(lr=0.1, weight_decay=0.5)
    params = {"w": np.array([2.0])}
    state = AdamWState(params)
    adamw_update(params, {"w": np.zeros(1)}, state, cfg)
    assert params["w"][0] == pytest.approx(2.0 * (1.0 - 0.05), rel=1e-12)


def test_matches_naive_reference_over_many_steps():
    rng = np.random.default_rng(0)
    cfg = TrainConfig(lr=3e-3, beta1=0.9, beta2=0.99, weight_decay=0.02)
    params = {"a": rng.normal(size=(4, 3)), "b": rng.normal(size=5)}
    start = {k: v.copy() for k, v in params.items()}
    steps = [
        {k: rng.normal(size=v.shape) for k, v in params.items()} for _ in range(10)
    ]
    state = AdamWState(params)
    for grads in steps:
        adamw_update(params, grads, state, cfg)
    want = naive_adamw(start, steps, cfg)
    for k in params:
        np.testing.assert_allclose(params[k], want[k], atol=1e-12)
    assert state.step == 10


def test_update_is_in_place():
    params = {"w": np.ones(3)}
    arr = params["w"]
    out, _ = adamw_update(params, {"w": np.ones(3)},
                          AdamWState(params), TrainConfig())
    assert out is params
    assert out["w"] is arr  # mutated, not replaced


def test_gradient_shape_mismatch_rejected():
    params = {"w": np.ones(3)}
    with pytest.raises(ParameterError):
        adamw_update(params, {"w": np.ones(4)}, AdamWState(params), TrainConfig())


def test_state_tracks_moment_shapes():
    params = {"a": np.zeros((2, 2)), "b": np.zeros(7)}
    state = AdamWState(params)
    assert state.m["a"].shape == (2, 2)
    assert state.v["b"].shape == (7,)
    assert state.step == 0


def test_train_config_validation():
    with pytest.raises(ParameterError):
        TrainConfig(block_len=0)
    with pytest.raises(ParameterError):
        TrainConfig(lr=-1e-3)
    with pytest.raises(ParameterError):
        TrainConfig(beta1=1.0)
    with pytest.raises(ParameterError):
        TrainConfig(eps=0.0)
    cfg = TrainConfig()
    assert (cfg.block_len, cfg.warmup_len) == (1024, 1024)
    assert cfg.lr == pytest.approx(1e-3)
