"""LSTM effect model: residual sample predictor conditioned on the LFO.

Per sample, h(n) = LSTM([x(n), lfo(n)], h(n-1)), delta(n) = linear(h(n)),
y(n) = tanh(x(n) + delta(n)). Exactly causal; the hidden state returned by
a forward call continues a stream bit-exactly.
"""

from __future__ import annotations

from typing import Dict, Optional, Tuple, Union

import numpy as np

from .. import _kernels
from ..errors import ParameterError, TrainingDivergenceError
from ..modsignal import ModSignal
from .optim import AdamWState, Params, TrainConfig, adamw_update

HiddenState = Tuple[np.ndarray, np.ndarray]  # (h, c)

DEFAULT_HIDDEN = 64
IN_DIM = 2  # audio + lfo


def lstmfx_shapes(hidden: int = DEFAULT_HIDDEN) -> Dict[str, Tuple[int, ...]]:
    return {
        "lstm.w_x": (4 * hidden, IN_DIM),
        "lstm.w_h": (4 * hidden, hidden),
        "lstm.b": (4 * hidden,),
        "head.w": (hidden,),
        "head.b": (1,),
    }


def lstmfx_init(rng: np.random.Generator, hidden: int = DEFAULT_HIDDEN) -> Params:
    """Uniform init scaled by 1/sqrt(hidden), the usual recurrent default."""
    if hidden < 1:
        raise ParameterError(f"hidden must be >= 1, got {hidden}")
    bound = 1.0 / np.sqrt(hidden)
    return {
        name: rng.uniform(-bound, bound, size=shape)
        for name, shape in lstmfx_shapes(hidden).items()
    }


def lstmfx_hidden_size(w: Params) -> int:
    return w["lstm.w_h"].shape[1]


def zero_state(hidden: int) -> HiddenState:
    return np.zeros(hidden), np.zeros(hidden)


def _audio_inputs(x, lfo) -> Tuple[np.ndarray, np.ndarray]:
    x = np.ascontiguousarray(x, dtype=np.float64)
    m = lfo.values if isinstance(lfo, ModSignal) else np.ascontiguousarray(lfo, dtype=np.float64)
    if x.ndim != 1 or m.shape != x.shape:
        raise ParameterError(f"audio and lfo lengths differ: {x.shape} vs {m.shape}")
    return x, m


def lstmfx_forward(
    w: Params,
    x: np.ndarray,
    lfo: Union[ModSignal, np.ndarray],
    state: Optional[HiddenState] = None,
) -> Tuple[np.ndarray, HiddenState]:
    """Process audio through the effect model, returning output and final state."""
    x, m = _audio_inputs(x, lfo)
    hidden = lstmfx_hidden_size(w)
    if state is None:
        h, c = zero_state(hidden)
    else:
        h, c = state[0].copy(), state[1].copy()
        if h.shape != (hidden,) or c.shape != (hidden,):
            raise ParameterError("hidden state size does not match weights")
    y = np.empty_like(x)
    _kernels.lstm_stream(
        w["lstm.w_x"], w["lstm.w_h"], w["lstm.b"],
        w["head.w"], float(w["head.b"][0]), x, m, h, c, y,
    )
    return y, (h, c)


class _BlockCache:
    """Per-step activations of one cached forward block."""

    __slots__ = ("x", "lfo", "h0", "c0", "gi", "gf", "gg", "go", "c", "tc", "h", "y")

    def __init__(self, x: np.ndarray, lfo: np.ndarray, h0: np.ndarray, c0: np.ndarray):
        t_len, hidden = x.shape[0], h0.shape[0]
        self.x, self.lfo = x, lfo
        self.h0, self.c0 = h0.copy(), c0.copy()
        for name in ("gi", "gf", "gg", "go", "c", "tc", "h"):
            setattr(self, name, np.empty((t_len, hidden)))
        self.y = np.empty(t_len)


def _forward_cached(w: Params, cache: _BlockCache) -> np.ndarray:
    _kernels.lstm_cached(
        w["lstm.w_x"], w["lstm.w_h"], w["lstm.b"],
        w["head.w"], float(w["head.b"][0]),
        cache.x, cache.lfo, cache.h0, cache.c0,
        cache.gi, cache.gf, cache.gg, cache.go, cache.c, cache.tc, cache.h, cache.y,
    )
    return cache.y


def lstmfx_block_grads(
    w: Params, cache: _BlockCache, dy: np.ndarray
) -> Params:
    """Gradients of a scalar loss with dL/dy = ``dy`` over one cached block.

    Truncated: no gradient flows into the state that entered the block.
    """
    grads = {k: np.zeros_like(v) for k, v in w.items()}
    _kernels.lstm_backward(
        w["lstm.w_x"], w["lstm.w_h"], w["head.w"],
        cache.x, cache.lfo, cache.h0, cache.c0,
        cache.gi, cache.gf, cache.gg, cache.go, cache.c, cache.tc, cache.h,
        cache.y, dy,
        grads["lstm.w_x"], grads["lstm.w_h"], grads["lstm.b"],
        grads["head.w"], grads["head.b"],
    )
    return grads


def lstmfx_train_tbptt(
    w: Params,
    dry: np.ndarray,
    wet: np.ndarray,
    lfo: Union[ModSignal, np.ndarray],
    cfg: TrainConfig,
    opt_state: AdamWState,
) -> Tuple[Params, np.ndarray]:
    """Truncated backprop through time over one sequence, one update per block.

    Block k trains on samples [k*B + W, k*B + W + B); the preceding W
    samples are re-run gradient-free from the carried state to warm up, so
    consecutive warmup windows overlap the previous loss block. The carried
    state is the state at each warmup window's start; it advances by B
    samples per step. L_1 audio loss is averaged over exactly the B loss
    samples. Hidden state starts at zero (one call = one sequence).
    """
    x, m = _audio_inputs(dry, lfo)
    t = np.ascontiguousarray(wet, dtype=np.float64)
    if t.shape != x.shape:
        raise ParameterError(f"dry and wet lengths differ: {x.shape} vs {t.shape}")
    warm, blk = cfg.warmup_len, cfg.block_len
    if x.shape[0] < warm + blk:
        raise ParameterError(
            f"sequence of {x.shape[0]} samples is shorter than warmup+block "
            f"({warm}+{blk})"
        )
    hidden = lstmfx_hidden_size(w)
    h, c = zero_state(hidden)
    scratch = np.empty(max(warm, blk))
    losses = []
    n_steps = (x.shape[0] - warm) // blk
    for k in range(n_steps):
        ws = k * blk
        ls = ws + warm
        # Warm up from the carried state, capturing next step's carry at
        # offset B from the warmup start.
        if blk <= warm:
            _kernels.lstm_stream(
                w["lstm.w_x"], w["lstm.w_h"], w["lstm.b"], w["head.w"],
                float(w["head.b"][0]), x[ws : ws + blk], m[ws : ws + blk],
                h, c, scratch[:blk],
            )
            next_h, next_c = h.copy(), c.copy()
            if blk < warm:
                _kernels.lstm_stream(
                    w["lstm.w_x"], w["lstm.w_h"], w["lstm.b"], w["head.w"],
                    float(w["head.b"][0]), x[ws + blk : ls], m[ws + blk : ls],
                    h, c, scratch[: warm - blk],
                )
        else:
            _kernels.lstm_stream(
                w["lstm.w_x"], w["lstm.w_h"], w["lstm.b"], w["head.w"],
                float(w["head.b"][0]), x[ws:ls], m[ws:ls], h, c, scratch[:warm],
            )
        cache = _BlockCache(x[ls : ls + blk], m[ls : ls + blk], h, c)
        y = _forward_cached(w, cache)
        if blk > warm:
            mid = blk - warm - 1
            next_h, next_c = cache.h[mid].copy(), cache.c[mid].copy()
        target = t[ls : ls + blk]
        loss = float(np.mean(np.abs(y - target)))
        if not np.isfinite(loss):
            raise TrainingDivergenceError(f"audio loss diverged at block {k}: {loss}")
        losses.append(loss)
        dy = np.sign(y - target) / blk
        grads = lstmfx_block_grads(w, cache, dy)
        adamw_update(w, grads, opt_state, cfg)
        h, c = next_h, next_c
    return w, np.array(losses)
