"""AdamW optimizer and the shared training configuration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np

from ..errors import ParameterError

Params = Dict[str, np.ndarray]


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters shared by both training loops.

    block_len and warmup_len configure truncated backpropagation for the
    effect model and are ignored by the extraction-model trainer.
    """

    block_len: int = 1024
    warmup_len: int = 1024
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 1e-2
    seed: int = 0

    def __post_init__(self):
        if self.block_len <= 0 or self.warmup_len <= 0:
            raise ParameterError("block_len and warmup_len must be positive")
        if self.lr < 0 or self.eps <= 0 or self.weight_decay < 0:
            raise ParameterError("lr and weight_decay must be >= 0, eps > 0")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ParameterError("moment decays must lie in [0, 1)")


class AdamWState:
    """First/second moment accumulators plus the step counter."""

    def __init__(self, params: Params):
        self.step = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}


def adamw_update(
    params: Params, grads: Params, state: AdamWState, cfg: TrainConfig
):
    """One decoupled-weight-decay Adam step, in place.

    theta <- theta - lr * (mhat / (sqrt(vhat) + eps) + wd * theta), with
    bias-corrected moments mhat, vhat.
    """
    state.step += 1
    bc1 = 1.0 - cfg.beta1**state.step
    bc2 = 1.0 - cfg.beta2**state.step
    for k, theta in params.items():
        g = grads[k]
        if g.shape != theta.shape:
            raise ParameterError(f"gradient shape mismatch for {k}")
        m = state.m[k]
        v = state.v[k]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * (g * g)
        update = (m / bc1) / (np.sqrt(v / bc2) + cfg.eps) + cfg.weight_decay * theta
        theta -= cfg.lr * update
    return params, state
