"""Neural building blocks: extraction CNN, LSTM effect model, optimizer, I/O."""

from .io import load_weights, save_weights
from .lfonet import (
    DEFAULT_CONFIG,
    LfoNetConfig,
    lfonet_forward,
    lfonet_init,
    lfonet_latent,
    lfonet_loss_and_grads,
    lfonet_shapes,
    lfonet_train_step,
    param_count,
)
from .lstmfx import (
    lstmfx_forward,
    lstmfx_init,
    lstmfx_shapes,
    lstmfx_train_tbptt,
    zero_state,
)
from .optim import AdamWState, TrainConfig, adamw_update

__all__ = [
    "AdamWState",
    "DEFAULT_CONFIG",
    "LfoNetConfig",
    "TrainConfig",
    "adamw_update",
    "lfonet_forward",
    "lfonet_init",
    "lfonet_latent",
    "lfonet_loss_and_grads",
    "lfonet_shapes",
    "lfonet_train_step",
    "load_weights",
    "lstmfx_forward",
    "lstmfx_init",
    "lstmfx_shapes",
    "lstmfx_train_tbptt",
    "param_count",
    "save_weights",
    "zero_state",
]
