"""Dilated-CNN modulation extraction model.

Six blocks of {per-channel layer norm over the freq-time plane, 2-D
convolution dilated along time, frequency max-pool by 2, PReLU}, then a
time-distributed linear layer over the flattened (channels x remaining
bins) features and a logistic squash. The default configuration has a
757-frame temporal receptive field (1 + 12 * (1+2+4+8+16+32)) and
1,341,189 trainable parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ParameterError, TrainingDivergenceError
from ..features import MelSpec
from ..metrics import LossWeights, mod_loss_and_grad
from ..modsignal import ModSignal
from . import layers
from .optim import AdamWState, Params, TrainConfig, adamw_update


@dataclass(frozen=True)
class LfoNetConfig:
    n_blocks: int = 6
    channels: int = 64
    kernel_freq: int = 5
    kernel_time: int = 13
    freq_pool: int = 2
    in_channels: int = 2
    n_mels: int = 256
    time_dilations: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if min(self.n_blocks, self.channels, self.in_channels) < 1:
            raise ParameterError("n_blocks, channels, in_channels must be >= 1")
        if self.kernel_freq % 2 == 0 or self.kernel_time % 2 == 0:
            raise ParameterError("kernel sides must be odd for symmetric padding")
        if self.freq_pool != 2:
            raise ParameterError("only frequency pooling by 2 is supported")
        if self.n_mels % (self.freq_pool**self.n_blocks) != 0:
            raise ParameterError(
                f"n_mels {self.n_mels} not divisible by "
                f"{self.freq_pool}^{self.n_blocks}"
            )
        expected = tuple(2**i for i in range(self.n_blocks))
        if self.time_dilations is None:
            object.__setattr__(self, "time_dilations", expected)
        elif tuple(self.time_dilations) != expected:
            raise ParameterError(f"block i must use time dilation 2^i, i.e. {expected}")

    @property
    def out_bins(self) -> int:
        return self.n_mels // self.freq_pool**self.n_blocks

    @property
    def head_features(self) -> int:
        return self.channels * self.out_bins

    def receptive_field_frames(self) -> int:
        return 1 + (self.kernel_time - 1) * sum(self.time_dilations)


DEFAULT_CONFIG = LfoNetConfig()


def lfonet_shapes(cfg: LfoNetConfig) -> Dict[str, Tuple[int, ...]]:
    """Tensor name -> shape for the given configuration."""
    shapes: Dict[str, Tuple[int, ...]] = {}
    c_in = cfg.in_channels
    for i in range(cfg.n_blocks):
        p = f"block{i + 1}."
        shapes[p + "norm_scale"] = (c_in,)
        shapes[p + "norm_shift"] = (c_in,)
        shapes[p + "conv_w"] = (cfg.channels, c_in, cfg.kernel_freq, cfg.kernel_time)
        shapes[p + "conv_b"] = (cfg.channels,)
        shapes[p + "prelu"] = (cfg.channels,)
        c_in = cfg.channels
    shapes["head.w"] = (cfg.head_features,)
    shapes["head.b"] = (1,)
    return shapes


def lfonet_init(cfg: LfoNetConfig, rng: np.random.Generator) -> Params:
    """Fan-in-scaled uniform kernels; unit norm scale, zero biases, PReLU 0.25."""
    w: Params = {}
    for name, shape in lfonet_shapes(cfg).items():
        kind = name.split(".")[1]
        if kind in ("conv_w", "w"):
            fan_in = int(np.prod(shape[1:])) if len(shape) > 1 else shape[0]
            bound = 1.0 / np.sqrt(fan_in)
            w[name] = rng.uniform(-bound, bound, size=shape)
        elif kind == "norm_scale":
            w[name] = np.ones(shape)
        elif kind == "prelu":
            w[name] = np.full(shape, 0.25)
        else:
            w[name] = np.zeros(shape)
    return w


def param_count(weights: Params) -> int:
    return sum(int(v.size) for v in weights.values())


def _spec_array(spec: Union[MelSpec, np.ndarray], cfg: LfoNetConfig) -> np.ndarray:
    x = spec.data if isinstance(spec, MelSpec) else np.asarray(spec)
    if x.ndim != 3 or x.shape[0] != cfg.in_channels or x.shape[1] != cfg.n_mels:
        raise ParameterError(
            f"expected input ({cfg.in_channels}, {cfg.n_mels}, T), got {x.shape}"
        )
    return x


def _forward(w: Params, x: np.ndarray, cfg: LfoNetConfig, keep_cache: bool):
    caches = []
    for i in range(cfg.n_blocks):
        p = f"block{i + 1}."
        x, c_norm = layers.layernorm_ft(x, w[p + "norm_scale"], w[p + "norm_shift"])
        x, c_conv = layers.conv2d_dilated(
            x, w[p + "conv_w"], w[p + "conv_b"], cfg.time_dilations[i]
        )
        x, c_pool = layers.maxpool_freq2(x)
        x, c_act = layers.prelu(x, w[p + "prelu"])
        if keep_cache:
            caches.append((c_norm, c_conv, c_pool, c_act))
    final_act = x  # (channels, out_bins, T)
    y, c_head = layers.head_linear_sigmoid(x, w["head.w"], w["head.b"])
    if keep_cache:
        caches.append(c_head)
    return y, final_act, caches


def _backward(w: Params, caches: List, dy: np.ndarray, cfg: LfoNetConfig) -> Params:
    grads: Params = {}
    dx, grads["head.w"], grads["head.b"] = layers.head_linear_sigmoid_back(
        dy, caches[-1]
    )
    for i in reversed(range(cfg.n_blocks)):
        p = f"block{i + 1}."
        c_norm, c_conv, c_pool, c_act = caches[i]
        dx, grads[p + "prelu"] = layers.prelu_back(dx, c_act)
        dx = layers.maxpool_freq2_back(dx, c_pool)
        dx, grads[p + "conv_w"], grads[p + "conv_b"] = layers.conv2d_dilated_back(
            dx, c_conv
        )
        dx, grads[p + "norm_scale"], grads[p + "norm_shift"] = layers.layernorm_ft_back(
            dx, c_norm
        )
    return grads


def lfonet_forward(
    w: Params, spec: Union[MelSpec, np.ndarray], cfg: LfoNetConfig = DEFAULT_CONFIG
) -> Tuple[ModSignal, np.ndarray]:
    """Frame-rate modulation estimate plus per-frame 64-dim latents.

    The latents are the final block's channel activations averaged over
    frequency, shape (frames, channels). The output ModSignal has exactly
    one value per input frame, at the spectrogram frame rate.
    """
    x = _spec_array(spec, cfg)
    y, final_act, _ = _forward(w, x, cfg, keep_cache=False)
    rate = spec.fs_hz / spec.hop if isinstance(spec, MelSpec) else 1.0
    latents = final_act.mean(axis=1).T.astype(np.float64)
    return ModSignal(np.asarray(y, dtype=np.float64), rate), latents


def lfonet_latent(
    w: Params, spec: Union[MelSpec, np.ndarray], cfg: LfoNetConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Single 64-dim descriptor: final-block activation mean over freq and time."""
    x = _spec_array(spec, cfg)
    _, final_act, _ = _forward(w, x, cfg, keep_cache=False)
    return final_act.mean(axis=(1, 2)).astype(np.float64)


def lfonet_loss_and_grads(
    w: Params,
    spec: Union[MelSpec, np.ndarray],
    target: Union[ModSignal, np.ndarray],
    loss_w: LossWeights,
    cfg: LfoNetConfig = DEFAULT_CONFIG,
) -> Tuple[float, Params]:
    """Modulation loss against ``target`` and gradients for every tensor."""
    x = _spec_array(spec, cfg)
    tgt = target.values if isinstance(target, ModSignal) else np.asarray(target)
    y, _, caches = _forward(w, x, cfg, keep_cache=True)
    if tgt.shape != y.shape:
        raise ParameterError(f"target length {tgt.shape} != output {y.shape}")
    loss, dy = mod_loss_and_grad(tgt.astype(np.float64), y.astype(np.float64), loss_w)
    grads = _backward(w, caches, dy.astype(x.dtype), cfg)
    return loss, grads


def lfonet_train_step(
    w: Params,
    batch: Sequence[Tuple[Union[MelSpec, np.ndarray], Union[ModSignal, np.ndarray]]],
    loss_w: LossWeights,
    opt_state: AdamWState,
    cfg: LfoNetConfig,
    train_cfg: TrainConfig,
) -> Tuple[Params, float]:
    """One optimizer step on the mean loss over ``batch``."""
    if not batch:
        raise ParameterError("batch must be non-empty")
    total: Params = {}
    loss_sum = 0.0
    for spec, target in batch:
        loss, grads = lfonet_loss_and_grads(w, spec, target, loss_w, cfg)
        loss_sum += loss
        for k, g in grads.items():
            if k in total:
                total[k] += g
            else:
                total[k] = g
    mean_loss = loss_sum / len(batch)
    if not np.isfinite(mean_loss):
        raise TrainingDivergenceError(f"loss diverged: {mean_loss}")
    scale = 1.0 / len(batch)
    for k in total:
        total[k] *= scale
    adamw_update(w, total, opt_state, train_cfg)
    return w, mean_loss
