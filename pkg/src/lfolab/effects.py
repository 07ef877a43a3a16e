"""LFO-driven audio effects: phaser and the flanger/chorus delay engine.

The two delay-based effects share one implementation; flanger and chorus
are just different parameter ranges. Both effects use the mixing topology

    y = (1 - mix) * x + mix * (x + depth * w)

where w is the wet path (all-pass cascade output or delayed signal), depth
is the wet-branch gain and mix crossfades dry against the classic sum.
Feedback taps w and re-enters the wet path input.

Processing is stateful and block-agnostic: feeding a signal through in any
block partition yields bit-identical output for the same initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .errors import DataError, ParameterError
from .modsignal import ModSignal

DEFAULT_FS = 44100.0


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not lo <= value <= hi:
        raise ParameterError(f"{name} must be in [{lo}, {hi}], got {value}")


@dataclass(frozen=True)
class PhaserParams:
    """Cascaded all-pass phaser with feedback.

    The break frequency sweeps within sweep_octaves of center_freq_hz on a
    log axis, driven by the unipolar mod signal; the swept frequency is
    clamped to [20 Hz, 0.45 * fs].
    """

    center_freq_hz: float
    feedback: float = 0.0
    depth: float = 1.0
    mix: float = 1.0
    n_stages: int = 6
    sweep_octaves: float = 1.0

    def __post_init__(self):
        _check_range("center_freq_hz", self.center_freq_hz, 70.0, 18000.0)
        _check_range("feedback", self.feedback, 0.0, 0.7)
        _check_range("depth", self.depth, 0.0, 1.0)
        _check_range("mix", self.mix, 0.0, 1.0)
        if self.n_stages < 2 or self.n_stages % 2 != 0:
            raise ParameterError(f"n_stages must be a positive even integer, got {self.n_stages}")
        if self.sweep_octaves <= 0:
            raise ParameterError(f"sweep_octaves must be positive, got {self.sweep_octaves}")


@dataclass(frozen=True)
class DelayModParams:
    """Modulated fractional delay line (flanger and chorus engine).

    The delay is min_delay_ms + width_ms * mod(n), linearly interpolated
    from the buffer, never below one sample.
    """

    min_delay_ms: float
    width_ms: float
    feedback: float = 0.0
    depth: float = 1.0
    mix: float = 1.0

    def __post_init__(self):
        if self.min_delay_ms < 0:
            raise ParameterError(f"min_delay_ms must be >= 0, got {self.min_delay_ms}")
        if self.width_ms < 0:
            raise ParameterError(f"width_ms must be >= 0, got {self.width_ms}")
        _check_range("feedback", self.feedback, 0.0, 0.7)
        _check_range("depth", self.depth, 0.0, 1.0)
        _check_range("mix", self.mix, 0.0, 1.0)


class PhaserState:
    """Per-stage all-pass memories plus the feedback tap."""

    def __init__(self, n_stages: int, fs_hz: float = DEFAULT_FS):
        if fs_hz <= 0:
            raise ParameterError(f"fs_hz must be positive, got {fs_hz}")
        self.fs_hz = float(fs_hz)
        self.ap_mem = np.zeros(n_stages)
        self.carry = np.zeros(1)  # previous cascade output

    def reset(self) -> None:
        self.ap_mem[:] = 0.0
        self.carry[:] = 0.0


class DelayState:
    """Circular delay buffer with its write index."""

    def __init__(self, capacity: int, fs_hz: float = DEFAULT_FS):
        if fs_hz <= 0:
            raise ParameterError(f"fs_hz must be positive, got {fs_hz}")
        self.fs_hz = float(fs_hz)
        self.buffer = np.zeros(capacity)
        self.write_idx = 0

    def reset(self) -> None:
        self.buffer[:] = 0.0
        self.write_idx = 0


EffectState = Union[PhaserState, DelayState]


def make_phaser_state(p: PhaserParams, fs_hz: float = DEFAULT_FS) -> PhaserState:
    return PhaserState(p.n_stages, fs_hz)


def make_delay_state(p: DelayModParams, fs_hz: float = DEFAULT_FS) -> DelayState:
    max_delay_samp = (p.min_delay_ms + p.width_ms) * fs_hz / 1000.0
    return DelayState(int(math.ceil(max_delay_samp)) + 4, fs_hz)


def reset(state: EffectState) -> None:
    """Zero all memories; subsequent processing is independent of history."""
    state.reset()


def allpass1_coeff(fc_hz: float, fs_hz: float) -> float:
    """Coefficient a of H(z) = (a + z^-1) / (1 + a z^-1) with -90 deg at fc."""
    if not 0.0 < fc_hz < fs_hz / 2.0:
        raise ParameterError(f"fc must be in (0, {fs_hz / 2}), got {fc_hz}")
    t = math.tan(math.pi * fc_hz / fs_hz)
    return (t - 1.0) / (t + 1.0)


def _block_inputs(x, mod: Union[ModSignal, np.ndarray]) -> tuple:
    x = np.ascontiguousarray(x, dtype=np.float64)
    m = mod.values if isinstance(mod, ModSignal) else np.ascontiguousarray(mod, dtype=np.float64)
    if x.ndim != 1 or m.shape != x.shape:
        raise ParameterError(f"mod length {m.shape} must match block length {x.shape}")
    if np.isnan(x).any():
        raise DataError("input block contains NaN")
    return x, m


def process_phaser(
    x: np.ndarray, p: PhaserParams, mod: Union[ModSignal, np.ndarray], state: PhaserState
) -> np.ndarray:
    """Run one audio block through the phaser, advancing ``state``."""
    x, m = _block_inputs(x, mod)
    if state.ap_mem.shape[0] != p.n_stages:
        raise ParameterError("state was created for a different stage count")
    out = np.empty_like(x)
    _kernels.phaser_kernel(
        x, m, out, state.ap_mem, state.carry,
        p.center_freq_hz, p.sweep_octaves, p.feedback, p.depth, p.mix, state.fs_hz,
    )
    return out


def process_delay_mod(
    x: np.ndarray, p: DelayModParams, mod: Union[ModSignal, np.ndarray], state: DelayState
) -> np.ndarray:
    """Run one audio block through the modulated delay, advancing ``state``."""
    x, m = _block_inputs(x, mod)
    max_tau = (p.min_delay_ms + p.width_ms) * state.fs_hz / 1000.0
    if max_tau > state.buffer.shape[0] - 2:
        raise ParameterError(
            f"max delay {max_tau:.1f} samples exceeds buffer capacity {state.buffer.shape[0]}"
        )
    out = np.empty_like(x)
    state.write_idx = _kernels.delay_kernel(
        x, m, out, state.buffer, state.write_idx,
        p.min_delay_ms * state.fs_hz / 1000.0, p.width_ms * state.fs_hz / 1000.0,
        p.feedback, p.depth, p.mix,
    )
    return out
