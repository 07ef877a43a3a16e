"""Unipolar LFO synthesis: periodic, quasiperiodic, combined, and distorted.

All generators emit :class:`~lfolab.modsignal.ModSignal` values in [0, 1].
A shape maps a normalized cycle position theta in [0, 1) to a value in
[0, 1]; the six shapes and their conventions:

    cosine            0.5 + 0.5 * cos(2 pi theta)      peak at theta = 0
    triangle          1 - |2 theta - 1|                trough at theta = 0
    rect_cosine       |cos(pi theta)|                  peak at theta = 0
    inv_rect_cosine   1 - |cos(pi theta)|              trough at theta = 0
    saw               theta                            rising ramp
    inv_saw           1 - theta                        falling ramp

The saw ramp is sampled from the plain wrapped phase, so the sample just
before a reset carries the supremum of the cycle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError
from .modsignal import ModSignal

TWO_PI = 2.0 * math.pi

# Defaults for cycle stretching, 10% to 33.33% lengthening.
DEFAULT_STRETCH_LO = 1.10
DEFAULT_STRETCH_HI = 4.0 / 3.0

# Defaults for segment exponentiation, log-symmetric around 1.
DEFAULT_EXP_LO = 1.0 / 3.0
DEFAULT_EXP_HI = 3.0


class LfoShape(enum.Enum):
    COSINE = "cosine"
    TRIANGLE = "triangle"
    RECT_COSINE = "rect_cosine"
    INV_RECT_COSINE = "inv_rect_cosine"
    SAW = "saw"
    INV_SAW = "inv_saw"

    def wave(self, theta: np.ndarray) -> np.ndarray:
        """Evaluate the unipolar waveform at cycle positions ``theta`` in [0, 1)."""
        return _SHAPE_FNS[self](np.asarray(theta, dtype=np.float64))


_SHAPE_FNS = {
    LfoShape.COSINE: lambda th: 0.5 + 0.5 * np.cos(TWO_PI * th),
    LfoShape.TRIANGLE: lambda th: 1.0 - np.abs(2.0 * th - 1.0),
    LfoShape.RECT_COSINE: lambda th: np.abs(np.cos(math.pi * th)),
    LfoShape.INV_RECT_COSINE: lambda th: 1.0 - np.abs(np.cos(math.pi * th)),
    LfoShape.SAW: lambda th: th,
    LfoShape.INV_SAW: lambda th: 1.0 - th,
}

ALL_SHAPES = tuple(LfoShape)

#: The four shapes without the sawtooth discontinuity.
SYMMETRIC_SHAPES = (
    LfoShape.COSINE,
    LfoShape.TRIANGLE,
    LfoShape.RECT_COSINE,
    LfoShape.INV_RECT_COSINE,
)


@dataclass(frozen=True)
class LfoConfig:
    """Parameters of one periodic LFO: shape, rate, phase, and duration."""

    shape: LfoShape
    rate_hz: float
    phase: float = 0.0
    duration_s: float = 2.0

    def __post_init__(self):
        if self.rate_hz <= 0:
            raise ParameterError(f"rate_hz must be positive, got {self.rate_hz}")
        if self.duration_s <= 0:
            raise ParameterError(f"duration_s must be positive, got {self.duration_s}")
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)
        object.__setattr__(self, "rate_hz", float(self.rate_hz))
        object.__setattr__(self, "duration_s", float(self.duration_s))


def n_samples(rate_hz: float, duration_s: float) -> int:
    """Sample count covering ``duration_s`` at ``rate_hz``, rounded up.

    Exact products stay exact (2 s at 44100 Hz gives 88200); fractional
    products round up (2 s at 44100/256 fps gives 345).
    """
    return int(math.ceil(rate_hz * duration_s - 1e-9))


def _check_out_rate(out_rate_hz: float) -> None:
    if out_rate_hz <= 0:
        raise ParameterError(f"out_rate_hz must be positive, got {out_rate_hz}")


def render_periodic(config: LfoConfig, out_rate_hz: float) -> ModSignal:
    """Render a periodic LFO at ``out_rate_hz`` samples per second.

    The value at time t is ``shape(frac(rate * t + phase / 2pi))``.
    """
    _check_out_rate(out_rate_hz)
    n = n_samples(out_rate_hz, config.duration_s)
    t = np.arange(n) / out_rate_hz
    theta = np.mod(config.rate_hz * t + config.phase / TWO_PI, 1.0)
    return ModSignal(config.shape.wave(theta), out_rate_hz, config)


def make_quasiperiodic(
    config: LfoConfig,
    rng: np.random.Generator,
    out_rate_hz: float,
    stretch_lo: float = DEFAULT_STRETCH_LO,
    stretch_hi: float = DEFAULT_STRETCH_HI,
) -> ModSignal:
    """Periodic LFO whose cycles are individually lengthened.

    Cycle k lasts ``stretch_k / rate_hz`` seconds with stretch_k drawn
    uniformly from [stretch_lo, stretch_hi]; each cycle still traverses one
    full period of the shape. The final partial cycle is truncated to fit.
    """
    _check_out_rate(out_rate_hz)
    if stretch_lo < 1.0 or stretch_lo > stretch_hi:
        raise ParameterError(
            f"need 1 <= stretch_lo <= stretch_hi, got [{stretch_lo}, {stretch_hi}]"
        )
    period = 1.0 / config.rate_hz
    # Enough cycles to cover the duration even if every draw is minimal.
    max_cycles = int(math.ceil(config.duration_s / (stretch_lo * period))) + 1
    durations = rng.uniform(stretch_lo, stretch_hi, size=max_cycles) * period
    starts = np.concatenate(([0.0], np.cumsum(durations)))

    n = n_samples(out_rate_hz, config.duration_s)
    t = np.arange(n) / out_rate_hz
    k = np.searchsorted(starts, t, side="right") - 1
    theta = k + (t - starts[k]) / durations[k]
    theta = np.mod(theta + config.phase / TWO_PI, 1.0)
    return ModSignal(config.shape.wave(theta), out_rate_hz, config)


def make_combined(
    pool: Sequence[LfoShape],
    rate_hz: float,
    rng: np.random.Generator,
    out_rate_hz: float,
    duration_s: float,
) -> ModSignal:
    """Periodic-rate LFO whose cycles draw their shape i.i.d. from ``pool``."""
    _check_out_rate(out_rate_hz)
    pool = tuple(dict.fromkeys(pool))  # dedupe, keep caller order
    if not pool:
        raise ParameterError("shape pool must be non-empty")
    if rate_hz <= 0:
        raise ParameterError(f"rate_hz must be positive, got {rate_hz}")
    if duration_s <= 0:
        raise ParameterError(f"duration_s must be positive, got {duration_s}")

    n_cycles = int(math.ceil(rate_hz * duration_s - 1e-9))
    choice = rng.integers(0, len(pool), size=n_cycles)

    n = n_samples(out_rate_hz, duration_s)
    t = np.arange(n) / out_rate_hz
    k = np.minimum(np.floor(rate_hz * t).astype(np.int64), n_cycles - 1)
    theta = rate_hz * t - k
    values = np.empty(n, dtype=np.float64)
    for idx, shape in enumerate(pool):
        mask = choice[k] == idx
        if mask.any():
            values[mask] = shape.wave(theta[mask])
    return ModSignal(values, out_rate_hz)


def make_distorted(
    base: ModSignal,
    rng: np.random.Generator,
    exp_lo: float = DEFAULT_EXP_LO,
    exp_hi: float = DEFAULT_EXP_HI,
) -> ModSignal:
    """Exponentiate each inter-extremum segment of ``base`` independently.

    Exponents are drawn log-uniformly from [exp_lo, exp_hi]. Since 0 and 1
    are fixed points of v**e, a base signal whose extrema sit at 0 and 1
    keeps its extrema locations and values.
    """
    if exp_lo <= 0 or exp_lo > exp_hi:
        raise ParameterError(
            f"need 0 < exp_lo <= exp_hi, got [{exp_lo}, {exp_hi}]"
        )
    from .postproc import find_extrema

    boundaries = [0] + [idx for idx, _ in find_extrema(base)] + [len(base)]
    values = base.values.copy()
    for start, end in zip(boundaries[:-1], boundaries[1:]):
        if end <= start:
            continue
        e = math.exp(rng.uniform(math.log(exp_lo), math.log(exp_hi)))
        values[start:end] **= e
    return ModSignal(values, base.rate_hz, base.meta)


def resample_mod(
    signal: ModSignal, target_rate_hz: float, n_out: Optional[int] = None
) -> ModSignal:
    """Linearly interpolate ``signal`` onto a ``target_rate_hz`` grid.

    By default the output covers the source span exactly (endpoints
    preserved, no extrapolation). An explicit ``n_out`` may extend past the
    source, in which case the last value is held.
    """
    _check_out_rate(target_rate_hz)
    src = signal.values
    t_src = signal.times
    if n_out is None:
        n_out = int(math.floor((len(src) - 1) * target_rate_hz / signal.rate_hz + 1e-9)) + 1
    elif n_out <= 0:
        raise ParameterError(f"n_out must be positive, got {n_out}")
    t_new = np.arange(n_out) / target_rate_hz
    return ModSignal(np.interp(t_new, t_src, src), target_rate_hz, signal.meta)
