"""LFO synthesis, LFO-driven audio effects, and modulation extraction models.

The package splits into:

- ``lfo``: unipolar low-frequency oscillator generators and resampling
- ``modsignal``: the bounded modulation-signal container and its file format
- ``effects``: phaser and flanger/chorus engines driven by a ModSignal
- ``features``: 2-channel log-Mel front end and SpecAugment
- ``postproc``: smoothing, range stretching, validity filtering
- ``metrics``: losses, ESR, informed-guess baseline, PCA
- ``nn``: extraction CNN, LSTM effect model, AdamW, weight files
- ``dataset``: WAV I/O, chunking, reproducible dataset generation
- ``cli``: the ``lfolab`` command
"""

from .errors import (
    DataError,
    FormatError,
    ParameterError,
    TrainingDivergenceError,
    UndefinedMetricError,
    ValidityError,
)
from .lfo import (
    ALL_SHAPES,
    SYMMETRIC_SHAPES,
    LfoConfig,
    LfoShape,
    make_combined,
    make_distorted,
    make_quasiperiodic,
    render_periodic,
    resample_mod,
)
from .modsignal import ModSignal, load_modsignal, save_modsignal

__version__ = "0.1.0"

__all__ = [
    "ALL_SHAPES",
    "DataError",
    "FormatError",
    "LfoConfig",
    "LfoShape",
    "ModSignal",
    "ParameterError",
    "SYMMETRIC_SHAPES",
    "TrainingDivergenceError",
    "UndefinedMetricError",
    "ValidityError",
    "load_modsignal",
    "make_combined",
    "make_distorted",
    "make_quasiperiodic",
    "render_periodic",
    "resample_mod",
    "save_modsignal",
]
