"""2-channel log-Mel front end and SpecAugment masking.

Frame alignment contract: with centered analysis and a 256-sample hop,
n audio samples produce 1 + n // 256 frames, so 88200 samples (2 s at
44.1 kHz) give 345 frames. Conventions: periodic Hann window, reflect
padding, power spectrum, HTK Mel scale, log(x + 1e-7) compression.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

FS = 44100
N_FFT = 1024
HOP = 256
N_MELS = 256
LOG_EPS = 1e-7
LOG_FLOOR = float(np.log(LOG_EPS))


def frames_for(n_samples: int, hop: int = HOP) -> int:
    """Number of spectrogram frames produced by ``n_samples`` of audio."""
    if n_samples < 0:
        raise ParameterError(f"n_samples must be >= 0, got {n_samples}")
    return 1 + n_samples // hop


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_fft: int = N_FFT, n_mels: int = N_MELS, fs_hz: float = FS) -> np.ndarray:
    """Triangular Mel filterbank, shape (n_mels, n_fft // 2 + 1).

    Filter edges are equally spaced on the Mel scale from 0 to fs/2 and the
    triangles peak at 1 (no area normalization). With many filters the
    lowest ones can be narrower than one FFT bin and stay empty; their
    output then sits at the log floor.
    """
    if n_mels < 1 or n_mels > n_fft // 2:
        raise ParameterError(f"n_mels must be in [1, {n_fft // 2}], got {n_mels}")
    n_freqs = n_fft // 2 + 1
    freqs = np.linspace(0.0, fs_hz / 2.0, n_freqs)
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(fs_hz / 2.0), n_mels + 2))
    lower = (freqs[None, :] - edges[:-2, None]) / (edges[1:-1] - edges[:-2])[:, None]
    upper = (edges[2:, None] - freqs[None, :]) / (edges[2:] - edges[1:-1])[:, None]
    return np.maximum(0.0, np.minimum(lower, upper))


@dataclass(frozen=True)
class MelSpec:
    """Log-Mel spectrogram stack, shape (channels, n_mels, frames)."""

    data: np.ndarray
    fs_hz: int = FS
    n_fft: int = N_FFT
    hop: int = HOP
    n_mels: int = N_MELS

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise ParameterError(f"data must be 3-D, got shape {data.shape}")
        if data.shape[1] != self.n_mels:
            raise ParameterError(
                f"data has {data.shape[1]} mel bins, expected {self.n_mels}"
            )
        if not np.all(np.isfinite(data)):
            raise ParameterError("spectrogram entries must be finite")
        object.__setattr__(self, "data", data)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def frames(self) -> int:
        return self.data.shape[2]


def _stft_power(x: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """Power spectrogram of one channel, shape (n_fft // 2 + 1, frames)."""
    pad = n_fft // 2
    if len(x) < pad + 1:
        raise ParameterError(
            f"need at least {pad + 1} samples for reflect padding, got {len(x)}"
        )
    padded = np.pad(x, pad, mode="reflect")
    n_frames = frames_for(len(x), hop)
    frames = np.lib.stride_tricks.sliding_window_view(padded, n_fft)[::hop][:n_frames]
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)
    spectrum = np.fft.rfft(frames * window, axis=-1)
    return (spectrum.real**2 + spectrum.imag**2).T


def mel_spectrogram(
    dry: np.ndarray,
    wet: np.ndarray,
    fs_hz: int = FS,
    n_fft: int = N_FFT,
    hop: int = HOP,
    n_mels: int = N_MELS,
) -> MelSpec:
    """Stack the log-Mel spectrograms of a dry/wet pair into one MelSpec."""
    dry = np.asarray(dry, dtype=np.float64)
    wet = np.asarray(wet, dtype=np.float64)
    if dry.shape != wet.shape or dry.ndim != 1:
        raise ParameterError(
            f"dry and wet must be equal-length 1-D arrays, got {dry.shape} vs {wet.shape}"
        )
    fb = mel_filterbank(n_fft, n_mels, fs_hz)
    data = np.stack(
        [np.log(fb @ _stft_power(ch, n_fft, hop) + LOG_EPS) for ch in (dry, wet)]
    )
    return MelSpec(data, fs_hz=fs_hz, n_fft=n_fft, hop=hop, n_mels=n_mels)


def spec_augment(spec: MelSpec, fraction: float, rng: np.random.Generator) -> MelSpec:
    """Mask one frequency band and one time band with the log floor.

    Band widths are drawn uniformly from [0, fraction * dim]; positions are
    uniform over the valid range. Both channels get the identical mask.
    Draw order: frequency width, frequency start, time width, time start.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ParameterError(f"fraction must be in [0, 1], got {fraction}")
    data = spec.data.copy()
    for axis_len, axis in ((spec.n_mels, 1), (spec.frames, 2)):
        width = int(rng.integers(0, int(fraction * axis_len) + 1))
        start = int(rng.integers(0, axis_len - width + 1))
        if width:
            sl = [slice(None)] * 3
            sl[axis] = slice(start, start + width)
            data[tuple(sl)] = LOG_FLOOR
    return MelSpec(
        data, fs_hz=spec.fs_hz, n_fft=spec.n_fft, hop=spec.hop, n_mels=spec.n_mels
    )
