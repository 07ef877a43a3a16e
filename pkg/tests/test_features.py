"""Log-Mel spectrogram frontend and SpecAugment masking."""

import numpy as np
import pytest

from lfolab.errors import ParameterError
from lfolab.features import (
    FS,
    HOP,
    LOG_FLOOR,
    MelSpec,
    N_FFT,
    N_MELS,
    frames_for,
    hz_to_mel,
    mel_filterbank,
    mel_spectrogram,
    mel_to_hz,
    spec_augment,
)


def sine(freq, n, fs=FS, amp=0.5):
    return amp * np.sin(2 * np.pi * freq * np.arange(n) / fs)


def test_frames_for():
    assert frames_for(88200) == 345
    assert frames_for(256) == 2
    assert frames_for(255) == 1
    assert frames_for(512) == 3
    assert frames_for(513) == 3


def test_mel_scale_round_trip():
    f = np.array([20.0, 440.0, 1000.0, 8000.0, 20000.0])
    np.testing.assert_allclose(mel_to_hz(hz_to_mel(f)), f, rtol=1e-12)
    # 1 kHz sits at ~1000 mel by construction of the 2595 log curve.
    assert hz_to_mel(1000.0) == pytest.approx(999.99, abs=0.1)
    assert hz_to_mel(0.0) == 0.0


def test_filterbank_shape_and_range():
    fb = mel_filterbank()
    assert fb.shape == (N_MELS, N_FFT // 2 + 1)
    assert fb.min() >= 0.0
    assert fb.max() <= 1.0 + 1e-12


def test_filterbank_triangles_peak_near_one():
    # At 40 mels the triangles are wide enough to be well sampled: every
    # filter has weight and its sampled peak approaches the unit apex.
    fb = mel_filterbank(n_mels=40)
    peaks = fb.max(axis=1)
    assert np.all(peaks > 0.5)
    assert np.all(peaks <= 1.0 + 1e-12)
    centers = fb.argmax(axis=1)
    assert np.all(np.diff(centers) > 0)


def test_filterbank_rejects_bad_mel_count():
    with pytest.raises(ParameterError):
        mel_filterbank(n_mels=0)
    with pytest.raises(ParameterError):
        mel_filterbank(n_mels=N_FFT)


def test_filterbank_tone_lands_in_the_right_bin():
    fb = mel_filterbank(n_mels=40)
    spec = np.zeros(N_FFT // 2 + 1)
    bin_880 = int(round(880.0 * N_FFT / FS))
    spec[bin_880] = 1.0
    response = fb @ spec
    hit = int(np.argmax(response))
    centers_hz = mel_to_hz(
        np.linspace(hz_to_mel(0.0), hz_to_mel(FS / 2.0), 42)[1:-1]
    )
    assert abs(centers_hz[hit] - 880.0) < 250.0


def test_spectrogram_shape_and_silence_floor():
    n = 88200
    spec = mel_spectrogram(np.zeros(n), np.zeros(n))
    assert spec.data.shape == (2, 256, 345)
    assert spec.channels == 2
    assert spec.frames == 345
    np.testing.assert_array_equal(spec.data, LOG_FLOOR)


def test_spectrogram_channel_order():
    n = 44100
    spec = mel_spectrogram(np.zeros(n), sine(440.0, n))
    np.testing.assert_array_equal(spec.data[0], LOG_FLOOR)
    assert spec.data[1].max() > LOG_FLOOR + 1.0


def test_spectrogram_amplitude_scaling():
    # Doubling the amplitude quadruples the power: +log(4) where the tone
    # dominates the log offset.
    n = 44100
    a = mel_spectrogram(sine(440.0, n, amp=0.25), np.zeros(n))
    b = mel_spectrogram(sine(440.0, n, amp=0.5), np.zeros(n))
    k = np.unravel_index(np.argmax(a.data[0]), a.data[0].shape)
    assert b.data[0][k] - a.data[0][k] == pytest.approx(np.log(4.0), abs=1e-3)


def test_spectrogram_localizes_an_impulse():
    n = 88200
    x = np.zeros(n)
    x[2560] = 1.0  # frame 10 center with hop 256
    spec = mel_spectrogram(x, np.zeros(n))
    energy = spec.data[0].sum(axis=0)
    assert int(np.argmax(energy)) == 10
    # Well outside the window footprint everything is at the floor.
    assert np.all(spec.data[0][:, 20:] == LOG_FLOOR)


def test_spectrogram_input_validation():
    with pytest.raises(ParameterError):
        mel_spectrogram(np.zeros(1000), np.zeros(999))
    with pytest.raises(ParameterError):
        mel_spectrogram(np.zeros(100), np.zeros(100))  # too short to pad
    with pytest.raises(ParameterError):
        mel_spectrogram(np.zeros((2, 1000)), np.zeros((2, 1000)))


def test_melspec_validation():
    with pytest.raises(ParameterError):
        MelSpec(np.zeros((2, 100, 10)))  # n_mels mismatch with default
    with pytest.raises(ParameterError):
        MelSpec(np.full((2, 256, 10), np.nan))
    spec = MelSpec(np.zeros((2, 64, 10)), n_mels=64)
    assert spec.frames == 10


# ----------------------------------------------------------------- specaugment


def make_spec(n_mels=32, frames=40):
    return MelSpec(np.zeros((2, n_mels, frames)), n_mels=n_mels)


def test_augment_zero_fraction_is_identity():
    spec = make_spec()
    out = spec_augment(spec, 0.0, np.random.default_rng(0))
    np.testing.assert_array_equal(out.data, spec.data)
    assert out.data is not spec.data  # still a copy


def test_augment_masks_one_band_per_axis():
    spec = make_spec()
    out = spec_augment(spec, 0.5, np.random.default_rng(1))
    masked = out.data[0] == LOG_FLOOR
    rows = np.flatnonzero(masked.all(axis=1))
    cols = np.flatnonzero(masked.all(axis=0))
    # One contiguous frequency band and one contiguous time band.
    assert len(rows) > 0 and np.all(np.diff(rows) == 1)
    assert len(cols) > 0 and np.all(np.diff(cols) == 1)
    assert len(rows) <= 16 and len(cols) <= 20  # within fraction * dim
    # Everything off the two bands is untouched.
    keep = ~masked
    keep[rows, :] = False
    keep[:, cols] = False
    assert np.all(out.data[0][keep] == 0.0)


def test_augment_applies_identical_mask_to_both_channels():
    spec = MelSpec(np.random.default_rng(3).uniform(-5, 0, (2, 32, 40)), n_mels=32)
    out = spec_augment(spec, 0.4, np.random.default_rng(7))
    m0 = out.data[0] == LOG_FLOOR
    m1 = out.data[1] == LOG_FLOOR
    np.testing.assert_array_equal(m0, m1)


def test_augment_deterministic_per_seed():
    spec = make_spec()
    a = spec_augment(spec, 0.3, np.random.default_rng(11))
    b = spec_augment(spec, 0.3, np.random.default_rng(11))
    np.testing.assert_array_equal(a.data, b.data)


def test_augment_never_exceeds_fraction():
    spec = make_spec(n_mels=30, frames=50)
    for seed in range(30):
        out = spec_augment(spec, 0.2, np.random.default_rng(seed))
        masked = out.data[0] == LOG_FLOOR
        assert masked.all(axis=1).sum() <= 6   # 0.2 * 30
        assert masked.all(axis=0).sum() <= 10  # 0.2 * 50


def test_augment_fraction_validation():
    spec = make_spec()
    with pytest.raises(ParameterError):
        spec_augment(spec, 1.5, np.random.default_rng(0))
    with pytest.raises(ParameterError):
        spec_augment(spec, -0.1, np.random.default_rng(0))
