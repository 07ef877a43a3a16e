"""Waveform generators: periodic, quasiperiodic, combined, distorted."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfolab.errors import ParameterError
from lfolab.lfo import (
    ALL_SHAPES,
    SYMMETRIC_SHAPES,
    LfoConfig,
    LfoShape,
    make_combined,
    make_distorted,
    make_quasiperiodic,
    n_samples,
    render_periodic,
    resample_mod,
)
from lfolab.postproc import find_extrema, stretch_unit_range

FRAME_RATE = 44100.0 / 256.0

# Hand-computed waveform values at quarter-cycle phases theta = 0, .25, .5, .75.
HALF_SQRT2 = math.sqrt(2.0) / 2.0
QUARTER_TABLE = {
    LfoShape.COSINE: (1.0, 0.5, 0.0, 0.5),
    LfoShape.TRIANGLE: (0.0, 0.5, 1.0, 0.5),
    LfoShape.RECT_COSINE: (1.0, HALF_SQRT2, 0.0, HALF_SQRT2),
    LfoShape.INV_RECT_COSINE: (0.0, 1.0 - HALF_SQRT2, 1.0, 1.0 - HALF_SQRT2),
    LfoShape.SAW: (0.0, 0.25, 0.5, 0.75),
    LfoShape.INV_SAW: (1.0, 0.75, 0.5, 0.25),
}


def test_shape_quarter_cycle_values():
    theta = np.array([0.0, 0.25, 0.5, 0.75])
    for shape, expected in QUARTER_TABLE.items():
        np.testing.assert_allclose(shape.wave(theta), expected, atol=1e-15,
                                   err_msg=shape.value)


def test_shape_registry_is_complete():
    assert set(ALL_SHAPES) == set(LfoShape)
    assert len(ALL_SHAPES) == 6
    assert set(SYMMETRIC_SHAPES) == {
        LfoShape.COSINE, LfoShape.TRIANGLE,
        LfoShape.RECT_COSINE, LfoShape.INV_RECT_COSINE,
    }


def test_symmetric_shapes_mirror_within_cycle():
    # v(theta) == v(1 - theta) is what makes a shape time-symmetric.
    theta = np.linspace(0.0, 1.0, 501)
    for shape in SYMMETRIC_SHAPES:
        np.testing.assert_allclose(shape.wave(theta), shape.wave(1.0 - theta),
                                   atol=1e-12, err_msg=shape.value)
    saw = LfoShape.SAW.wave(theta)
    assert np.max(np.abs(saw - LfoShape.SAW.wave(1.0 - theta))) > 0.9


def test_n_samples_rounding():
    assert n_samples(44100.0, 2.0) == 88200
    assert n_samples(FRAME_RATE, 2.0) == 345  # ceil(344.53)
    assert n_samples(1.0, 1.0) == 1
    # The epsilon guard keeps exact products from rounding up.
    assert n_samples(100.0, 0.5) == 50


def test_render_periodic_sample_grid():
    cfg = LfoConfig(LfoShape.COSINE, 1.0, 0.0, 2.0)
    sig = render_periodic(cfg, 44100.0)
    assert len(sig) == 88200
    assert sig.rate_hz == 44100.0
    assert sig.meta is cfg
    assert sig.values[0] == 1.0
    # Quarter and half period of a 1 Hz cosine.
    np.testing.assert_allclose(sig.values[11025], 0.5, atol=1e-12)
    np.testing.assert_allclose(sig.values[22050], 0.0, atol=1e-12)


def test_render_periodic_is_periodic():
    sig = render_periodic(LfoConfig(LfoShape.TRIANGLE, 2.0, 1.3, 2.0), 44100.0)
    period = 22050  # 44100 / 2 Hz, exact in samples
    np.testing.assert_allclose(sig.values[period:], sig.values[:-period], atol=1e-9)


def test_phase_offsets_shift_the_waveform():
    fr = FRAME_RATE
    base = render_periodic(LfoConfig(LfoShape.COSINE, 1.0, 0.0, 2.0), fr)
    flipped = render_periodic(LfoConfig(LfoShape.COSINE, 1.0, math.pi, 2.0), fr)
    np.testing.assert_allclose(base.values + flipped.values, 1.0, atol=1e-12)
    wrapped = render_periodic(LfoConfig(LfoShape.COSINE, 1.0, 2.0 * math.pi, 2.0), fr)
    np.testing.assert_allclose(wrapped.values, base.values, atol=1e-9)


def test_config_validation():
    with pytest.raises(ParameterError):
        LfoConfig(LfoShape.COSINE, 0.0, 0.0, 2.0)
    with pytest.raises(ParameterError):
        LfoConfig(LfoShape.COSINE, 1.0, 0.0, -1.0)
    cfg = LfoConfig(LfoShape.COSINE, 1.0, 7.0 * math.pi / 2.0, 2.0)
    np.testing.assert_allclose(cfg.phase, 3.0 * math.pi / 2.0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    shape=st.sampled_from(list(LfoShape)),
    rate=st.floats(0.5, 3.0),
    phase=st.floats(0.0, 6.28),
)
def test_periodic_values_stay_unipolar(shape, rate, phase):
    sig = render_periodic(LfoConfig(shape, rate, phase, 1.0), FRAME_RATE)
    assert sig.values.min() >= 0.0
    assert sig.values.max() <= 1.0


# ---------------------------------------------------------------- quasiperiodic


def test_quasiperiodic_degenerate_band_matches_periodic():
    cfg = LfoConfig(LfoShape.COSINE, 2.0, 0.7, 2.0)
    rng = np.random.default_rng(0)
    sig = make_quasiperiodic(cfg, rng, FRAME_RATE, stretch_lo=1.0, stretch_hi=1.0)
    ref = render_periodic(cfg, FRAME_RATE)
    np.testing.assert_allclose(sig.values, ref.values, atol=1e-12)


def test_quasiperiodic_cycle_lengths_in_band():
    # Saw ramps drop at each cycle boundary, which exposes the cycle grid.
    cfg = LfoConfig(LfoShape.SAW, 2.0, 0.0, 20.0)
    sig = make_quasiperiodic(cfg, np.random.default_rng(7), 44100.0)
    drops = np.flatnonzero(np.diff(sig.values) < -0.5)
    lengths = np.diff(drops) / 44100.0
    nominal = 0.5  # 1 / 2 Hz
    ratios = lengths / nominal
    assert len(ratios) >= 10
    assert ratios.min() > 1.10 - 1e-3
    assert ratios.max() < 4.0 / 3.0 + 1e-3


def test_quasiperiodic_deterministic_per_seed():
    cfg = LfoConfig(LfoShape.TRIANGLE, 1.5, 0.3, 4.0)
    a = make_quasiperiodic(cfg, np.random.default_rng(3), FRAME_RATE)
    b = make_quasiperiodic(cfg, np.random.default_rng(3), FRAME_RATE)
    c = make_quasiperiodic(cfg, np.random.default_rng(4), FRAME_RATE)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_quasiperiodic_stays_unipolar():
    for seed in range(5):
        cfg = LfoConfig(LfoShape.RECT_COSINE, 3.0, 1.0, 5.0)
        sig = make_quasiperiodic(cfg, np.random.default_rng(seed), 4000.0)
        assert sig.values.min() >= 0.0 and sig.values.max() <= 1.0


def test_quasiperiodic_rejects_bad_band():
    cfg = LfoConfig(LfoShape.COSINE, 1.0, 0.0, 2.0)
    with pytest.raises(ParameterError):
        make_quasiperiodic(cfg, np.random.default_rng(0), FRAME_RATE,
                           stretch_lo=1.5, stretch_hi=1.2)


# -------------------------------------------------------------------- combined


def test_combined_single_shape_pool_is_periodic():
    sig = make_combined([LfoShape.SAW], 2.0, np.random.default_rng(1), FRAME_RATE, 3.0)
    ref = render_periodic(LfoConfig(LfoShape.SAW, 2.0, 0.0, 3.0), FRAME_RATE)
    np.testing.assert_allclose(sig.values, ref.values, atol=1e-12)


def test_combined_cycles_match_pool_templates():
    rate, dur, fs = 1.0, 6.0, FRAME_RATE
    sig = make_combined(ALL_SHAPES, rate, np.random.default_rng(5), fs, dur)
    t = np.arange(len(sig)) / fs
    theta = rate * t
    cycle = np.floor(theta).astype(int)
    matched_shapes = []
    for k in range(int(rate * dur)):
        mask = cycle == k
        frac = theta[mask] - k
        errs = {s: np.max(np.abs(sig.values[mask] - s.wave(frac))) for s in ALL_SHAPES}
        best = min(errs, key=errs.get)
        assert errs[best] < 1e-9, f"cycle {k}: best {best.value} err {errs[best]}"
        matched_shapes.append(best)
    assert len(set(matched_shapes)) > 1  # rng picked more than one shape in 6 cycles


def test_combined_symmetric_pool_only_uses_symmetric_shapes():
    rate, dur = 2.0, 8.0
    sig = make_combined(SYMMETRIC_SHAPES, rate, np.random.default_rng(2), FRAME_RATE, dur)
    t = np.arange(len(sig)) / FRAME_RATE
    theta = rate * t
    cycle = np.floor(theta).astype(int)
    for k in range(int(rate * dur)):
        mask = cycle == k
        frac = theta[mask] - k
        errs = [np.max(np.abs(sig.values[mask] - s.wave(frac))) for s in SYMMETRIC_SHAPES]
        assert min(errs) < 1e-9


def test_combined_rejects_empty_pool():
    with pytest.raises(ParameterError):
        make_combined([], 1.0, np.random.default_rng(0), FRAME_RATE, 2.0)


# ------------------------------------------------------------------- distorted


def test_distorted_preserves_extrema():
    # Segment exponentiation fixes 0 and 1, so feed a base whose extrema
    # sit exactly on the rails (the raw frame grid misses the true peak).
    base = stretch_unit_range(
        render_periodic(LfoConfig(LfoShape.TRIANGLE, 1.0, 0.0, 3.0), FRAME_RATE)
    )
    out = make_distorted(base, np.random.default_rng(11))
    assert find_extrema(out) == find_extrema(base)
    for idx, _ in find_extrema(base):
        np.testing.assert_allclose(out.values[idx], base.values[idx], atol=1e-12)
    assert out.values.min() >= 0.0 and out.values.max() <= 1.0
    assert np.max(np.abs(out.values - base.values)) > 0.01  # actually distorted


def test_distorted_is_monotone_between_extrema():
    base = stretch_unit_range(
        render_periodic(LfoConfig(LfoShape.COSINE, 2.0, 0.5, 2.0), FRAME_RATE)
    )
    out = make_distorted(base, np.random.default_rng(8))
    ext = [i for i, _ in find_extrema(base)]
    for a, b in zip(ext[:-1], ext[1:]):
        seg = np.diff(out.values[a : b + 1])
        assert np.all(seg >= 0.0) or np.all(seg <= 0.0)


def test_distorted_identity_band_is_identity():
    base = render_periodic(LfoConfig(LfoShape.COSINE, 1.0, 0.0, 2.0), FRAME_RATE)
    out = make_distorted(base, np.random.default_rng(0), exp_lo=1.0, exp_hi=1.0)
    np.testing.assert_allclose(out.values, base.values, atol=1e-12)


# ------------------------------------------------------------------- resampling


def test_resample_default_length():
    sig = render_periodic(LfoConfig(LfoShape.COSINE, 1.0, 0.0, 2.0), 44100.0)
    down = resample_mod(sig, FRAME_RATE)
    assert len(down) == 345
    assert down.rate_hz == FRAME_RATE


def test_resample_is_linear_interpolation():
    ramp = render_periodic(LfoConfig(LfoShape.SAW, 0.5, 0.0, 1.0), 1000.0)
    up = resample_mod(ramp, 4000.0)
    t = np.arange(len(up)) / 4000.0
    np.testing.assert_allclose(up.values, 0.5 * t, atol=1e-12)


def test_resample_identity_rate():
    sig = render_periodic(LfoConfig(LfoShape.TRIANGLE, 1.0, 0.0, 1.0), FRAME_RATE)
    same = resample_mod(sig, FRAME_RATE)
    np.testing.assert_allclose(same.values, sig.values, atol=1e-12)


def test_resample_explicit_length():
    sig = render_periodic(LfoConfig(LfoShape.COSINE, 1.0, 0.0, 1.0), 100.0)
    out = resample_mod(sig, 50.0, n_out=50)
    assert len(out) == 50


def test_resample_cosine_round_trip_is_tight():
    # Smooth shapes survive the frame-rate round trip; cornered ones do not.
    truth = render_periodic(LfoConfig(LfoShape.COSINE, 2.0, 0.4, 2.0), 44100.0)
    down = resample_mod(truth, FRAME_RATE)
    back = resample_mod(down, 44100.0, n_out=len(truth))
    # Past the last frame center the value is held, so bound that region
    # separately from the interpolated interior.
    covered = (len(down) - 1) * 256
    err = np.abs(back.values - truth.values)
    assert np.max(err[: covered + 1]) < 1e-3
    assert np.max(err) < 2e-2
