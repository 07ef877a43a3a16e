"""Render one LFO through all three effects and write the results as WAV.

Usage: python3 demos/synthesize_and_render.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from lfolab.dataset import draw_effect_params, write_wav
from lfolab.effects import (
    make_delay_state,
    make_phaser_state,
    process_delay_mod,
    process_phaser,
)
from lfolab.lfo import LfoConfig, LfoShape, render_periodic

FS = 44100

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

# A guitar-ish test signal: three partials with a slow decay.
t = np.arange(4 * FS) / FS
dry = sum(a * np.sin(2 * np.pi * f * t) for a, f in [(0.5, 196.0), (0.25, 392.0), (0.12, 588.0)])
dry *= np.exp(-t / 3.0)

lfo = render_periodic(LfoConfig(LfoShape.TRIANGLE, rate_hz=0.75, duration_s=4.0), FS)
rng = np.random.default_rng(0)

write_wav(out_dir / "dry.wav", dry)
for effect in ("phaser", "flanger", "chorus"):
    p = draw_effect_params(effect, "fixed", rng)
    if effect == "phaser":
        wet = process_phaser(dry, p, lfo.values, make_phaser_state(p, FS))
    else:
        wet = process_delay_mod(dry, p, lfo.values, make_delay_state(p, FS))
    peak = np.max(np.abs(wet))
    if peak > 1.0:
        wet = wet / peak
    write_wav(out_dir / f"{effect}.wav", wet)
    print(f"{effect:8s} peak {peak:5.2f}  params {p}")

print(f"wrote dry.wav + 3 wet takes to {out_dir}/")
