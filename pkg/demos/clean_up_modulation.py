"""Post-processing walkthrough: take a noisy modulation estimate, smooth
it, stretch it back onto [0, 1], and check it against the plausibility
policy. Prints the error against the clean ground truth at each stage.
"""

import numpy as np

from lfolab.lfo import LfoConfig, LfoShape, render_periodic
from lfolab.metrics import l1_error
from lfolab.postproc import is_valid_mod, smooth_ma, stretch_unit_range

FRAME_RATE = 44100.0 / 256.0

truth = render_periodic(LfoConfig(LfoShape.COSINE, rate_hz=1.5, duration_s=4.0),
                        FRAME_RATE)

# Fake an extractor output: squashed range, a slow droop, and gentle slow
# wobble (network outputs drift smoothly, they do not flicker frame to frame).
rng = np.random.default_rng(3)
tt = truth.times
drift = 0.05 * np.sin(np.linspace(0, 2.5, len(truth)))
wobble = sum(0.02 * np.sin(2 * np.pi * f * tt + rng.uniform(0, 2 * np.pi))
             for f in (0.31, 0.47, 0.83))
noisy = truth.with_values(
    np.clip(0.15 + 0.6 * truth.values + wobble + drift, 0.0, 1.0))

smoothed = smooth_ma(noisy, order=4)
stretched = stretch_unit_range(smoothed)

for name, sig in [("raw estimate", noisy), ("smoothed", smoothed),
                  ("stretched", stretched)]:
    err = l1_error(truth.values, sig.values)
    print(f"{name:13s} L1 vs truth = {err * 100:5.2f}%")

verdict = is_valid_mod(stretched)
print(f"validity: {'valid' if verdict.ok else 'invalid'} ({verdict.reason})")
print(f"extrema land on the rails: min={stretched.values.min()}, "
      f"max={stretched.values.max()}")
