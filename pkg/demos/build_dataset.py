"""Generate a small labeled dataset from synthesized source audio and
show what lands in the manifest.

Usage: python3 demos/build_dataset.py [out_dir]
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from lfolab.dataset import GenConfig, gen_dataset, load_manifest, write_wav

FS = 44100

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/dataset")

with tempfile.TemporaryDirectory() as src:
    # Two synthetic "recordings" to chunk from.
    t = np.arange(6 * FS) / FS
    write_wav(Path(src) / "pluck.wav",
              0.5 * np.sin(2 * np.pi * 220.0 * t) * np.exp(-((t % 1.5) / 0.4)))
    rng = np.random.default_rng(0)
    write_wav(Path(src) / "noise.wav", 0.3 * rng.standard_normal(6 * FS))

    cfg = GenConfig(
        source_dir=src,
        count=8,
        chunk_s=1.0,
        configuration="varying",
        effects=("flanger", "chorus"),
        lfo_family="quasiperiodic",
        seed=42,
    )
    records = gen_dataset(cfg, out_dir)

print(f"{len(records)} items in {out_dir}/\n")
for rec in load_manifest(out_dir / "manifest.jsonl")[:3]:
    print(json.dumps(rec, indent=2, sort_keys=True)[:400])
    print("...")
