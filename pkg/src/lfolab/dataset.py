"""Dataset generation: chunking source audio, rendering effects, manifests.

Each generated item gets its own random stream spawned from the root seed,
so serial and parallel generation produce byte-identical outputs. Item
layout on disk: ``<out>/<id>_dry.wav``, ``<id>_wet.wav``, ``<id>_lfo.f32``
(+ JSON sidecar), plus one JSON line per item in ``manifest.jsonl``.

Parameter ranges follow the two evaluation configurations:

    effect   config    params
    phaser   fixed     center 440 Hz, feedback 0.25, depth 1, mix 1 (cosine LFO)
             varying   center 70-18k Hz, feedback 0-0.7, depth 0.25-1, mix 1
    flanger  fixed     min delay 1 ms, width 4 ms, feedback 0.25, depth 1, mix 1
             varying   min 0-1 ms, width 2.5-10 ms, feedback 0-0.7, depth 0.25-1
    chorus   fixed     min delay 20 ms, width 10 ms, feedback 0.25, depth 1, mix 1
             varying   min 11-30 ms, width 2.5-10 ms, feedback 0-0.7, depth 0.25-1

LFO rate is uniform in [0.5, 3] Hz and phase uniform in [0, 2pi) for every
configuration; the phaser always uses a cosine LFO.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.io import wavfile

from .effects import (
    DelayModParams,
    PhaserParams,
    make_delay_state,
    make_phaser_state,
    process_delay_mod,
    process_phaser,
)
from .errors import DataError, FormatError, ParameterError
from .features import HOP, frames_for
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
from .modsignal import ModSignal, save_modsignal

RATE_RANGE_HZ = (0.5, 3.0)
LFO_FAMILIES = ("periodic", "quasiperiodic", "combined-all", "combined-symmetric",
                "distorted")
EFFECTS = ("phaser", "flanger", "chorus")


def read_wav(path) -> np.ndarray:
    """Read a mono 44.1 kHz WAV as float64 in [-1, 1].

    Accepts 16-bit PCM (scaled by 1/32768) and 32-bit IEEE float.
    """
    try:
        fs, data = wavfile.read(path)
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from e
    if fs != 44100:
        raise FormatError(f"{path}: sample rate {fs}, expected 44100")
    if data.ndim != 1:
        raise FormatError(f"{path}: {data.shape[1]} channels, expected mono")
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.float32:
        return data.astype(np.float64)
    raise FormatError(f"{path}: dtype {data.dtype}, expected int16 or float32")


def write_wav(path, audio: np.ndarray) -> None:
    """Write mono audio as 32-bit float WAV at 44.1 kHz."""
    audio = np.asarray(audio)
    if audio.ndim != 1:
        raise ParameterError(f"audio must be 1-D, got shape {audio.shape}")
    wavfile.write(path, 44100, audio.astype(np.float32))


def peak_normalize(audio: np.ndarray) -> np.ndarray:
    """Scale so max |sample| is 1. An all-zero signal passes with a warning."""
    audio = np.asarray(audio, dtype=np.float64)
    peak = np.max(np.abs(audio)) if audio.size else 0.0
    if peak == 0.0:
        warnings.warn("peak_normalize: all-zero signal left unchanged")
        return audio
    return audio / peak


def chunk_nonsilent(
    audio: np.ndarray,
    chunk_len: int,
    threshold_dbfs: float,
    rng: np.random.Generator,
    max_tries: int = 64,
) -> Tuple[np.ndarray, int]:
    """Uniformly random chunk whose RMS clears the threshold.

    Returns (chunk, offset). Offsets are redrawn up to ``max_tries`` times;
    a source with no qualifying chunk raises DataError.
    """
    audio = np.asarray(audio, dtype=np.float64)
    if len(audio) < chunk_len:
        raise ParameterError(
            f"audio of {len(audio)} samples is shorter than chunk {chunk_len}"
        )
    floor = 10.0 ** (threshold_dbfs / 20.0)
    for _ in range(max_tries):
        offset = int(rng.integers(0, len(audio) - chunk_len + 1))
        chunk = audio[offset : offset + chunk_len]
        if np.sqrt(np.mean(chunk * chunk)) > floor:
            return chunk.copy(), offset
    raise DataError(f"no chunk above {threshold_dbfs} dBFS after {max_tries} tries")


@dataclass(frozen=True)
class GenConfig:
    """Everything the generator needs, serializable to/from JSON."""

    source_dir: str
    count: int = 16
    chunk_s: float = 2.0
    fs: int = 44100
    configuration: str = "fixed"  # or "varying"
    effects: Tuple[str, ...] = EFFECTS
    lfo_family: str = "periodic"
    seed: int = 0
    silence_threshold_dbfs: float = -48.0
    peak_normalize: bool = True

    def __post_init__(self):
        if self.count <= 0:
            raise ParameterError("count must be positive")
        if self.chunk_s <= 0:
            raise ParameterError("chunk_s must be positive")
        if self.configuration not in ("fixed", "varying"):
            raise ParameterError(f"unknown configuration {self.configuration!r}")
        if self.lfo_family not in LFO_FAMILIES:
            raise ParameterError(f"unknown lfo_family {self.lfo_family!r}")
        effects = tuple(self.effects)
        for e in effects:
            if e not in EFFECTS:
                raise ParameterError(f"unknown effect {e!r}")
        if not effects:
            raise ParameterError("effects must be non-empty")
        object.__setattr__(self, "effects", effects)


def draw_lfo_config(
    rng: np.random.Generator, duration_s: float, shapes: Sequence[LfoShape] = ALL_SHAPES
) -> LfoConfig:
    """Random shape, rate in [0.5, 3] Hz, phase in [0, 2pi)."""
    shape = shapes[int(rng.integers(0, len(shapes)))]
    rate = float(rng.uniform(*RATE_RANGE_HZ))
    phase = float(rng.uniform(0.0, 2.0 * np.pi))
    return LfoConfig(shape=shape, rate_hz=rate, phase=phase, duration_s=duration_s)


def draw_effect_params(effect: str, configuration: str, rng: np.random.Generator):
    """Sample one parameter set from the effect's configuration row."""
    if effect == "phaser":
        if configuration == "fixed":
            return PhaserParams(center_freq_hz=440.0, feedback=0.25, depth=1.0, mix=1.0)
        return PhaserParams(
            center_freq_hz=float(rng.uniform(70.0, 18000.0)),
            feedback=float(rng.uniform(0.0, 0.7)),
            depth=float(rng.uniform(0.25, 1.0)),
            mix=1.0,
        )
    if effect == "flanger":
        if configuration == "fixed":
            return DelayModParams(min_delay_ms=1.0, width_ms=4.0, feedback=0.25,
                                  depth=1.0, mix=1.0)
        return DelayModParams(
            min_delay_ms=float(rng.uniform(0.0, 1.0)),
            width_ms=float(rng.uniform(2.5, 10.0)),
            feedback=float(rng.uniform(0.0, 0.7)),
            depth=float(rng.uniform(0.25, 1.0)),
            mix=1.0,
        )
    if effect == "chorus":
        if configuration == "fixed":
            return DelayModParams(min_delay_ms=20.0, width_ms=10.0, feedback=0.25,
                                  depth=1.0, mix=1.0)
        return DelayModParams(
            min_delay_ms=float(rng.uniform(11.0, 30.0)),
            width_ms=float(rng.uniform(2.5, 10.0)),
            feedback=float(rng.uniform(0.0, 0.7)),
            depth=float(rng.uniform(0.25, 1.0)),
            mix=1.0,
        )
    raise ParameterError(f"unknown effect {effect!r}")


def render_lfo_family(
    family: str,
    base: LfoConfig,
    rng: np.random.Generator,
    out_rate_hz: float,
) -> ModSignal:
    """Audio-rate modulation signal for one item, per the configured family."""
    if family == "periodic":
        return render_periodic(base, out_rate_hz)
    if family == "quasiperiodic":
        return make_quasiperiodic(base, rng, out_rate_hz)
    if family in ("combined-all", "combined-symmetric"):
        pool = ALL_SHAPES if family == "combined-all" else SYMMETRIC_SHAPES
        return make_combined(pool, base.rate_hz, rng, out_rate_hz, base.duration_s)
    if family == "distorted":
        return make_distorted(render_periodic(base, out_rate_hz), rng)
    raise ParameterError(f"unknown lfo_family {family!r}")


def apply_effect(
    effect: str, params, dry: np.ndarray, mod: ModSignal, fs: float
) -> np.ndarray:
    """Render one wet signal from scratch (fresh state)."""
    if effect == "phaser":
        return process_phaser(dry, params, mod, make_phaser_state(params, fs))
    return process_delay_mod(dry, params, mod, make_delay_state(params, fs))


def _gen_item(cfg: GenConfig, index: int, sources: List[Path], out_dir: Path) -> Dict:
    """Generate item ``index`` with its own derived random stream.

    Draw order: source file, chunk offset(s), LFO config (shape, rate,
    phase), effect choice, effect params, then family randomness. Phaser
    items always use a periodic cosine LFO (its reference effect supports
    no other shape).
    """
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(index,)))
    item_id = f"item{index:05d}"
    chunk_len = int(round(cfg.chunk_s * cfg.fs))

    src = sources[int(rng.integers(0, len(sources)))]
    audio = read_wav(src)
    dry, offset = chunk_nonsilent(audio, chunk_len, cfg.silence_threshold_dbfs, rng)
    if cfg.peak_normalize:
        dry = peak_normalize(dry)

    lfo_cfg = draw_lfo_config(rng, cfg.chunk_s, ALL_SHAPES)
    effect = cfg.effects[int(rng.integers(0, len(cfg.effects)))]
    if effect == "phaser":
        lfo_cfg = LfoConfig(LfoShape.COSINE, lfo_cfg.rate_hz, lfo_cfg.phase,
                            lfo_cfg.duration_s)
    params = draw_effect_params(effect, cfg.configuration, rng)
    family = "periodic" if effect == "phaser" else cfg.lfo_family
    mod_audio = render_lfo_family(family, lfo_cfg, rng, float(cfg.fs))

    wet = apply_effect(effect, params, dry, mod_audio, float(cfg.fs))
    frame_rate = cfg.fs / HOP
    mod_frames = resample_mod(mod_audio, frame_rate, n_out=frames_for(len(dry)))

    dry_path = out_dir / f"{item_id}_dry.wav"
    wet_path = out_dir / f"{item_id}_wet.wav"
    lfo_path = out_dir / f"{item_id}_lfo.f32"
    write_wav(dry_path, dry)
    write_wav(wet_path, wet)
    save_modsignal(mod_frames, lfo_path)

    record: Dict = {
        "id": item_id,
        "index": index,
        "seed": cfg.seed,
        "source": src.name,
        "offset": offset,
        "effect": effect,
        "configuration": cfg.configuration,
        "lfo_family": family,
        "lfo": {
            "shape": lfo_cfg.shape.value,
            "rate_hz": lfo_cfg.rate_hz,
            "phase": lfo_cfg.phase,
            "duration_s": lfo_cfg.duration_s,
        },
        "params": {k: getattr(params, k) for k in params.__dataclass_fields__},
        "files": {"dry": dry_path.name, "wet": wet_path.name, "lfo": lfo_path.name},
        "n_samples": len(dry),
        "n_frames": len(mod_frames),
    }
    return record


def gen_dataset(cfg: GenConfig, out_dir, n_workers: int = 1) -> List[Dict]:
    """Generate ``cfg.count`` items into ``out_dir`` and write the manifest.

    Per-item failures are recorded in the manifest as {"id", "error"} lines
    and do not stop the run. Output is byte-identical for a given seed,
    regardless of ``n_workers``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sources = sorted(Path(cfg.source_dir).glob("*.wav"))
    if not sources:
        raise DataError(f"no .wav files in {cfg.source_dir}")

    def one(i: int) -> Dict:
        try:
            return _gen_item(cfg, i, sources, out_dir)
        except (DataError, FormatError, ParameterError, OSError) as e:
            return {"id": f"item{i:05d}", "index": i, "error": str(e)}

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            records = list(pool.map(one, range(cfg.count)))
    else:
        records = [one(i) for i in range(cfg.count)]

    with open(out_dir / "manifest.jsonl", "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    return records


def load_manifest(path) -> List[Dict]:
    """Read a manifest written by gen_dataset (one JSON object per line)."""
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
