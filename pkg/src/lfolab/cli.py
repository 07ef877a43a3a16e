"""Command-line interface.

Global flags: --seed (root RNG seed), --config FILE (JSON), --out DIR.

The JSON config file holds optional sections, each mirroring a library
dataclass field-for-field; unknown keys anywhere are errors:

    {
      "gen":    { ... GenConfig fields ... },
      "train":  { ... TrainConfig fields ... },
      "lfonet": { ... LfoNetConfig fields ... },
      "effect": { ... PhaserParams or DelayModParams fields ... },
      "run":    { "steps": int, "batch_size": int, "spec_augment": float,
                  "passes": int, "hidden": int }
    }

Subcommands: render, lfo, gen-dataset, extract, postproc, eval, baseline,
train-lfonet, train-fx, pca.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from .effects import DelayModParams, PhaserParams
from .errors import ParameterError
from .features import HOP, mel_spectrogram, spec_augment
from .lfo import ALL_SHAPES, LfoConfig, LfoShape, render_periodic, resample_mod
from .metrics import (
    BaselineSpec,
    LossWeights,
    baseline_mod,
    esr,
    l1_error,
    mod_loss,
    pca2,
)
from .modsignal import load_modsignal, save_modsignal
from .nn import (
    AdamWState,
    LfoNetConfig,
    TrainConfig,
    lfonet_forward,
    lfonet_init,
    lfonet_latent,
    lfonet_train_step,
    load_weights,
    lstmfx_init,
    lstmfx_train_tbptt,
    save_weights,
)
from .postproc import ValidityPolicy, is_valid_mod, smooth_ma, stretch_unit_range

SECTIONS = ("gen", "train", "lfonet", "effect", "run")
RUN_KEYS = ("steps", "batch_size", "spec_augment", "passes", "hidden")


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ParameterError("config file must hold a JSON object")
    unknown = set(cfg) - set(SECTIONS)
    if unknown:
        raise ParameterError(f"unknown config sections: {sorted(unknown)}")
    run = cfg.get("run", {})
    bad = set(run) - set(RUN_KEYS)
    if bad:
        raise ParameterError(f"unknown run keys: {sorted(bad)}")
    return cfg


def _build(cls, data: dict, context: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ParameterError(f"unknown {context} keys: {sorted(unknown)}")
    return cls(**data)


def _effect_params(effect: str, section: dict):
    cls = PhaserParams if effect == "phaser" else DelayModParams
    return _build(cls, section, "effect")


def _load_signal(path) -> np.ndarray:
    path = str(path)
    if path.endswith(".wav"):
        return ds.read_wav(path)
    return load_modsignal(path).values


def _print(line: str) -> None:
    sys.stdout.write(line + "\n")


# --------------------------------------------------------------------------
# subcommand implementations
# --------------------------------------------------------------------------


def _cmd_render(args, cfg, out: Path, rng) -> int:
    audio = ds.read_wav(args.audio)
    sig = load_modsignal(args.lfo)
    mod = resample_mod(sig, 44100.0, n_out=len(audio))
    section = cfg.get("effect", {})
    if section:
        params = _effect_params(args.effect, section)
    else:
        params = ds.draw_effect_params(args.effect, "fixed", rng)
    wet = ds.apply_effect(args.effect, params, audio, mod, 44100.0)
    ds.write_wav(out / "wet.wav", wet)
    _print(f"wrote {out / 'wet.wav'}")
    return 0


def _cmd_lfo(args, cfg, out: Path, rng) -> int:
    if args.inspect:
        sig = load_modsignal(args.inspect)
        info = {
            "n": len(sig),
            "rate_hz": sig.rate_hz,
            "duration_s": sig.duration_s,
            "min": float(sig.values.min()),
            "max": float(sig.values.max()),
        }
        _print(json.dumps(info, sort_keys=True))
        return 0
    base = LfoConfig(
        shape=LfoShape(args.shape), rate_hz=args.rate, phase=args.phase,
        duration_s=args.duration,
    )
    sig = ds.render_lfo_family(args.family, base, rng, args.sample_rate)
    save_modsignal(sig, out / "lfo.f32")
    _print(f"wrote {out / 'lfo.f32'}")
    return 0


def _cmd_gen_dataset(args, cfg, out: Path, rng) -> int:
    gen_cfg = _build(ds.GenConfig, cfg.get("gen", {}), "gen")
    records = ds.gen_dataset(gen_cfg, out, n_workers=args.workers)
    failures = sum(1 for r in records if "error" in r)
    _print(f"generated {len(records) - failures}/{len(records)} items in {out}")
    return 0 if failures == 0 else 1


def _lfonet_cfg_from_header(header: dict) -> LfoNetConfig:
    meta = header.get("meta", {}).get("lfonet")
    return _build(LfoNetConfig, meta, "lfonet") if meta else LfoNetConfig()


def _cmd_extract(args, cfg, out: Path, rng) -> int:
    weights, header = load_weights(args.weights)
    net_cfg = _lfonet_cfg_from_header(header)
    dry = ds.read_wav(args.dry)
    wet = ds.read_wav(args.wet)
    spec = mel_spectrogram(dry, wet, n_mels=net_cfg.n_mels)
    sig, _ = lfonet_forward(weights, spec, net_cfg)
    save_modsignal(sig, out / "extracted.f32")
    _print(f"wrote {out / 'extracted.f32'}")
    return 0


def _cmd_postproc(args, cfg, out: Path, rng) -> int:
    sig = load_modsignal(args.infile)
    cleaned = stretch_unit_range(smooth_ma(sig, args.order))
    verdict = is_valid_mod(cleaned, ValidityPolicy())
    save_modsignal(cleaned, out / "postproc.f32")
    _print(f"wrote {out / 'postproc.f32'}")
    _print(f"validity: {'valid' if verdict.ok else 'invalid'} ({verdict.reason})")
    return 0


def _cmd_eval(args, cfg, out: Path, rng) -> int:
    ref = _load_signal(args.ref)
    est = _load_signal(args.est)
    _print(f"l1_percent: {100.0 * l1_error(ref, est):.4f}")
    _print(f"mod_loss: {mod_loss(ref, est):.6f}")
    _print(f"esr: {esr(ref, est):.6f}")
    return 0


def _cmd_baseline(args, cfg, out: Path, rng) -> int:
    shapes = (
        [LfoShape(s) for s in args.shapes.split(",")] if args.shapes else list(ALL_SHAPES)
    )
    frame_rate = 44100.0 / HOP
    for shape in shapes:
        total = 0.0
        for _ in range(args.trials):
            truth = ds.draw_lfo_config(rng, 2.0, (shape,))
            guess = baseline_mod(truth, BaselineSpec(shape=shape), rng, frame_rate)
            total += l1_error(render_periodic(truth, frame_rate), guess)
        _print(f"{shape.value}: mean_l1 {total / args.trials:.4f}")
    return 0


def _items_from_manifest(data_dir: Path):
    records = ds.load_manifest(Path(data_dir) / "manifest.jsonl")
    for rec in records:
        if "error" in rec:
            continue
        files = rec["files"]
        yield (
            ds.read_wav(Path(data_dir) / files["dry"]),
            ds.read_wav(Path(data_dir) / files["wet"]),
            load_modsignal(Path(data_dir) / files["lfo"]),
        )


def _cmd_train_lfonet(args, cfg, out: Path, rng) -> int:
    net_cfg = _build(LfoNetConfig, cfg.get("lfonet", {}), "lfonet")
    train_cfg = _build(TrainConfig, cfg.get("train", {}), "train")
    run = cfg.get("run", {})
    steps = int(run.get("steps", 100))
    batch_size = int(run.get("batch_size", 4))
    aug = float(run.get("spec_augment", 0.0))

    items = []
    for dry, wet, lfo in _items_from_manifest(args.data):
        spec = mel_spectrogram(dry, wet, n_mels=net_cfg.n_mels)
        items.append((spec, lfo.values))
    if not items:
        raise ParameterError(f"no usable items in {args.data}")

    weights = lfonet_init(net_cfg, np.random.default_rng(train_cfg.seed))
    opt = AdamWState(weights)
    loss_w = LossWeights()
    order = np.random.default_rng(train_cfg.seed + 1)
    last = float("nan")
    for step in range(steps):
        idx = order.integers(0, len(items), size=batch_size)
        batch = []
        for i in idx:
            spec, target = items[int(i)]
            if aug > 0:
                spec = spec_augment(spec, aug, order)
            batch.append((spec, target))
        weights, last = lfonet_train_step(weights, batch, loss_w, opt, net_cfg, train_cfg)
        if (step + 1) % 10 == 0 or step == 0:
            _print(f"step {step + 1}/{steps} loss {last:.5f}")
    meta = {"lfonet": dataclasses.asdict(net_cfg)}
    save_weights(out / "lfonet.weights", weights, "lfonet", meta)
    _print(f"wrote {out / 'lfonet.weights'} (final loss {last:.5f})")
    return 0


def _cmd_train_fx(args, cfg, out: Path, rng) -> int:
    train_cfg = _build(TrainConfig, cfg.get("train", {}), "train")
    run = cfg.get("run", {})
    passes = int(run.get("passes", 1))
    hidden = int(run.get("hidden", 64))

    dry = ds.read_wav(args.dry)
    wet = ds.read_wav(args.wet)
    lfo = resample_mod(load_modsignal(args.lfo), 44100.0, n_out=len(dry))
    weights = lstmfx_init(np.random.default_rng(train_cfg.seed), hidden)
    opt = AdamWState(weights)
    final = float("nan")
    for p in range(passes):
        weights, losses = lstmfx_train_tbptt(weights, dry, wet, lfo, train_cfg, opt)
        final = float(losses.mean())
        _print(f"pass {p + 1}/{passes} mean block loss {final:.5f}")
    save_weights(out / "lstmfx.weights", weights, "lstmfx", {"hidden": hidden})
    _print(f"wrote {out / 'lstmfx.weights'} (final loss {final:.5f})")
    return 0


def _cmd_pca(args, cfg, out: Path, rng) -> int:
    weights, header = load_weights(args.weights)
    net_cfg = _lfonet_cfg_from_header(header)
    latents = []
    for dry, wet, _ in _items_from_manifest(args.data):
        spec = mel_spectrogram(dry, wet, n_mels=net_cfg.n_mels)
        latents.append(lfonet_latent(weights, spec, net_cfg))
    coords, (v1, v2) = pca2(latents)
    result = {"coords": coords.tolist(), "explained_variance": [v1, v2]}
    with open(out / "pca.json", "w", encoding="utf-8") as f:
        json.dump(result, f, sort_keys=True)
    _print(f"wrote {out / 'pca.json'} (explained variance {v1:.4g}, {v2:.4g})")
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lfolab")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", default=".", help="output directory")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("render", help="apply one effect to a WAV")
    q.add_argument("--audio", required=True)
    q.add_argument("--effect", required=True, choices=ds.EFFECTS)
    q.add_argument("--lfo", required=True, help="ModSignal .f32 file")
    q.set_defaults(fn=_cmd_render)

    q = sub.add_parser("lfo", help="synthesize or inspect modulation signals")
    q.add_argument("--inspect", default=None, help=".f32 file to summarize")
    q.add_argument("--shape", default="cosine",
                   choices=[s.value for s in ALL_SHAPES])
    q.add_argument("--rate", type=float, default=1.0)
    q.add_argument("--phase", type=float, default=0.0)
    q.add_argument("--duration", type=float, default=2.0)
    q.add_argument("--sample-rate", type=float, default=44100.0 / HOP)
    q.add_argument("--family", default="periodic", choices=ds.LFO_FAMILIES)
    q.set_defaults(fn=_cmd_lfo)

    q = sub.add_parser("gen-dataset", help="generate a dataset per the config file")
    q.add_argument("--workers", type=int, default=1)
    q.set_defaults(fn=_cmd_gen_dataset)

    q = sub.add_parser("extract", help="run the extraction model on a dry/wet pair")
    q.add_argument("--weights", required=True)
    q.add_argument("--dry", required=True)
    q.add_argument("--wet", required=True)
    q.set_defaults(fn=_cmd_extract)

    q = sub.add_parser("postproc", help="smooth, stretch, and validity-check")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--order", type=int, default=4)
    q.set_defaults(fn=_cmd_postproc)

    q = sub.add_parser("eval", help="L1/mod-loss/ESR between two files")
    q.add_argument("--ref", required=True)
    q.add_argument("--est", required=True)
    q.set_defaults(fn=_cmd_eval)

    q = sub.add_parser("baseline", help="informed-guess Monte Carlo study")
    q.add_argument("--trials", type=int, default=1000)
    q.add_argument("--shapes", default=None, help="comma-separated shape names")
    q.set_defaults(fn=_cmd_baseline)

    q = sub.add_parser("train-lfonet", help="train the extraction model")
    q.add_argument("--data", required=True, help="dataset dir with manifest.jsonl")
    q.set_defaults(fn=_cmd_train_lfonet)

    q = sub.add_parser("train-fx", help="train the LSTM effect model")
    q.add_argument("--dry", required=True)
    q.add_argument("--wet", required=True)
    q.add_argument("--lfo", required=True)
    q.set_defaults(fn=_cmd_train_fx)

    q = sub.add_parser("pca", help="2-D latent map of a dataset")
    q.add_argument("--weights", required=True)
    q.add_argument("--data", required=True)
    q.set_defaults(fn=_cmd_pca)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rng = np.random.default_rng(args.seed)
        return args.fn(args, cfg, out, rng)
    except Exception as e:  # surface library errors as clean CLI failures
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
