"""Unipolar modulation signals and their on-disk format.

A ModSignal is the currency passed between the LFO generators, the effects,
the extraction model, and the post-processing stages: a sequence of values
in [0, 1] with an explicit rate in samples (or frames) per second.

On disk a ModSignal is a raw little-endian float32 file plus a JSON sidecar
holding the rate and, when known, the generating LFO parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import FormatError, ParameterError

_BOUND_TOL = 1e-9


@dataclass(frozen=True)
class ModSignal:
    """A unipolar modulation signal sampled at ``rate_hz``.

    Values are float64 and guaranteed to lie in [0, 1]; construction rejects
    anything outside by more than a rounding tolerance and clips the rest.
    """

    values: np.ndarray
    rate_hz: float
    meta: Optional["LfoConfig"] = field(default=None, compare=False)  # noqa: F821

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ParameterError("ModSignal requires a non-empty 1-D value array")
        if self.rate_hz <= 0:
            raise ParameterError(f"rate_hz must be positive, got {self.rate_hz}")
        if not np.all(np.isfinite(v)):
            raise ParameterError("ModSignal values must be finite")
        lo, hi = v.min(), v.max()
        if lo < -_BOUND_TOL or hi > 1.0 + _BOUND_TOL:
            raise ParameterError(f"ModSignal values outside [0, 1]: min={lo}, max={hi}")
        object.__setattr__(self, "values", np.clip(v, 0.0, 1.0))
        object.__setattr__(self, "rate_hz", float(self.rate_hz))

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.rate_hz

    @property
    def times(self) -> np.ndarray:
        """Sample instants in seconds."""
        return np.arange(len(self)) / self.rate_hz

    def with_values(self, values: np.ndarray) -> "ModSignal":
        """Same rate and metadata, new values."""
        return ModSignal(values, self.rate_hz, self.meta)


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def save_modsignal(sig: ModSignal, path) -> Path:
    """Write ``sig`` as raw little-endian float32 plus a JSON sidecar.

    ``path`` should carry the ``.f32`` suffix; the sidecar lands next to it.
    Returns the data file path.
    """
    path = Path(path)
    path.write_bytes(sig.values.astype("<f4").tobytes())
    meta = sig.meta
    sidecar = {
        "rate_hz": sig.rate_hz,
        "n": len(sig),
        "shape": meta.shape.value if meta is not None else None,
        "lfo_rate_hz": meta.rate_hz if meta is not None else None,
        "phase": meta.phase if meta is not None else None,
    }
    _sidecar_path(path).write_text(json.dumps(sidecar, sort_keys=True) + "\n")
    return path


def load_modsignal(path) -> ModSignal:
    """Read a ModSignal written by :func:`save_modsignal`."""
    path = Path(path)
    sidecar_path = _sidecar_path(path)
    if not sidecar_path.exists():
        raise FormatError(f"missing sidecar {sidecar_path}")
    try:
        sidecar = json.loads(sidecar_path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"unreadable sidecar {sidecar_path}: {exc}") from exc
    for key in ("rate_hz", "n"):
        if key not in sidecar:
            raise FormatError(f"sidecar {sidecar_path} missing key {key!r}")
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    if raw.size != sidecar["n"]:
        raise FormatError(
            f"{path}: expected {sidecar['n']} samples, file holds {raw.size}"
        )
    meta = None
    if sidecar.get("shape") is not None:
        from .lfo import LfoConfig, LfoShape  # deferred to avoid an import cycle

        meta = LfoConfig(
            shape=LfoShape(sidecar["shape"]),
            rate_hz=sidecar["lfo_rate_hz"],
            phase=sidecar["phase"],
            duration_s=sidecar["n"] / sidecar["rate_hz"],
        )
    return ModSignal(raw.astype(np.float64), sidecar["rate_hz"], meta)
