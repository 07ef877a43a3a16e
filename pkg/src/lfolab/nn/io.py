"""Weights file format: one JSON header line, then raw little-endian f32.

The header maps each tensor name to its shape and byte offset within the
payload, so files are self-describing; an optional ``meta`` dict carries
architecture details. Writing is canonical (sorted tensor names, sorted
JSON keys), which makes write -> read -> write produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..errors import FormatError
from .optim import Params

FORMAT_NAME = "lfolab-weights"


def save_weights(
    path, weights: Params, arch: str, meta: Optional[dict] = None
) -> None:
    names = sorted(weights)
    tensors = {}
    offset = 0
    for name in names:
        arr = weights[name]
        tensors[name] = {"shape": list(arr.shape), "offset": offset}
        offset += int(arr.size) * 4
    header = {
        "format": FORMAT_NAME,
        "version": 1,
        "arch": arch,
        "dtype": "<f4",
        "tensors": tensors,
        "meta": meta or {},
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        f.write(b"\n")
        for name in names:
            f.write(np.ascontiguousarray(weights[name], dtype="<f4").tobytes())


def load_weights(
    path,
    expect_shapes: Optional[Mapping[str, Tuple[int, ...]]] = None,
    dtype=np.float64,
) -> Tuple[Params, dict]:
    """Read a weights file, returning (tensors, header).

    When ``expect_shapes`` is given (tensor name -> shape), any missing,
    extra, or differently shaped tensor raises a FormatError naming it.
    """
    raw = Path(path).read_bytes()
    nl = raw.find(b"\n")
    if nl < 0:
        raise FormatError(f"{path}: missing header line")
    try:
        header = json.loads(raw[:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"{path}: bad header: {e}") from e
    if header.get("format") != FORMAT_NAME or "tensors" not in header:
        raise FormatError(f"{path}: not a {FORMAT_NAME} file")
    payload = raw[nl + 1 :]
    weights: Dict[str, np.ndarray] = {}
    for name, info in header["tensors"].items():
        shape = tuple(info["shape"])
        size = int(np.prod(shape, dtype=np.int64)) if shape else 1
        start = int(info["offset"])
        end = start + size * 4
        if end > len(payload):
            raise FormatError(f"{path}: truncated payload for tensor {name}")
        weights[name] = (
            np.frombuffer(payload[start:end], dtype="<f4")
            .reshape(shape)
            .astype(dtype)
        )
    if expect_shapes is not None:
        for name, shape in expect_shapes.items():
            if name not in weights:
                raise FormatError(f"{path}: missing tensor {name}")
            if weights[name].shape != tuple(shape):
                raise FormatError(
                    f"{path}: tensor {name} has shape {weights[name].shape}, "
                    f"expected {tuple(shape)}"
                )
        extra = set(weights) - set(expect_shapes)
        if extra:
            raise FormatError(f"{path}: unexpected tensors {sorted(extra)}")
    return weights, header
