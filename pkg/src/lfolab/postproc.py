"""Cleanup for reconstructed modulation signals.

Three steps, usually applied in order: moving-average smoothing, stretching
every inter-extrema section to span [0, 1], and a validity check that throws
out signals with implausibly dense or bunched extrema.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np

from .errors import ParameterError, ValidityError
from .modsignal import ModSignal

PEAK = "peak"
TROUGH = "trough"


def smooth_ma(s: ModSignal, order: int) -> ModSignal:
    """Centered moving average with a window of ``order + 1`` samples.

    Odd orders give an even window, placed with one extra sample toward the
    past. Edges are replicate-padded, so a constant signal is unchanged and
    order 0 is the identity.
    """
    order = int(order)
    if order < 0:
        raise ParameterError(f"order must be >= 0, got {order}")
    if len(s) <= order:
        raise ParameterError(
            f"signal length {len(s)} is shorter than the window {order + 1}"
        )
    if order == 0:
        return s
    left, right = (order + 1) // 2, order // 2
    padded = np.pad(s.values, (left, right), mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, order + 1)
    out = windows.mean(axis=-1)
    # Averaging cannot leave the input range; clip the last-ulp fp noise.
    np.clip(out, s.values.min(), s.values.max(), out=out)
    return s.with_values(out)


def find_extrema(s: ModSignal) -> List[Tuple[int, str]]:
    """Interior local extrema as ``(index, "peak" | "trough")``, in order.

    Plateaus count once, at their midpoint (rounded down). Endpoints are
    never extrema. Strictness makes the kinds alternate.
    """
    v = s.values
    if len(v) < 3:
        return []
    # Compress runs of equal values; an extremum is a run whose neighbors
    # both lie on the same side.
    change = np.flatnonzero(np.diff(v) != 0.0)
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change, [len(v) - 1]))
    out: List[Tuple[int, str]] = []
    for j in range(1, len(starts) - 1):
        here = v[starts[j]]
        lo = v[starts[j - 1]] < here
        hi = v[starts[j + 1]] < here
        if lo == hi:
            mid = (starts[j] + ends[j]) // 2
            out.append((int(mid), PEAK if lo else TROUGH))
    return out


def stretch_unit_range(s: ModSignal) -> ModSignal:
    """Affinely rescale each section between extrema to span [0, 1].

    Troughs land exactly on 0 and peaks exactly on 1. The sections before
    the first and after the last extremum use their own boundary sample as
    the second anchor. Idempotent.
    """
    extrema = find_extrema(s)
    if not extrema:
        raise ValidityError("cannot stretch a signal without interior extrema")
    v = s.values
    out = np.empty_like(v)

    def target(kind: str) -> float:
        return 1.0 if kind == PEAK else 0.0

    def apply(beg: int, end: int, va: float, ta: float, vb: float, tb: float):
        # Map va -> ta and vb -> tb on the half-open slice [beg, end).
        if vb == va:
            out[beg:end] = ta
            return
        out[beg:end] = (v[beg:end] - va) * ((tb - ta) / (vb - va)) + ta

    idx0, kind0 = extrema[0]
    apply(0, idx0, v[idx0], target(kind0), v[0], 1.0 - target(kind0))
    for (ia, ka), (ib, _) in zip(extrema[:-1], extrema[1:]):
        apply(ia, ib, v[ia], target(ka), v[ib], 1.0 - target(ka))
    idxn, kindn = extrema[-1]
    apply(idxn, len(v), v[idxn], target(kindn), v[-1], 1.0 - target(kindn))
    for idx, kind in extrema:
        out[idx] = target(kind)
    np.clip(out, 0.0, 1.0, out=out)
    return s.with_values(out)


@dataclass(frozen=True)
class ValidityPolicy:
    """Thresholds for rejecting implausible reconstructed LFOs."""

    max_extrema_per_s: float = 7.0
    min_extrema_spacing_s: float = 0.12
    require_extremum: bool = True

    def __post_init__(self):
        if self.max_extrema_per_s <= 0:
            raise ParameterError("max_extrema_per_s must be positive")
        if self.min_extrema_spacing_s <= 0:
            raise ParameterError("min_extrema_spacing_s must be positive")


class Validity(NamedTuple):
    ok: bool
    reason: str


def is_valid_mod(s: ModSignal, policy: ValidityPolicy = ValidityPolicy()) -> Validity:
    """Check extrema density and same-kind spacing against ``policy``.

    Returns ``(ok, reason)`` where reason names the first violated rule
    ("too_many_extrema", "extrema_too_close", "no_extrema") or is "ok".
    """
    extrema = find_extrema(s)
    if not extrema and policy.require_extremum:
        return Validity(False, "no_extrema")
    if len(extrema) / s.duration_s > policy.max_extrema_per_s:
        return Validity(False, "too_many_extrema")
    for kind in (PEAK, TROUGH):
        idx = [i for i, k in extrema if k == kind]
        gaps = np.diff(idx) / s.rate_hz
        if len(gaps) and gaps.min() < policy.min_extrema_spacing_s:
            return Validity(False, "extrema_too_close")
    return Validity(True, "ok")
