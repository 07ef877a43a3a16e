"""Losses, evaluation metrics, the human-guess baseline, and 2-D PCA."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import ParameterError, UndefinedMetricError
from .lfo import TWO_PI, LfoConfig, LfoShape, render_periodic
from .modsignal import ModSignal

ArrayLike = Union[ModSignal, Sequence[float], np.ndarray]


def _arr(x: ArrayLike) -> np.ndarray:
    if isinstance(x, ModSignal):
        return x.values
    return np.asarray(x, dtype=np.float64)


@dataclass(frozen=True)
class LossWeights:
    """Weights of the value / slope / curvature terms of the modulation loss."""

    alpha: float = 1.0
    beta: float = 5.0
    gamma: float = 10.0

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ParameterError("loss weights must be non-negative")


@dataclass(frozen=True)
class BaselineSpec:
    """Error budget for the informed-guess baseline.

    ``max_phase_err`` is the total phase uncertainty as a fraction of one
    period (0.5 means the guess lands within a quarter period either side);
    ``max_rate_err`` bounds the symmetric multiplicative rate error.
    """

    shape: LfoShape
    max_phase_err: float = 0.5
    max_rate_err: float = 0.25

    def __post_init__(self):
        if not 0.0 <= self.max_phase_err <= 1.0:
            raise ParameterError("max_phase_err must be in [0, 1]")
        if not 0.0 <= self.max_rate_err <= 1.0:
            raise ParameterError("max_rate_err must be in [0, 1]")


def l1_error(s: ArrayLike, s_hat: ArrayLike) -> float:
    """Mean absolute difference. Doubles as the audio-domain loss."""
    a, b = _arr(s), _arr(s_hat)
    if a.shape != b.shape:
        raise ParameterError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ParameterError("empty sequences")
    return float(np.mean(np.abs(a - b)))


def central_diff(s: ArrayLike) -> np.ndarray:
    """First-order central difference, (s[k+2] - s[k]) / 2, length N - 2."""
    a = _arr(s)
    if a.size < 3:
        raise ParameterError(f"need at least 3 samples, got {a.size}")
    return (a[2:] - a[:-2]) / 2.0


def mod_loss(s: ArrayLike, s_hat: ArrayLike, w: LossWeights = LossWeights()) -> float:
    """Weighted L1 on values, first differences, and second differences.

    Derivative terms are averaged over the trimmed interiors (N-2 and N-4
    points), where the central differences are defined.
    """
    a, b = _arr(s), _arr(s_hat)
    if a.shape != b.shape:
        raise ParameterError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size < 5:
        raise ParameterError(f"need at least 5 samples, got {a.size}")
    d1a, d1b = central_diff(a), central_diff(b)
    d2a, d2b = central_diff(d1a), central_diff(d1b)
    return (
        w.alpha * l1_error(a, b)
        + w.beta * l1_error(d1a, d1b)
        + w.gamma * l1_error(d2a, d2b)
    )


def _accumulate_diff_grad(g_out: np.ndarray, g_in: np.ndarray) -> None:
    # Adjoint of central_diff: out[k] = (in[k+2] - in[k]) / 2.
    g_in[2:] += g_out / 2.0
    g_in[:-2] -= g_out / 2.0


def mod_loss_and_grad(
    s: ArrayLike, s_hat: ArrayLike, w: LossWeights = LossWeights()
) -> Tuple[float, np.ndarray]:
    """``mod_loss`` plus its (sub)gradient with respect to ``s_hat``."""
    a, b = _arr(s), _arr(s_hat)
    loss = mod_loss(a, b, w)
    n = a.size
    d1a, d1b = central_diff(a), central_diff(b)
    d2a, d2b = central_diff(d1a), central_diff(d1b)

    g = (w.alpha / n) * np.sign(b - a)
    g1 = (w.beta / (n - 2)) * np.sign(d1b - d1a)
    _accumulate_diff_grad(g1, g)
    g2 = (w.gamma / (n - 4)) * np.sign(d2b - d2a)
    gd1 = np.zeros(n - 2)
    _accumulate_diff_grad(g2, gd1)
    _accumulate_diff_grad(gd1, g)
    return loss, g


def esr(y: ArrayLike, y_hat: ArrayLike) -> float:
    """Error-to-signal ratio, sum((y - y_hat)^2) / sum(y^2)."""
    a, b = _arr(y), _arr(y_hat)
    if a.shape != b.shape:
        raise ParameterError(f"length mismatch: {a.shape} vs {b.shape}")
    denom = float(np.sum(a * a))
    if denom == 0.0:
        raise UndefinedMetricError("reference signal is all zero")
    return float(np.sum((a - b) ** 2)) / denom


def baseline_mod(
    truth_cfg: LfoConfig,
    spec: BaselineSpec,
    rng: np.random.Generator,
    out_rate_hz: float,
) -> ModSignal:
    """One informed guess: right shape, phase and rate perturbed within budget.

    Phase offset is uniform over a ``max_phase_err``-period-wide window
    centered on the truth; rate is scaled by (1 + u) with u uniform in
    [-max_rate_err, +max_rate_err]. Draw order: phase, then rate.
    """
    offset = rng.uniform(-0.5, 0.5) * spec.max_phase_err * TWO_PI
    rate = truth_cfg.rate_hz * (1.0 + rng.uniform(-spec.max_rate_err, spec.max_rate_err))
    guess = LfoConfig(
        shape=spec.shape,
        rate_hz=rate,
        phase=truth_cfg.phase + offset,
        duration_s=truth_cfg.duration_s,
    )
    return render_periodic(guess, out_rate_hz)


def pca2(latents: Sequence[Sequence[float]]) -> Tuple[np.ndarray, Tuple[float, float]]:
    """Project vectors onto their top two principal components.

    Returns ``(coords, (var1, var2))`` with var1 >= var2 the explained
    variances. Component signs are fixed by making each eigenvector's
    largest-magnitude entry positive, so results are reproducible.
    """
    x = np.asarray(latents, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3:
        raise ParameterError("need at least 3 vectors of equal dimension")
    if x.shape[1] < 2:
        raise ParameterError("vectors must have dimension >= 2")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (x.shape[0] - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:2]
    basis = evecs[:, order]
    for j in range(2):
        if basis[np.argmax(np.abs(basis[:, j])), j] < 0:
            basis[:, j] = -basis[:, j]
    coords = centered @ basis
    var = np.maximum(evals[order], 0.0)
    return coords, (float(var[0]), float(var[1]))
