"""Numpy layer kernels with hand-written reverse-mode gradients.

Every forward returns ``(output, cache)`` and the matching backward maps
``(grad_out, cache)`` to input/parameter gradients. Activations live in
``(channels, freq, time)`` tensors. All kernels preserve the input dtype,
so the same code runs float64 for gradient checking and float32 for
desk-scale training.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

LN_EPS = 1e-5


def layernorm_ft(x: np.ndarray, scale: np.ndarray, shift: np.ndarray):
    """Normalize each channel over its (freq, time) plane, then affine."""
    mu = x.mean(axis=(1, 2), keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=(1, 2), keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    y = xhat * scale[:, None, None] + shift[:, None, None]
    return y, (xhat, inv, scale)


def layernorm_ft_back(g: np.ndarray, cache):
    xhat, inv, scale = cache
    dscale = (g * xhat).sum(axis=(1, 2))
    dshift = g.sum(axis=(1, 2))
    gx = g * scale[:, None, None]
    dx = inv * (
        gx
        - gx.mean(axis=(1, 2), keepdims=True)
        - xhat * (gx * xhat).mean(axis=(1, 2), keepdims=True)
    )
    return dx, dscale, dshift


def conv2d_dilated(x: np.ndarray, w: np.ndarray, b: np.ndarray, time_dilation: int):
    """Same-size 2-D convolution, dilated along time only.

    x is (C_in, F, T), w is (C_out, C_in, k_f, k_t) with odd kernel sides;
    zero padding keeps both output dimensions equal to the input's. The
    kernel loop runs over taps, each a (C_out, C_in) x (C_in, F, T)
    contraction, which keeps the work inside BLAS.
    """
    c_in, frq, tm = x.shape
    c_out, _, kf, kt = w.shape
    pf = (kf - 1) // 2
    pt = (kt - 1) * time_dilation // 2
    xp = np.pad(x, ((0, 0), (pf, pf), (pt, pt)))
    out = np.zeros((c_out, frq, tm), dtype=x.dtype)
    for i in range(kf):
        for j in range(kt):
            patch = xp[:, i : i + frq, j * time_dilation : j * time_dilation + tm]
            out += np.tensordot(w[:, :, i, j], patch, axes=(1, 0))
    out += b[:, None, None]
    return out, (xp, w, time_dilation, pf, pt, frq, tm)


def conv2d_dilated_back(g: np.ndarray, cache):
    xp, w, dil, pf, pt, frq, tm = cache
    kf, kt = w.shape[2], w.shape[3]
    dw = np.empty_like(w)
    dxp = np.zeros_like(xp)
    for i in range(kf):
        for j in range(kt):
            sl = (slice(None), slice(i, i + frq), slice(j * dil, j * dil + tm))
            dw[:, :, i, j] = np.tensordot(g, xp[sl], axes=([1, 2], [1, 2]))
            dxp[sl] += np.tensordot(w[:, :, i, j], g, axes=(0, 0))
    db = g.sum(axis=(1, 2))
    dx = dxp[:, pf : pf + frq, pt : pt + tm]
    return dx, dw, db


def maxpool_freq2(x: np.ndarray):
    """Max over non-overlapping frequency pairs; ties route to the lower bin."""
    a = x[:, ::2, :]
    b = x[:, 1::2, :]
    take_a = a >= b
    return np.where(take_a, a, b), take_a


def maxpool_freq2_back(g: np.ndarray, take_a: np.ndarray):
    c, fh, t = g.shape
    dx = np.zeros((c, fh * 2, t), dtype=g.dtype)
    zero = np.zeros((), dtype=g.dtype)
    dx[:, ::2, :] = np.where(take_a, g, zero)
    dx[:, 1::2, :] = np.where(take_a, zero, g)
    return dx


def prelu(x: np.ndarray, slope: np.ndarray):
    """Per-channel parametric ReLU."""
    pos = x > 0
    y = np.where(pos, x, slope[:, None, None] * x)
    return y, (x, pos, slope)


def prelu_back(g: np.ndarray, cache):
    x, pos, slope = cache
    dx = np.where(pos, g, slope[:, None, None] * g)
    dslope = np.where(pos, np.zeros((), dtype=g.dtype), g * x).sum(axis=(1, 2))
    return dx, dslope


def head_linear_sigmoid(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Flatten (channels, bins) per frame, apply one linear unit + logistic."""
    c, fb, t = x.shape
    feat = x.reshape(c * fb, t)
    y = expit(w @ feat + b)
    return y, (feat, w, y, (c, fb, t))


def head_linear_sigmoid_back(g: np.ndarray, cache):
    feat, w, y, shape = cache
    dlogit = g * y * (1.0 - y)
    dw = feat @ dlogit
    db = np.array([dlogit.sum()], dtype=dlogit.dtype)
    dx = np.outer(w, dlogit).reshape(shape)
    return dx, dw, db
