"""Per-sample DSP inner loops, compiled with numba.

Kept free of Python objects so the surrounding modules own all validation.
Operation order inside each loop is fixed; processing a stream in blocks of
any size therefore reproduces the single-pass output bit for bit.
"""

import math

import numba
import numpy as np

_jit = numba.njit(cache=True, nogil=True)

FC_MIN_HZ = 20.0
FC_MAX_FRACTION = 0.45  # of the sample rate


@_jit
def phaser_kernel(x, mod, out, ap_mem, carry, center_hz, sweep_oct, feedback,
                  depth, mix, fs_hz):
    """Cascade of first-order all-passes with per-sample modulated coefficient.

    ap_mem holds one memory cell per stage; carry[0] is the previous
    cascade output feeding the feedback path.
    """
    n_stages = ap_mem.shape[0]
    fc_hi = FC_MAX_FRACTION * fs_hz
    v_prev = carry[0]
    for n in range(x.shape[0]):
        fc = center_hz * 2.0 ** (sweep_oct * (2.0 * mod[n] - 1.0))
        if fc < FC_MIN_HZ:
            fc = FC_MIN_HZ
        elif fc > fc_hi:
            fc = fc_hi
        t = math.tan(math.pi * fc / fs_hz)
        a = (t - 1.0) / (t + 1.0)
        u = x[n] + feedback * v_prev
        for s in range(n_stages):
            y = a * u + ap_mem[s]
            ap_mem[s] = u - a * y
            u = y
        v_prev = u
        out[n] = (1.0 - mix) * x[n] + mix * (x[n] + depth * u)
    carry[0] = v_prev


@_jit
def delay_kernel(x, mod, out, buf, write_idx, min_delay_samp, width_samp,
                 feedback, depth, mix):
    """Modulated fractional delay line with feedback, read before write.

    The delay is clamped to at least one sample so the read never touches
    the cell being written (a zero-sample delay with feedback would be an
    algebraic loop). Returns the advanced write index.
    """
    cap = buf.shape[0]
    for n in range(x.shape[0]):
        tau = min_delay_samp + width_samp * mod[n]
        if tau < 1.0:
            tau = 1.0
        d = int(tau)
        frac = tau - d
        r1 = (write_idx - d) % cap
        r2 = (write_idx - d - 1) % cap
        w = (1.0 - frac) * buf[r1] + frac * buf[r2]
        buf[write_idx] = x[n] + feedback * w
        write_idx = (write_idx + 1) % cap
        out[n] = (1.0 - mix) * x[n] + mix * (x[n] + depth * w)
    return write_idx


# ---------------------------------------------------------------------------
# LSTM effect model cell loops. Gate packing is rows [i; f; g; o], each a
# hidden-size slab of w_x (4H x 2), w_h (4H x H), and b (4H).
# ---------------------------------------------------------------------------


@_jit
def lstm_stream(wx, wh, b, ow, ob, x, lfo, h, c, y):
    """Advance h, c in place over the whole input, writing y per sample."""
    hid = h.shape[0]
    z = np.empty(4 * hid)
    for n in range(x.shape[0]):
        for r in range(4 * hid):
            acc = wx[r, 0] * x[n] + wx[r, 1] * lfo[n] + b[r]
            for k in range(hid):
                acc += wh[r, k] * h[k]
            z[r] = acc
        delta = ob
        for k in range(hid):
            gi = 1.0 / (1.0 + math.exp(-z[k]))
            gf = 1.0 / (1.0 + math.exp(-z[hid + k]))
            gg = math.tanh(z[2 * hid + k])
            go = 1.0 / (1.0 + math.exp(-z[3 * hid + k]))
            c[k] = gf * c[k] + gi * gg
            h[k] = go * math.tanh(c[k])
            delta += ow[k] * h[k]
        y[n] = math.tanh(x[n] + delta)


@_jit
def lstm_cached(wx, wh, b, ow, ob, x, lfo, h0, c0,
                gi_s, gf_s, gg_s, go_s, c_s, tc_s, h_s, y):
    """Forward pass recording all per-step activations for backprop."""
    hid = h0.shape[0]
    t_len = x.shape[0]
    z = np.empty(4 * hid)
    h = h0.copy()
    c = c0.copy()
    for n in range(t_len):
        for r in range(4 * hid):
            acc = wx[r, 0] * x[n] + wx[r, 1] * lfo[n] + b[r]
            for k in range(hid):
                acc += wh[r, k] * h[k]
            z[r] = acc
        delta = ob
        for k in range(hid):
            gi = 1.0 / (1.0 + math.exp(-z[k]))
            gf = 1.0 / (1.0 + math.exp(-z[hid + k]))
            gg = math.tanh(z[2 * hid + k])
            go = 1.0 / (1.0 + math.exp(-z[3 * hid + k]))
            c[k] = gf * c[k] + gi * gg
            tc = math.tanh(c[k])
            h[k] = go * tc
            gi_s[n, k] = gi
            gf_s[n, k] = gf
            gg_s[n, k] = gg
            go_s[n, k] = go
            c_s[n, k] = c[k]
            tc_s[n, k] = tc
            h_s[n, k] = h[k]
            delta += ow[k] * h[k]
        y[n] = math.tanh(x[n] + delta)


@_jit
def lstm_backward(wx, wh, ow, x, lfo, h0, c0,
                  gi_s, gf_s, gg_s, go_s, c_s, tc_s, h_s, y, dy,
                  dwx, dwh, db, dow, dob):
    """Backprop through one cached block, truncated at its initial state.

    Parameter gradient buffers must come in zeroed; dob is a 1-element
    array so it can accumulate in place.
    """
    hid = h0.shape[0]
    t_len = x.shape[0]
    dh = np.zeros(hid)
    dc = np.zeros(hid)
    dz = np.empty(4 * hid)
    for n in range(t_len - 1, -1, -1):
        dyraw = dy[n] * (1.0 - y[n] * y[n])
        dob[0] += dyraw
        for k in range(hid):
            dow[k] += dyraw * h_s[n, k]
            dh[k] += dyraw * ow[k]
        for k in range(hid):
            gi = gi_s[n, k]
            gf = gf_s[n, k]
            gg = gg_s[n, k]
            go = go_s[n, k]
            tc = tc_s[n, k]
            dc[k] += dh[k] * go * (1.0 - tc * tc)
            dz[3 * hid + k] = dh[k] * tc * go * (1.0 - go)
            dz[k] = dc[k] * gg * gi * (1.0 - gi)
            dz[2 * hid + k] = dc[k] * gi * (1.0 - gg * gg)
            c_prev = c_s[n - 1, k] if n > 0 else c0[k]
            dz[hid + k] = dc[k] * c_prev * gf * (1.0 - gf)
            dc[k] = dc[k] * gf
        for r in range(4 * hid):
            dzr = dz[r]
            dwx[r, 0] += dzr * x[n]
            dwx[r, 1] += dzr * lfo[n]
            db[r] += dzr
            if n > 0:
                for k in range(hid):
                    dwh[r, k] += dzr * h_s[n - 1, k]
            else:
                for k in range(hid):
                    dwh[r, k] += dzr * h0[k]
        for k in range(hid):
            acc = 0.0
            for r in range(4 * hid):
                acc += wh[r, k] * dz[r]
            dh[k] = acc
