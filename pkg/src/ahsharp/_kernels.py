"""Numeric inner loops.

Orders are carried as integers ``two_alpha`` (twice the order) so that the
integer and half-integer families stay exact.  Every kernel has a loop form
(compiled with numba when enabled) and, where it pays off, a numpy form
vectorised over the argument; ``ladder_many`` is whichever one is active.
"""

import math

import numpy as np

from ._jit import JIT_ENABLED, njit

EPS = 2.220446049250313e-16
# powers of two keep rescaling exact
_RESCALE_EXP = 500
_BIG = 2.0**_RESCALE_EXP
_SMALL = 2.0**-_RESCALE_EXP
MIN_ARG = 1e-100
MIN_TWO_ALPHA = -4


@njit
def log_gamma_half(t):
    """log Gamma(t/2) for integer t >= 1 by exact recursion from Gamma(1/2), Gamma(1)."""
    acc = 0.0
    if t % 2 == 0:
        m = t // 2
        for i in range(2, m):
            acc += math.log(i)
    else:
        acc = 0.5 * math.log(math.pi)
        j = (t - 1) // 2
        for i in range(j):
            acc += math.log(0.5 + i)
    return acc


@njit
def series_parts(two_alpha, x):
    """Power series pieces: ``J = exp(log_scale) * total``.

    Returns (log_scale, total, abs_sum, n_terms); ``abs_sum`` is the sum of
    term magnitudes, which bounds the rounding error of ``total``.
    """
    alpha = 0.5 * two_alpha
    q = 0.25 * x * x
    if two_alpha == 0:
        log_scale = 0.0
    else:
        log_scale = alpha * math.log(0.5 * x) - log_gamma_half(two_alpha + 2)
    term = 1.0
    total = 1.0
    comp = 0.0
    abs_sum = 1.0
    n = 1
    while n <= 400:
        term *= -q / (n * (alpha + n))
        # Kahan
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        abs_sum += abs(term)
        if n >= 8 and abs(term) < 1e-18 * abs(total):
            break
        n += 1
    return log_scale, total, abs_sum, n


@njit
def miller_start(order_top, x):
    m = max(order_top, x)
    return int(m + 15.0 * m ** (1.0 / 3.0) + 25.0)


def _plan(two_a0, count):
    """Index bookkeeping shared by both ladder forms."""
    half = two_a0 % 2
    two_top = two_a0 + 2 * (count - 1)
    if half == 0:
        top_idx = max(abs(two_a0), abs(two_top)) // 2
    else:
        top_idx = (two_top + 1) // 2
    return half, max(top_idx, 1)


_plan_jit = njit(_plan)


@njit
def _ladder_loop(two_a0, count, xs):
    half, top_idx = _plan_jit(two_a0, count)
    nx = xs.shape[0]
    out = np.empty((nx, count))
    vals = np.empty(top_idx + 1)
    cnt = np.empty(top_idx + 1, dtype=np.int64)
    base = -0.5 * half
    top_order = base + top_idx
    for i in range(nx):
        x = xs[i]
        big_n = miller_start(top_order, x)
        if big_n < top_idx + 2:
            big_n = top_idx + 2
        f_next = 0.0
        f = 1.0
        scale = 0
        s = 0.0
        comp = 0.0
        for n in range(big_n, 0, -1):
            if n <= top_idx:
                vals[n] = f
                cnt[n] = scale
            if half == 0 and n % 2 == 0:
                y = 2.0 * f - comp
                t = s + y
                comp = (t - s) - y
                s = t
            f_prev = (2.0 * (base + n) / x) * f - f_next
            f_next = f
            f = f_prev
            if abs(f) > _BIG:
                f *= _SMALL
                f_next *= _SMALL
                s *= _SMALL
                comp *= _SMALL
                scale += 1
        vals[0] = f
        cnt[0] = scale
        if half == 0:
            norm = 1.0 / ((s - comp) + f)
        else:
            f1 = math.ldexp(vals[1], -_RESCALE_EXP * (scale - cnt[1]))
            amp = math.sqrt(2.0 / (math.pi * x))
            norm = (f * amp * math.cos(x) + f1 * amp * math.sin(x)) / (f * f + f1 * f1)
        for j in range(count):
            t2 = two_a0 + 2 * j
            if half == 0:
                o = t2 // 2
                idx = abs(o)
                v = math.ldexp(vals[idx] * norm, -_RESCALE_EXP * (scale - cnt[idx]))
                if o < 0 and idx % 2 == 1:
                    v = -v
                out[i, j] = v
            else:
                idx = (t2 + 1) // 2
                if idx >= 0:
                    out[i, j] = math.ldexp(vals[idx] * norm, -_RESCALE_EXP * (scale - cnt[idx]))
                else:
                    jm = math.ldexp(vals[0] * norm, 0)
                    jp = math.ldexp(vals[1] * norm, -_RESCALE_EXP * (scale - cnt[1]))
                    a = -0.5
                    while True:
                        jlow = (2.0 * a / x) * jm - jp
                        jp = jm
                        jm = jlow
                        a -= 1.0
                        if 2.0 * a <= t2 + 0.5:
                            break
                    out[i, j] = jm
    return out


def _ladder_vec(two_a0, count, xs):
    """Same recurrence as ``_ladder_loop``, vectorised over ``xs``."""
    xs = np.asarray(xs, dtype=np.float64)
    half, top_idx = _plan(two_a0, count)
    base = -0.5 * half
    big_n = max(miller_start(base + top_idx, float(xs.max())), top_idx + 2)
    nx = xs.shape[0]
    vals = np.empty((top_idx + 1, nx))
    cnt = np.empty((top_idx + 1, nx), dtype=np.int64)
    f_next = np.zeros(nx)
    f = np.ones(nx)
    scale = np.zeros(nx, dtype=np.int64)
    s = np.zeros(nx)
    comp = np.zeros(nx)
    for n in range(big_n, 0, -1):
        if n <= top_idx:
            vals[n] = f
            cnt[n] = scale
        if half == 0 and n % 2 == 0:
            y = 2.0 * f - comp
            t = s + y
            comp = (t - s) - y
            s = t
        f_prev = (2.0 * (base + n) / xs) * f - f_next
        f_next = f
        f = f_prev
        hit = np.abs(f) > _BIG
        if hit.any():
            f = np.where(hit, f * _SMALL, f)
            f_next = np.where(hit, f_next * _SMALL, f_next)
            s = np.where(hit, s * _SMALL, s)
            comp = np.where(hit, comp * _SMALL, comp)
            scale = scale + hit
    vals[0] = f
    cnt[0] = scale
    if half == 0:
        norm = 1.0 / ((s - comp) + f)
    else:
        f1 = np.ldexp(vals[1], -_RESCALE_EXP * (scale - cnt[1]))
        amp = np.sqrt(2.0 / (np.pi * xs))
        norm = (f * amp * np.cos(xs) + f1 * amp * np.sin(xs)) / (f * f + f1 * f1)

    def value(idx):
        return np.ldexp(vals[idx] * norm, (-_RESCALE_EXP * (scale - cnt[idx])).astype(np.int32))

    out = np.empty((nx, count))
    for j in range(count):
        t2 = two_a0 + 2 * j
        if half == 0:
            o = t2 // 2
            v = value(abs(o))
            out[:, j] = -v if (o < 0 and abs(o) % 2 == 1) else v
        else:
            idx = (t2 + 1) // 2
            if idx >= 0:
                out[:, j] = value(idx)
            else:
                jm, jp = value(0), value(1)
                a = -0.5
                while True:
                    jm, jp = (2.0 * a / xs) * jm - jp, jm
                    a -= 1.0
                    if 2.0 * a <= t2 + 0.5:
                        break
                out[:, j] = jm
    return out


if JIT_ENABLED:
    ladder_many = _ladder_loop
else:
    ladder_many = _ladder_vec


def ladder(two_a0, count, x):
    """J at orders two_a0/2, two_a0/2 + 1, ... (``count`` of them) at scalar x."""
    return ladder_many(two_a0, count, np.array([float(x)]))[0]


def check_ladder_args(two_a0, count, xs):
    if two_a0 < MIN_TWO_ALPHA:
        raise ValueError(f"ladder orders start at {MIN_TWO_ALPHA / 2}, got {two_a0 / 2}")
    if count < 1:
        raise ValueError("count must be >= 1")
    xs = np.asarray(xs, dtype=np.float64)
    if not np.all(np.isfinite(xs)):
        raise ValueError("non-finite argument")
    if np.any(xs < MIN_ARG):
        raise ValueError(f"arguments must be >= {MIN_ARG}")
    return xs


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def gl_panels(a, b):
    """15-point Gauss-Legendre nodes/weights on each panel [a_i, b_i], flattened."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    weights = half[:, None] * _GL_WEIGHTS[None, :]
    return nodes, weights
