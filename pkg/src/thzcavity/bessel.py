"""Integer-order Bessel functions of the first kind.

Only what the Mathieu product series needs: a whole table J_0..J_n at
non-negative real arguments, computed with Miller's downward recurrence
and normalized by the identity J_0 + 2 * sum_k J_2k = 1.
"""

from __future__ import annotations

import math

import numpy as np

_RESCALE_AT = 1e250
_SCALAR_LIMIT = 6


def _start_order(nmax: int, xmax: float) -> int:
    top = max(nmax, int(math.ceil(xmax)))
    start = top + 16 + int(math.sqrt(40.0 * max(top, 1)))
    return start + (start % 2)


def bessel_j_table(nmax: int, x) -> np.ndarray:
    """Return J_k(x) for k = 0..nmax, shape ``(nmax + 1,) + np.shape(x)``.

    ``x`` must be finite and non-negative.
    """
    if nmax < 0:
        raise ValueError(f"nmax must be >= 0, got {nmax}")
    xs = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xs)) or np.any(xs < 0.0):
        raise ValueError("Bessel argument must be finite and non-negative")
    flat = xs.reshape(-1)
    out = np.zeros((nmax + 1, flat.size))

    zero = flat == 0.0
    out[0, zero] = 1.0
    live = ~zero
    if flat.size <= _SCALAR_LIMIT:
        done: dict[float, int] = {}
        for i in np.flatnonzero(live):
            xi = float(flat[i])
            if xi in done:
                out[:, i] = out[:, done[xi]]
            else:
                out[:, i] = _miller_scalar(nmax, xi)
                done[xi] = i
    elif np.any(live):
        out[:, live] = _miller(nmax, flat[live])
    return out.reshape((nmax + 1,) + xs.shape)


def _miller_scalar(nmax: int, x: float) -> list[float]:
    # plain floats beat numpy for the one- and two-point calls the root scan makes
    start = _start_order(nmax, x)
    vals = [0.0] * (start + 2)
    vals[start] = 1e-300
    norm = 0.0
    two_over_x = 2.0 / x
    big, small = _RESCALE_AT, -_RESCALE_AT
    for k in range(start, 0, -1):
        v = k * two_over_x * vals[k] - vals[k + 1]
        vals[k - 1] = v
        if k % 2 == 1 and k > 1:
            norm += 2.0 * v
        if v > big or v < small:
            inv = 1.0 / _RESCALE_AT
            for j in range(k - 1, max(k, nmax) + 1):
                vals[j] *= inv
            norm *= inv
    norm += vals[0]
    return [v / norm for v in vals[: nmax + 1]]


def _miller(nmax: int, x: np.ndarray) -> np.ndarray:
    start = _start_order(nmax, float(x.max()))
    vals = np.zeros((start + 2, x.size))
    vals[start] = 1e-300
    norm = np.zeros(x.size)
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        vals[k - 1] = k * two_over_x * vals[k] - vals[k + 1]
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * vals[k - 1]
        big = np.abs(vals[k - 1]) > _RESCALE_AT
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            vals[k - 1 :] *= scale
            norm *= scale
    norm += vals[0]
    return vals[: nmax + 1] / norm


def bessel_j(n: int, x):
    """J_n(x) for integer n (negative orders via J_-n = (-1)^n J_n)."""
    k = abs(n)
    val = bessel_j_table(k, x)[k]
    if n < 0 and k % 2:
        val = -val
    return val if np.ndim(val) else float(val)
