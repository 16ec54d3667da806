"""Pure numpy implementations of the grid kernels.

These mirror :mod:`klab._kernels` signature for signature and are used when the
compiled extension is unavailable or ``KLAB_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 18


def interp(samples, periodic, x):
    """Piecewise-linear interpolation of node samples at coordinates ``x``.

    ``samples`` holds N+1 values on [0, 1] (``periodic=False``) or N values on
    the circle (``periodic=True``).
    """
    s = np.asarray(samples, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if periodic:
        n = s.shape[0]
        pos = (x - np.floor(x)) * n
        k = np.floor(pos).astype(np.int64)
        k = np.minimum(k, n - 1)
        frac = pos - k
        k1 = k + 1
        k1[k1 == n] = 0
    else:
        n = s.shape[0] - 1
        pos = np.clip(x, 0.0, 1.0) * n
        k = np.minimum(np.floor(pos).astype(np.int64), n - 1)
        frac = pos - k
        k1 = k + 1
    return s[k] * (1.0 - frac) + s[k1] * frac


def orbit_sum(samples, order, start, stop, stride):
    """Sum a periodic grid function over the points ``(stride*j mod order)/order``.

    ``samples`` is a 2-D array with one periodic function per row; returns one
    sum per row. Index arithmetic is exact in 64-bit integers.
    """
    s = np.ascontiguousarray(samples, dtype=np.float64)
    rows, n = s.shape
    out = np.zeros(rows, dtype=np.float64)
    stride %= order
    for lo in range(start, stop, _CHUNK):
        hi = min(stop, lo + _CHUNK)
        j = np.arange(lo, hi, dtype=np.int64)
        r = (j % order) * stride % order
        pn = r * n
        k = pn // order
        frac = (pn - k * order) / order
        k1 = k + 1
        k1[k1 == n] = 0
        vals = s[:, k] * (1.0 - frac) + s[:, k1] * frac
        out += vals.sum(axis=1)
    return out


def winding_gather(samples, m, n_out, n_nodes):
    """Values of a periodic function at phases ``(m*k mod n_out)/n_out``.

    ``k`` runs over ``0 .. n_nodes-1``. When the source resolution equals
    ``n_out`` every phase is a node and no interpolation occurs.
    """
    s = np.asarray(samples, dtype=np.float64)
    n_in = s.shape[0]
    k = np.arange(n_nodes, dtype=np.int64)
    r = (k * m) % n_out
    if n_in == n_out:
        return s[r].copy()
    pn = r * n_in
    idx = pn // n_out
    frac = (pn - idx * n_out) / n_out
    idx1 = idx + 1
    idx1[idx1 == n_in] = 0
    return s[idx] * (1.0 - frac) + s[idx1] * frac
