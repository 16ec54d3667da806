# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernels. See ``_kernels_py`` for the reference semantics."""

import numpy as np
from libc.math cimport floor
from libc.stdint cimport int64_t


def interp(const double[::1] samples, bint periodic, x):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t m = xv.shape[0]
    cdef Py_ssize_t n, i, k, k1
    cdef double pos, frac, t
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    if periodic:
        n = samples.shape[0]
    else:
        n = samples.shape[0] - 1
    for i in range(m):
        t = xv[i]
        if periodic:
            t = t - floor(t)
        elif t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        pos = t * n
        k = <Py_ssize_t>pos
        if k >= n:
            k = n - 1
        frac = pos - k
        k1 = k + 1
        if periodic and k1 == n:
            k1 = 0
        o[i] = samples[k] * (1.0 - frac) + samples[k1] * frac
    return out.reshape(np.shape(x))


def orbit_sum(const double[:, ::1] samples, int64_t order, int64_t start,
              int64_t stop, int64_t stride):
    cdef Py_ssize_t rows = samples.shape[0]
    cdef int64_t n = samples.shape[1]
    cdef int64_t j, r, pn, k, k1, rem
    cdef Py_ssize_t f
    cdef double frac
    out = np.zeros(rows, dtype=np.float64)
    cdef double[::1] acc = out
    stride = stride % order
    r = ((start % order) * stride) % order
    for j in range(start, stop):
        pn = r * n
        k = pn // order
        rem = pn - k * order
        frac = <double>rem / <double>order
        k1 = k + 1
        if k1 == n:
            k1 = 0
        for f in range(rows):
            acc[f] += samples[f, k] * (1.0 - frac) + samples[f, k1] * frac
        r += stride
        if r >= order:
            r -= order
    return out


def winding_gather(const double[::1] samples, int64_t m, int64_t n_out,
                   Py_ssize_t n_nodes):
    cdef int64_t n_in = samples.shape[0]
    cdef int64_t r = 0, pn, idx, idx1
    cdef Py_ssize_t k
    cdef double frac
    out = np.empty(n_nodes, dtype=np.float64)
    cdef double[::1] o = out
    m = m % n_out
    for k in range(n_nodes):
        if n_in == n_out:
            o[k] = samples[r]
        else:
            pn = r * n_in
            idx = pn // n_out
            frac = <double>(pn - idx * n_out) / <double>n_out
            idx1 = idx + 1
            if idx1 == n_in:
                idx1 = 0
            o[k] = samples[idx] * (1.0 - frac) + samples[idx1] * frac
        r += m
        if r >= n_out:
            r -= n_out
    return out
