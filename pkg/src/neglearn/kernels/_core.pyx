# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel operations.

Hand-written single-threaded loops over contiguous float64 buffers.  The
summation order is fixed (inner loop over the output column), so results
are reproducible across machines independent of any BLAS build.  The
i-k-j loop order keeps the innermost accesses contiguous for both the
right operand and the output, which lets the C compiler vectorize them.

Inputs are assumed validated by the caller: 2-D, C-contiguous, float64.
"""

from libc.math cimport exp, fabs

import numpy as np

NAME = "compiled"


def matmul(const double[:, ::1] a, const double[:, ::1] b):
    """a @ b."""
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1], n = b.shape[1]
    out = np.zeros((m, n))
    cdef double[:, ::1] c = out
    cdef Py_ssize_t i, j, p
    cdef double aip
    for i in range(m):
        for p in range(k):
            aip = a[i, p]
            for j in range(n):
                c[i, j] += aip * b[p, j]
    return out


def matmul_tn(const double[:, ::1] a, const double[:, ::1] b):
    """a.T @ b."""
    cdef Py_ssize_t k = a.shape[0], m = a.shape[1], n = b.shape[1]
    out = np.zeros((m, n))
    cdef double[:, ::1] c = out
    cdef Py_ssize_t i, j, p
    cdef double api
    for i in range(m):
        for p in range(k):
            api = a[p, i]
            for j in range(n):
                c[i, j] += api * b[p, j]
    return out


def matmul_nt(const double[:, ::1] a, const double[:, ::1] b):
    """a @ b.T."""
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1], n = b.shape[0]
    out = np.empty((m, n))
    cdef double[:, ::1] c = out
    cdef Py_ssize_t i, j, p
    cdef double acc
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for p in range(k):
                acc += a[i, p] * b[j, p]
            c[i, j] = acc
    return out


def sigmoid(const double[:, ::1] x):
    """Elementwise 1/(1+exp(-x)), computed via exp(-|x|) so it never
    overflows."""
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    out = np.empty((m, n))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double e
    for i in range(m):
        for j in range(n):
            e = exp(-fabs(x[i, j]))
            if x[i, j] >= 0.0:
                o[i, j] = 1.0 / (1.0 + e)
            else:
                o[i, j] = e / (1.0 + e)
    return out
