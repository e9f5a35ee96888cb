# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled nonzero-pair kernel for the truncated series product.

Contract matches _convpy.convolve_nonzeros. The pair loop runs without the
GIL so independent verification trials can overlap on threads.
"""
from libc.math cimport hypot

import numpy as np


def convolve_nonzeros(const long[::1] la, const long[::1] ma, const long[::1] na,
                      const double complex[::1] va,
                      const long[::1] lb, const long[::1] mb, const long[::1] nb,
                      const double complex[::1] vb,
                      long l_t, long l_theta, long n_x,
                      const double[::1] xpow):
    out = np.zeros((2 * l_t + 1, 2 * l_theta + 1, n_x + 1), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    cdef Py_ssize_t i, j, ni = la.shape[0], nj = lb.shape[0]
    cdef long l, m, n
    cdef double complex v
    cdef double tail = 0.0
    with nogil:
        for i in range(ni):
            for j in range(nj):
                l = la[i] + lb[j]
                m = ma[i] + mb[j]
                n = na[i] + nb[j]
                v = va[i] * vb[j]
                if l >= -l_t and l <= l_t and m >= -l_theta and m <= l_theta and n <= n_x:
                    o[l + l_t, m + l_theta, n] = o[l + l_t, m + l_theta, n] + v
                else:
                    tail += hypot(v.real, v.imag) * xpow[n]
    return out, tail
