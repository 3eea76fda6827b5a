# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled perfect-matching sum over batches of contraction matrices."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()


def wick_sum(const double complex[:, :, ::1] table,
             const cnp.intp_t[:, :, ::1] matchings,
             int nthreads=1):
    """Sum of pair products over the given matchings, per batch entry.

    Products run left to right over the pairs of a matching and the
    matchings are accumulated in row order, so the result does not depend
    on the thread count.
    """
    cdef Py_ssize_t n_batch = table.shape[0]
    cdef Py_ssize_t n_match = matchings.shape[0]
    cdef Py_ssize_t n_pairs = matchings.shape[1]
    out = np.empty(n_batch, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef Py_ssize_t b, m, s
    cdef double acc_re, acc_im, t_re, t_im, x_re, x_im, tmp
    cdef double complex x

    if nthreads < 1:
        nthreads = 1
    for b in prange(n_batch, nogil=True, schedule="static", num_threads=nthreads):
        acc_re = 0.0
        acc_im = 0.0
        for m in range(n_match):
            t_re = 1.0
            t_im = 0.0
            for s in range(n_pairs):
                x = table[b, matchings[m, s, 0], matchings[m, s, 1]]
                x_re = x.real
                x_im = x.imag
                tmp = t_re * x_re - t_im * x_im
                t_im = t_re * x_im + t_im * x_re
                t_re = tmp
            acc_re = acc_re + t_re
            acc_im = acc_im + t_im
        res[b] = acc_re + 1j * acc_im
    return out
