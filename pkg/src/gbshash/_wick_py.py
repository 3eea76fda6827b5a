"""Pure-numpy fallback for the matching-sum kernel.

Arithmetic is spelled out on real and imaginary parts in the same order as
the compiled kernel so both backends return bit-identical sums.
"""

import numpy as np

# Upper bound on batch * matchings elements held in memory at once.
_CHUNK_ELEMENTS = 1 << 21


def wick_sum(table, matchings, nthreads=1):
    table = np.ascontiguousarray(table, dtype=np.complex128)
    matchings = np.ascontiguousarray(matchings, dtype=np.intp)
    n_batch = table.shape[0]
    n_match, n_pairs = matchings.shape[0], matchings.shape[1]
    out = np.empty(n_batch, dtype=np.complex128)
    if n_batch == 0:
        return out

    rows = matchings[:, :, 0]
    cols = matchings[:, :, 1]
    step = max(1, _CHUNK_ELEMENTS // max(n_match, 1))
    for start in range(0, n_batch, step):
        block = table[start:start + step]
        t_re = np.ones((block.shape[0], n_match))
        t_im = np.zeros((block.shape[0], n_match))
        for s in range(n_pairs):
            x = block[:, rows[:, s], cols[:, s]]
            x_re, x_im = x.real, x.imag
            tmp = t_re * x_re - t_im * x_im
            t_im = t_re * x_im + t_im * x_re
            t_re = tmp
        acc_re = np.cumsum(t_re, axis=1)[:, -1]
        acc_im = np.cumsum(t_im, axis=1)[:, -1]
        out[start:start + step] = acc_re + 1j * acc_im
    return out
