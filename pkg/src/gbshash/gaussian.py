"""Second moments of zero-mean Gaussian states and Wick-theorem expectations.

A zero-mean Gaussian state on N bosonic modes is described here by two
complex N x N matrices,

    M[i, j] = <a_i^dag a_j>,    P[i, j] = <a_i a_j>,

which is all that is needed for normally-unordered photon-number moments.
Expectations of arbitrary ladder-operator strings follow from the quantum
Wick theorem: a sum over perfect matchings of the string positions, each
matched pair (p < q) contributing its ordered two-point function.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

import numpy as np

from . import _backend

__all__ = [
    "GaussianMoments",
    "MomentEngineError",
    "input_moments",
    "apply_interferometer",
    "perfect_matchings",
    "wick_expectation",
    "correlation_sequence",
    "three_mode_correlations",
    "correlation_std",
    "correlations_for_inputs",
    "correlation_stats_for_inputs",
]

IMAG_TOL = 1e-9
NEG_MU_TOL = 1e-9
NEG_VAR_TOL = 1e-8
UNITARY_TOL = 1e-10

# One ladder operator: (mode index, dagger). dagger=True is a creation operator.
Ladder = Tuple[int, bool]


class MomentEngineError(ArithmeticError):
    """A moment computation violated a numerical tolerance."""


@dataclass(frozen=True)
class GaussianMoments:
    """Second moments of a zero-mean N-mode Gaussian state."""

    M: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        M = np.array(self.M, dtype=np.complex128)
        P = np.array(self.P, dtype=np.complex128)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise ValueError(f"M must be a non-empty square matrix, got shape {M.shape}")
        if P.shape != M.shape:
            raise ValueError(f"P shape {P.shape} does not match M shape {M.shape}")
        M.flags.writeable = False
        P.flags.writeable = False
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "P", P)

    @property
    def n_modes(self):
        return self.M.shape[0]

    def mean_photon_number(self):
        return float(np.trace(self.M).real)

    @classmethod
    def vacuum(cls, n_modes):
        zeros = np.zeros((n_modes, n_modes), dtype=np.complex128)
        return cls(zeros, zeros)


def input_moments(bits, r_on=1.0, n_modes=None):
    """Moments of the squeezed-vacuum array encoding ``bits``.

    Mode j is squeezed with amplitude ``r_on * bits[j]`` by
    S(r) = exp[(r/2)(a^2 - a^dag^2)], giving <a^dag a> = sinh^2 r and
    <a a> = -sinh r cosh r. ``bits[j]`` is the bit of mode j
    (least-significant bit first).
    """
    if not r_on > 0:
        raise ValueError(f"r_on must be positive, got {r_on}")
    b = _bit_array(bits)
    if n_modes is not None and b.shape[0] != n_modes:
        raise ValueError(f"message has {b.shape[0]} bits, expected {n_modes}")
    r = r_on * b
    M = np.diag(np.sinh(r) ** 2).astype(np.complex128)
    P = np.diag(-np.sinh(r) * np.cosh(r)).astype(np.complex128)
    return GaussianMoments(M, P)


def check_unitary(U, tol=UNITARY_TOL):
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"U must be square, got shape {U.shape}")
    dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if dev > tol:
        raise ValueError(f"U is not unitary: max |U^dag U - I| = {dev:.3e} > {tol:g}")
    return U


def apply_interferometer(g, U):
    """Propagate moments through the passive transformation with mode matrix U.

    With U^dag a_i^dag U = sum_k U[i, k] a_k^dag,

        M_out = U M U^dag,        P_out = conj(U) P conj(U)^T.
    """
    U = check_unitary(U)
    if U.shape[0] != g.n_modes:
        raise ValueError(f"U is {U.shape[0]}x{U.shape[0]} but state has {g.n_modes} modes")
    Uc = U.conj()
    M = U @ g.M @ U.conj().T
    P = Uc @ g.P @ Uc.T
    # restore exact Hermiticity / symmetry lost to rounding
    M = 0.5 * (M + M.conj().T)
    P = 0.5 * (P + P.T)
    return GaussianMoments(M, P)


@lru_cache(maxsize=None)
def _matchings_cached(n):
    if n == 0:
        return np.zeros((1, 0, 2), dtype=np.intp)

    def rec(items):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for i, partner in enumerate(rest):
            for tail in rec(rest[:i] + rest[i + 1:]):
                yield ((first, partner),) + tail

    arr = np.array(list(rec(tuple(range(n)))), dtype=np.intp)
    arr.flags.writeable = False
    return arr


def perfect_matchings(n):
    """All perfect matchings of positions 0..n-1, lexicographically ordered.

    Returns an int array of shape (n_matchings, n // 2, 2); each row lists
    pairs (p, q) with p < q sorted by p.
    """
    if n < 0 or n % 2:
        raise ValueError(f"perfect matchings need an even non-negative size, got {n}")
    return _matchings_cached(n)


def _contraction_table(M, P, idx, dagger):
    """Ordered two-point functions for every position pair p < q.

    M, P have shape (B, K, K); ``idx`` maps string positions to indices in
    the K-mode block. Entries with p >= q are left at zero.
    """
    L = len(idx)
    B = M.shape[0]
    A = np.zeros((B, L, L), dtype=np.complex128)
    for p in range(L):
        i = idx[p]
        for q in range(p + 1, L):
            j = idx[q]
            if dagger[p] and dagger[q]:
                A[:, p, q] = P[:, i, j].conj()
            elif dagger[p]:
                A[:, p, q] = M[:, i, j]
            elif dagger[q]:
                A[:, p, q] = M[:, j, i] + (1.0 if i == j else 0.0)
            else:
                A[:, p, q] = P[:, i, j]
    return A


def _wick_batch(M, P, idx, dagger, nthreads=1):
    L = len(idx)
    if L % 2:
        return np.zeros(M.shape[0], dtype=np.complex128)
    if L == 0:
        return np.ones(M.shape[0], dtype=np.complex128)
    table = _contraction_table(M, P, idx, dagger)
    return _backend.wick_sum(table, perfect_matchings(L), nthreads)


def wick_expectation(g, sequence):
    """Expectation of an ordered ladder-operator product in state ``g``.

    ``sequence`` is an iterable of (mode, dagger) pairs read left to right,
    e.g. [(0, True), (0, False)] is a_0^dag a_0. Odd-length strings give 0.
    """
    seq = list(sequence)
    modes = [int(m) for m, _ in seq]
    dagger = [bool(d) for _, d in seq]
    for m in modes:
        if not 0 <= m < g.n_modes:
            raise IndexError(f"mode index {m} out of range for {g.n_modes} modes")
    value = _wick_batch(g.M[None], g.P[None], modes, dagger)
    return complex(value[0])


def correlation_sequence(j, n_modes, repeat=1):
    """Ladder string of C_j = n_j n_{j+1} n_{j+2} (periodic), ``repeat`` times."""
    seq = []
    for _ in range(repeat):
        for off in range(3):
            m = (j + off) % n_modes
            seq.append((m, True))
            seq.append((m, False))
    return seq


def _real_part(values, what):
    values = np.asarray(values)
    worst = np.max(np.abs(values.imag)) if values.size else 0.0
    if worst > IMAG_TOL:
        raise MomentEngineError(f"{what}: imaginary residue {worst:.3e} exceeds {IMAG_TOL:g}")
    return values.real.copy()


def _clamp_mu(mu):
    worst = mu.min() if mu.size else 0.0
    if worst < -NEG_MU_TOL:
        raise MomentEngineError(f"negative three-mode correlation {worst:.3e}")
    return np.maximum(mu, 0.0)


def _std_from(second, mu):
    var = second - mu * mu
    worst = var.min() if var.size else 0.0
    if worst < -NEG_VAR_TOL:
        raise MomentEngineError(f"negative variance {worst:.3e}")
    return np.sqrt(np.maximum(var, 0.0))


def _require_three(n_modes):
    if n_modes < 3:
        raise ValueError(f"three-mode correlations need N >= 3, got {n_modes}")


def three_mode_correlations(g):
    """mu_j = <n_j n_{j+1} n_{j+2}> for every j, indices taken mod N."""
    N = g.n_modes
    _require_three(N)
    raw = np.empty(N, dtype=np.complex128)
    for j in range(N):
        raw[j] = wick_expectation(g, correlation_sequence(j, N))
    return _clamp_mu(_real_part(raw, "three-mode correlation"))


def correlation_std(g, j):
    """Standard deviation of C_j: sqrt(<C_j^2> - <C_j>^2)."""
    N = g.n_modes
    _require_three(N)
    if not 0 <= j < N:
        raise IndexError(f"mode index {j} out of range for {N} modes")
    mu = _real_part(wick_expectation(g, correlation_sequence(j, N)), "mean")
    second = _real_part(wick_expectation(g, correlation_sequence(j, N, repeat=2)), "second moment")
    return float(_std_from(second, mu))


# ---------------------------------------------------------------------------
# Batched path over many input messages sharing one interferometer.
# ---------------------------------------------------------------------------

_BATCH = 4096


def _block_moments(U, bits, r_on, modes):
    """Output moments restricted to ``modes`` for a batch of bit vectors.

    Equivalent to apply_interferometer(input_moments(b), U) sliced to the
    block, but summed over input modes in fixed ascending order so that the
    result for one message never depends on the batch it was computed in.
    """
    Uk = U[list(modes), :]
    L, N = Uk.shape
    Q = Uk[:, None, :] * Uk.conj()[None, :, :]           # U[i,k] conj(U[l,k])
    R = Uk.conj()[:, None, :] * Uk.conj()[None, :, :]    # conj(U[i,k]) conj(U[l,k])
    r = r_on * bits
    m = np.sinh(r) ** 2
    p = -np.sinh(r) * np.cosh(r)
    B = bits.shape[0]
    M = np.zeros((B, L, L), dtype=np.complex128)
    P = np.zeros((B, L, L), dtype=np.complex128)
    for k in range(N):
        M += m[:, k, None, None] * Q[None, :, :, k]
        P += p[:, k, None, None] * R[None, :, :, k]
    return M, P


def _as_bit_matrix(bits, n_modes):
    arr = np.atleast_2d(np.asarray(bits, dtype=float))
    if arr.shape[1] != n_modes:
        raise ValueError(f"messages have {arr.shape[1]} bits, expected {n_modes}")
    return arr


def correlations_for_inputs(U, bits, r_on=1.0, nthreads=None):
    """mu_j(b) for every row of ``bits`` (shape (B, N)) through unitary U.

    Returns a (B, N) float array, clamped and imaginary-checked exactly as
    three_mode_correlations.
    """
    return _stats_for_inputs(U, bits, r_on, nthreads, with_std=False)[0]


def correlation_stats_for_inputs(U, bits, r_on=1.0, nthreads=None):
    """(mu, sigma) arrays of shape (B, N) for every row of ``bits``."""
    return _stats_for_inputs(U, bits, r_on, nthreads, with_std=True)


def _stats_for_inputs(U, bits, r_on, nthreads, with_std):
    U = np.asarray(U, dtype=np.complex128)
    N = U.shape[0]
    _require_three(N)
    if not r_on > 0:
        raise ValueError(f"r_on must be positive, got {r_on}")
    bits = _as_bit_matrix(bits, N)
    nthreads = nthreads or _backend.default_threads()
    B = bits.shape[0]
    mu = np.empty((B, N))
    sigma = np.empty((B, N)) if with_std else None
    idx1 = [0, 0, 1, 1, 2, 2]
    dag1 = [True, False] * 3
    for start in range(0, B, _BATCH):
        chunk = bits[start:start + _BATCH]
        for j in range(N):
            modes = [j, (j + 1) % N, (j + 2) % N]
            M, P = _block_moments(U, chunk, r_on, modes)
            first = _real_part(_wick_batch(M, P, idx1, dag1, nthreads), "three-mode correlation")
            mu[start:start + len(chunk), j] = _clamp_mu(first)
            if with_std:
                second = _wick_batch(M, P, idx1 * 2, dag1 * 2, nthreads)
                second = _real_part(second, "second moment")
                sigma[start:start + len(chunk), j] = _std_from(second, first)
    return mu, sigma


def _bit_array(bits):
    if isinstance(bits, str):
        raise TypeError("pass bits as a sequence of 0/1 in mode order, or a BitString")
    if hasattr(bits, "bits"):
        bits = bits.bits
    b = np.asarray(list(bits), dtype=float)
    if b.ndim != 1 or b.size == 0:
        raise ValueError("bits must be a non-empty 1-D sequence")
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("bits must be 0 or 1")
    return b
