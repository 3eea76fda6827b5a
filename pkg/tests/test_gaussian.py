import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbshash import (
    GaussianMoments,
    apply_interferometer,
    compose_unitary,
    correlation_std,
    haar_unitary,
    input_moments,
    pair_transformation,
    sample_circuit,
    three_mode_correlations,
    wick_expectation,
)
from gbshash import _wick_py
from gbshash.fock import squeezed_vacuum_fock
from gbshash.gaussian import (
    MomentEngineError,
    correlation_sequence,
    correlation_stats_for_inputs,
    correlations_for_inputs,
    perfect_matchings,
)

S1, C1 = math.sinh(1.0), math.cosh(1.0)

bit_vectors = st.integers(3, 6).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n))


def _state(bits, seed):
    return apply_interferometer(input_moments(bits), haar_unitary(len(bits), seed))


def test_vacuum_input_is_zero():
    g = input_moments([0, 0, 0, 0])
    assert not g.M.any() and not g.P.any()


def test_single_squeezed_mode_matches_fock_vector():
    g = input_moments([1, 0, 0, 0])
    assert g.M[0, 0].real == pytest.approx(1.38109, abs=1e-5)
    assert g.P[0, 0].real == pytest.approx(-1.81343, abs=1e-5)
    assert np.count_nonzero(g.M) == 1 and np.count_nonzero(g.P) == 1

    # sign convention of <a a> checked against the truncated Fock vector
    psi = squeezed_vacuum_fock(1.0, 120)
    n = np.arange(psi.size)
    a_psi = np.sqrt(n[1:]) * psi[1:]
    aa = np.vdot(psi[:-2], np.sqrt(n[1:-1]) * a_psi[1:])
    np.testing.assert_allclose(aa, g.P[0, 0], atol=1e-10)
    np.testing.assert_allclose(np.sum(n * np.abs(psi) ** 2), g.M[0, 0].real, atol=1e-10)


def test_trace_of_all_on_input():
    g = input_moments([1, 1, 1, 1])
    assert g.mean_photon_number() == pytest.approx(4 * S1**2, rel=1e-14)


def test_identity_leaves_moments():
    g = input_moments([1, 0, 1, 1])
    out = apply_interferometer(g, np.eye(4))
    np.testing.assert_array_equal(out.M, g.M)
    np.testing.assert_array_equal(out.P, g.P)


def test_balanced_pair_splits_photons():
    g = apply_interferometer(input_moments([1, 0]), pair_transformation(math.pi / 4, 0.0))
    np.testing.assert_allclose(g.M.diagonal().real, [S1**2 / 2] * 2, atol=1e-14)


def test_non_unitary_rejected():
    with pytest.raises(ValueError, match="unitary"):
        apply_interferometer(input_moments([1, 0, 1]), 1.01 * np.eye(3))


@pytest.mark.parametrize(
    "seq, expected",
    [
        ([], 1.0),
        ([(0, False), (0, True)], 1.0),
    ],
)
def test_vacuum_wick_values(seq, expected):
    assert wick_expectation(GaussianMoments.vacuum(2), seq) == pytest.approx(expected)


def test_fourth_order_single_mode():
    g = input_moments([1])
    val = wick_expectation(g, [(0, True), (0, False), (0, True), (0, False)])
    assert val.real == pytest.approx(S1**4 + 2 * S1**2 * C1**2, rel=1e-13)
    assert val.real == pytest.approx(8.4846, abs=5e-4)  # quoted to 4 places
    assert abs(val.imag) < 1e-13


def test_product_input_factorizes():
    g = input_moments([1, 1, 1, 0])
    mu = three_mode_correlations(g)
    assert mu[0] == pytest.approx(S1**6, rel=1e-13)
    assert mu[0] == pytest.approx(2.6340, abs=5e-4)
    assert mu[1] == 0.0
    m2 = S1**4 + 2 * S1**2 * C1**2
    assert correlation_std(g, 0) == pytest.approx(math.sqrt(m2**3 - S1**12), rel=1e-12)


def test_vacuum_correlations_and_std():
    g = GaussianMoments.vacuum(5)
    assert not three_mode_correlations(g).any()
    assert all(correlation_std(g, j) == 0.0 for j in range(5))


def test_matching_count():
    for n in (2, 4, 6, 8, 12):
        pm = perfect_matchings(n)
        assert pm.shape == (math.prod(range(n - 1, 0, -2)), n // 2, 2)
        assert np.all(pm[..., 0] < pm[..., 1])


def test_batched_path_matches_single_state():
    U = compose_unitary(sample_circuit(6, 6, seed=3))
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=(9, 6))
    mu, sigma = correlation_stats_for_inputs(U, bits)
    for row, b in enumerate(bits):
        g = apply_interferometer(input_moments(b), U)
        np.testing.assert_allclose(mu[row], three_mode_correlations(g), rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(sigma[row], [correlation_std(g, j) for j in range(6)], rtol=1e-10, atol=1e-12)


def test_batch_composition_does_not_change_results():
    U = compose_unitary(sample_circuit(8, 8, seed=5))
    bits = (np.arange(256)[:, None] >> np.arange(8)) & 1
    whole = correlations_for_inputs(U, bits)
    for i in (0, 77, 255):
        np.testing.assert_array_equal(correlations_for_inputs(U, bits[i:i + 1])[0], whole[i])


def test_repeat_calls_bit_identical():
    g = _state([1, 0, 1, 1, 0], 11)
    assert np.array_equal(three_mode_correlations(g), three_mode_correlations(g))


def test_backends_bit_identical():
    ext = pytest.importorskip("gbshash._wick_ext")
    rng = np.random.default_rng(9)
    for L in (2, 6, 12):
        table = rng.normal(size=(17, L, L)) + 1j * rng.normal(size=(17, L, L))
        pm = perfect_matchings(L)
        py = _wick_py.wick_sum(table, pm)
        for threads in (1, 4):
            assert np.array_equal(ext.wick_sum(table, pm, threads), py)


def test_imaginary_residue_raises():
    bad = GaussianMoments(np.diag([1.0, 1.0, 1.0 + 0.5j]), np.zeros((3, 3)))
    with pytest.raises(MomentEngineError):
        three_mode_correlations(bad)


def test_short_circuits_rejected():
    with pytest.raises(ValueError):
        three_mode_correlations(GaussianMoments.vacuum(2))
    with pytest.raises(TypeError):
        input_moments("1010")


@pytest.mark.invariant
@settings(max_examples=30, deadline=None)
@given(bits=bit_vectors, seed=st.integers(0, 2**32 - 1))
def test_moments_hermitian_and_symmetric(bits, seed):
    g = _state(bits, seed)
    assert np.array_equal(g.M, g.M.conj().T)
    assert np.array_equal(g.P, g.P.T)


@pytest.mark.invariant
@settings(max_examples=30, deadline=None)
@given(bits=bit_vectors, seed=st.integers(0, 2**32 - 1), r=st.floats(0.1, 1.5))
def test_trace_conserved(bits, seed, r):
    g = input_moments(bits, r_on=r)
    out = apply_interferometer(g, haar_unitary(len(bits), seed))
    assert abs(out.mean_photon_number() - sum(bits) * math.sinh(r) ** 2) < 1e-10
    assert abs(out.mean_photon_number() - g.mean_photon_number()) < 1e-10


@pytest.mark.invariant
@settings(max_examples=30, deadline=None)
@given(
    bits=bit_vectors,
    seed=st.integers(0, 2**32 - 1),
    ops=st.lists(st.tuples(st.integers(0, 2), st.booleans()), min_size=1, max_size=7),
)
def test_odd_strings_vanish(bits, seed, ops):
    if len(ops) % 2 == 0:
        ops = ops[:-1]
    assert wick_expectation(_state(bits, seed), ops) == 0


@pytest.mark.invariant
@settings(max_examples=25, deadline=None)
@given(bits=bit_vectors, seed=st.integers(0, 2**32 - 1))
def test_correlations_nonnegative_and_std_real(bits, seed):
    g = _state(bits, seed)
    mu = three_mode_correlations(g)
    assert np.all(mu >= 0)
    for j in range(g.n_modes):
        assert correlation_std(g, j) >= 0


@pytest.mark.invariant
@settings(max_examples=25, deadline=None)
@given(bits=bit_vectors, seed=st.integers(0, 2**32 - 1))
def test_number_operator_is_diagonal_of_m(bits, seed):
    g = _state(bits, seed)
    for j in range(g.n_modes):
        assert wick_expectation(g, [(j, True), (j, False)]) == pytest.approx(g.M[j, j], abs=1e-12)


def test_correlation_sequence_wraps():
    assert correlation_sequence(4, 5) == [(4, True), (4, False), (0, True), (0, False), (1, True), (1, False)]


def test_pure_python_switch_gives_same_hashes():
    import subprocess
    import sys

    code = (
        "import numpy as np; from gbshash import BACKEND, HashConfig, sample_circuit;"
        "from gbshash.bench import enumerate_hashes;"
        "t = enumerate_hashes(HashConfig(sample_circuit(6, 6, seed=4), k=1));"
        "print(BACKEND, t.mu.tobytes().hex())"
    )
    env = dict(__import__("os").environ, GBSHASH_PURE_PYTHON="1")
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, hexed = proc.stdout.split()
    assert backend == "python"
    from gbshash import HashConfig as HC
    from gbshash.bench import enumerate_hashes

    here = enumerate_hashes(HC(sample_circuit(6, 6, seed=4), k=1))
    assert here.mu.tobytes().hex() == hexed
