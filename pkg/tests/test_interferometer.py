import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbshash import (
    CircuitParams,
    compose_unitary,
    haar_overlap_test,
    haar_unitary,
    pair_transformation,
    sample_circuit,
)
from gbshash.interferometer import histogram_overlap, layer_pairs, layer_unitaries

shapes = st.sampled_from(
    [("brickwork", "periodic", 4), ("brickwork", "periodic", 6), ("brickwork", "open", 5),
     ("brickwork", "open", 6), ("v_shaped", "open", 4), ("v_shaped", "periodic", 5)]
)


def _unitarity_error(U):
    return np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))


def test_zero_depth_is_identity():
    p = sample_circuit(4, 0)
    assert p.theta == () and p.phi == ()
    assert np.array_equal(compose_unitary(p), np.eye(4))


def test_sampling_is_deterministic():
    a = sample_circuit(16, 16, "brickwork", "periodic", 42)
    b = sample_circuit(16, 16, "brickwork", "periodic", 42)
    assert a == b
    assert a.to_json() == b.to_json()
    assert a != sample_circuit(16, 16, "brickwork", "periodic", 43)


def test_layer_sizes():
    assert [len(layer_pairs(8, l)) for l in range(2)] == [4, 4]
    assert [len(layer_pairs(7, l, boundary="open")) for l in range(2)] == [3, 3]
    assert [len(layer_pairs(8, l, boundary="open")) for l in range(2)] == [4, 3]
    assert len(layer_pairs(8, 0, "v_shaped")) == 7
    assert layer_pairs(6, 1) == [(1, 2), (3, 4), (5, 0)]
    p = sample_circuit(5, 2, "v_shaped", "open", 0)
    assert len(p.theta[0]) + len(p.theta_bar[0]) == 2 * (5 - 1)


def test_theta_sample_mean():
    p = sample_circuit(16, 12500, seed=3)
    thetas = np.array(p.theta).ravel()
    assert thetas.size == 100_000
    assert abs(thetas.mean() - math.pi / 4) < 0.005
    phis = np.array(p.phi).ravel()
    assert phis.min() >= 0 and phis.max() < 2 * math.pi


def test_odd_periodic_rejected():
    with pytest.raises(ValueError, match="even"):
        sample_circuit(15, 4, "brickwork", "periodic")
    sample_circuit(15, 4, "brickwork", "open")


@pytest.mark.parametrize(
    "theta, phi, check",
    [
        (0.0, 1.0, lambda V: np.allclose(V, np.eye(2))),
        (math.pi / 4, 0.0, lambda V: np.allclose(np.abs(V), 1 / math.sqrt(2))),
    ],
)
def test_pair_transformation_examples(theta, phi, check):
    assert check(pair_transformation(theta, phi))


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(0, 2 * math.pi))
def test_pair_transformation_unitary(theta, phi):
    V = pair_transformation(theta, phi)
    assert _unitarity_error(V) < 1e-12


def test_pair_is_exponential_of_generator():
    from scipy.linalg import expm

    th, ph = 0.7, 2.1
    K = np.array([[0, -th * np.exp(1j * ph)], [th * np.exp(-1j * ph), 0]])
    np.testing.assert_allclose(pair_transformation(th, ph), expm(K), atol=1e-14)


def test_single_gate_embeds():
    p = CircuitParams(4, 1, "brickwork", "periodic", 0, theta=[[math.pi / 4, 0.0]], phi=[[0.0, 0.0]])
    U = compose_unitary(p)
    np.testing.assert_allclose(U[:2, :2], pair_transformation(math.pi / 4, 0.0), atol=1e-15)
    np.testing.assert_allclose(U[2:, 2:], np.eye(2), atol=1e-15)
    assert not U[:2, 2:].any() and not U[2:, :2].any()


def test_layer_zero_acts_first():
    p = CircuitParams(4, 2, "brickwork", "open", 0, theta=[[0.3, 0.0], [0.5]], phi=[[0.1, 0.0], [0.2]])
    L0 = np.eye(4, dtype=complex)
    L0[:2, :2] = pair_transformation(0.3, 0.1)
    L1 = np.eye(4, dtype=complex)
    L1[1:3, 1:3] = pair_transformation(0.5, 0.2)
    np.testing.assert_allclose(compose_unitary(p), L1 @ L0, atol=1e-15)


def test_v_shape_written_order():
    th, ph = [[0.2, 0.4]], [[0.5, 1.5]]
    tb, pb = [[0.6, 0.8]], [[2.5, 3.5]]
    p = CircuitParams(3, 1, "v_shaped", "open", 0, theta=th, phi=ph, theta_bar=tb, phi_bar=pb)

    def emb(p_, q_, t, f):
        E = np.eye(3, dtype=complex)
        E[np.ix_([p_, q_], [p_, q_])] = pair_transformation(t, f)
        return E

    expected = emb(0, 1, 0.2, 0.5) @ emb(1, 2, 0.4, 1.5) @ emb(1, 2, 0.8, 3.5) @ emb(0, 1, 0.6, 2.5)
    np.testing.assert_allclose(compose_unitary(p), expected, atol=1e-15)


@pytest.mark.invariant
@settings(max_examples=30, deadline=None)
@given(shape=shapes, depth=st.integers(0, 12), seed=st.integers(0, 2**64 - 1))
def test_composition_unitary_and_layered(shape, depth, seed):
    topology, boundary, n = shape
    p = sample_circuit(n, depth, topology, boundary, seed)
    U = compose_unitary(p)
    assert _unitarity_error(U) < 1e-10
    acc = np.eye(n, dtype=complex)
    for layer in layer_unitaries(p):
        acc = layer @ acc
    np.testing.assert_allclose(U, acc, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(shape=shapes, depth=st.integers(0, 5), seed=st.integers(0, 2**64 - 1))
def test_json_round_trip(shape, depth, seed, tmp_path_factory):
    topology, boundary, n = shape
    p = sample_circuit(n, depth, topology, boundary, seed)
    assert CircuitParams.from_json(p.to_json()) == p
    path = tmp_path_factory.mktemp("c") / "c.json"
    p.save(path)
    assert CircuitParams.load(path) == p
    assert path.read_text() == p.to_json()


def test_bad_files_rejected():
    d = sample_circuit(4, 2).to_dict()
    with pytest.raises(ValueError, match="version"):
        CircuitParams.from_dict(dict(d, version=99))
    with pytest.raises(ValueError):
        CircuitParams.from_dict(dict(d, depth=3))
    bad = dict(d, phi=[[7.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="2pi"):
        CircuitParams.from_dict(bad)


def test_haar_reproducible_and_unitary():
    assert np.array_equal(haar_unitary(6, 5), haar_unitary(6, 5))
    assert _unitarity_error(haar_unitary(9, 1)) < 1e-12


def test_haar_first_moment():
    n, draws = 4, 10_000
    rng = np.random.default_rng(2024)
    vals = np.array([abs(haar_unitary(n, rng)[0, 0]) ** 2 for _ in range(draws)])
    var = (n - 1) / (n * n * (n + 1))
    assert abs(vals.mean() - 1 / n) < 3 * math.sqrt(var / draws)


def test_overlap_metric():
    assert histogram_overlap([0.5, 0.5], [0.5, 0.5]) == pytest.approx((1.0, 0.5))
    assert histogram_overlap([1, 0], [0, 1]) == (0.0, 0.0)


def test_overlap_grows_with_depth():
    amp = [haar_overlap_test(4, d, 200, 50, seed=1).amplitude_overlap for d in (0, 2, 4)]
    assert amp[0] < 0.1 < amp[1] < amp[2]


def test_haar_against_itself():
    rep = haar_overlap_test(8, 0, 1000, 50, topology="haar", seed=3)
    assert rep.amplitude_overlap > 0.99 and rep.phase_overlap > 0.99


def test_overlap_argument_checks():
    with pytest.raises(ValueError):
        haar_overlap_test(4, 4, realizations=10)
    with pytest.raises(ValueError):
        haar_overlap_test(4, 4, bins=3)
