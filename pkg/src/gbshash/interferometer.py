"""Random beamsplitter interferometers and their N x N mode unitaries.

A circuit is a stack of layers of two-mode beamsplitters

    BS_{j,j'}(theta, phi) = exp[theta (e^{i phi} a_j a_j'^dag - e^{-i phi} a_j^dag a_j')].

The mode unitary U is defined by U^dag a_j^dag U = sum_k U[j, k] a_k^dag
(operator U on the left, matrix U on the right). Layer 0 acts first on the
state, so U = U_{d-1} ... U_1 U_0 as matrices.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

__all__ = [
    "CircuitParams",
    "HaarOverlapReport",
    "sample_circuit",
    "pair_transformation",
    "layer_pairs",
    "compose_unitary",
    "layer_unitaries",
    "haar_unitary",
    "haar_overlap_test",
    "histogram_overlap",
]

TOPOLOGIES = ("brickwork", "v_shaped")
BOUNDARIES = ("periodic", "open")
FORMAT_VERSION = 1
THETA_MEAN = math.pi / 4
THETA_STD = math.pi / 16
TWO_PI = 2.0 * math.pi


def layer_pairs(n_modes, layer, topology="brickwork", boundary="periodic"):
    """Mode pairs (p, q) of one layer, in parameter order.

    For v_shaped layers only the forward sweep (0,1), (1,2), ... is
    returned; the barred sweep uses the same pairs.
    """
    N = n_modes
    if topology == "v_shaped":
        return [(j, j + 1) for j in range(N - 1)]
    if layer % 2 == 0:
        return [(2 * j, 2 * j + 1) for j in range(N // 2)]
    if boundary == "periodic":
        return [(2 * j + 1, (2 * j + 2) % N) for j in range(N // 2)]
    return [(2 * j + 1, 2 * j + 2) for j in range((N - 1) // 2)]


def _validate_shape(n_modes, topology, boundary):
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")
    if n_modes < 2:
        raise ValueError(f"need at least 2 modes, got {n_modes}")
    if topology == "brickwork" and boundary == "periodic":
        if n_modes % 2 or n_modes < 4:
            raise ValueError(
                f"periodic brickwork needs an even number of modes N >= 4, got N = {n_modes}"
            )


def _freeze(rows):
    return tuple(tuple(float(x) for x in row) for row in rows)


@dataclass(frozen=True)
class CircuitParams:
    """Public description of one interferometer.

    ``theta[l][i]`` and ``phi[l][i]`` belong to the i-th pair of
    ``layer_pairs(n_modes, l, ...)``. v_shaped circuits also carry
    ``theta_bar`` / ``phi_bar`` for the return sweep, indexed by the same j.
    """

    n_modes: int
    depth: int
    topology: str
    boundary: str
    seed: int
    theta: Tuple[Tuple[float, ...], ...]
    phi: Tuple[Tuple[float, ...], ...]
    theta_bar: Optional[Tuple[Tuple[float, ...], ...]] = None
    phi_bar: Optional[Tuple[Tuple[float, ...], ...]] = None

    def __post_init__(self):
        _validate_shape(self.n_modes, self.topology, self.boundary)
        if self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "theta", _freeze(self.theta))
        object.__setattr__(self, "phi", _freeze(self.phi))
        groups = [("theta", self.theta), ("phi", self.phi)]
        if self.topology == "v_shaped":
            if self.theta_bar is None or self.phi_bar is None:
                raise ValueError("v_shaped circuits need theta_bar and phi_bar")
            object.__setattr__(self, "theta_bar", _freeze(self.theta_bar))
            object.__setattr__(self, "phi_bar", _freeze(self.phi_bar))
            groups += [("theta_bar", self.theta_bar), ("phi_bar", self.phi_bar)]
        elif self.theta_bar is not None or self.phi_bar is not None:
            raise ValueError("theta_bar/phi_bar are only valid for v_shaped circuits")
        for name, rows in groups:
            if len(rows) != self.depth:
                raise ValueError(f"{name} has {len(rows)} layers, expected depth {self.depth}")
            for l, row in enumerate(rows):
                want = len(layer_pairs(self.n_modes, l, self.topology, self.boundary))
                if len(row) != want:
                    raise ValueError(f"{name}[{l}] has {len(row)} entries, expected {want}")
                if name.startswith("phi") and any(not 0.0 <= x < TWO_PI for x in row):
                    raise ValueError(f"{name}[{l}] has an angle outside [0, 2pi)")
                if any(not math.isfinite(x) for x in row):
                    raise ValueError(f"{name}[{l}] has a non-finite angle")

    def to_dict(self):
        d = {
            "version": FORMAT_VERSION,
            "n_modes": self.n_modes,
            "depth": self.depth,
            "topology": self.topology,
            "boundary": self.boundary,
            "seed": self.seed,
            "theta": [list(r) for r in self.theta],
            "phi": [list(r) for r in self.phi],
        }
        if self.topology == "v_shaped":
            d["theta_bar"] = [list(r) for r in self.theta_bar]
            d["phi_bar"] = [list(r) for r in self.phi_bar]
        return d

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported circuit file version {d.get('version')!r}")
        return cls(
            n_modes=int(d["n_modes"]),
            depth=int(d["depth"]),
            topology=d["topology"],
            boundary=d["boundary"],
            seed=int(d["seed"]),
            theta=d["theta"],
            phi=d["phi"],
            theta_bar=d.get("theta_bar"),
            phi_bar=d.get("phi_bar"),
        )

    def to_json(self):
        """Canonical JSON text: sorted keys, shortest round-trip float repr."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def digest(self):
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def _draw_phi(rng):
    x = rng.uniform(0.0, TWO_PI)
    return x - TWO_PI if x >= TWO_PI else x


def sample_circuit(n_modes, depth, topology="brickwork", boundary="periodic", seed=0):
    """Draw beamsplitter angles from numpy's PCG64 generator seeded with ``seed``.

    theta ~ normal(pi/4, pi/16) and phi ~ uniform[0, 2pi), drawn one scalar
    at a time: layer by layer, pair by pair, theta before phi. In a v_shaped
    layer the forward sweep is drawn first, then the barred sweep.
    """
    _validate_shape(n_modes, topology, boundary)
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    rng = np.random.Generator(np.random.PCG64(seed))
    theta, phi, theta_bar, phi_bar = [], [], [], []
    for l in range(depth):
        count = len(layer_pairs(n_modes, l, topology, boundary))
        t_row, p_row = [], []
        for _ in range(count):
            t_row.append(float(rng.normal(THETA_MEAN, THETA_STD)))
            p_row.append(float(_draw_phi(rng)))
        theta.append(t_row)
        phi.append(p_row)
        if topology == "v_shaped":
            tb_row, pb_row = [], []
            for _ in range(count):
                tb_row.append(float(rng.normal(THETA_MEAN, THETA_STD)))
                pb_row.append(float(_draw_phi(rng)))
            theta_bar.append(tb_row)
            phi_bar.append(pb_row)
    vs = topology == "v_shaped"
    return CircuitParams(
        n_modes=n_modes,
        depth=depth,
        topology=topology,
        boundary=boundary,
        seed=seed,
        theta=theta,
        phi=phi,
        theta_bar=theta_bar if vs else None,
        phi_bar=phi_bar if vs else None,
    )


def pair_transformation(theta, phi):
    """2x2 mode matrix V of BS(theta, phi): U^dag a_p^dag U = sum_q V[p, q] a_q^dag.

    The adjoint action on (a_j^dag, a_j'^dag) has generator
    K = [[0, -theta e^{i phi}], [theta e^{-i phi}, 0]] with K^2 = -theta^2 I,
    so exp(K) = cos(theta) I + sin(theta)/theta K in closed form.
    """
    c, s = math.cos(theta), math.sin(theta)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -e * s], [e.conjugate() * s, c]], dtype=np.complex128)


def _apply_pair(U, p, q, V):
    rp = U[p].copy()
    rq = U[q]
    U[p] = V[0, 0] * rp + V[0, 1] * rq
    U[q] = V[1, 0] * rp + V[1, 1] * rq


def _layer_elements(params, l):
    """Beamsplitters of layer l as (p, q, theta, phi) in written operator order."""
    pairs = layer_pairs(params.n_modes, l, params.topology, params.boundary)
    elems = [(p, q, params.theta[l][i], params.phi[l][i]) for i, (p, q) in enumerate(pairs)]
    if params.topology == "v_shaped":
        back = [(p, q, params.theta_bar[l][i], params.phi_bar[l][i]) for i, (p, q) in enumerate(pairs)]
        elems = elems + back[::-1]
    return elems


def layer_unitaries(params):
    """Mode matrices of the individual layers, layer 0 first."""
    out = []
    for l in range(params.depth):
        U = np.eye(params.n_modes, dtype=np.complex128)
        # written product X_1 X_2 ... X_m: apply X_m to the rows first
        for p, q, th, ph in reversed(_layer_elements(params, l)):
            _apply_pair(U, p, q, pair_transformation(th, ph))
        out.append(U)
    return out


def compose_unitary(params):
    """Mode unitary of the whole circuit, U = U_{d-1} ... U_0."""
    U = np.eye(params.n_modes, dtype=np.complex128)
    for l in range(params.depth):
        for p, q, th, ph in reversed(_layer_elements(params, l)):
            _apply_pair(U, p, q, pair_transformation(th, ph))
    return U


def haar_unitary(n, seed=None):
    """Haar-random n x n unitary (QR of a complex Ginibre matrix, phase-fixed)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def histogram_overlap(f, g):
    """(cosine similarity, raw dot product) of two frequency vectors."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    dot = float(f @ g)
    norm = float(np.linalg.norm(f) * np.linalg.norm(g))
    return (dot / norm if norm > 0 else 0.0), dot


@dataclass
class HaarOverlapReport:
    n_modes: int
    depth: int
    topology: str
    boundary: str
    realizations: int
    bins: int
    seed: int
    amplitude_overlap: float
    phase_overlap: float
    amplitude_dot: float
    phase_dot: float
    amplitude_edges: List[float] = field(repr=False)
    phase_edges: List[float] = field(repr=False)
    circuit_amplitude: List[float] = field(repr=False)
    haar_amplitude: List[float] = field(repr=False)
    circuit_phase: List[float] = field(repr=False)
    haar_phase: List[float] = field(repr=False)

    def summary(self):
        return (
            f"haar-test N={self.n_modes} d={self.depth} {self.topology}/{self.boundary}: "
            f"amplitude overlap {self.amplitude_overlap:.4f}, phase overlap {self.phase_overlap:.4f}"
        )


def _frequencies(values, bins, lo, hi):
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    return counts / counts.sum(), edges


def haar_overlap_test(n_modes, depth, realizations=1000, bins=50, topology="brickwork",
                      boundary="periodic", seed=0):
    """Compare element statistics of random circuit unitaries with Haar draws.

    Pools |U_jk| (histogrammed on [0, 1]) and arg U_jk (on [-pi, pi)) over
    all realizations for both ensembles and reports the cosine similarity
    of the normalized frequency vectors, plus their raw dot product.
    Realization i uses circuit seed ``circuit_seeds[i]`` and Haar seed
    ``haar_seeds[i]`` derived from ``seed`` through numpy's SeedSequence.
    topology="haar" replaces the circuits by an independent Haar ensemble
    (a self-consistency baseline).
    """
    if realizations < 100:
        raise ValueError(f"need at least 100 realizations, got {realizations}")
    if bins < 10:
        raise ValueError(f"need at least 10 bins, got {bins}")
    circuit_seeds = np.random.SeedSequence([seed, 0]).generate_state(realizations, np.uint64)
    haar_seeds = np.random.SeedSequence([seed, 1]).generate_state(realizations, np.uint64)
    circ = np.empty((realizations, n_modes, n_modes), dtype=np.complex128)
    haar = np.empty_like(circ)
    for i in range(realizations):
        if topology == "haar":
            circ[i] = haar_unitary(n_modes, int(circuit_seeds[i]))
        else:
            params = sample_circuit(n_modes, depth, topology, boundary, int(circuit_seeds[i]))
            circ[i] = compose_unitary(params)
        haar[i] = haar_unitary(n_modes, int(haar_seeds[i]))

    ca, a_edges = _frequencies(np.abs(circ).ravel(), bins, 0.0, 1.0)
    ha, _ = _frequencies(np.abs(haar).ravel(), bins, 0.0, 1.0)
    cp, p_edges = _frequencies(np.angle(circ).ravel(), bins, -math.pi, math.pi)
    hp, _ = _frequencies(np.angle(haar).ravel(), bins, -math.pi, math.pi)
    amp_cos, amp_dot = histogram_overlap(ca, ha)
    ph_cos, ph_dot = histogram_overlap(cp, hp)
    return HaarOverlapReport(
        n_modes=n_modes,
        depth=depth,
        topology=topology,
        boundary=boundary,
        realizations=realizations,
        bins=bins,
        seed=seed,
        amplitude_overlap=amp_cos,
        phase_overlap=ph_cos,
        amplitude_dot=amp_dot,
        phase_dot=ph_dot,
        amplitude_edges=a_edges.tolist(),
        phase_edges=p_edges.tolist(),
        circuit_amplitude=ca.tolist(),
        haar_amplitude=ha.tolist(),
        circuit_phase=cp.tolist(),
        haar_phase=hp.tolist(),
    )
