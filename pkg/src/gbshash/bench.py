"""Security and cost diagnostics of the hash over its full input space.

All analyses work on a :class:`HashTable`, the exact hash of every one of
the 2^N messages in index order (row i hashes the binary encoding of i).
"""

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ._version import __version__
from ._backend import BACKEND
from .gaussian import correlation_stats_for_inputs, correlations_for_inputs
from .hashing import HashConfig, digit_extract

__all__ = [
    "HashTable",
    "BenchReport",
    "EnumerationCapError",
    "enumeration_cap",
    "enumerate_hashes",
    "confusion_report",
    "diffusion_report",
    "collision_report",
    "collision_scaling",
    "percentile_report",
    "shot_budget",
    "shot_count",
    "sample_inputs",
]

REPORT_SCHEMA = "gbshash-report/1"
DEFAULT_CAP = 16
DEFAULT_SAMPLE = 4096


class EnumerationCapError(ValueError):
    """The requested table exceeds the enumeration cap."""


def enumeration_cap():
    return int(os.environ.get("GBSHASH_ENUM_CAP", DEFAULT_CAP))


def _bit_matrix(values, n):
    values = np.asarray(values, dtype=np.int64)
    return ((values[:, None] >> np.arange(n)) & 1).astype(np.int8)


def _pack(bits):
    return (bits.astype(np.int64) << np.arange(bits.shape[1])).sum(axis=1)


@dataclass
class HashTable:
    """Exact hashes of all 2^N inputs; ``outputs[i]`` is Hash(i) as an integer."""

    n_modes: int
    k: int
    outputs: np.ndarray
    mu: Optional[np.ndarray] = field(default=None, repr=False)
    circuit_digest: str = ""
    r_on: float = 1.0
    base: int = 10

    def __post_init__(self):
        self.outputs = np.asarray(self.outputs, dtype=np.int64)
        if self.outputs.shape != (1 << self.n_modes,):
            raise ValueError(f"table for N={self.n_modes} needs {1 << self.n_modes} rows")

    @property
    def inputs(self):
        return np.arange(1 << self.n_modes, dtype=np.int64)

    def with_k(self, k):
        """Same circuit and correlations, different digit index."""
        if self.mu is None:
            raise ValueError("table was built without correlations")
        outputs = _pack(digit_extract(self.mu, k, self.base))
        return HashTable(self.n_modes, k, outputs, self.mu, self.circuit_digest, self.r_on, self.base)


@dataclass
class BenchReport:
    """Results of one analysis, with the run configuration in ``header``."""

    kind: str
    header: Dict = field(default_factory=dict)
    D: Optional[float] = None
    D_std: Optional[float] = None
    hamming_histogram: Optional[List[int]] = None
    L: Optional[List[int]] = None
    Pj: Optional[List[float]] = None
    H1: Optional[float] = None
    H2: Optional[float] = None
    N_bound: Optional[float] = None
    N_attack_interval: Optional[List[float]] = None
    occurrence_histogram: Optional[Dict[int, int]] = None
    multiplicity_histogram: Optional[Dict[int, int]] = None
    percentiles: Optional[Dict[float, float]] = None
    k_by_x: Optional[Dict[float, Optional[int]]] = None
    k_recommended: Optional[int] = None
    sigma_max: Optional[float] = None
    N_shot_max: Optional[int] = None
    pool_size: Optional[int] = None
    extra: Dict = field(default_factory=dict)
    tables: Dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        out = {"schema": REPORT_SCHEMA}
        for name, value in self.__dict__.items():
            if value is None or name == "tables" or (name == "extra" and not value):
                continue
            out[name] = _plain(value)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def series(self):
        """Flat tables for plotting: name -> (column names, rows)."""
        tables = {}
        if self.hamming_histogram is not None:
            tables["hamming_histogram"] = (["distance", "count"], list(enumerate(self.hamming_histogram)))
        if self.L is not None:
            tables["bit_flips"] = (["position", "L", "P"], [(j, l, p) for j, (l, p) in enumerate(zip(self.L, self.Pj))])
        if self.occurrence_histogram is not None:
            tables["occurrences"] = (["hash_value", "count"], sorted(self.occurrence_histogram.items()))
        if self.multiplicity_histogram is not None:
            tables["multiplicity"] = (["multiplicity", "hash_values"], sorted(self.multiplicity_histogram.items()))
        if self.percentiles is not None:
            tables["percentiles"] = (["x", "mu_th", "k"], [(x, v, self.k_by_x.get(x)) for x, v in sorted(self.percentiles.items())])
        tables.update(self.tables)
        return tables

    def write(self, out_dir, stem=None):
        """Write ``<stem>.json`` plus one ``<stem>_<series>.csv`` per table."""
        stem = stem or self.kind
        os.makedirs(out_dir, exist_ok=True)
        paths = [os.path.join(out_dir, f"{stem}.json")]
        with open(paths[0], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())
        for name, (cols, rows) in self.series().items():
            path = os.path.join(out_dir, f"{stem}_{name}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(cols)
                writer.writerows(rows)
            paths.append(path)
        return paths


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _header(table_or_cfg, **flags):
    h = {"code_version": __version__, "backend": BACKEND}
    if isinstance(table_or_cfg, HashConfig):
        h.update(circuit_digest=table_or_cfg.circuit.digest(), k=table_or_cfg.k,
                 n_modes=table_or_cfg.n_modes, r_on=table_or_cfg.r_on)
    elif isinstance(table_or_cfg, HashTable):
        h.update(circuit_digest=table_or_cfg.circuit_digest, k=table_or_cfg.k,
                 n_modes=table_or_cfg.n_modes, r_on=table_or_cfg.r_on)
    h["flags"] = flags
    return h


def enumerate_hashes(cfg, force=False, keep_mu=True, nthreads=None):
    """Exact hash of every N-bit input, rows in index order."""
    N = cfg.n_modes
    cap = enumeration_cap()
    if N > cap and not force:
        raise EnumerationCapError(f"N = {N} exceeds the enumeration cap {cap}; pass force to override")
    bits = _bit_matrix(np.arange(1 << N), N)
    mu = correlations_for_inputs(cfg.unitary, bits, cfg.r_on, nthreads)
    outputs = _pack(digit_extract(mu, cfg.k, cfg.base))
    return HashTable(N, cfg.k, outputs, mu if keep_mu else None, cfg.circuit.digest(), cfg.r_on, cfg.base)


def _entropy_bits(p):
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def _distance_stats(x, y, n):
    """Hamming statistics of paired integer-coded strings x, y."""
    diff = _bit_matrix(np.bitwise_xor(x, y), n)
    d = diff.sum(axis=1).astype(np.int64)
    hist = np.bincount(d, minlength=n + 1)
    L = diff.sum(axis=0).astype(np.int64)
    total = int(L.sum())
    if total:
        P = L / total
        H1 = _entropy_bits(P) / math.log2(n) if n > 1 else 1.0
    else:
        P = np.zeros(n)
        H1 = 0.0
    D = 2.0 * float(d.sum()) / (n * d.shape[0])
    D_std = float(np.std(d / (n / 2.0)))
    return dict(D=D, D_std=D_std, hamming_histogram=hist.tolist(), L=L.tolist(), Pj=P.tolist(), H1=H1)


def confusion_report(table):
    """Input/output Hamming distance and flip-position entropy over all rows.

    D = (2/N) mean_i d(b_i, c_i); H1 is the Shannon entropy of the flip
    distribution P_j = L_j / sum L, normalized by log2 N. D_std is the
    population standard deviation of d / (N/2).
    """
    stats = _distance_stats(table.inputs, table.outputs, table.n_modes)
    return BenchReport(kind="confusion", header=_header(table), **stats)


def diffusion_report(source, flip_seed=0):
    """Avalanche test: hash b and b with one random bit flipped, for every b.

    The flipped position for input i is the i-th draw of
    PCG64(flip_seed).integers(0, N, size=2^N). ``source`` is a HashTable or
    a HashConfig (enumerated first).
    """
    table = source if isinstance(source, HashTable) else enumerate_hashes(source)
    N = table.n_modes
    rng = np.random.Generator(np.random.PCG64(flip_seed))
    pos = rng.integers(0, N, size=1 << N)
    flipped = table.inputs ^ (np.int64(1) << pos)
    stats = _distance_stats(table.outputs, table.outputs[flipped], N)
    return BenchReport(kind="diffusion", header=_header(table, flip_seed=flip_seed), **stats)


def collision_report(table):
    """Collision entropy of the output multiset and the birthday bound.

    H2 = -(1/N) log2 sum_h P_h^2 and N_bound = 2^(H2 N / 2); a collision
    search needs between 0.7 N_bound and 2 N_bound attempts.
    """
    N = table.n_modes
    values, counts = np.unique(table.outputs, return_counts=True)
    p = counts / float(1 << N)
    H2 = -math.log2(float(np.sum(p * p))) / N
    bound = 2.0 ** (H2 * N / 2.0)
    mult_vals, mult_counts = np.unique(counts, return_counts=True)
    return BenchReport(
        kind="collision",
        header=_header(table),
        H2=H2,
        N_bound=bound,
        N_attack_interval=[0.7 * bound, 2.0 * bound],
        occurrence_histogram={int(v): int(c) for v, c in zip(values, counts)},
        multiplicity_histogram={int(m): int(c) for m, c in zip(mult_vals, mult_counts)},
        extra={"distinct_outputs": int(values.size)},
    )


def collision_scaling(n_values, bounds):
    """Least-squares slope of log2 N_bound against N, with its standard error."""
    x = np.asarray(n_values, dtype=float)
    y = np.log2(np.asarray(bounds, dtype=float))
    coef, cov = np.polyfit(x, y, 1, cov=True) if x.size > 2 else (np.polyfit(x, y, 1), np.zeros((2, 2)))
    return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))


def sample_inputs(n_modes, sample=None, seed=0):
    """Input indices to pool over: all of them, or a seeded uniform sample.

    Sampling is without replacement from PCG64(seed); a sample at least as
    large as 2^N returns every input in index order.
    """
    total = 1 << n_modes
    if sample is None or sample >= total:
        return np.arange(total, dtype=np.int64)
    if sample < 1:
        raise ValueError(f"sample size must be positive, got {sample}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return np.sort(rng.choice(total, size=sample, replace=False)).astype(np.int64)


def _percentile(sorted_desc, x):
    count = sorted_desc.size
    rank = max(1, math.ceil(x * count - 1e-12))
    return float(sorted_desc[rank - 1])


def _k_for(mu_th):
    if mu_th <= 0:
        return None
    return int(math.ceil(-math.log10(mu_th)))


def percentile_report(source, xs=(0.9, 0.95, 0.99), sample=None, sample_seed=0, x_select=0.9, mu=None):
    """Upper percentiles mu_x^th of the pooled correlations and the implied k.

    mu_x^th is the ceil(x * count)-th largest pooled value, i.e. the largest
    mu with a fraction >= x of (j, b) pairs at or above it; k =
    ceil(-log10 mu_x^th). ``k_recommended`` uses ``x_select`` (or the first
    x when it is absent). ``source`` is a HashTable carrying mu or a
    HashConfig; ``mu`` may also be passed directly as a pool.
    """
    for x in xs:
        if not 0 < x <= 1:
            raise ValueError(f"confidence level must lie in (0, 1], got {x}")
    if mu is not None:
        pool = np.asarray(mu, dtype=float).ravel()
        header = {"code_version": __version__, "flags": {}}
    elif isinstance(source, HashTable) and source.mu is not None and sample is None:
        pool = source.mu.ravel()
        header = _header(source)
    else:
        cfg = source
        idx = sample_inputs(cfg.n_modes, sample, sample_seed)
        pool = correlations_for_inputs(cfg.unitary, _bit_matrix(idx, cfg.n_modes), cfg.r_on).ravel()
        header = _header(cfg)
    if pool.size == 0:
        raise ValueError("empty correlation pool")
    header["flags"] = dict(header.get("flags", {}), sample=sample, sample_seed=sample_seed, xs=list(xs))
    ordered = np.sort(pool)[::-1]
    percentiles = {float(x): _percentile(ordered, x) for x in xs}
    k_by_x = {x: _k_for(v) for x, v in percentiles.items()}
    pick = float(x_select) if float(x_select) in percentiles else float(xs[0])
    return BenchReport(
        kind="percentiles",
        header=header,
        percentiles=percentiles,
        k_by_x=k_by_x,
        k_recommended=k_by_x[pick],
        pool_size=int(pool.size),
        extra={"x_select": pick, "pool_min": float(ordered[-1]), "pool_max": float(ordered[0])},
    )


def shot_count(sigma_max, z, k):
    """Shots needed so that z * sigma_max / sqrt(shots) <= 10^-k, rounded up."""
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    return int(math.ceil((z * z) * (10.0 ** (2 * k)) * (sigma_max * sigma_max)))


def shot_budget(source, z=2.0, k=1, sample="auto", sample_seed=0, sigma_max=None):
    """Worst-case shot count N_shot^max = z^2 10^(2k) sigma_max^2.

    sigma_max is the largest correlation_std over the pooled (j, b) pairs.
    With sample="auto" the pool is exhaustive for N <= 12 and a seeded
    sample of 4096 inputs above that. Passing ``sigma_max`` skips the pool.
    """
    extra = {}
    if sigma_max is None:
        cfg = source
        N = cfg.n_modes
        if sample == "auto":
            sample = None if N <= 12 else DEFAULT_SAMPLE
        idx = sample_inputs(N, sample, sample_seed)
        _, sigma = correlation_stats_for_inputs(cfg.unitary, _bit_matrix(idx, N), cfg.r_on)
        flat = int(np.argmax(sigma))
        row, j = divmod(flat, N)
        sigma_max = float(sigma.ravel()[flat])
        extra = {"argmax_input": int(idx[row]), "argmax_mode": int(j), "sample_size": int(idx.size)}
        header = _header(cfg, z=z, k=k, sample=sample, sample_seed=sample_seed)
    else:
        header = {"code_version": __version__, "flags": {"z": z, "k": k, "sigma_max": sigma_max}}
    return BenchReport(
        kind="shots",
        header=header,
        sigma_max=sigma_max,
        N_shot_max=shot_count(sigma_max, z, k),
        extra=dict(extra, z=z, k=k, epsilon=10.0 ** (-k)),
    )
