"""The photonic hash: bits -> squeezed inputs -> interferometer -> digit parity."""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from .gaussian import correlation_stats_for_inputs, correlations_for_inputs
from .interferometer import CircuitParams, compose_unitary

__all__ = [
    "BitString",
    "HashConfig",
    "HashResult",
    "digit_extract",
    "digit_margin",
    "hash_message",
    "hash_details",
    "shot_noise_hash",
    "is_trivial_input",
]


@dataclass(frozen=True)
class BitString:
    """Fixed-length binary string. ``bits[j]`` is b_j; text is b_{N-1}...b_0."""

    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("empty bit string")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, text):
        text = text.strip()
        if not text or any(ch not in "01" for ch in text):
            raise ValueError(f"not a binary string: {text!r}")
        return cls(tuple(int(ch) for ch in reversed(text)))

    @classmethod
    def from_int(cls, value, n):
        if not 0 <= value < (1 << n):
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls(tuple((value >> j) & 1 for j in range(n)))

    def to_int(self):
        return sum(b << j for j, b in enumerate(self.bits))

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "".join(str(b) for b in reversed(self.bits))

    def __xor__(self, other):
        if len(self) != len(other):
            raise ValueError("length mismatch")
        return BitString(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def weight(self):
        return sum(self.bits)


def is_trivial_input(b):
    """All-zeros and all-ones messages should not be used in applications."""
    w = b.weight()
    return w == 0 or w == len(b)


@dataclass(frozen=True)
class HashConfig:
    """Circuit plus digit index k, squeezing amplitude and evaluation mode.

    ``shots`` = None selects exact evaluation; an integer selects
    shot-emulated evaluation with Gaussian noise seeded by ``noise_seed``.
    """

    circuit: CircuitParams
    k: int = 1
    r_on: float = 1.0
    shots: Optional[int] = None
    noise_seed: int = 0
    base: int = 10

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        if not self.r_on > 0:
            raise ValueError(f"r_on must be positive, got {self.r_on}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")

    @property
    def n_modes(self):
        return self.circuit.n_modes

    @property
    def mode(self):
        return "exact" if self.shots is None else "shot_emulated"

    @cached_property
    def unitary(self):
        U = compose_unitary(self.circuit)
        U.flags.writeable = False
        return U


def digit_extract(mu, k, base=10):
    """Parity of the k-th decimal digit of mu: floor(10^k mu) mod 2.

    Works elementwise on arrays.
    """
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(mu_arr < 0) or np.any(~np.isfinite(mu_arr)):
        raise ValueError("digit_extract needs finite non-negative values")
    out = np.floor(mu_arr * float(base) ** k).astype(np.int64) % 2
    return int(out) if out.ndim == 0 else out


def digit_margin(mu, k, base=10):
    """Distance of base^k mu to the nearest integer (a digit boundary)."""
    x = np.asarray(mu, dtype=float) * float(base) ** k
    return np.abs(x - np.rint(x))


def _check_message(cfg, b):
    if isinstance(b, str):
        b = BitString.from_str(b)
    if len(b) != cfg.n_modes:
        raise ValueError(f"message has {len(b)} bits, circuit has {cfg.n_modes} modes")
    return b


@dataclass
class HashResult:
    output: BitString
    mu: np.ndarray
    margin: float
    mode: str
    sigma: Optional[np.ndarray] = field(default=None)
    mu_noisy: Optional[np.ndarray] = field(default=None)


def hash_details(cfg, b):
    """Exact hash of ``b`` with the correlation vector and boundary margin."""
    b = _check_message(cfg, b)
    mu = correlations_for_inputs(cfg.unitary, [b.bits], cfg.r_on)[0]
    c = digit_extract(mu, cfg.k, cfg.base)
    margin = float(np.min(digit_margin(mu, cfg.k, cfg.base)))
    return HashResult(output=BitString(tuple(c)), mu=mu, margin=margin, mode="exact")


def hash_message(cfg, b):
    """c = Hash_{theta, phi, k}(b), evaluated from exact moments."""
    return hash_details(cfg, b).output


def shot_noise_hash(cfg, b, details=False):
    """Hash with each mu_j perturbed by normal(0, sigma_j / sqrt(shots)).

    Emulates finite-shot estimation (statistical error only). Noise is drawn
    from PCG64(noise_seed), one normal per mode in ascending j.
    """
    if cfg.shots is None:
        raise ValueError("shot_noise_hash needs a config with shots set")
    b = _check_message(cfg, b)
    mu, sigma = correlation_stats_for_inputs(cfg.unitary, [b.bits], cfg.r_on)
    mu, sigma = mu[0], sigma[0]
    rng = np.random.Generator(np.random.PCG64(cfg.noise_seed))
    noise = rng.standard_normal(mu.shape[0]) * sigma / math.sqrt(cfg.shots)
    noisy = np.maximum(mu + noise, 0.0)
    c = BitString(tuple(digit_extract(noisy, cfg.k, cfg.base)))
    if not details:
        return c
    margin = float(np.min(digit_margin(noisy, cfg.k, cfg.base)))
    return HashResult(output=c, mu=mu, margin=margin, mode="shot_emulated", sigma=sigma, mu_noisy=noisy)
