"""Exact simulator and benchmark harness for a Gaussian-boson-sampling hash."""

from ._backend import BACKEND
from .gaussian import (
    GaussianMoments,
    MomentEngineError,
    apply_interferometer,
    correlation_std,
    input_moments,
    three_mode_correlations,
    wick_expectation,
)
from .hashing import BitString, HashConfig, digit_extract, hash_message, shot_noise_hash
from .interferometer import (
    CircuitParams,
    compose_unitary,
    haar_overlap_test,
    haar_unitary,
    pair_transformation,
    sample_circuit,
)

from ._version import __version__
