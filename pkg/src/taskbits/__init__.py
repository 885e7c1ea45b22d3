"""Information-throughput models of simple interactive tasks.

Gaussian surprise math, the classic speed-accuracy laws expressed on a
shared SNR scale, a deterministic car-following simulator, a
windowed-measurement pipeline with capacity and error regressions, and
a live streaming service for online measurement.
"""

from .surprise import (
    KL_BITS,
    CapacityParams,
    GaussianBelief,
    Snr,
    avoidance_surprise,
    capacity,
    error_bits_from_rate,
    hick_entropy,
    kl_equal_variance,
    kl_numeric,
    kl_unequal_variance,
    self_information,
)

__version__ = "0.1.0"

__all__ = [
    "KL_BITS",
    "CapacityParams",
    "GaussianBelief",
    "Snr",
    "avoidance_surprise",
    "capacity",
    "error_bits_from_rate",
    "hick_entropy",
    "kl_equal_variance",
    "kl_numeric",
    "kl_unequal_variance",
    "self_information",
    "__version__",
]
