"""Closed-form and numeric Gaussian surprise math.

Everything in here is a pure function of its arguments.  The empirical
scale constant ``b`` is always an explicit parameter: passing
``b = KL_BITS`` (= 1/(2 ln 2)) makes the squared-SNR form an exact KL
divergence in bits, but callers fitting empirical data substitute their
own value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)

#: b-value for which the squared-SNR form equals the exact KL divergence.
KL_BITS = 1.0 / (2.0 * LN2)

#: Relative tolerance under which two sigmas count as "equal variance".
SIGMA_MATCH_RTOL = 1e-9


class SigmaMismatchError(ValueError):
    """Equal-variance form called with unequal sigmas."""


class GapCollapseError(ValueError):
    """Mean gap is non-positive: imminent or actual collision."""


@dataclass(frozen=True)
class GaussianBelief:
    """A (mean, standard deviation) belief on the task-outcome scale."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma}")


@dataclass(frozen=True)
class Snr:
    """Unsigned signal-to-noise ratio; direction lives upstream."""

    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"snr must be finite and >= 0, got {self.value}")


@dataclass(frozen=True)
class CapacityParams:
    """Intercept/slope of a log-law capacity model, both in bits."""

    a: float
    b: float


def _as_snr(snr: Snr | float) -> float:
    value = snr.value if isinstance(snr, Snr) else float(snr)
    if not (math.isfinite(value) and value >= 0):
        raise ValueError(f"snr must be finite and >= 0, got {value}")
    return value


def self_information(p: float) -> float:
    """Bits carried by a message of probability ``p``: -log2(p)."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"probability must be in (0, 1], got {p}")
    return -math.log2(p)


def kl_equal_variance(p: GaussianBelief, g: GaussianBelief, b: float) -> float:
    """b * ((mu_p - mu_g) / sigma_g)^2 for equal-sigma beliefs.

    With ``b = KL_BITS`` this is the exact KL divergence in bits.
    Raises SigmaMismatchError when sigmas differ beyond tolerance;
    use :func:`kl_unequal_variance` for that case.
    """
    if b <= 0:
        raise ValueError(f"b must be > 0, got {b}")
    if not math.isclose(p.sigma, g.sigma, rel_tol=SIGMA_MATCH_RTOL):
        raise SigmaMismatchError(
            f"sigma_p={p.sigma} != sigma_g={g.sigma}; use kl_unequal_variance"
        )
    snr = (p.mu - g.mu) / g.sigma
    return b * snr * snr


def kl_unequal_variance(p: GaussianBelief, g: GaussianBelief, b: float) -> float:
    """General Gaussian KL with the log variability-ratio term.

    b * ( log2(sg/sp) + ((mu_p-mu_g)^2 + sp^2) / (2 ln2 sg^2) - 1/(2 ln2) )

    With ``b = 1`` this is the exact KL divergence in bits.
    """
    if b <= 0:
        raise ValueError(f"b must be > 0, got {b}")
    gap = p.mu - g.mu
    return b * (
        math.log2(g.sigma / p.sigma)
        + (gap * gap + p.sigma * p.sigma) / (2.0 * LN2 * g.sigma * g.sigma)
        - 1.0 / (2.0 * LN2)
    )


def kl_numeric(
    p: GaussianBelief,
    g: GaussianBelief,
    half_width_sigmas: float = 12.0,
    steps: int = 65536,
) -> float:
    """Trapezoid quadrature of the KL integral, in bits.

    Verification oracle for the closed forms; accurate to well under
    1e-6 bits for |mu_p - mu_g| <= 10 sigma and sigma ratios in
    [0.25, 4] at the defaults.
    """
    if steps < 1000:
        raise ValueError(f"steps must be >= 1000, got {steps}")
    if half_width_sigmas < 8:
        raise ValueError(f"half_width_sigmas must be >= 8, got {half_width_sigmas}")
    w = half_width_sigmas * max(p.sigma, g.sigma)
    lo = min(p.mu, g.mu) - w
    hi = max(p.mu, g.mu) + w
    s = np.linspace(lo, hi, steps + 1)
    # log-densities avoid 0/0 in the far tails
    lp = -0.5 * ((s - p.mu) / p.sigma) ** 2 - math.log(p.sigma * math.sqrt(2 * math.pi))
    lg = -0.5 * ((s - g.mu) / g.sigma) ** 2 - math.log(g.sigma * math.sqrt(2 * math.pi))
    integrand = np.exp(lp) * (lp - lg) / LN2
    return float(np.trapezoid(integrand, s))


def capacity(snr: Snr | float, params: CapacityParams) -> float:
    """a + b * log2(snr + 1): processable surprise at a given SNR."""
    return params.a + params.b * math.log2(_as_snr(snr) + 1.0)


def avoidance_surprise(mean_gap: float, sigma_lead: float, b: float = 1.0) -> float:
    """b * (sigma_lead / mean_gap)^2 for a keep-away task.

    The ratio is reciprocal to the meeting-task SNR: the goal must stay
    distant, so the noise becomes the signal.
    """
    if mean_gap <= 0:
        raise GapCollapseError(f"mean gap must be > 0, got {mean_gap}")
    if sigma_lead < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma_lead}")
    r = sigma_lead / mean_gap
    return b * r * r


def error_bits_from_rate(p_error: float) -> float:
    """-log2(1 - p_error): the non-surprise of a failure, in bits."""
    if not (0.0 <= p_error < 1.0):
        raise ValueError(f"error rate must be in [0, 1), got {p_error}")
    return -math.log2(1.0 - p_error)


def error_rate_from_bits(bits: float) -> float:
    """Inverse of :func:`error_bits_from_rate`."""
    if bits < 0:
        raise ValueError(f"error bits must be >= 0, got {bits}")
    return 1.0 - 2.0 ** (-bits)


def hick_entropy(probs: list[float]) -> float:
    """Shannon entropy sum(p * log2(1/p)) of a normalized choice prior."""
    if not probs:
        raise ValueError("probs must be non-empty")
    for q in probs:
        if not (0.0 < q <= 1.0):
            raise ValueError(f"each probability must be in (0, 1], got {q}")
    if abs(sum(probs) - 1.0) > 1e-9:
        raise ValueError(f"probabilities must sum to 1, got {sum(probs)}")
    return float(sum(-q * math.log2(q) for q in probs))
