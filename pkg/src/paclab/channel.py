"""BI-AWGN channel model and per-bit-channel reliability estimates.

BPSK maps bit 0 to +1 and bit 1 to -1; the channel LLR is 2y/sigma^2, so the
all-zero LLR density is Gaussian with mean m = 2/sigma^2 and variance 2m.
Reliabilities come from mean-LLR density evolution: the variance-doubling
branch doubles the mean, the check branch goes through the phi function
phi(m) = 1 - E[tanh(L/2)], evaluated by Gauss-Hermite quadrature and
inverted by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(96)
_GH_WEIGHTS = _GH_WEIGHTS / np.sqrt(np.pi)

# Above this mean the check update is indistinguishable from its asymptote
# m - 4*ln(2); phi itself underflows near m ~ 3000.
_PHI_ASYMPTOTE_MEAN = 60.0
_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class ChannelParams:
    """Operating point of the BI-AWGN channel at a given code rate."""

    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must be in (0, 1]")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))

    @property
    def llr_mean(self) -> float:
        return 2.0 / self.sigma2


@dataclass(frozen=True)
class ChannelStats:
    """Per-bit-channel reliability quantities at one design point."""

    mean_llr: np.ndarray
    z: np.ndarray
    e0: np.ndarray
    capacity: np.ndarray

    @property
    def n_bits(self) -> int:
        return self.mean_llr.size


def _phi(m: np.ndarray) -> np.ndarray:
    """phi(m) = 1 - E[tanh(L/2)] for L ~ N(m, 2m); decreasing, phi(0) = 1."""
    m = np.asarray(m, dtype=np.float64)
    t = m[..., None] + 2.0 * np.sqrt(m)[..., None] * _GH_NODES
    return 1.0 - np.tanh(t / 2.0) @ _GH_WEIGHTS


def _phi_inv(target: float, hi: float) -> float:
    """Solve phi(x) = target for x in [0, hi] by bisection."""
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _phi(np.array(mid)) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_update(means: np.ndarray) -> np.ndarray:
    """Mean-LLR degradation through the check branch."""
    out = np.empty_like(means)
    for i, m in enumerate(means):
        if m <= 0.0:
            out[i] = 0.0
        elif m > _PHI_ASYMPTOTE_MEAN:
            out[i] = m - 4.0 * _LN2
        else:
            p = float(_phi(np.array(m)))
            out[i] = _phi_inv(p * (2.0 - p), m)
    return out


def _capacity_from_mean(means: np.ndarray) -> np.ndarray:
    """Mutual information of the Gaussian-LLR surrogate channel.

    I = 1 - E[log2(1 + exp(-L))] with L ~ N(m, 2m), by quadrature.
    """
    t = means[:, None] + 2.0 * np.sqrt(means)[:, None] * _GH_NODES
    bits = np.logaddexp(0.0, -t) / _LN2
    return np.clip(1.0 - bits @ _GH_WEIGHTS, 0.0, 1.0)


def gaussian_approximation(n_bits: int, design: ChannelParams) -> ChannelStats:
    """Mean-LLR density evolution over the polarization recursion.

    Index bit convention: the LSB of a bit-channel index selects the
    innermost transform, 0 for the check branch and 1 for the
    variance-doubling branch, so index 0 is the least reliable channel and
    index N-1 the most reliable.
    """
    n = int(n_bits)
    if n < 1 or n & (n - 1):
        raise ValueError("block length must be a power of two")
    if design.sigma2 <= 0.0:
        raise ValueError("noise variance must be positive")

    m = np.array([design.llr_mean], dtype=np.float64)
    while m.size < n:
        new = np.empty(2 * m.size, dtype=np.float64)
        new[0::2] = _check_update(m)
        new[1::2] = 2.0 * m
        m = new

    z = np.exp(-m / 4.0)
    e0 = 1.0 - np.log2(1.0 + z)
    capacity = _capacity_from_mean(m)
    return ChannelStats(mean_llr=m, z=z, e0=e0, capacity=capacity)


def polarized_profiles(stats: ChannelStats, profile) -> tuple:
    """Cumulative rate / cutoff-rate / capacity profiles over bit index.

    The rate profile assigns 1 to information positions and 0 to frozen
    ones, so its cumulative is the running information count.
    """
    bits = np.asarray(getattr(profile, "bits", profile), dtype=np.float64)
    if bits.size != stats.n_bits:
        raise ValueError("profile and channel stats lengths differ")
    cum_rate = np.cumsum(bits)
    cum_e0 = np.cumsum(stats.e0)
    cum_capacity = np.cumsum(stats.capacity)
    return cum_rate, cum_e0, cum_capacity


def check_finite_complexity(stats: ChannelStats, profile) -> bool:
    """Sequential-decoding feasibility: the cumulative rate must stay
    strictly below the cumulative cutoff rate wherever it is nonzero."""
    cum_rate, cum_e0, _ = polarized_profiles(stats, profile)
    active = cum_rate > 0
    return bool(np.all(cum_rate[active] < cum_e0[active]))
