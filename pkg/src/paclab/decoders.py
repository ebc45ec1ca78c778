"""Decoders for PAC codes: SC, list (SCL), split-restricted SCL and the
sequential (Fano) decoder, all instrumented with sort / visit counts.

The list decoder extends every path with v=0 on frozen indices.  On
information indices in the split set each path forks into both children;
on informational indices outside the split set the path follows the sign
of the decision LLR without forking.  When the fork exceeds the list size
the L best metrics survive and one sort operation is counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .codec import CodeConfig, message_extract

DEFAULT_LLR_CLAMP = 1.0e6

STATUS_OK = "ok"
STATUS_BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class DecodeResult:
    d_hat: np.ndarray
    v_hat: np.ndarray
    metric: float
    sort_ops: int = 0
    anv: int = 0
    list_rank: int = 0
    status: str = STATUS_OK


@dataclass
class FanoConfig:
    """Sequential decoder knobs: threshold spacing, per-index metric bias
    (0 <= bias <= bit-channel capacity; the cutoff rate is the usual pick)
    and the node-visit budget."""

    bias: np.ndarray
    delta: float = 2.0
    max_visits: int = 2_000_000

    def __post_init__(self):
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float64)
        if self.delta <= 0:
            raise ValueError("threshold spacing must be positive")
        if self.max_visits < 1:
            raise ValueError("visit budget must be at least 1")

    @classmethod
    def from_stats(cls, stats, delta: float = 2.0,
                   max_visits: int = 2_000_000) -> "FanoConfig":
        """Bias each index by its bit-channel cutoff rate."""
        return cls(bias=stats.e0, delta=delta, max_visits=max_visits)


def _clamp_llrs(llrs, clamp):
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    return np.clip(llrs, -clamp, clamp)


def _split_mask(cfg: CodeConfig, split_set) -> np.ndarray:
    info = cfg.info_mask()
    if split_set is None:
        return info.copy()
    idx = np.unique(np.asarray(list(split_set), dtype=np.int64))
    mask = np.zeros(cfg.n_bits, dtype=np.int8)
    if idx.size:
        if idx[0] < 0 or idx[-1] >= cfg.n_bits:
            raise ValueError("split indices out of range")
        mask[idx] = 1
    if np.any(mask & ~info):
        raise ValueError("split set must be a subset of the information set")
    return mask


def scl_run_raw(llrs, cfg: CodeConfig, list_size: int, split_set=None,
                f_mode: str = "exact", clamp: float = DEFAULT_LLR_CLAMP):
    """Run the list decoder and return the full surviving list:
    (v_hat rows, path metrics, sort_ops), stable-sorted by metric."""
    if list_size < 1:
        raise ValueError("list size must be at least 1")
    if f_mode not in ("exact", "minsum"):
        raise ValueError("f_mode must be 'exact' or 'minsum'")
    llrs = _clamp_llrs(llrs, clamp)
    if llrs.size != cfg.n_bits:
        raise ValueError(f"expected {cfg.n_bits} channel LLRs, got {llrs.size}")
    be = _kernels.active_backend()
    return be.scl_run(
        llrs,
        cfg.info_mask(),
        _split_mask(cfg, split_set),
        cfg.conv.taps_mask() >> 1,
        (1 << cfg.conv.memory) - 1,
        int(list_size),
        f_mode == "exact",
    )


def scl_decode(llrs, cfg: CodeConfig, list_size: int, split_set=None,
               f_mode: str = "exact", clamp: float = DEFAULT_LLR_CLAMP) -> DecodeResult:
    """List decode; the smallest-metric path of the final list wins."""
    vh, pm, sort_ops = scl_run_raw(llrs, cfg, list_size, split_set, f_mode, clamp)
    v_best = vh[0]
    return DecodeResult(
        d_hat=message_extract(v_best, cfg),
        v_hat=v_best.copy(),
        metric=float(pm[0]),
        sort_ops=int(sort_ops),
        anv=cfg.n_bits,
        list_rank=0,
    )


def sc_decode(llrs, cfg: CodeConfig, f_mode: str = "exact",
              clamp: float = DEFAULT_LLR_CLAMP) -> DecodeResult:
    """Successive cancellation = single non-forking path."""
    return scl_decode(llrs, cfg, 1, split_set=(), f_mode=f_mode, clamp=clamp)


def fano_decode(llrs, cfg: CodeConfig, fano_cfg: FanoConfig,
                f_mode: str = "exact", clamp: float = DEFAULT_LLR_CLAMP) -> DecodeResult:
    """Depth-first threshold search over the code tree."""
    llrs = _clamp_llrs(llrs, clamp)
    if llrs.size != cfg.n_bits:
        raise ValueError(f"expected {cfg.n_bits} channel LLRs, got {llrs.size}")
    if fano_cfg.bias.size != cfg.n_bits:
        raise ValueError("bias vector length must equal the block length")
    be = _kernels.active_backend()
    vh, metric, visits, status = be.fano_run(
        llrs,
        cfg.info_mask(),
        cfg.conv.taps_mask() >> 1,
        (1 << cfg.conv.memory) - 1,
        fano_cfg.bias,
        float(fano_cfg.delta),
        int(fano_cfg.max_visits),
        f_mode == "exact",
    )
    return DecodeResult(
        d_hat=message_extract(vh, cfg),
        v_hat=np.asarray(vh, dtype=np.int8),
        metric=float(metric),
        sort_ops=0,
        anv=int(visits),
        list_rank=0,
        status=STATUS_OK if status == 0 else STATUS_BUDGET_EXHAUSTED,
    )


# ---------------------------------------------------------------------------
# reference SC decision LLR (recursive, exact log-domain)
# ---------------------------------------------------------------------------

def _soft_xor_vec(a, b, exact):
    if exact:
        return np.logaddexp(0.0, a + b) - np.logaddexp(a, b)
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def sc_decision_llr(chan_llrs, prior_u, f_mode: str = "exact") -> float:
    """Decision LLR of bit i = len(prior_u) given earlier transform-domain
    decisions, computed by direct recursion on the code halves.

    Independent of the array kernels; used as their reference.
    """
    from .codec import polar_transform

    llrs = np.asarray(chan_llrs, dtype=np.float64)
    prior_u = np.asarray(prior_u, dtype=np.int8)
    exact = f_mode == "exact"
    if llrs.size == 1:
        return float(llrs[0])
    h = llrs.size // 2
    if prior_u.size < h:
        return sc_decision_llr(
            _soft_xor_vec(llrs[:h], llrs[h:], exact), prior_u, f_mode)
    left_cw = polar_transform(prior_u[:h])
    g = llrs[h:] + (1.0 - 2.0 * left_cw) * llrs[:h]
    return sc_decision_llr(g, prior_u[h:], f_mode)
