"""Partial weight-spectrum estimation and union-bound BLER prediction.

The estimator feeds the list decoder a noiseless all-zero reception: every
channel LLR is the same positive constant.  Under min-sum combining the
path metric of any survivor is then exactly that constant times the weight
of its re-encoded codeword, so the kept list is the set of lowest-weight
codewords and tallying survivor weights yields the head of the weight
enumerator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .codec import CodeConfig, pac_encode_source_batch
from .decoders import scl_run_raw


@dataclass
class WeightSpectrum:
    """Sparse weight enumerator head: counts[d] = number of codewords of
    Hamming weight d found by a list of size list_size_used."""

    counts: dict
    list_size_used: int = 0

    def __post_init__(self):
        self.counts = {int(d): int(c) for d, c in self.counts.items() if c}

    def as_array(self, n_bits: int) -> np.ndarray:
        arr = np.zeros(n_bits + 1, dtype=np.int64)
        for d, c in self.counts.items():
            arr[d] = c
        return arr

    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, d: int) -> int:
        return self.counts.get(int(d), 0)


def min_weight(ws: WeightSpectrum) -> int:
    """Smallest nonzero weight with a positive count."""
    nonzero = [d for d, c in ws.counts.items() if d > 0 and c > 0]
    if not nonzero:
        raise ValueError("weight spectrum has no nonzero-weight entries")
    return min(nonzero)


def scl_survivor_pool(cfg: CodeConfig, list_size: int, llr_mag: float = 1.0,
                      f_mode: str = "minsum"):
    """Survivors of a noiseless all-zero list run: (source rows, codeword
    weights).  list_size is clamped to the codebook size 2^K."""
    if list_size < 2:
        raise ValueError("list size must be at least 2")
    if llr_mag <= 0:
        raise ValueError("noiseless LLR magnitude must be positive")
    if cfg.k_bits < 63:
        list_size = min(int(list_size), 1 << cfg.k_bits)
    chan = np.full(cfg.n_bits, float(llr_mag))
    vh, _, _ = scl_run_raw(chan, cfg, list_size, split_set=None, f_mode=f_mode)
    weights = pac_encode_source_batch(vh, cfg).sum(axis=1).astype(np.int64)
    return vh, weights


def estimate_spectrum(cfg: CodeConfig, list_size: int, llr_mag: float = 1.0,
                      f_mode: str = "minsum") -> WeightSpectrum:
    """Tally codeword weights over the survivors of a noiseless list run."""
    _, weights = scl_survivor_pool(cfg, list_size, llr_mag, f_mode)
    d, c = np.unique(weights, return_counts=True)
    return WeightSpectrum(
        counts={int(k): int(v) for k, v in zip(d, c)},
        list_size_used=min(int(list_size), 1 << cfg.k_bits) if cfg.k_bits < 63
        else int(list_size),
    )


def _qfunc(x):
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / np.sqrt(2.0))


def union_bound(ws: WeightSpectrum, rate: float, ebn0_db: float,
                single_term: bool = False) -> float:
    """Maximum-likelihood BLER upper estimate sum_d A_d Q(sqrt(2 d R Eb/N0)).

    With single_term=True only the minimum-weight term is evaluated.
    """
    if not ws.counts:
        raise ValueError("weight spectrum is empty")
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    entries = sorted((d, c) for d, c in ws.counts.items() if d > 0 and c > 0)
    if not entries:
        return 0.0
    if single_term:
        entries = entries[:1]
    d = np.array([e[0] for e in entries], dtype=np.float64)
    a = np.array([e[1] for e in entries], dtype=np.float64)
    return float(np.sum(a * _qfunc(np.sqrt(2.0 * d * rate * ebn0))))
