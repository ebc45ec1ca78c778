"""Rate-profile and critical-set constructions.

Profiles are grown from the RM-score partition: the initial set holds every
index whose score (index popcount) exceeds the threshold, and the optional
set holds the threshold-score indices from which the remaining information
positions are picked, either by channel reliability (RM-polar) or by a
beam search over partial weight spectra (list-search).

Critical sets restrict where the list decoder is allowed to fork: the
complete set is the threshold-score slice of the information set, and the
reduced ladder greedily keeps the indices that touch the most low-weight
codewords.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .channel import ChannelParams, check_finite_complexity, gaussian_approximation
from .codec import CodeConfig, ConvPolynomial, RateProfile
from .spectrum import WeightSpectrum, scl_survivor_pool


def rm_score(i: int, n: int | None = None) -> int:
    """Popcount of the bit-channel index; log2 of its generator row weight."""
    if i < 0 or (n is not None and i >= (1 << n)):
        raise ValueError("index out of range")
    return bin(i).count("1")


def _scores(n_bits: int) -> np.ndarray:
    idx = np.arange(n_bits, dtype=np.int64)
    s = np.zeros(n_bits, dtype=np.int64)
    while np.any(idx):
        s += idx & 1
        idx >>= 1
    return s


def _score_tail(n: int, r: int) -> int:
    """Number of indices with score >= r among 0..2^n-1."""
    return sum(comb(n, q) for q in range(max(r, 0), n + 1))


@dataclass(frozen=True)
class RmPartition:
    """Score-threshold split of the index range for a target (N, K)."""

    n_bits: int
    k_bits: int
    r: int
    initial_set: np.ndarray
    optional_set: np.ndarray

    @property
    def generalized_set(self) -> np.ndarray:
        return np.sort(np.concatenate([self.initial_set, self.optional_set]))

    @property
    def is_exact(self) -> bool:
        return self.initial_set.size == self.k_bits


def rm_partition(n_bits: int, k_bits: int) -> RmPartition:
    """Find the threshold r with tail(r+1) <= K < tail(r); the initial set
    is every index scoring above r and the optional set the score-r slice."""
    n = int(n_bits).bit_length() - 1
    if n_bits != 1 << n:
        raise ValueError("block length must be a power of two")
    if not 1 <= k_bits <= n_bits:
        raise ValueError("K must be in [1, N]")
    scores = _scores(n_bits)
    if k_bits == n_bits:
        return RmPartition(n_bits, k_bits, -1,
                           np.arange(n_bits, dtype=np.int64),
                           np.empty(0, dtype=np.int64))
    r = next(r for r in range(n + 1)
             if _score_tail(n, r + 1) <= k_bits < _score_tail(n, r))
    return RmPartition(
        n_bits, k_bits, r,
        np.flatnonzero(scores > r).astype(np.int64),
        np.flatnonzero(scores == r).astype(np.int64),
    )


def rm_profile(n_bits: int, k_bits: int) -> RateProfile:
    """RM rate profile; only exists when K is a score-tail sum."""
    part = rm_partition(n_bits, k_bits)
    if not part.is_exact:
        raise ValueError(
            f"no RM profile for N={n_bits}, K={k_bits}; nearest exact sizes "
            f"are {part.initial_set.size} and {part.generalized_set.size}")
    return RateProfile.from_info_set(part.initial_set, n_bits)


def rm_polar_profile(n_bits: int, k_bits: int, stats) -> RateProfile:
    """Take the whole above-threshold set, then fill the remaining slots
    from the threshold slice in decreasing channel reliability."""
    part = rm_partition(n_bits, k_bits)
    if part.is_exact:
        return RateProfile.from_info_set(part.initial_set, n_bits)
    if stats is None:
        raise ValueError("channel stats are required when K is not an exact RM size")
    if stats.n_bits != n_bits:
        raise ValueError("channel stats length must equal the block length")
    need = k_bits - part.initial_set.size
    order = np.argsort(-stats.mean_llr[part.optional_set], kind="stable")
    chosen = part.optional_set[order[:need]]
    return RateProfile.from_info_set(
        np.concatenate([part.initial_set, chosen]), n_bits)


# ---------------------------------------------------------------------------
# list-search metric
# ---------------------------------------------------------------------------

def _metric_vec(m, length: int) -> np.ndarray:
    if isinstance(m, WeightSpectrum):
        return m.as_array(length - 1)
    arr = np.zeros(length, dtype=np.int64)
    a = np.asarray(m, dtype=np.int64)
    arr[:a.size] = a
    return arr


def _metric_len(m) -> int:
    if isinstance(m, WeightSpectrum):
        return max(m.counts) + 1 if m.counts else 1
    return len(m)


def ls_metric_compare(a, b) -> int:
    """Lexicographic order on weight-count vectors, lowest weight first.

    Returns -1/0/+1; a larger metric means more low-weight codewords, so
    smaller is the better profile.
    """
    length = max(_metric_len(a), _metric_len(b))
    va = _metric_vec(a, length)
    vb = _metric_vec(b, length)
    for x, y in zip(va, vb):
        if x != y:
            return -1 if x < y else 1
    return 0


# ---------------------------------------------------------------------------
# survivor-pool support aggregation
# ---------------------------------------------------------------------------

def _aggregate_pool(sup: np.ndarray, weights: np.ndarray, n_bits: int):
    """Unique support patterns with summed weight histograms."""
    touching = sup.any(axis=1)
    sup = sup[touching]
    w = weights[touching]
    if sup.shape[0] == 0:
        pats = np.zeros((0, sup.shape[1]), dtype=bool)
        hists = np.zeros((0, n_bits + 1), dtype=np.int64)
        return pats, hists
    pats, inv = np.unique(sup, axis=0, return_inverse=True)
    hists = np.zeros((pats.shape[0], n_bits + 1), dtype=np.int64)
    np.add.at(hists, (inv, w), 1)
    return pats, hists


# ---------------------------------------------------------------------------
# list-search construction
# ---------------------------------------------------------------------------

def ls_construct(n_bits: int, k_bits: int, conv: ConvPolynomial,
                 list_size: int, search_size: int, design_snr_db: float,
                 keep_duplicates: bool = False, llr_mag: float = 1.0,
                 f_mode: str = "minsum") -> RateProfile:
    """Beam search over optional-index subsets, scored by the partial weight
    spectrum of the generalized code's survivor pool.

    One list run over the generalized set supplies the survivors; a node's
    metric accumulates, per weight, the survivors whose support lies inside
    the node's information set (each counted once, when its last optional
    index joins).  Rounds keep the search_size smallest metrics, dropping
    duplicates (unless keep_duplicates) and candidates whose cumulative
    rate profile reaches the cutoff-rate profile at the design SNR.
    """
    part = rm_partition(n_bits, k_bits)
    if part.is_exact:
        return RateProfile.from_info_set(part.initial_set, n_bits)
    if search_size < 1:
        raise ValueError("search list size must be at least 1")

    opt = part.optional_set
    B = opt.size
    cfg_gen = CodeConfig(n_bits, part.generalized_set, conv)
    pool_v, pool_w = scl_survivor_pool(cfg_gen, list_size, llr_mag, f_mode)
    pats, hists = _aggregate_pool(pool_v[:, opt].astype(bool), pool_w, n_bits)

    stats = gaussian_approximation(
        n_bits, ChannelParams(design_snr_db, k_bits / n_bits))
    cum_e0 = np.cumsum(stats.e0)
    initial_bits = np.zeros(n_bits, dtype=np.int64)
    initial_bits[part.initial_set] = 1

    def feasible(mask: np.ndarray) -> bool:
        bits = initial_bits.copy()
        bits[opt[mask]] = 1
        cum_rate = np.cumsum(bits)
        active = cum_rate > 0
        return bool(np.all(cum_rate[active] < cum_e0[active]))

    def tally(mask: np.ndarray, beta: int) -> np.ndarray:
        if pats.shape[0] == 0:
            return np.zeros(n_bits + 1, dtype=np.int64)
        inside = ~np.any(pats & ~mask, axis=1)
        sel = inside & pats[:, beta]
        return hists[sel].sum(axis=0)

    # root nodes: one optional index each
    nodes = []
    for l in range(B):
        mask = np.zeros(B, dtype=bool)
        mask[l] = True
        nodes.append((mask, tally(mask, l)))
    nodes = [nd for nd in nodes if feasible(nd[0])]
    if not nodes:
        raise RuntimeError(
            "every candidate violates the finite-complexity condition; "
            "raise the design SNR")
    nodes.sort(key=lambda nd: tuple(nd[1]))
    nodes = nodes[:search_size]

    for _ in range(k_bits - part.initial_set.size - 1):
        children = []
        for mask, metric in nodes:
            for beta in range(B):
                if not mask[beta]:
                    child = mask.copy()
                    child[beta] = True
                    children.append((child, metric + tally(child, beta)))
        if not keep_duplicates:
            seen = set()
            unique = []
            for child, metric in children:
                key = child.tobytes()
                if key not in seen:
                    seen.add(key)
                    unique.append((child, metric))
            children = unique
        children = [nd for nd in children if feasible(nd[0])]
        if not children:
            raise RuntimeError(
                "every candidate violates the finite-complexity condition; "
                "raise the design SNR")
        children.sort(key=lambda nd: tuple(nd[1]))
        nodes = children[:search_size]

    best_mask = nodes[0][0]
    return RateProfile.from_info_set(
        np.concatenate([part.initial_set, opt[best_mask]]), n_bits)


# ---------------------------------------------------------------------------
# path-splitting critical sets
# ---------------------------------------------------------------------------

@dataclass
class CriticalSets:
    """Complete critical set plus the greedy ladder of reduced sets;
    pscs_ladder[i] has i+1 indices and is contained in its successors."""

    cpscs: np.ndarray
    pscs_ladder: list


def _threshold_slices(n_bits: int, k_bits: int, info_set: np.ndarray):
    """Score slices of the information set where forking matters.

    For exact RM sizes only the threshold-score slice is critical; otherwise
    both the threshold and threshold+1 slices are.
    """
    part = rm_partition(n_bits, k_bits)
    info = np.asarray(info_set, dtype=np.int64)
    scores = _scores(n_bits)[info]
    if part.is_exact:
        cs1 = info[scores == part.r + 1]
        cs2 = np.empty(0, dtype=np.int64)
    else:
        cs1 = info[scores == part.r]
        cs2 = info[scores == part.r + 1]
    return cs1, cs2


def cpscs_construct(n_bits: int, k_bits: int, info_set) -> np.ndarray:
    """Complete path-splitting critical set of an RM-like profile."""
    cs1, cs2 = _threshold_slices(n_bits, k_bits, info_set)
    return np.sort(np.concatenate([cs1, cs2]))


class _CoveragePool:
    """Survivor-coverage bookkeeping for the critical-set beam search.

    Survivors are grouped by codeword weight and packed into uint64 limb
    masks (one bit per survivor, each weight class limb-aligned), so the
    per-weight count of survivors touched by an index set reduces to OR +
    popcount over a few hundred limbs.
    """

    def __init__(self, support: np.ndarray, weights: np.ndarray):
        touching = support.any(axis=1)
        support = support[touching]
        weights = weights[touching]
        self.weights_present = np.unique(weights)
        slices = []
        limb_start = 0
        order = []
        for w in self.weights_present:
            ids = np.flatnonzero(weights == w)
            order.append(ids)
            n_limbs = (ids.size + 63) // 64
            slices.append((limb_start, limb_start + n_limbs))
            limb_start += n_limbs
        self.class_slices = slices
        self.n_limbs = max(limb_start, 1)
        n_pos = support.shape[1]
        self.touch = np.zeros((n_pos, self.n_limbs), dtype=np.uint64)
        for (start, _), ids in zip(slices, order):
            sup = support[ids]
            for j in range(sup.shape[0]):
                limb = start + (j >> 6)
                bit = np.uint64(1) << np.uint64(j & 63)
                for p in np.flatnonzero(sup[j]):
                    self.touch[p, limb] |= bit

    def empty(self) -> np.ndarray:
        return np.zeros(self.n_limbs, dtype=np.uint64)

    def metrics(self, covered: np.ndarray, positions) -> list:
        """Coverage count vectors (descending-sort keys) for covered | touch[p]."""
        new = covered[None, :] | self.touch[positions]
        out = np.empty((len(positions), len(self.class_slices)), dtype=np.int64)
        for ci, (a, b) in enumerate(self.class_slices):
            out[:, ci] = np.bitwise_count(new[:, a:b]).sum(axis=1)
        return [tuple(row) for row in out]


def pscs_construct(cfg: CodeConfig, list_size: int, search_size: int,
                   llr_mag: float = 1.0, f_mode: str = "minsum") -> CriticalSets:
    """Greedy beam growth of critical subsets, scored per round by how many
    surviving low-weight codewords the subset touches (support overlap),
    with metrics recomputed from zero after every selection round."""
    if search_size < 1:
        raise ValueError("search list size must be at least 1")
    cs1, cs2 = _threshold_slices(cfg.n_bits, cfg.k_bits, cfg.info_set)
    cpscs = np.sort(np.concatenate([cs1, cs2]))
    if cpscs.size == 0:
        raise ValueError("profile has no threshold-score information indices")

    pool_v, pool_w = scl_survivor_pool(cfg, list_size, llr_mag, f_mode)
    pool = _CoveragePool(pool_v[:, cpscs].astype(bool), pool_w)
    pos_of = {int(ix): p for p, ix in enumerate(cpscs)}

    # Each round extends the previous best subset by the single phase index
    # whose combined coverage key is largest (descending sort, stable in
    # index order), so consecutive ladder entries are nested by construction.
    ladder = []
    members: tuple = ()
    covered = pool.empty()
    for phase in (cs1, cs2):
        phase_pos = [pos_of[int(ix)] for ix in phase]
        for _ in range(len(phase_pos)):
            fresh = [p for p in phase_pos if p not in members]
            cands = list(zip(fresh, pool.metrics(covered, fresh)))
            cands.sort(key=lambda nd: nd[1], reverse=True)
            cands = cands[:search_size]
            best = cands[0][0]
            members = members + (best,)
            covered = covered | pool.touch[best]
            ladder.append(np.sort(cpscs[list(members)]))

    return CriticalSets(cpscs=cpscs, pscs_ladder=ladder)
