"""Pure-numpy decoder kernels, vectorized across list paths.

Shared layout (per path):
  llr  float64[N-1]   stage workspace, stage s in [1, n] at offset N - (2N >> s)
                      holding N >> s entries; stage 0 is the shared channel row.
  ps   int8[2N-2]     per-stage feedback, stage s at offset 2N - (4N >> s) with
                      two child-codeword slots of N >> s entries each.
  state uint64        last m source bits of the convolution, bit j-1 = v[i-j].

Stage s of the butterfly picks the check (soft-xor) branch when bit (n-s) of
the bit index is 0 and the sign-adjusted sum branch when it is 1.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_U64_SHIFTS = tuple(np.uint64(s) for s in (32, 16, 8, 4, 2, 1))
_U1 = np.uint64(1)


def _parity_u64(x):
    x = x.copy() if isinstance(x, np.ndarray) else np.uint64(x)
    for s in _U64_SHIFTS:
        x = x ^ (x >> s)
    return (x & _U1).astype(np.int8) if isinstance(x, np.ndarray) else np.int8(x & _U1)


def _soft_xor_exact(a, b):
    return np.logaddexp(0.0, a + b) - np.logaddexp(a, b)


def _soft_xor_minsum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def _trailing_zeros(i: int) -> int:
    return (i & -i).bit_length() - 1


def _descend(llr, ps, chan, i, n, exact):
    """Refresh the butterfly stages invalidated by moving to bit i; returns
    the per-path decision LLRs."""
    N = chan.shape[0]
    if i == 0:
        s_start, with_g = 1, False
    else:
        s_start, with_g = n - _trailing_zeros(i), True
    for s in range(s_start, n + 1):
        half = N >> s
        ol = N - (2 * N >> s)
        if s == 1:
            a = chan[None, :half]
            b = chan[None, half:2 * half]
        else:
            pb = N - (4 * N >> s)
            a = llr[:, pb:pb + half]
            b = llr[:, pb + half:pb + 2 * half]
        if with_g and s == s_start:
            op = 2 * N - (4 * N >> s)
            pleft = ps[:, op:op + half]
            llr[:, ol:ol + half] = b + (1.0 - 2.0 * pleft) * a
        else:
            fx = _soft_xor_exact if exact else _soft_xor_minsum
            llr[:, ol:ol + half] = fx(a, b)
    return llr[:, N - 2]


def _ps_update(ps, i, u, n, N):
    """Record decided bit i and fold completed right children upward."""
    ps[:, 2 * N - 4 + (i & 1)] = u
    s = n
    while s >= 2 and (i >> (n - s)) & 1:
        half = N >> s
        o = 2 * N - (4 * N >> s)
        left = ps[:, o:o + half]
        right = ps[:, o + half:o + 2 * half]
        side = (i >> (n - s + 1)) & 1
        dst = 2 * N - (8 * N >> s) + side * 2 * half
        ps[:, dst:dst + half] = left ^ right
        ps[:, dst + half:dst + 2 * half] = right
        s -= 1


def _conv_bit(state, g_rest):
    """Convolution output for v=0 given the shift register contents."""
    return _parity_u64(state & np.uint64(g_rest))


def scl_run(chan, is_info, do_split, g_rest, smask, list_size, exact):
    """List decode; returns (vhat rows, path metrics, sort count) with the
    final list stable-sorted by metric."""
    chan = np.ascontiguousarray(chan, dtype=np.float64)
    N = chan.shape[0]
    n = N.bit_length() - 1
    L = int(list_size)
    smask_u = np.uint64(smask)

    llr = np.zeros((1, max(N - 1, 1)), dtype=np.float64)
    ps = np.zeros((1, 2 * N - 2), dtype=np.int8)
    vh = np.zeros((1, N), dtype=np.int8)
    state = np.zeros(1, dtype=np.uint64)
    pm = np.zeros(1, dtype=np.float64)
    sort_ops = 0

    for i in range(N):
        if N > 1:
            lam = _descend(llr, ps, chan, i, n, exact).copy()
        else:
            lam = chan.astype(np.float64)
        live = pm.shape[0]
        u0 = _conv_bit(state, g_rest)
        h = np.where(lam > 0.0, 0, 1).astype(np.int8)

        if not is_info[i]:
            v = np.zeros(live, dtype=np.int8)
            u = u0
            pm = pm + np.where(u != h, np.abs(lam), 0.0)
        elif not do_split[i]:
            v = (u0 ^ h).astype(np.int8)
            u = h.copy()
        else:
            pen0 = np.where(u0 != h, np.abs(lam), 0.0)
            pen1 = np.where((u0 ^ 1) != h, np.abs(lam), 0.0)
            cand = np.concatenate([pm + pen0, pm + pen1])
            if 2 * live <= L:
                keep = np.arange(2 * live)
            else:
                sort_ops += 1
                order = np.argsort(cand, kind="stable")
                keep = np.sort(order[:L])
            src = keep % live
            vbit = (keep // live).astype(np.int8)
            llr = llr[src]
            ps = ps[src]
            vh = vh[src]
            state = state[src]
            pm = cand[keep]
            v = vbit
            u = (u0[src] ^ vbit).astype(np.int8)

        vh[:, i] = v
        if N > 1:
            _ps_update(ps, i, u, n, N)
        state = ((state << _U1) | v.astype(np.uint64)) & smask_u

    order = np.argsort(pm, kind="stable")
    return vh[order], pm[order], sort_ops


def _branch_metric(lam, u, bias_i, ln2):
    return 1.0 - bias_i - np.logaddexp(0.0, -(1.0 - 2.0 * u) * lam) / ln2


def fano_run(chan, is_info, g_rest, smask, bias, delta, max_visits, exact):
    """Sequential depth-first decode with threshold spacing delta.

    Returns (vhat, final path metric, node visits, status) where status is
    0 on success and 1 on visit-budget exhaustion.
    """
    chan = np.ascontiguousarray(chan, dtype=np.float64)
    N = chan.shape[0]
    n = N.bit_length() - 1
    ln2 = float(np.log(2.0))
    smask_u = np.uint64(smask)

    llr = np.zeros((1, max(N - 1, 1)), dtype=np.float64)
    ps = np.zeros((1, 2 * N - 2), dtype=np.int8)
    ck_llr = np.zeros((N, max(N - 1, 1)), dtype=np.float64)
    ck_ps = np.zeros((N, 2 * N - 2), dtype=np.int8)
    ck_state = np.zeros(N, dtype=np.uint64)
    lam = np.zeros(N, dtype=np.float64)
    gamma = np.zeros(N + 1, dtype=np.float64)
    rank = np.zeros(N, dtype=np.int8)
    vh = np.zeros(N, dtype=np.int8)

    state = np.uint64(0)
    thresh = 0.0
    i = 0
    visits = 0
    fresh = True

    while True:
        if fresh:
            if N > 1:
                lam[i] = _descend(llr, ps, chan, i, n, exact)[0]
            else:
                lam[i] = chan[0]
            ck_llr[i] = llr[0]
            ck_ps[i] = ps[0]
            ck_state[i] = state
            rank[i] = 0
            fresh = False

        u0 = int(_parity_u64(state & np.uint64(g_rest)))
        m0 = _branch_metric(lam[i], u0, bias[i], ln2)
        if is_info[i]:
            m1 = _branch_metric(lam[i], u0 ^ 1, bias[i], ln2)
            if m0 >= m1:
                branches = ((0, u0, m0), (1, u0 ^ 1, m1))
            else:
                branches = ((1, u0 ^ 1, m1), (0, u0, m0))
        else:
            branches = ((0, u0, m0),)

        moved = False
        if rank[i] < len(branches):
            v, u, bm = branches[rank[i]]
            g_new = gamma[i] + bm
            if g_new >= thresh:
                visits += 1
                vh[i] = v
                if N > 1:
                    _ps_update(ps, i, np.array([u], dtype=np.int8), n, N)
                state = (np.uint64(state) << _U1 | np.uint64(v)) & smask_u
                first = gamma[i] < thresh + delta
                gamma[i + 1] = g_new
                i += 1
                if i == N:
                    return vh, float(gamma[N]), visits, 0
                if first:
                    while g_new >= thresh + delta:
                        thresh += delta
                fresh = True
                moved = True

        if not moved:
            if i == 0 or gamma[i - 1] < thresh:
                thresh -= delta
                rank[i] = 0
            else:
                visits += 1
                i -= 1
                llr[0] = ck_llr[i]
                ps[0] = ck_ps[i]
                state = ck_state[i]
                rank[i] += 1

        if visits >= max_visits:
            return vh, float(gamma[i]), visits, 1


def decode_chunk_scl(llr_rows, v_true, is_info, do_split, g_rest, smask,
                     list_size, exact):
    """Decode a batch of frames with SCL; returns per-frame error flags and
    sort counts."""
    F = llr_rows.shape[0]
    err = np.zeros(F, dtype=np.uint8)
    sorts = np.zeros(F, dtype=np.int64)
    info_idx = np.flatnonzero(is_info)
    for fi in range(F):
        vh, _, so = scl_run(llr_rows[fi], is_info, do_split, g_rest, smask,
                            list_size, exact)
        sorts[fi] = so
        if np.any(vh[0, info_idx] != v_true[fi, info_idx]):
            err[fi] = 1
    return err, sorts


def decode_chunk_fano(llr_rows, v_true, is_info, g_rest, smask, bias, delta,
                      max_visits, exact):
    """Decode a batch of frames with the sequential decoder; returns error
    flags (budget exhaustion counts as an error), visit counts and a
    budget-exhausted flag per frame."""
    F = llr_rows.shape[0]
    err = np.zeros(F, dtype=np.uint8)
    visits = np.zeros(F, dtype=np.int64)
    exhausted = np.zeros(F, dtype=np.uint8)
    info_idx = np.flatnonzero(is_info)
    for fi in range(F):
        vh, _, nv, status = fano_run(llr_rows[fi], is_info, g_rest, smask,
                                     bias, delta, max_visits, exact)
        visits[fi] = nv
        if status != 0:
            err[fi] = 1
            exhausted[fi] = 1
        elif np.any(vh[info_idx] != v_true[fi, info_idx]):
            err[fi] = 1
    return err, visits, exhausted
