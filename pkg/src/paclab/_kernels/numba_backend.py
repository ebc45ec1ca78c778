"""Numba-jitted decoder kernels; same layout and semantics as numpy_backend.

Hot loops run per path under @njit.  Batch entry points reuse one workspace
across all frames of a chunk; results are written to per-frame slots so the
aggregation order never depends on scheduling.  Sort tie-breaking matches
the numpy backend exactly (stable mergesort on path metrics, kept
candidates re-ordered by candidate index).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

NAME = "numba"

_U1 = np.uint64(1)


@njit(cache=True, inline="always")
def _parity(x):
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    return np.int8(x & _U1)


@njit(cache=True, inline="always")
def _logaddexp(a, b):
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


@njit(cache=True, inline="always")
def _soft_xor(a, b, exact):
    if exact:
        return _logaddexp(0.0, a + b) - _logaddexp(a, b)
    sa = 1.0 if a > 0.0 else (-1.0 if a < 0.0 else 0.0)
    sb = 1.0 if b > 0.0 else (-1.0 if b < 0.0 else 0.0)
    return sa * sb * min(abs(a), abs(b))


@njit(cache=True, inline="always")
def _tz(i):
    z = 0
    while (i >> z) & 1 == 0:
        z += 1
    return z


@njit(cache=True)
def _descend_one(llr, ps, chan, i, n, N, exact):
    if i == 0:
        s_start = 1
        with_g = False
    else:
        s_start = n - _tz(i)
        with_g = True
    for s in range(s_start, n + 1):
        half = N >> s
        ol = N - (2 * N >> s)
        pb = N - (4 * N >> s)
        if with_g and s == s_start:
            op = 2 * N - (4 * N >> s)
            if s == 1:
                for j in range(half):
                    llr[ol + j] = chan[half + j] + (1.0 - 2.0 * ps[op + j]) * chan[j]
            else:
                for j in range(half):
                    llr[ol + j] = llr[pb + half + j] + (1.0 - 2.0 * ps[op + j]) * llr[pb + j]
        else:
            if s == 1:
                for j in range(half):
                    llr[ol + j] = _soft_xor(chan[j], chan[half + j], exact)
            else:
                for j in range(half):
                    llr[ol + j] = _soft_xor(llr[pb + j], llr[pb + half + j], exact)
    return llr[N - 2]


@njit(cache=True)
def _ps_update_one(ps, i, u, n, N):
    ps[2 * N - 4 + (i & 1)] = u
    s = n
    while s >= 2 and (i >> (n - s)) & 1 == 1:
        half = N >> s
        o = 2 * N - (4 * N >> s)
        side = (i >> (n - s + 1)) & 1
        dst = 2 * N - (8 * N >> s) + side * 2 * half
        for j in range(half):
            r = ps[o + half + j]
            ps[dst + j] = ps[o + j] ^ r
            ps[dst + half + j] = r
        s -= 1


def _scl_workspace(N: int, L: int):
    w = N - 1 if N > 1 else 1
    return (
        np.empty((L, w), dtype=np.float64), np.empty((L, w), dtype=np.float64),
        np.empty((L, 2 * N - 2), dtype=np.int8), np.empty((L, 2 * N - 2), dtype=np.int8),
        np.empty((L, N), dtype=np.int8), np.empty((L, N), dtype=np.int8),
        np.empty(L, dtype=np.uint64), np.empty(L, dtype=np.uint64),
        np.empty(L, dtype=np.float64), np.empty(L, dtype=np.float64),
        np.empty(L, dtype=np.float64), np.empty(L, dtype=np.int8),
        np.empty(L, dtype=np.int8), np.empty(L, dtype=np.int8),
        np.empty(2 * L, dtype=np.float64),
    )


@njit(cache=True)
def _scl_core(chan, is_info, do_split, g_rest, smask, L, exact,
              llrA, llrB, psA, psB, vhA, vhB, stA, stB, pmA, pmB,
              lam, u0, vvec, uvec, cand):
    """List decode into the workspace; returns (live, cur, sort_ops) with
    the surviving paths in the cur-side buffers, unsorted."""
    N = chan.shape[0]
    n = 0
    while (1 << n) < N:
        n += 1
    g_rest_u = np.uint64(g_rest)
    smask_u = np.uint64(smask)

    stA[0] = np.uint64(0)
    pmA[0] = 0.0
    cur = 0
    live = 1
    sort_ops = 0

    for i in range(N):
        llr = llrA if cur == 0 else llrB
        ps = psA if cur == 0 else psB
        vh = vhA if cur == 0 else vhB
        st = stA if cur == 0 else stB
        pm = pmA if cur == 0 else pmB

        for p in range(live):
            if N > 1:
                lam[p] = _descend_one(llr[p], ps[p], chan, i, n, N, exact)
            else:
                lam[p] = chan[0]
            u0[p] = _parity(st[p] & g_rest_u)

        if is_info[i] == 0:
            for p in range(live):
                h = 0 if lam[p] > 0.0 else 1
                uvec[p] = u0[p]
                vvec[p] = 0
                if u0[p] != h:
                    pm[p] += abs(lam[p])
        elif do_split[i] == 0:
            for p in range(live):
                h = np.int8(0 if lam[p] > 0.0 else 1)
                uvec[p] = h
                vvec[p] = u0[p] ^ h
        else:
            for p in range(live):
                h = 0 if lam[p] > 0.0 else 1
                pen = abs(lam[p])
                pen0 = pen if u0[p] != h else 0.0
                pen1 = pen if (u0[p] ^ 1) != h else 0.0
                cand[p] = pm[p] + pen0
                cand[live + p] = pm[p] + pen1
            if 2 * live <= L:
                for p in range(live):
                    q = live + p
                    llr[q, :] = llr[p, :]
                    ps[q, :] = ps[p, :]
                    vh[q, :] = vh[p, :]
                    st[q] = st[p]
                    pm[p] = cand[p]
                    pm[q] = cand[q]
                    vvec[p] = 0
                    uvec[p] = u0[p]
                    vvec[q] = 1
                    uvec[q] = u0[p] ^ 1
                live = 2 * live
            else:
                sort_ops += 1
                order = np.argsort(cand[:2 * live], kind="mergesort")
                keep = np.sort(order[:L])
                llr2 = llrB if cur == 0 else llrA
                ps2 = psB if cur == 0 else psA
                vh2 = vhB if cur == 0 else vhA
                st2 = stB if cur == 0 else stA
                pm2 = pmB if cur == 0 else pmA
                for k in range(L):
                    c = keep[k]
                    src = c % live
                    vbit = np.int8(c // live)
                    llr2[k, :] = llr[src, :]
                    ps2[k, :] = ps[src, :]
                    vh2[k, :] = vh[src, :]
                    st2[k] = st[src]
                    pm2[k] = cand[c]
                    vvec[k] = vbit
                    uvec[k] = u0[src] ^ vbit
                cur = 1 - cur
                llr, ps, vh, st, pm = llr2, ps2, vh2, st2, pm2
                live = L

        for p in range(live):
            vh[p, i] = vvec[p]
            if N > 1:
                _ps_update_one(ps[p], i, uvec[p], n, N)
            st[p] = ((st[p] << _U1) | np.uint64(vvec[p])) & smask_u

    return live, cur, sort_ops


@njit(cache=True)
def _scl_finish(live, cur, vhA, vhB, pmA, pmB, N):
    vh = vhA if cur == 0 else vhB
    pm = pmA if cur == 0 else pmB
    order = np.argsort(pm[:live], kind="mergesort")
    vh_out = np.empty((live, N), dtype=np.int8)
    pm_out = np.empty(live, dtype=np.float64)
    for k in range(live):
        vh_out[k, :] = vh[order[k], :]
        pm_out[k] = pm[order[k]]
    return vh_out, pm_out


def scl_run(chan, is_info, do_split, g_rest, smask, list_size, exact):
    """List decode; returns (vhat rows, path metrics, sort count) with the
    final list stable-sorted by metric."""
    chan = np.ascontiguousarray(chan, dtype=np.float64)
    N = chan.shape[0]
    ws = _scl_workspace(N, int(list_size))
    live, cur, sort_ops = _scl_core(
        chan, is_info, do_split, np.uint64(g_rest), np.uint64(smask),
        int(list_size), bool(exact), *ws)
    vh_out, pm_out = _scl_finish(live, cur, ws[4], ws[5], ws[8], ws[9], N)
    return vh_out, pm_out, int(sort_ops)


@njit(cache=True)
def _decode_chunk_scl_core(llr_rows, v_true, is_info, do_split, g_rest, smask,
                           L, exact, err, sorts,
                           llrA, llrB, psA, psB, vhA, vhB, stA, stB, pmA, pmB,
                           lam, u0, vvec, uvec, cand):
    F = llr_rows.shape[0]
    N = llr_rows.shape[1]
    for fi in range(F):
        live, cur, so = _scl_core(
            llr_rows[fi], is_info, do_split, g_rest, smask, L, exact,
            llrA, llrB, psA, psB, vhA, vhB, stA, stB, pmA, pmB,
            lam, u0, vvec, uvec, cand)
        vh = vhA if cur == 0 else vhB
        pm = pmA if cur == 0 else pmB
        best = 0
        for p in range(1, live):
            if pm[p] < pm[best]:
                best = p
        sorts[fi] = so
        bad = 0
        for j in range(N):
            if is_info[j] and vh[best, j] != v_true[fi, j]:
                bad = 1
                break
        err[fi] = bad


def decode_chunk_scl(llr_rows, v_true, is_info, do_split, g_rest, smask,
                     list_size, exact):
    """Decode a batch of frames with SCL; returns per-frame error flags and
    sort counts."""
    llr_rows = np.ascontiguousarray(llr_rows, dtype=np.float64)
    F, N = llr_rows.shape
    err = np.zeros(F, dtype=np.uint8)
    sorts = np.zeros(F, dtype=np.int64)
    ws = _scl_workspace(N, int(list_size))
    _decode_chunk_scl_core(llr_rows, v_true, is_info, do_split,
                           np.uint64(g_rest), np.uint64(smask),
                           int(list_size), bool(exact), err, sorts, *ws)
    return err, sorts


@njit(cache=True, inline="always")
def _branch_metric(lam, u, bias_i, ln2):
    return 1.0 - bias_i - _logaddexp(0.0, -(1.0 - 2.0 * u) * lam) / ln2


def _fano_workspace(N: int):
    w = N - 1 if N > 1 else 1
    return (
        np.empty(w, dtype=np.float64), np.empty(2 * N - 2, dtype=np.int8),
        np.empty((N, w), dtype=np.float64), np.empty((N, 2 * N - 2), dtype=np.int8),
        np.empty(N, dtype=np.uint64), np.empty(N, dtype=np.float64),
        np.empty(N + 1, dtype=np.float64), np.empty(N, dtype=np.int8),
        np.empty(N, dtype=np.int8),
    )


@njit(cache=True)
def _fano_core(chan, is_info, g_rest, smask, bias, delta, max_visits, exact,
               llr, ps, ck_llr, ck_ps, ck_state, lam, gamma, rank, vh):
    N = chan.shape[0]
    n = 0
    while (1 << n) < N:
        n += 1
    ln2 = math.log(2.0)
    g_rest_u = np.uint64(g_rest)
    smask_u = np.uint64(smask)

    state = np.uint64(0)
    thresh = 0.0
    gamma[0] = 0.0
    i = 0
    visits = 0
    fresh = True

    while True:
        if fresh:
            if N > 1:
                lam[i] = _descend_one(llr, ps, chan, i, n, N, exact)
            else:
                lam[i] = chan[0]
            ck_llr[i, :] = llr
            ck_ps[i, :] = ps
            ck_state[i] = state
            rank[i] = 0
            fresh = False

        u_zero = _parity(state & g_rest_u)
        m0 = _branch_metric(lam[i], u_zero, bias[i], ln2)
        nch = 2 if is_info[i] else 1
        if nch == 2:
            m1 = _branch_metric(lam[i], u_zero ^ 1, bias[i], ln2)
        else:
            m1 = -1.0e300

        moved = False
        if rank[i] < nch:
            if nch == 1 or (m0 >= m1) == (rank[i] == 0):
                v = np.int8(0)
                u = u_zero
                bm = m0
            else:
                v = np.int8(1)
                u = u_zero ^ 1
                bm = m1
            g_new = gamma[i] + bm
            if g_new >= thresh:
                visits += 1
                vh[i] = v
                if N > 1:
                    _ps_update_one(ps, i, u, n, N)
                state = ((state << _U1) | np.uint64(v)) & smask_u
                first = gamma[i] < thresh + delta
                gamma[i + 1] = g_new
                i += 1
                if i == N:
                    return gamma[N], visits, 0
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
                llr[:] = ck_llr[i, :]
                ps[:] = ck_ps[i, :]
                state = ck_state[i]
                rank[i] += 1

        if visits >= max_visits:
            return gamma[i], visits, 1


def fano_run(chan, is_info, g_rest, smask, bias, delta, max_visits, exact):
    """Sequential decode; returns (vhat, metric, visits, status)."""
    chan = np.ascontiguousarray(chan, dtype=np.float64)
    N = chan.shape[0]
    ws = _fano_workspace(N)
    vh = ws[8]
    vh[:] = 0
    metric, visits, status = _fano_core(
        chan, is_info, np.uint64(g_rest), np.uint64(smask),
        np.ascontiguousarray(bias, dtype=np.float64), float(delta),
        int(max_visits), bool(exact), *ws)
    return vh.copy(), float(metric), int(visits), int(status)


@njit(cache=True)
def _decode_chunk_fano_core(llr_rows, v_true, is_info, g_rest, smask, bias,
                            delta, max_visits, exact, err, visits, exhausted,
                            llr, ps, ck_llr, ck_ps, ck_state, lam, gamma,
                            rank, vh):
    F = llr_rows.shape[0]
    N = llr_rows.shape[1]
    for fi in range(F):
        metric, nv, status = _fano_core(
            llr_rows[fi], is_info, g_rest, smask, bias, delta, max_visits,
            exact, llr, ps, ck_llr, ck_ps, ck_state, lam, gamma, rank, vh)
        visits[fi] = nv
        if status != 0:
            err[fi] = 1
            exhausted[fi] = 1
        else:
            bad = 0
            for j in range(N):
                if is_info[j] and vh[j] != v_true[fi, j]:
                    bad = 1
                    break
            err[fi] = bad
            exhausted[fi] = 0


def decode_chunk_fano(llr_rows, v_true, is_info, g_rest, smask, bias, delta,
                      max_visits, exact):
    """Decode a batch of frames with the sequential decoder; returns error
    flags (budget exhaustion counts as an error), visit counts and a
    budget-exhausted flag per frame."""
    llr_rows = np.ascontiguousarray(llr_rows, dtype=np.float64)
    F, N = llr_rows.shape
    err = np.zeros(F, dtype=np.uint8)
    visits = np.zeros(F, dtype=np.int64)
    exhausted = np.zeros(F, dtype=np.uint8)
    ws = _fano_workspace(N)
    _decode_chunk_fano_core(llr_rows, v_true, is_info, np.uint64(g_rest),
                            np.uint64(smask),
                            np.ascontiguousarray(bias, dtype=np.float64),
                            float(delta), int(max_visits), bool(exact),
                            err, visits, exhausted, *ws)
    return err, visits, exhausted
