"""Monte-Carlo BLER / complexity harness.

Randomness is counter-based: every frame draws its message and noise from
splitmix64 streams keyed by (seed, stream, frame index), so results do not
depend on chunking or on how many worker threads the decoder kernels use,
and a fixed config reproduces byte-identical reports on a given backend.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import ChannelParams, gaussian_approximation
from .codec import CodeConfig, pac_encode_source_batch
from .decoders import DEFAULT_LLR_CLAMP
from .spectrum import WeightSpectrum, union_bound

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM_MESSAGE = 0
_STREAM_NOISE = 1


def _mix(x):
    # splitmix64 finalizer; uint64 wraparound is intended
    with np.errstate(over="ignore"):
        x = np.asarray(x, dtype=np.uint64)
        x = (x ^ (x >> np.uint64(30))) * _MIX1
        x = (x ^ (x >> np.uint64(27))) * _MIX2
        return x ^ (x >> np.uint64(31))


def _stream_words(seed: int, stream: int, frames: np.ndarray,
                  n_words: int) -> np.ndarray:
    """(F, n_words) uint64 words for the given absolute frame indices."""
    with np.errstate(over="ignore"):
        base = _mix(np.uint64(seed) + _GOLDEN * np.uint64(stream + 1))
        per_frame = _mix(base + _GOLDEN * (frames.astype(np.uint64) + np.uint64(1)))
        ctr = np.arange(1, n_words + 1, dtype=np.uint64)
        return _mix(per_frame[:, None] + _GOLDEN * ctr[None, :])


def message_bits(seed: int, frames: np.ndarray, k: int) -> np.ndarray:
    """(F, k) random message bits."""
    n_words = (k + 63) // 64
    w = _stream_words(seed, _STREAM_MESSAGE, frames, n_words)
    shifts = np.arange(64, dtype=np.uint64)
    bits = ((w[:, :, None] >> shifts) & np.uint64(1)).astype(np.int8)
    return bits.reshape(frames.size, n_words * 64)[:, :k]


def gaussian_noise(seed: int, frames: np.ndarray, n: int) -> np.ndarray:
    """(F, n) standard normal samples via Box-Muller on counter streams."""
    pairs = (n + 1) // 2
    w = _stream_words(seed, _STREAM_NOISE, frames, 2 * pairs)
    u1 = ((w[:, 0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53
    u2 = (w[:, 1::2] >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    r = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * np.pi * u2
    out = np.empty((frames.size, 2 * pairs), dtype=np.float64)
    out[:, 0::2] = r * np.cos(ang)
    out[:, 1::2] = r * np.sin(ang)
    return out[:, :n]


@dataclass
class SimConfig:
    code: CodeConfig
    decoder: str = "scl"
    snr_grid: tuple = (2.0,)
    list_size: int = 1
    split_set: np.ndarray | None = None
    delta: float = 2.0
    max_visits: int = 2_000_000
    f_mode: str = "exact"
    min_errors: int = 100
    max_frames: int = 10_000_000
    chunk_frames: int = 8192
    seed: int = 1
    noiseless: bool = False
    llr_clamp: float = DEFAULT_LLR_CLAMP

    def __post_init__(self):
        if self.decoder not in ("sc", "scl", "scl-cs", "fano"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.min_errors < 1:
            raise ValueError("min_errors must be at least 1")
        if not self.snr_grid:
            raise ValueError("snr_grid must be non-empty")
        if self.decoder == "scl-cs" and self.split_set is None:
            raise ValueError("scl-cs needs a split set")


@dataclass
class SimRecord:
    snr_db: float
    frames: int
    frame_errors: int
    bler: float
    mean_anv: float
    mean_sort_ops: float
    wall_time: float
    budget_exhausted: int = 0


def _decoder_masks(cfg: SimConfig):
    code = cfg.code
    info = code.info_mask()
    if cfg.decoder == "sc":
        split = np.zeros(code.n_bits, dtype=np.int8)
        L = 1
    elif cfg.decoder == "scl":
        split = info.copy()
        L = cfg.list_size
    elif cfg.decoder == "scl-cs":
        split = np.zeros(code.n_bits, dtype=np.int8)
        idx = np.asarray(cfg.split_set, dtype=np.int64)
        split[idx] = 1
        if np.any(split & ~info):
            raise ValueError("split set must be a subset of the information set")
        L = cfg.list_size
    else:
        split = info.copy()
        L = cfg.list_size
    return info, split, int(L)


def run_campaign(cfg: SimConfig):
    """Per SNR point: encode random frames, add seeded channel noise, decode
    and aggregate BLER / visit / sort statistics until the stop rule."""
    code = cfg.code
    n, k = code.n_bits, code.k_bits
    info, split, L = _decoder_masks(cfg)
    g_rest = code.conv.taps_mask() >> 1
    smask = (1 << code.conv.memory) - 1
    be = _kernels.active_backend()
    records = []

    for snr_db in cfg.snr_grid:
        params = ChannelParams(float(snr_db), code.rate)
        sigma = float(np.sqrt(params.sigma2))
        scale = 2.0 / params.sigma2
        if cfg.decoder == "fano":
            bias = gaussian_approximation(n, params).e0
        t0 = time.perf_counter()

        frames = 0
        errors = 0
        anv_sum = 0
        sort_sum = 0
        exhausted = 0
        while errors < cfg.min_errors and frames < cfg.max_frames:
            nf = int(min(cfg.chunk_frames, cfg.max_frames - frames))
            fidx = np.arange(frames, frames + nf, dtype=np.int64)
            d = message_bits(cfg.seed, fidx, k)
            v = np.zeros((nf, n), dtype=np.int8)
            v[:, code.info_set] = d
            x = pac_encode_source_batch(v, code)
            sym = 1.0 - 2.0 * x.astype(np.float64)
            if cfg.noiseless:
                llrs = sym * cfg.llr_clamp
            else:
                y = sym + sigma * gaussian_noise(cfg.seed, fidx, n)
                llrs = np.clip(scale * y, -cfg.llr_clamp, cfg.llr_clamp)
            llrs = np.ascontiguousarray(llrs)

            if cfg.decoder == "fano":
                err, visits, exh = be.decode_chunk_fano(
                    llrs, v, info, g_rest, smask, bias, float(cfg.delta),
                    int(cfg.max_visits), cfg.f_mode == "exact")
                anv_sum += int(visits.sum())
                exhausted += int(exh.sum())
            else:
                err, sorts = be.decode_chunk_scl(
                    llrs, v, info, split, g_rest, smask, L,
                    cfg.f_mode == "exact")
                sort_sum += int(sorts.sum())
                anv_sum += n * nf
            errors += int(err.sum())
            frames += nf

        records.append(SimRecord(
            snr_db=float(snr_db),
            frames=frames,
            frame_errors=errors,
            bler=errors / frames if frames else 0.0,
            mean_anv=anv_sum / frames if frames else 0.0,
            mean_sort_ops=sort_sum / frames if frames else 0.0,
            wall_time=time.perf_counter() - t0,
            budget_exhausted=exhausted,
        ))
    return records


def emit_report(records, ws: WeightSpectrum | None = None,
                rate: float | None = None) -> str:
    """CSV report; a union-bound column is appended when a weight spectrum
    (and the code rate) is supplied."""
    with_bound = ws is not None
    if with_bound and rate is None:
        raise ValueError("the union-bound overlay needs the code rate")
    cols = "snr_db,frames,errors,bler,mean_anv,mean_sort_ops"
    if with_bound:
        cols += ",union_bound"
    lines = [cols]
    for r in records:
        row = (f"{r.snr_db:g},{r.frames},{r.frame_errors},{r.bler:.8e},"
               f"{r.mean_anv:.6f},{r.mean_sort_ops:.6f}")
        if with_bound:
            row += f",{union_bound(ws, rate, r.snr_db):.8e}"
        lines.append(row)
    return "\n".join(lines) + "\n"
