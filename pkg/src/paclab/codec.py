"""PAC encoding pipeline: rate profiling, rate-1 convolution, polar transform.

All words are numpy int8 vectors over GF(2).  The convolution polynomial is
given MSB-first, g[0] = g[m] = 1, so octal 3211 is the taps
{1,1,0,1,0,0,0,1,0,0,1}.  Octal 1 (identity taps) degenerates PAC into a
plain polar code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_bits(x) -> np.ndarray:
    b = np.asarray(x, dtype=np.int8)
    if b.ndim != 1 or np.any((b != 0) & (b != 1)):
        raise ValueError("expected a 1-D vector of 0/1 bits")
    return b


@dataclass(frozen=True)
class ConvPolynomial:
    """Connection taps of the rate-1 convolution, g[0] = g[m] = 1."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(int(b) for b in self.coeffs)
        if not c or c[0] != 1 or c[-1] != 1 or any(b not in (0, 1) for b in c):
            raise ValueError("taps must start and end with 1")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_octal(cls, octal: str) -> "ConvPolynomial":
        v = int(str(octal), 8)
        if v <= 0:
            raise ValueError("octal taps must be positive")
        return cls(tuple(int(b) for b in bin(v)[2:]))

    @property
    def octal_repr(self) -> str:
        return format(int("".join(str(b) for b in self.coeffs), 2), "o")

    @property
    def memory(self) -> int:
        return len(self.coeffs) - 1

    def taps_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int8)

    def taps_mask(self) -> int:
        """Taps packed into an int, bit j = g[j]."""
        m = 0
        for j, b in enumerate(self.coeffs):
            m |= b << j
        return m


@dataclass(frozen=True)
class RateProfile:
    """Length-N information mask, bits[i] = 1 on information positions."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _as_bits(self.bits))

    def __len__(self):
        return len(self.bits)

    @property
    def k(self) -> int:
        return int(self.bits.sum())

    def info_set(self) -> np.ndarray:
        return np.flatnonzero(self.bits).astype(np.int64)

    def to_hex(self) -> str:
        return profile_to_hex(self.bits)

    @classmethod
    def from_hex(cls, hexstr: str, n_bits: int) -> "RateProfile":
        return cls(hex_to_profile(hexstr, n_bits))

    @classmethod
    def from_info_set(cls, info_set, n_bits: int) -> "RateProfile":
        bits = np.zeros(n_bits, dtype=np.int8)
        bits[np.asarray(list(info_set), dtype=np.int64)] = 1
        return cls(bits)


@dataclass(frozen=True)
class CodeConfig:
    """A PAC code: block length, information set and convolution taps."""

    n_bits: int
    info_set: np.ndarray
    conv: ConvPolynomial = field(default_factory=lambda: ConvPolynomial((1,)))

    def __post_init__(self):
        n = int(self.n_bits)
        if n < 1 or n & (n - 1):
            raise ValueError("block length must be a power of two")
        idx = np.unique(np.asarray(self.info_set, dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= n):
            raise ValueError("information indices out of range")
        object.__setattr__(self, "n_bits", n)
        object.__setattr__(self, "info_set", idx)

    @property
    def k_bits(self) -> int:
        return int(self.info_set.size)

    @property
    def rate(self) -> float:
        return self.k_bits / self.n_bits

    @property
    def stages(self) -> int:
        return self.n_bits.bit_length() - 1

    def profile(self) -> RateProfile:
        return RateProfile.from_info_set(self.info_set, self.n_bits)

    def info_mask(self) -> np.ndarray:
        return self.profile().bits

    @classmethod
    def from_profile(cls, profile: RateProfile, conv: ConvPolynomial) -> "CodeConfig":
        return cls(len(profile), profile.info_set(), conv)


def rate_profile_embed(d, cfg: CodeConfig) -> np.ndarray:
    """Scatter K message bits onto the information positions, zeros elsewhere."""
    d = _as_bits(d)
    if d.size != cfg.k_bits:
        raise ValueError(f"expected {cfg.k_bits} message bits, got {d.size}")
    v = np.zeros(cfg.n_bits, dtype=np.int8)
    v[cfg.info_set] = d
    return v


def message_extract(v_hat, cfg: CodeConfig) -> np.ndarray:
    """Inverse of rate_profile_embed: read bits off the information positions."""
    v_hat = np.asarray(v_hat, dtype=np.int8)
    return v_hat[cfg.info_set].copy()


def conv_transform(v, poly: ConvPolynomial) -> np.ndarray:
    """Rate-1 convolution u[i] = sum_j g[j] v[i-j] over GF(2)."""
    v = _as_bits(v)
    u = np.zeros_like(v)
    for j, gj in enumerate(poly.coeffs):
        if gj:
            u[j:] ^= v[: v.size - j]
    return u


def conv_transform_batch(v_rows: np.ndarray, poly: ConvPolynomial) -> np.ndarray:
    """conv_transform applied to every row of an (M, N) bit matrix."""
    v_rows = np.asarray(v_rows, dtype=np.int8)
    u = np.zeros_like(v_rows)
    n = v_rows.shape[-1]
    for j, gj in enumerate(poly.coeffs):
        if gj:
            u[..., j:] ^= v_rows[..., : n - j]
    return u


def conv_inverse(u, poly: ConvPolynomial) -> np.ndarray:
    """Recover v from u = conv_transform(v) by feedback (g[0] = 1)."""
    u = _as_bits(u)
    v = np.zeros_like(u)
    taps = [j for j, gj in enumerate(poly.coeffs) if gj and j > 0]
    for i in range(u.size):
        acc = int(u[i])
        for j in taps:
            if j <= i:
                acc ^= int(v[i - j])
        v[i] = acc
    return v


def polar_transform(u) -> np.ndarray:
    """Multiply by the n-fold Kronecker power of the 2x2 polarization kernel.

    Self-inverse over GF(2); O(N log N) butterflies.
    """
    u = _as_bits(u)
    n = u.size
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    x = u.copy()
    h = 1
    while h < n:
        x = x.reshape(-1, 2, h)
        x[:, 0, :] ^= x[:, 1, :]
        x = x.reshape(-1)
        h *= 2
    return x


def polar_transform_batch(u_rows: np.ndarray) -> np.ndarray:
    """polar_transform applied to every row of an (M, N) bit matrix."""
    u_rows = np.asarray(u_rows, dtype=np.int8)
    m, n = u_rows.shape
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    x = u_rows.copy()
    h = 1
    while h < n:
        x = x.reshape(m, -1, 2, h)
        x[:, :, 0, :] ^= x[:, :, 1, :]
        x = x.reshape(m, n)
        h *= 2
    return x


def pac_encode(d, cfg: CodeConfig) -> np.ndarray:
    """Full pipeline: embed -> convolve -> polar transform."""
    return polar_transform(conv_transform(rate_profile_embed(d, cfg), cfg.conv))


def pac_encode_source_batch(v_rows: np.ndarray, cfg: CodeConfig) -> np.ndarray:
    """Encode already-embedded source words (rows), skipping the embed step."""
    return polar_transform_batch(conv_transform_batch(v_rows, cfg.conv))


# ---------------------------------------------------------------------------
# profile serialization
# ---------------------------------------------------------------------------

def profile_to_hex(bits) -> str:
    """Pack the mask into hex, index 0 on the MSB of the first digit."""
    bits = _as_bits(bits)
    if bits.size % 4:
        raise ValueError("profile length must be a multiple of 4")
    digits = bits.reshape(-1, 4)
    vals = digits[:, 0] * 8 + digits[:, 1] * 4 + digits[:, 2] * 2 + digits[:, 3]
    return "".join("0123456789ABCDEF"[v] for v in vals)


def hex_to_profile(hexstr: str, n_bits: int) -> np.ndarray:
    hexstr = hexstr.strip()
    if len(hexstr) * 4 != n_bits:
        raise ValueError(f"hex profile must have {n_bits // 4} digits")
    try:
        vals = [int(c, 16) for c in hexstr]
    except ValueError as e:
        raise ValueError(f"bad hex digit in profile: {hexstr!r}") from e
    bits = np.zeros(n_bits, dtype=np.int8)
    for c, v in enumerate(vals):
        for b in range(4):
            bits[4 * c + b] = (v >> (3 - b)) & 1
    return bits


def write_profile_file(path, profile: RateProfile, conv: ConvPolynomial,
                       design_snr_db: float) -> None:
    """Profile file: header `N K g_octal design_snr_db`, then hex lines."""
    with open(path, "w") as fh:
        fh.write(f"{len(profile)} {profile.k} {conv.octal_repr} {design_snr_db:g}\n")
        fh.write(profile.to_hex() + "\n")


def read_profile_file(path):
    """Returns (profile, conv, design_snr_db) from a profile file."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError("profile header must be: N K g_octal design_snr_db")
        n, k = int(header[0]), int(header[1])
        conv = ConvPolynomial.from_octal(header[2])
        snr = float(header[3])
        hexline = fh.readline().strip()
    profile = RateProfile.from_hex(hexline, n)
    if profile.k != k:
        raise ValueError(f"profile weight {profile.k} does not match header K={k}")
    return profile, conv, snr
