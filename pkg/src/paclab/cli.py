"""Command line interface.

Subcommands: construct, critical-sets, spectrum, encode, decode, simulate.
Profiles travel in a small text format (header `N K g_octal design_snr_db`
plus one hex mask per line); messages and codewords are text files with one
0/1 string per line; LLR inputs have one whitespace-separated float row per
frame.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .channel import ChannelParams, check_finite_complexity, gaussian_approximation
from .codec import (
    CodeConfig,
    ConvPolynomial,
    RateProfile,
    pac_encode,
    read_profile_file,
    write_profile_file,
)
from .construct import cpscs_construct, ls_construct, pscs_construct, rm_polar_profile, rm_profile
from .decoders import FanoConfig, fano_decode, sc_decode, scl_decode
from .sim import SimConfig, SimRecord, emit_report, run_campaign
from .spectrum import estimate_spectrum, min_weight, union_bound


def _load_code(args) -> tuple:
    profile, conv, design_snr = read_profile_file(args.profile)
    if getattr(args, "g_octal", None):
        conv = ConvPolynomial.from_octal(args.g_octal)
    cfg = CodeConfig.from_profile(profile, conv)
    return cfg, design_snr


def _write_out(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_construct(args) -> int:
    conv = ConvPolynomial.from_octal(args.g_octal)
    if args.method == "rm":
        profile = rm_profile(args.N, args.K)
    elif args.method == "rm-polar":
        stats = gaussian_approximation(
            args.N, ChannelParams(args.design_snr, args.K / args.N))
        profile = rm_polar_profile(args.N, args.K, stats)
    else:
        profile = ls_construct(args.N, args.K, conv, args.L, args.Lg,
                               args.design_snr,
                               keep_duplicates=args.keep_duplicates)
    write_profile_file(args.out, profile, conv, args.design_snr)
    print(f"wrote {args.out}: N={args.N} K={profile.k} "
          f"profile={profile.to_hex()}")
    return 0


def _cmd_critical_sets(args) -> int:
    cfg, _ = _load_code(args)
    if args.method == "cpscs":
        cs = cpscs_construct(cfg.n_bits, cfg.k_bits, cfg.info_set)
    else:
        sets = pscs_construct(cfg, args.L, args.Lc)
        if args.ladder_csv:
            with open(args.ladder_csv, "w") as fh:
                fh.write("size,indices\n")
                for entry in sets.pscs_ladder:
                    fh.write(f"{entry.size},{' '.join(map(str, entry))}\n")
        if args.size is None:
            cs = sets.cpscs
        else:
            if not 1 <= args.size <= len(sets.pscs_ladder):
                raise SystemExit(
                    f"--size must be in [1, {len(sets.pscs_ladder)}]")
            cs = sets.pscs_ladder[args.size - 1]
    _write_out("".join(f"{i}\n" for i in cs), args.out)
    return 0


def _cmd_spectrum(args) -> int:
    cfg, _ = _load_code(args)
    ws = estimate_spectrum(cfg, args.L)
    lines = ["d,count"]
    for d in sorted(ws.counts):
        lines.append(f"{d},{ws.counts[d]}")
    lines.append(f"# d_min={min_weight(ws)}")
    if args.snr_grid:
        lines.append("snr_db,union_bound")
        for snr in _parse_grid(args.snr_grid):
            lines.append(f"{snr:g},{union_bound(ws, cfg.rate, snr):.8e}")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_encode(args) -> int:
    cfg, _ = _load_code(args)
    out_lines = []
    with open(args.infile) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = np.array([int(c) for c in line], dtype=np.int8)
            x = pac_encode(d, cfg)
            out_lines.append("".join(map(str, x)))
    _write_out("".join(s + "\n" for s in out_lines), args.out)
    return 0


def _read_split_file(path) -> np.ndarray:
    with open(path) as fh:
        return np.array([int(t) for t in fh.read().split()], dtype=np.int64)


def _cmd_decode(args) -> int:
    cfg, design_snr = _load_code(args)
    split = _read_split_file(args.critical_set) if args.critical_set else None
    if args.decoder == "fano":
        snr = args.design_snr if args.design_snr is not None else design_snr
        stats = gaussian_approximation(cfg.n_bits,
                                       ChannelParams(snr, cfg.rate))
        fano_cfg = FanoConfig.from_stats(stats, delta=args.delta,
                                         max_visits=args.max_visits)
    rows = ["d_hat,metric,sort_ops,anv,list_rank,status"]
    with open(args.llrs) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            llrs = np.array([float(t) for t in line.split()])
            if args.decoder == "sc":
                res = sc_decode(llrs, cfg)
            elif args.decoder == "scl":
                res = scl_decode(llrs, cfg, args.L)
            elif args.decoder == "scl-cs":
                if split is None:
                    raise SystemExit("scl-cs needs --critical-set")
                res = scl_decode(llrs, cfg, args.L, split_set=split)
            else:
                res = fano_decode(llrs, cfg, fano_cfg)
            rows.append(
                f"{''.join(map(str, res.d_hat))},{res.metric:.6f},"
                f"{res.sort_ops},{res.anv},{res.list_rank},{res.status}")
    _write_out("".join(r + "\n" for r in rows), args.out)
    return 0


def _parse_grid(text: str):
    return [float(t) for t in text.replace(",", " ").split()]


def _parse_kv_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _sim_config_from_kv(kv: dict) -> SimConfig:
    n = int(kv["N"])
    conv = ConvPolynomial.from_octal(kv.get("g_octal", "1"))
    if "profile_file" in kv:
        profile, conv_f, _ = read_profile_file(kv["profile_file"])
        if "g_octal" not in kv:
            conv = conv_f
    elif "profile_hex" in kv:
        profile = RateProfile.from_hex(kv["profile_hex"], n)
    else:
        raise ValueError("config needs profile_file or profile_hex")
    code = CodeConfig.from_profile(profile, conv)

    split = None
    if "split_file" in kv:
        split = _read_split_file(kv["split_file"])
    elif kv.get("split", "") == "cpscs":
        split = cpscs_construct(code.n_bits, code.k_bits, code.info_set)

    return SimConfig(
        code=code,
        decoder=kv.get("decoder", "scl"),
        snr_grid=tuple(_parse_grid(kv["snr_db"])),
        list_size=int(kv.get("L", 1)),
        split_set=split,
        delta=float(kv.get("delta", 2.0)),
        max_visits=int(kv.get("max_visits", 2_000_000)),
        f_mode=kv.get("f_mode", "exact"),
        min_errors=int(kv.get("min_errors", 100)),
        max_frames=int(kv.get("max_frames", 10_000_000)),
        chunk_frames=int(kv.get("chunk", 8192)),
        seed=int(kv.get("seed", 1)),
        noiseless=kv.get("noiseless", "0") in ("1", "true", "yes"),
    )


def _cmd_simulate(args) -> int:
    kv = _parse_kv_file(args.config)
    for ov in args.override or []:
        if "=" not in ov:
            raise SystemExit(f"--override needs key=value, got {ov!r}")
        key, val = ov.split("=", 1)
        kv[key.strip()] = val.strip()
    cfg = _sim_config_from_kv(kv)

    records = run_campaign(cfg)

    ws = None
    if kv.get("bound_spectrum_L"):
        ws = estimate_spectrum(cfg.code, int(kv["bound_spectrum_L"]))
    report = emit_report(records, ws, cfg.code.rate if ws else None)
    _write_out(report, args.out)

    if args.plot_data:
        header, *rows = report.strip().split("\n")
        for name, col in (("bler", 3), ("anv", 4), ("sorts", 5)):
            with open(f"{args.plot_data}_{name}.dat", "w") as fh:
                for row in rows:
                    parts = row.split(",")
                    fh.write(f"{parts[0]} {parts[col]}\n")

    exhausted = any(r.frame_errors < cfg.min_errors for r in records)
    return 2 if exhausted else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paclab",
                                description="PAC code construction and decoding")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("construct", help="build a rate profile")
    c.add_argument("--method", choices=["rm", "rm-polar", "ls"], required=True)
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--K", type=int, required=True)
    c.add_argument("--g-octal", default="3211")
    c.add_argument("--design-snr", type=float, default=2.5)
    c.add_argument("--L", type=int, default=40000)
    c.add_argument("--Lg", type=int, default=400)
    c.add_argument("--keep-duplicates", action="store_true")
    c.add_argument("--out", required=True)
    c.set_defaults(fn=_cmd_construct)

    c = sub.add_parser("critical-sets", help="critical-set constructions")
    c.add_argument("--method", choices=["cpscs", "pscs"], required=True)
    c.add_argument("--profile", required=True)
    c.add_argument("--g-octal")
    c.add_argument("--L", type=int, default=20000)
    c.add_argument("--Lc", type=int, default=400)
    c.add_argument("--size", type=int)
    c.add_argument("--ladder-csv")
    c.add_argument("--out")
    c.set_defaults(fn=_cmd_critical_sets)

    c = sub.add_parser("spectrum", help="partial weight spectrum + bounds")
    c.add_argument("--profile", required=True)
    c.add_argument("--g-octal")
    c.add_argument("--L", type=int, default=4096)
    c.add_argument("--snr-grid")
    c.add_argument("--out")
    c.set_defaults(fn=_cmd_spectrum)

    c = sub.add_parser("encode", help="encode message files")
    c.add_argument("--profile", required=True)
    c.add_argument("--g-octal")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--out")
    c.set_defaults(fn=_cmd_encode)

    c = sub.add_parser("decode", help="decode LLR files")
    c.add_argument("--profile", required=True)
    c.add_argument("--g-octal")
    c.add_argument("--decoder", choices=["sc", "scl", "scl-cs", "fano"],
                   required=True)
    c.add_argument("--L", type=int, default=8)
    c.add_argument("--delta", type=float, default=2.0)
    c.add_argument("--max-visits", type=int, default=2_000_000)
    c.add_argument("--design-snr", type=float)
    c.add_argument("--critical-set")
    c.add_argument("--llrs", required=True)
    c.add_argument("--out")
    c.set_defaults(fn=_cmd_decode)

    c = sub.add_parser("simulate", help="Monte-Carlo BLER campaign")
    c.add_argument("--config", required=True)
    c.add_argument("--override", action="append")
    c.add_argument("--out")
    c.add_argument("--plot-data")
    c.set_defaults(fn=_cmd_simulate)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
