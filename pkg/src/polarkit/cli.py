"""Command-line front end.

Subcommands: ``optimize`` (run the differential-evolution search), ``pattern``
(generate baseline patterns or round-trip pattern files), ``evaluate``
(BLER/BER sweep for one pattern), and ``compare`` (matched-seed sweep across
several patterns).  Exit codes: 0 success, 1 usage, 2 I/O, 3 domain
validation.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .construction import ga_llr_means, select_information_set
from .core import CodeSpec
from .evolution import DeConfig, de_optimize
from .montecarlo import ChannelModel, DecoderConfig, simulate
from .puncturing import (PuncturingPattern, load_pattern, qup_pattern,
                         rqup_pattern, save_pattern)

CSV_HEADER = ["ebn0_db", "blocks", "block_errors", "bit_errors", "bler", "ber", "seed"]
EVAL_INCREMENT = 20000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CurvePoint:
    """One SNR point of a BLER/BER sweep."""

    ebn0_db: float
    bler: float
    ber: float
    blocks: int
    block_errors: int
    bit_errors: int


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polarkit",
                     description="Punctured polar code design and evaluation")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_opt = sub.add_parser("optimize", help="search for a puncturing pattern")
    p_opt.add_argument("--n", type=int, required=True, help="mother code length N")
    p_opt.add_argument("--k", type=int, required=True, help="information bits K")
    p_opt.add_argument("--np", dest="n_p", type=int, required=True,
                       help="number of punctured bits")
    p_opt.add_argument("--ebn0", type=float, required=True,
                       help="design Eb/N0 in dB for the search")
    p_opt.add_argument("--pop-size", type=int, default=50)
    p_opt.add_argument("--cr", type=float, default=0.8, help="crossover rate")
    p_opt.add_argument("--f", type=float, default=0.6, help="mutation scale factor")
    p_opt.add_argument("--max-iters", type=int, default=50)
    p_opt.add_argument("--trials", type=int, default=20000,
                       help="Monte Carlo trials per objective evaluation")
    p_opt.add_argument("--confirm-trials", type=int, default=1000000,
                       help="trials for the final confirmation pass (0 disables)")
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.add_argument("--full-space", action="store_true",
                       help="search over all N coded bits instead of the reduced space")
    p_opt.add_argument("--in-place", action="store_true",
                       help="apply replacements row by row within a generation")
    p_opt.add_argument("--fresh-incumbents", action="store_true",
                       help="re-evaluate incumbents under each generation's seed")
    p_opt.add_argument("--workers", type=int, default=1)
    p_opt.add_argument("--out", required=True, help="pattern file to write")
    p_opt.add_argument("--log", default=None,
                       help="run log path (default: <out>.log)")

    p_pat = sub.add_parser("pattern", help="emit a baseline or existing pattern")
    p_pat.add_argument("--method", choices=["qup", "rqup", "file"], required=True)
    p_pat.add_argument("--n", type=int)
    p_pat.add_argument("--k", type=int)
    p_pat.add_argument("--np", dest="n_p", type=int)
    p_pat.add_argument("--ebn0", type=float,
                       help="design Eb/N0 in dB for information-set selection")
    p_pat.add_argument("--in", dest="infile", help="input file for --method file")
    p_pat.add_argument("--out", required=True)

    for name in ("evaluate", "compare"):
        p = sub.add_parser(name, help=f"{name} BLER/BER over an SNR sweep")
        if name == "evaluate":
            p.add_argument("--pattern", required=True, help="pattern file")
        else:
            p.add_argument("--patterns", nargs="+", required=True,
                           help="two or more pattern files")
        p.add_argument("--ebn0", required=True,
                       help="comma-separated Eb/N0 sweep in dB, e.g. '6,7,8'")
        p.add_argument("--decoder", choices=["sc", "scl"], default="sc")
        p.add_argument("--list-size", type=int, default=8)
        p.add_argument("--crc", type=int, default=0, choices=[0, 16])
        p.add_argument("--trials", type=int, default=100000,
                       help="block budget per SNR point")
        p.add_argument("--max-block-errors", type=int, default=200,
                       help="stop an SNR point early after this many block errors")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", required=True, help="CSV file to write")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required (optimize, pattern, "
                             "evaluate, compare)")
        handler = {
            "optimize": _cmd_optimize,
            "pattern": _cmd_pattern,
            "evaluate": _cmd_evaluate,
            "compare": _cmd_compare,
        }[args.command]
        handler(args)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def _cmd_optimize(args) -> None:
    spec = CodeSpec(args.n, args.k)
    config = DeConfig(
        pop_size=args.pop_size,
        scale=args.f,
        crossover=args.cr,
        max_iters=args.max_iters,
        reduced_space=not args.full_space,
        ebn0_db=args.ebn0,
        trials=args.trials,
        master_seed=args.seed,
        in_place=args.in_place,
        fresh_incumbents=args.fresh_incumbents,
        confirm_trials=args.confirm_trials or None,
        workers=args.workers,
    )
    log_path = args.log if args.log is not None else f"{args.out}.log"
    result = de_optimize(spec, args.n_p, config, log_path=log_path)
    provenance = (
        f"differential-evolution search: n={args.n} k={args.k} np={args.n_p} "
        f"ebn0_db={args.ebn0} pop_size={args.pop_size} cr={args.cr} f={args.f} "
        f"max_iters={args.max_iters} trials={args.trials} "
        f"confirm_trials={args.confirm_trials} seed={args.seed} "
        f"reduced_space={not args.full_space} in_place={args.in_place} "
        f"fresh_incumbents={args.fresh_incumbents} "
        f"generations={result.generations} evaluations={result.evaluations} "
        f"best_objective={result.best_objective!r} "
        f"confirmed_objective={result.confirmed_objective!r}"
    )
    save_pattern(args.out, result.pattern, info_set=result.info_set,
                 provenance=provenance)
    print(f"wrote {args.out} (pattern of {result.pattern.n_p} bits, "
          f"objective {result.best_objective:.6g}); log: {log_path}")


def _cmd_pattern(args) -> None:
    if args.method == "file":
        if not args.infile:
            raise UsageError("--method file requires --in")
        pattern, info_set, provenance = load_pattern(args.infile)
        save_pattern(args.out, pattern, info_set=info_set, provenance=provenance)
        print(f"wrote {args.out} (n={pattern.n_mother}, np={pattern.n_p})")
        return
    for flag in ("n", "k", "n_p", "ebn0"):
        if getattr(args, flag) is None:
            raise UsageError(f"--method {args.method} requires --{flag.replace('_p', 'p')}")
    spec = CodeSpec(args.n, args.k)
    pattern = qup_pattern(spec, args.n_p) if args.method == "qup" \
        else rqup_pattern(spec, args.n_p)
    rate = spec.k_info / pattern.n_transmitted
    reliability = ga_llr_means(spec, args.ebn0, pattern, rate)
    info_set = select_information_set(reliability, spec.k_info)
    provenance = (f"{args.method} baseline: n={args.n} k={args.k} np={args.n_p} "
                  f"design_ebn0_db={args.ebn0} (information set from the Gaussian "
                  f"approximation at effective rate {rate!r})")
    save_pattern(args.out, pattern, info_set=info_set, provenance=provenance)
    print(f"wrote {args.out}: indices {list(pattern.indices)}")


def _parse_snrs(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"--ebn0 expects comma-separated numbers: {exc}") from exc


def _load_labeled(path: str):
    pattern, info_set, _ = load_pattern(path)
    return Path(path).stem, pattern, info_set


def _point_seed(base_seed: int, snr_index: int, increment: int) -> int:
    ss = np.random.SeedSequence((base_seed, 3, snr_index, increment))
    return int(ss.generate_state(1, np.uint64)[0])


def _curve_point(spec: CodeSpec, pattern: PuncturingPattern, info_set,
                 ebn0_db: float, snr_index: int, decoder: DecoderConfig,
                 budget: int, max_block_errors: int, base_seed: int,
                 workers: int) -> CurvePoint:
    blocks = block_errors = bit_errors = 0
    increment = 0
    k = len(info_set)
    while blocks < budget and block_errors < max_block_errors:
        batch = min(EVAL_INCREMENT, budget - blocks)
        report = simulate(spec, pattern, info_set, ChannelModel.awgn(ebn0_db),
                          decoder=decoder, trials=batch,
                          seed=_point_seed(base_seed, snr_index, increment),
                          workers=workers)
        blocks += batch
        block_errors += report.block_errors
        bit_errors += int(report.per_bit_errors.sum())
        increment += 1
    return CurvePoint(ebn0_db=ebn0_db, bler=block_errors / blocks,
                      ber=bit_errors / (blocks * k), blocks=blocks,
                      block_errors=block_errors, bit_errors=bit_errors)


def _sweep(path: str, snrs: list[float], args) -> tuple[str, list[CurvePoint]]:
    label, pattern, info_set = _load_labeled(path)
    if info_set is None:
        raise ValueError(
            f"pattern file {path!r} lacks an info_set; generate it with "
            f"'polarkit pattern' or 'polarkit optimize'")
    spec = CodeSpec(pattern.n_mother, len(info_set))
    if args.decoder == "sc":
        if args.crc:
            raise UsageError("--crc requires --decoder scl")
        decoder = DecoderConfig("sc")
    else:
        decoder = DecoderConfig("scl", list_size=args.list_size, crc_len=args.crc)
    points = []
    for snr_index, ebn0 in enumerate(snrs):
        points.append(_curve_point(spec, pattern, info_set, ebn0, snr_index,
                                   decoder, args.trials, args.max_block_errors,
                                   args.seed, args.workers))
    return label, points


def _write_rows(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _cmd_evaluate(args) -> None:
    snrs = _parse_snrs(args.ebn0)
    _, points = _sweep(args.pattern, snrs, args)
    rows = [[p.ebn0_db, p.blocks, p.block_errors, p.bit_errors, p.bler, p.ber,
             args.seed] for p in points]
    _write_rows(args.out, CSV_HEADER, rows)
    print(f"wrote {args.out} ({len(rows)} SNR points)")


def _cmd_compare(args) -> None:
    if len(args.patterns) < 2:
        raise ValueError("compare needs at least two pattern files")
    snrs = _parse_snrs(args.ebn0)
    labeled = [_load_labeled(p) for p in args.patterns]
    sizes = {pattern.n_mother for _, pattern, _ in labeled}
    if len(sizes) > 1:
        raise ValueError(f"pattern files disagree on N: {sorted(sizes)}")
    rows = []
    for path in args.patterns:
        label, points = _sweep(path, snrs, args)
        rows.extend([[label, p.ebn0_db, p.blocks, p.block_errors, p.bit_errors,
                      p.bler, p.ber, args.seed] for p in points])
    _write_rows(args.out, ["pattern"] + CSV_HEADER, rows)
    print(f"wrote {args.out} ({len(args.patterns)} patterns x {len(snrs)} SNR points)")


if __name__ == "__main__":
    sys.exit(main())
