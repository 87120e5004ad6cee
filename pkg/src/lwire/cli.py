"""Command-line interface: transverse, solve, sweep, converge, certify."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, parse_config
from .harness import (default_jobs, run_certify, run_converge, run_solve,
                      run_sweep, transverse_table, persist)
from .records import CSV_HEADER, append_csv, csv_row


def _add_common(sp):
    sp.add_argument("--config", required=True, help="experiment config path")
    sp.add_argument("--out", default=None,
                    help="output base path (writes <out>.result.txt, <out>.csv)")
    sp.add_argument("--seed", type=int, default=None,
                    help="override the config seed")
    sp.add_argument("--jobs", type=int, default=None,
                    help="worker processes (default: LWIRE_JOBS or 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lwire",
        description="bent leaky wire with a one-sided potential bias: "
                    "spectral phase-diagram toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("transverse",
                        help="closed-form 1D transverse data + FD cross-check")
    tr.add_argument("--alpha", type=float, required=True)
    tr.add_argument("--v0", type=float, required=True)

    so = sub.add_parser("solve", help="run the grid-ladder scan for one config")
    _add_common(so)
    so.add_argument("--export-matrix", default=None,
                    help="also write the finest-rung matrix in coordinate text form")

    sw = sub.add_parser("sweep", help="scan a parameter axis, one solve per value")
    _add_common(sw)
    sw.add_argument("--axis", required=True, choices=["beta", "v0", "alpha"])
    sw.add_argument("--values", required=True,
                    help="comma-separated axis values")

    cv = sub.add_parser("converge", help="h-order and box-size stability study")
    _add_common(cv)

    ce = sub.add_parser("certify", help="variational certificate search")
    _add_common(ce)
    ce.add_argument("--family", required=True,
                    choices=["log-cutoff", "product", "persistence"])
    ce.add_argument("--length", type=float, default=None,
                    help="axial support scale for the product family")
    ce.add_argument("--mode", type=int, default=1,
                    help="axial mode index for the product family")
    return ap


def _load(args):
    cfg = parse_config(args.config)
    if args.seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=args.seed)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "transverse":
            print(transverse_table(args.alpha, args.v0))
            return 0
        cfg = _load(args)
        if args.command == "solve":
            rec = run_solve(cfg, export_path=args.export_matrix)
            if args.out:
                persist(rec, args.out)
            print(f"verdict = {rec.verdict}")
            print(f"mu = {rec.mu!r}   margin = {rec.margin!r}")
            if rec.lambda1 is not None:
                print(f"lambda1 = {rec.lambda1!r}")
            for r in rec.rungs:
                print(f"  rung h={r.h!r} R={r.half_extent!r}: "
                      f"lambda_min={r.lambda_min!r} count={r.count}")
            if rec.cert != "-":
                print(f"certificate = {rec.cert} ({rec.cert_detail})")
            return 0
        if args.command == "sweep":
            values = [float(t) for t in args.values.split(",") if t.strip()]
            if not values:
                raise ConfigError("empty sweep values")
            rows = run_sweep(cfg, args.axis, values, jobs=args.jobs)
            print(CSV_HEADER)
            for value, rec, err in rows:
                if err is not None:
                    print(f"# {args.axis}={value!r} failed: {err}")
                    continue
                print(csv_row(rec))
                if args.out:
                    append_csv(rec, str(args.out) + ".csv")
            return 0
        if args.command == "converge":
            print(run_converge(cfg).table())
            return 0
        if args.command == "certify":
            found, detail = run_certify(cfg, args.family,
                                        length=args.length, mode=args.mode)
            print(detail)
            print("FOUND" if found else "NOT-FOUND")
            return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
