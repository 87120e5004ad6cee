"""Result persistence: structured text records and the CSV results table.

A ResultRecord snapshots the config, the per-rung spectral data, the
verdict, and optional certificate data.  Records re-parse to equal values
(wall-clock fields are stored but excluded from equality), and the CSV
rows are byte-deterministic for a fixed config and seed.

CSV schema (one row per solve/sweep point), version 1:

    schema_version, alpha, v0, beta, fillet_r, orientation, h, R,
    delta_mode, mu, lambda1, count, verdict, cert, seed

h and R are the finest rung's.  ``cert`` is 'found' / 'none' when a
certificate search ran, '-' when not applicable.  ``lambda1`` is the
finest rung's lowest eigenvalue (whether or not it clears the margin).
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field

from . import __version__
from .config import ExperimentConfig, parse_config, write_config
from .eigensolve import ScanOutcome, SpectralResult

__all__ = ["RungRecord", "ResultRecord", "CSV_HEADER", "csv_row",
           "append_csv", "write_record", "read_record"]

CSV_HEADER = ("schema_version,alpha,v0,beta,fillet_r,orientation,h,R,"
              "delta_mode,mu,lambda1,count,verdict,cert,seed")
_SCHEMA = 1


@dataclass(frozen=True)
class RungRecord:
    h: float
    half_extent: float
    lambda_min: float
    eigenvalues_below: tuple[float, ...]
    count: int
    count_exact: bool
    margin: float
    wall_time: float = field(compare=False, default=0.0)


@dataclass(frozen=True)
class ResultRecord:
    config: ExperimentConfig
    mu: float
    margin: float
    verdict: str
    lambda1: float | None
    rungs: tuple[RungRecord, ...]
    cert: str = "-"                      # '-', 'found', 'none'
    cert_detail: str = ""
    code_version: str = __version__
    wall_total: float = field(compare=False, default=0.0)

    @classmethod
    def from_scan(cls, cfg: ExperimentConfig, outcome: ScanOutcome,
                  cert: str = "-", cert_detail: str = "",
                  wall_total: float = 0.0) -> "ResultRecord":
        rungs = tuple(_rung(r) for r in outcome.rungs)
        return cls(cfg, outcome.mu, outcome.margin, outcome.verdict,
                   outcome.lambda1, rungs, cert, cert_detail,
                   __version__, wall_total)


def _rung(r: SpectralResult) -> RungRecord:
    return RungRecord(r.grid.h, r.grid.half_extent, r.lambda_min,
                      r.eigenvalues_below, r.count_below_mu_margin,
                      r.count_exact, r.margin, r.solver_stats.wall_time)


def _fmt(x: float) -> str:
    return repr(float(x))


def csv_row(rec: ResultRecord) -> str:
    cfg = rec.config
    h, R = cfg.ladder[-1]
    lam = "" if rec.lambda1 is None else _fmt(rec.lambda1)
    count = rec.rungs[-1].count if rec.rungs else 0
    return ",".join([
        str(_SCHEMA), _fmt(cfg.alpha), _fmt(cfg.v0), _fmt(cfg.beta),
        _fmt(cfg.fillet_radius), cfg.orientation, _fmt(h), _fmt(R),
        cfg.delta_mode, _fmt(rec.mu), lam, str(count), rec.verdict,
        rec.cert, str(cfg.seed),
    ])


def append_csv(rec: ResultRecord, path) -> None:
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a") as f:
        if new:
            f.write(CSV_HEADER + "\n")
        f.write(csv_row(rec) + "\n")


def write_record(rec: ResultRecord, path=None) -> str:
    lines = ["[result]",
             f"schema_version = {_SCHEMA}",
             f"code_version = {rec.code_version}",
             f"mu = {_fmt(rec.mu)}",
             f"margin = {_fmt(rec.margin)}",
             f"verdict = {rec.verdict}",
             f"lambda1 = {'none' if rec.lambda1 is None else _fmt(rec.lambda1)}",
             f"cert = {rec.cert}",
             f"cert_detail = {rec.cert_detail or '-'}",
             f"wall_total = {_fmt(rec.wall_total)}",
             ""]
    for i, r in enumerate(rec.rungs):
        lines += [f"[rung.{i}]",
                  f"h = {_fmt(r.h)}",
                  f"R = {_fmt(r.half_extent)}",
                  f"lambda_min = {_fmt(r.lambda_min)}",
                  "eigenvalues_below = " + (" ".join(_fmt(v) for v in r.eigenvalues_below) or "-"),
                  f"count = {r.count}",
                  f"count_exact = {r.count_exact}",
                  f"margin = {_fmt(r.margin)}",
                  f"wall_time = {_fmt(r.wall_time)}",
                  ""]
    text = "\n".join(lines) + "# config snapshot\n" + write_config(rec.config)
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def read_record(path_or_text, from_path: bool = True) -> ResultRecord:
    if from_path:
        with open(path_or_text) as f:
            text = f.read()
    else:
        text = path_or_text
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_file(io.StringIO(text))
    cfg = parse_config(text, from_path=False)
    res = cp["result"]
    lam_raw = res.get("lambda1")
    rungs = []
    for name in sorted((s for s in cp.sections() if s.startswith("rung.")),
                       key=lambda s: int(s.split(".")[1])):
        r = cp[name]
        ev_raw = r.get("eigenvalues_below").strip()
        evs = tuple(float(t) for t in ev_raw.split()) if ev_raw != "-" else ()
        rungs.append(RungRecord(
            float(r["h"]), float(r["R"]), float(r["lambda_min"]), evs,
            int(r["count"]), r["count_exact"] == "True", float(r["margin"]),
            float(r["wall_time"])))
    cert_detail = res.get("cert_detail", "-")
    return ResultRecord(
        cfg, float(res["mu"]), float(res["margin"]), res["verdict"],
        None if lam_raw == "none" else float(lam_raw), tuple(rungs),
        res.get("cert", "-"), "" if cert_detail == "-" else cert_detail,
        res.get("code_version"), float(res.get("wall_total", "0")))
