"""Command-line front end: align, editdist, simreads, validate, pim, dse.

Per-pair results are emitted as JSON lines with sorted keys; tables are CSV.
Output is byte-identical for identical inputs, config and seed, at any
thread count: workers only parallelise pure per-pair alignment and results
are written in input order.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import readsim
from .banded import banded_align, banded_edit_distance
from .core import BandEscape, BandPolicy, cigar_to_string
from .io import (
    Pair,
    RunConfig,
    apply_overrides,
    load_config,
    parse_fasta,
    read_pairs,
    write_pairs,
)
from .oracle import edit_distance_full, full_dp_score
from .pimmodel import (
    CapacityExceeded,
    CostReport,
    Workload,
    dse_sweep,
    estimate_run,
    estimate_write_traffic,
)


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="ascii", newline="\n"), True


def _emit_jsonl(fh, record: dict):
    fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _align_one(pair: Pair, scheme, policy, adaptive, tie_right, want_oracle):
    record = {"id": pair.pair_id}
    try:
        outcome, _ = banded_align(pair.reference, pair.query, scheme, policy,
                                  adaptive=adaptive, tie_right=tie_right)
        record.update(
            score=outcome.score,
            cigar=cigar_to_string(outcome.cigar),
            band_used=outcome.band_used,
            cells_computed=outcome.cells_computed,
            band_escape=False,
        )
        score = outcome.score
    except BandEscape as esc:
        record.update(score=None, cigar=None, band_used=None,
                      cells_computed=None, band_escape=True,
                      best_edge_score=esc.best_edge_score)
        score = None
    if want_oracle:
        oracle_score = full_dp_score(pair.reference, pair.query, scheme)
        record["oracle_score"] = oracle_score
        record["match"] = score == oracle_score
    return record


def cmd_align(args) -> int:
    cfg = _config_from(args)
    pairs = read_pairs(args.pairs)
    scheme = cfg.scheme()
    policy = cfg.band_policy()
    fh, close = _open_out(args.out)
    try:
        records = _map_ordered(
            lambda p: _align_one(p, scheme, policy, cfg.adaptive,
                                 cfg.tie_right, args.oracle),
            pairs, cfg.threads)
        for rec in records:
            _emit_jsonl(fh, rec)
    finally:
        if close:
            fh.close()
    return 0


def _editdist_one(pair: Pair, policy, with_traceback, want_oracle):
    res = banded_edit_distance(pair.reference, pair.query, policy,
                               with_traceback=with_traceback)
    record = {
        "id": pair.pair_id,
        "distance": res.levenshtein,
        "affine_cost": res.affine_cost,
        "band_used": res.band_used,
        "cells_computed": res.cells_computed,
        "traceback_cells": res.traceback_cells,
        "affine_escape": res.affine_escaped,
    }
    if with_traceback:
        record["cigar"] = cigar_to_string(res.cigar)
    if want_oracle:
        exact, _ = edit_distance_full(pair.reference, pair.query)
        record["oracle_distance"] = exact
        record["match"] = exact == res.levenshtein
    return record


def cmd_editdist(args) -> int:
    cfg = _config_from(args)
    pairs = read_pairs(args.pairs)
    policy = cfg.band_policy()
    with_tb = not args.no_traceback
    fh, close = _open_out(args.out)
    try:
        records = _map_ordered(
            lambda p: _editdist_one(p, policy, with_tb, args.oracle),
            pairs, cfg.threads)
        for rec in records:
            _emit_jsonl(fh, rec)
    finally:
        if close:
            fh.close()
    return 0


def _load_genome(spec: str, mask_n: bool) -> str:
    if spec.startswith("synthetic:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError("synthetic genome spec is synthetic:<length>:<seed>")
        return readsim.synthetic_genome(int(parts[1]), int(parts[2]))
    records = parse_fasta(spec, mask_n=mask_n)
    return "".join(r.sequence for r in records)


def cmd_simreads(args) -> int:
    cfg = _config_from(args)
    profile = readsim.get_profile(cfg.profile)
    genome = _load_genome(args.genome, args.mask_n)
    pairs = []
    truths = []
    for rp in readsim.generate_dataset(genome, profile, args.count,
                                       args.length, cfg.seed):
        pairs.append(Pair(rp.pair_id, str(rp.reference_window), str(rp.read)))
        truths.append({
            "id": rp.pair_id,
            "offset": rp.offset,
            "n_edits": rp.n_edits,
            "seed": rp.seed,
            "edits": [[op, pos, payload] for op, pos, payload in rp.truth_edits],
        })
    write_pairs(args.out, pairs)
    truth_path = args.truth or args.out + ".truth.jsonl"
    with open(truth_path, "w", encoding="ascii", newline="\n") as fh:
        _emit_jsonl(fh, {"type": "meta", "genome": args.genome,
                         "profile": profile.name, "count": args.count,
                         "length": args.length, "seed": cfg.seed})
        for t in truths:
            _emit_jsonl(fh, t)
    return 0


def _validate_cell(genome, profile, length, count, seed, scheme, w_values,
                   adaptive_modes, slope, cap, band_round, threads):
    """Accuracy of banded vs oracle scores for one (profile, length) dataset."""
    dataset = list(readsim.generate_dataset(genome, profile, count, length, seed))

    def oracle_for(rp):
        return full_dp_score(str(rp.reference_window), str(rp.read), scheme)

    oracle_scores = _map_ordered(oracle_for, dataset, threads)
    rows = []
    for adaptive in adaptive_modes:
        for w in w_values:
            policy = BandPolicy(w, slope, cap, band_round)

            def banded_for(rp):
                try:
                    outcome, _ = banded_align(
                        str(rp.reference_window), str(rp.read), scheme, policy,
                        adaptive=adaptive, with_traceback=False)
                    return outcome.score
                except BandEscape:
                    return None

            scores = _map_ordered(banded_for, dataset, threads)
            matches = sum(1 for got, want in zip(scores, oracle_scores)
                          if got == want)
            rows.append({
                "profile": profile.name,
                "length": length,
                "adaptive": "yes" if adaptive else "no",
                "w": w,
                "matches": matches,
                "total": count,
                "accuracy": matches / count,
            })
    return rows


def cmd_validate(args) -> int:
    cfg = _config_from(args)
    profile = readsim.get_profile(cfg.profile)
    lengths = [int(x) for x in args.lengths.split(",")]
    w_values = [int(x) for x in args.w_list.split(",")]
    adaptive_modes = {"on": [True], "off": [False], "both": [False, True]}[args.adaptive]
    genome = _load_genome(args.genome, False)
    scheme = cfg.scheme()
    fh, close = _open_out(args.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["profile", "length", "adaptive", "w",
                         "matches", "total", "accuracy"])
        for length in lengths:
            rows = _validate_cell(genome, profile, length, args.count,
                                  cfg.seed, scheme, w_values, adaptive_modes,
                                  cfg.band_slope, cfg.band_cap, cfg.band_round,
                                  cfg.threads)
            for row in rows:
                writer.writerow([row["profile"], row["length"], row["adaptive"],
                                 row["w"], row["matches"], row["total"],
                                 f"{row['accuracy']:.4f}"])
    finally:
        if close:
            fh.close()
    return 0


def cmd_pim(args) -> int:
    cfg = _config_from(args)
    workload = Workload(args.count, args.m, args.n or args.m, cfg.scheme())
    arch = cfg.arch_config()
    fh, close = _open_out(args.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CostReport.FIELDS + ("error",))
        try:
            report = estimate_run(workload, cfg.band_policy(), arch)
            writer.writerow([_fmt(v) for v in report.row()] + [""])
        except CapacityExceeded as exc:
            writer.writerow([""] * len(CostReport.FIELDS) + [str(exc)])
        traffic = estimate_write_traffic(workload, arch, cfg.band_policy())
        writer.writerow([])
        writer.writerow(["rows_written_per_iteration", "total_row_writes",
                         "writes_per_cell_per_alignment", "lifetime_alignments"])
        writer.writerow([traffic.rows_written_per_iteration,
                         _fmt(traffic.total_row_writes),
                         _fmt(traffic.writes_per_cell_per_alignment),
                         _fmt(traffic.lifetime_alignments)])
    finally:
        if close:
            fh.close()
    return 0


def cmd_dse(args) -> int:
    cfg = _config_from(args)
    workload = Workload(args.count, args.m, args.n or args.m, cfg.scheme())
    values = [int(x) for x in args.range.split(",")]
    rows = dse_sweep(args.axis, values, workload, cfg.band_policy(),
                     cfg.arch_config())
    fh, close = _open_out(args.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        if args.axis == "tbms_per_tile":
            writer.writerow(["tbms_per_tile", "parallelism"])
        else:
            writer.writerow(["column_width", "reads_per_s", "reads_per_s_per_width"])
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if close:
            fh.close()
    return 0


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return v


def _config_from(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    overrides = {}
    for key in ("seed", "threads", "w", "profile"):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    adaptive = getattr(args, "adaptive", None)
    if adaptive in ("on", "off"):
        overrides["adaptive"] = adaptive == "on"
    return apply_overrides(cfg, **overrides)


def _add_common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaband",
        description="Adaptive banded aligner and in-memory accelerator model")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="banded alignment of a pairs file")
    p.add_argument("pairs")
    _add_common(p)
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--adaptive", choices=["on", "off"], default=None)
    p.add_argument("--oracle", action="store_true",
                   help="also run the full DP and report score equality")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("editdist", help="banded edit distance of a pairs file")
    p.add_argument("pairs")
    _add_common(p)
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--no-traceback", action="store_true", dest="no_traceback")
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_editdist)

    p = sub.add_parser("simreads", help="generate a simulated pairs file")
    p.add_argument("genome", help="FASTA path or synthetic:<length>:<seed>")
    _add_common(p)
    p.add_argument("--profile", default=None)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--truth", default=None, help="truth sidecar path")
    p.add_argument("--mask-n", action="store_true", dest="mask_n")
    p.set_defaults(func=cmd_simreads)

    p = sub.add_parser("validate", help="banded-vs-oracle accuracy table")
    p.add_argument("genome", help="FASTA path or synthetic:<length>:<seed>")
    _add_common(p)
    p.add_argument("--profile", default=None)
    p.add_argument("--lengths", required=True, help="comma-separated bp lengths")
    p.add_argument("--count", type=int, required=True, help="reads per cell")
    p.add_argument("--w-list", default="10,20,30,40,50")
    p.add_argument("--adaptive", choices=["on", "off", "both"], default="both")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("pim", help="throughput/energy/write-traffic estimate")
    _add_common(p)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--w", type=int, default=None)
    p.set_defaults(func=cmd_pim)

    p = sub.add_parser("dse", help="design-space sweep")
    _add_common(p)
    p.add_argument("--axis", choices=["tbms_per_tile", "column_width"],
                   required=True)
    p.add_argument("--range", required=True, help="comma-separated values")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--w", type=int, default=None)
    p.set_defaults(func=cmd_dse)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
