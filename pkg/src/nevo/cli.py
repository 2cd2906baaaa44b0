"""Command-line pipeline: slice, events, mine, cluster, stats, pipeline.

Every command is deterministic given its inputs and flags, independent
of the worker count, and each stage consumes only files produced by
earlier stages, so a pipeline can be re-run piecemeal. Exit codes:
0 success, 1 usage, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import (
    agglomerate,
    distance_matrix,
    select_best_cut,
    silhouette,
    write_asw_curve_csv,
    write_clusters_csv,
)
from .ego_events import (
    EventDatabase,
    EventKind,
    EventRecord,
    KIND_LETTERS,
    build_event_db,
    kinds_from_letters,
    write_events_csv,
    write_events_jsonl,
)
from .errors import ContractError, NevoError, ParseError
from .evolution_stats import (
    event_count_regressions,
    per_interval_counts,
    write_counts_csv,
)
from .pattern_mining import (
    attach_growth_rates,
    mine_closed,
    mine_topk_longest,
    write_patterns_json,
)
from .sequence_db import NodeSequence, SequenceDatabase, restrict
from .temporal_graph import (
    SliceConfig,
    build_slices,
    load_presliced,
    parse_temporal_edges,
    serialize_presliced,
)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("NS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class PipelineConfig:
    """Validated flags of one pipeline run, serialized for provenance."""

    input: str
    format: str
    out: str
    slice_len: int | None = None
    overlap: int = 0
    origin: int = 0
    slice_count: int | None = None
    min_sup: float = 0.5
    top_k: int = 10
    min_len: int = 2
    linkage: str = "average"
    k_max: int = 15
    dtw_window: int | None = None
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.format not in ("temporal", "presliced"):
            raise ContractError(f"format must be temporal or presliced; got {self.format!r}")
        if self.format == "temporal" and self.slice_len is None:
            raise ContractError("temporal input needs --slice-len")
        if not 0.0 < self.min_sup <= 1.0:
            raise ContractError("min_sup must lie in (0, 1]")
        if self.top_k < 1 or self.min_len < 1 or self.k_max < 2 or self.threads < 1:
            raise ContractError("top_k/min_len/k_max/threads out of range")


# -- stage implementations ----------------------------------------------------

def stage_slice(input_path, out_path, cfg: SliceConfig) -> None:
    with open(input_path, encoding="utf-8") as f:
        parsed = parse_temporal_edges(f)
    net = build_slices(parsed.events, cfg)
    Path(out_path).write_text(serialize_presliced(net), encoding="utf-8")
    print(f"sliced {len(parsed.events)} events ({parsed.self_loops_dropped} self-loops dropped) "
          f"into {net.theta} slices over {net.n} nodes -> {out_path}")


def stage_events(network_path, out_dir, threads: int) -> dict:
    with open(network_path, encoding="utf-8") as f:
        net = load_presliced(f)
    db = build_event_db(net, threads=threads)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "events.csv", "w", encoding="utf-8", newline="") as f:
        write_events_csv(db, f)
    with open(out / "events.jsonl", "w", encoding="utf-8") as f:
        write_events_jsonl(db, f)
    kind_totals = {k.letter: 0 for k in EventKind}
    for r in db.records:
        kind_totals[r.kind.letter] += 1
    summary = {
        "n": net.n,
        "theta": net.theta,
        "total_records": db.total_records,
        "kind_record_totals": kind_totals,
        "labels": list(net.labels),
    }
    with open(out / "summary.json", "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
        f.write("\n")
    print(f"detected {db.total_records} event records over {net.n} nodes, "
          f"{net.theta - 1} intervals -> {out}")
    return summary


def _load_summary(path) -> dict:
    with open(path, encoding="utf-8") as f:
        summary = json.load(f)
    for key in ("n", "theta"):
        if key not in summary:
            raise ParseError(f"summary file lacks {key!r}")
    return summary


def _load_events_jsonl(path, n: int, theta: int):
    """Itemset letters and counts per (node, interval) from a JSONL export."""
    itemsets = [[None] * (theta - 1) for _ in range(n)]
    counts = np.zeros((n, theta - 1), dtype=np.int64)
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                v, t = int(obj["node"]), int(obj["interval"])
                letters, cnt = str(obj["itemset"]), int(obj["count"])
            except (ValueError, KeyError, TypeError):
                raise ParseError("malformed events record", line=lineno) from None
            if not (0 <= v < n and 0 <= t < theta - 1):
                raise ParseError(f"node/interval out of range: {v}/{t}", line=lineno)
            itemsets[v][t] = letters
            counts[v, t] = cnt
    return itemsets, counts


def _sequence_db_from_files(events_path, summary_path) -> tuple[SequenceDatabase, np.ndarray, dict]:
    summary = _load_summary(summary_path)
    n, theta = summary["n"], summary["theta"]
    itemsets, counts = _load_events_jsonl(events_path, n, theta)
    sequences = {}
    for v in range(n):
        entries = tuple(
            (t, kinds_from_letters(letters))
            for t, letters in enumerate(itemsets[v])
            if letters
        )
        sequences[v] = NodeSequence(node=v, entries=entries)
    return SequenceDatabase(n_total=n, sequences=sequences), counts, summary


def _load_clusters_csv(path) -> dict[int, list[int]]:
    clusters: dict[int, list[int]] = {}
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            clusters.setdefault(int(row["cluster"]), []).append(int(row["node"]))
    if not clusters:
        raise ParseError("cluster file has no rows")
    return clusters


def stage_mine(events_path, summary_path, out_path, mode, min_sup, top_k, min_len,
               clusters_path=None, cluster_id=None) -> None:
    db, _, _ = _sequence_db_from_files(events_path, summary_path)
    scope = db
    if clusters_path is not None:
        clusters = _load_clusters_csv(clusters_path)
        if cluster_id is None:
            raise ContractError("--clusters requires --cluster-id")
        if cluster_id not in clusters:
            raise ContractError(f"cluster {cluster_id} not present in {clusters_path}")
        scope = restrict(db, clusters[cluster_id])
    if mode == "closed":
        patterns = mine_closed(scope, min_sup)
    else:
        patterns = mine_topk_longest(scope, top_k, min_len)
    if clusters_path is not None:
        patterns = attach_growth_rates(patterns, db, clusters[cluster_id])
    with open(out_path, "w", encoding="utf-8") as f:
        write_patterns_json(patterns, f)
    print(f"mined {len(patterns)} {mode} patterns -> {out_path}")


def stage_cluster(events_path, summary_path, out_dir, linkage, k_max, dtw_window, threads) -> dict:
    _, counts, summary = _sequence_db_from_files(events_path, summary_path)
    d = distance_matrix(list(counts), window=dtw_window, threads=threads)
    dend = agglomerate(d, linkage=linkage)
    best = select_best_cut(dend, d, k_max=k_max)
    if len(np.unique(best.labels)) >= 2:
        widths = silhouette(d, best.labels).widths
    else:
        widths = np.zeros(len(best.labels))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "clusters.csv", "w", encoding="utf-8") as f:
        write_clusters_csv(best.labels, widths, f)
    with open(out / "asw_curve.csv", "w", encoding="utf-8") as f:
        write_asw_curve_csv(best.curve, f)
    (out / "dendrogram.txt").write_text(dend.to_text(), encoding="utf-8")
    sizes = np.bincount(best.labels)
    print(f"best cut: k={best.k} (ASW={best.asw:.4f}); cluster sizes {sizes.tolist()} -> {out}")
    return {"k": best.k, "asw": best.asw}


def _event_db_from_csv(path, n: int, theta: int) -> EventDatabase:
    records = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            try:
                records.append(EventRecord(
                    node=int(row["node"]),
                    interval=int(row["interval"]),
                    kind=EventKind(KIND_LETTERS.index(row["kind"])),
                    component=int(row["component_index"]),
                    size=int(row["component_size"]),
                ))
            except (KeyError, ValueError, TypeError):
                raise ParseError(f"malformed events CSV row: {row}") from None
    records.sort(key=lambda r: (r.node, r.interval, r.kind, r.component))
    counts = np.zeros((n, theta - 1), dtype=np.int64)
    masks = np.zeros((n, theta - 1), dtype=np.uint8)
    offsets = np.zeros(n + 1, dtype=np.int64)
    for r in records:
        counts[r.node, r.interval] += 1
        masks[r.node, r.interval] |= 1 << r.kind
        offsets[r.node + 1] += 1
    np.cumsum(offsets, out=offsets)
    return EventDatabase(n=n, theta=theta, records=tuple(records), counts=counts,
                         kind_masks=masks, _node_offsets=offsets)


def stage_stats(network_path, events_csv_path, summary_path, out_dir, alpha) -> None:
    with open(network_path, encoding="utf-8") as f:
        net = load_presliced(f)
    summary = _load_summary(summary_path)
    if summary["n"] != net.n or summary["theta"] != net.theta:
        raise ContractError("summary does not match the network file")
    db = _event_db_from_csv(events_csv_path, net.n, net.theta)
    table = per_interval_counts(db)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "event_counts.csv", "w", encoding="utf-8") as f:
        write_counts_csv(table, f)
    report = event_count_regressions(net, db, alpha=alpha)
    with open(out / "regression.json", "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    print(f"wrote event counts and regressions -> {out}")


def _sha256(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def stage_pipeline(cfg: PipelineConfig) -> None:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: list[Path] = []

    network_path = out / "network.tsv"
    if cfg.format == "temporal":
        stage_slice(cfg.input, network_path,
                    SliceConfig(length=cfg.slice_len, overlap=cfg.overlap,
                                origin=cfg.origin, count=cfg.slice_count))
    else:
        with open(cfg.input, encoding="utf-8") as f:
            net = load_presliced(f)
        network_path.write_text(serialize_presliced(net), encoding="utf-8")
    artifacts.append(network_path)

    stage_events(network_path, out, threads=cfg.threads)
    events_jsonl = out / "events.jsonl"
    events_csv = out / "events.csv"
    summary_json = out / "summary.json"
    artifacts += [events_csv, events_jsonl, summary_json]

    closed_path = out / "patterns_closed.json"
    stage_mine(events_jsonl, summary_json, closed_path, "closed",
               cfg.min_sup, cfg.top_k, cfg.min_len)
    topk_path = out / "patterns_topk.json"
    stage_mine(events_jsonl, summary_json, topk_path, "topk",
               cfg.min_sup, cfg.top_k, cfg.min_len)
    artifacts += [closed_path, topk_path]

    stage_cluster(events_jsonl, summary_json, out, cfg.linkage, cfg.k_max,
                  cfg.dtw_window, cfg.threads)
    clusters_csv = out / "clusters.csv"
    artifacts += [clusters_csv, out / "asw_curve.csv", out / "dendrogram.txt"]

    for cid in sorted(_load_clusters_csv(clusters_csv)):
        path = out / f"patterns_cluster_{cid}.json"
        stage_mine(events_jsonl, summary_json, path, "closed",
                   cfg.min_sup, cfg.top_k, cfg.min_len,
                   clusters_path=clusters_csv, cluster_id=cid)
        artifacts.append(path)

    stage_stats(network_path, events_csv, summary_json, out, alpha=0.05)
    artifacts += [out / "event_counts.csv", out / "regression.json"]

    with open(out / "config.json", "w", encoding="utf-8") as f:
        json.dump(asdict(cfg), f, indent=2)
        f.write("\n")
    manifest = {
        "version": __version__,
        "stages": {p.name: _sha256(p) for p in artifacts},
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    print(f"pipeline complete; manifest covers {len(artifacts)} artifacts -> {out}")


# -- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nevo", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"nevo {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("slice", help="window a temporal edge list into slices")
    sp.add_argument("--input", required=True)
    sp.add_argument("--slice-len", type=int, required=True)
    sp.add_argument("--overlap", type=int, default=0)
    sp.add_argument("--origin", type=int, default=0)
    sp.add_argument("--count", type=int, default=None, help="cap on the number of slices")
    sp.add_argument("--out", required=True)

    ep = sub.add_parser("events", help="detect neighborhood events")
    ep.add_argument("--network", required=True, help="pre-sliced edge list")
    ep.add_argument("--threads", type=int, default=None)
    ep.add_argument("--out", required=True, help="output directory")

    mp = sub.add_parser("mine", help="mine sequential patterns")
    mp.add_argument("--events", required=True, help="events.jsonl from the events stage")
    mp.add_argument("--summary", required=True, help="summary.json from the events stage")
    mp.add_argument("--mode", choices=("closed", "topk"), default="closed")
    mp.add_argument("--min-sup", type=float, default=0.5)
    mp.add_argument("--top-k", type=int, default=10)
    mp.add_argument("--min-len", type=int, default=2)
    mp.add_argument("--clusters", default=None, help="clusters.csv for cluster-scoped mining")
    mp.add_argument("--cluster-id", type=int, default=None)
    mp.add_argument("--out", required=True)

    cp = sub.add_parser("cluster", help="cluster nodes by event-count series")
    cp.add_argument("--events", required=True)
    cp.add_argument("--summary", required=True)
    cp.add_argument("--linkage", choices=("average", "single", "complete"), default="average")
    cp.add_argument("--k-max", type=int, default=15)
    cp.add_argument("--dtw-window", type=int, default=None)
    cp.add_argument("--threads", type=int, default=None)
    cp.add_argument("--out", required=True, help="output directory")

    tp = sub.add_parser("stats", help="per-interval counts and regressions")
    tp.add_argument("--network", required=True)
    tp.add_argument("--events", required=True, help="events.csv from the events stage")
    tp.add_argument("--summary", required=True)
    tp.add_argument("--alpha", type=float, default=0.05)
    tp.add_argument("--out", required=True, help="output directory")

    pp = sub.add_parser("pipeline", help="run every stage end to end")
    pp.add_argument("--input", required=True)
    pp.add_argument("--format", choices=("temporal", "presliced"), required=True)
    pp.add_argument("--slice-len", type=int, default=None)
    pp.add_argument("--overlap", type=int, default=0)
    pp.add_argument("--origin", type=int, default=0)
    pp.add_argument("--count", type=int, default=None)
    pp.add_argument("--min-sup", type=float, default=0.5)
    pp.add_argument("--top-k", type=int, default=10)
    pp.add_argument("--min-len", type=int, default=2)
    pp.add_argument("--linkage", choices=("average", "single", "complete"), default="average")
    pp.add_argument("--k-max", type=int, default=15)
    pp.add_argument("--dtw-window", type=int, default=None)
    pp.add_argument("--threads", type=int, default=None)
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--out", required=True, help="output directory")
    return p


def _dispatch(args) -> None:
    threads = getattr(args, "threads", None)
    if threads is None:
        threads = _default_threads()
    if args.command == "slice":
        stage_slice(args.input, args.out,
                    SliceConfig(length=args.slice_len, overlap=args.overlap,
                                origin=args.origin, count=args.count))
    elif args.command == "events":
        stage_events(args.network, args.out, threads=threads)
    elif args.command == "mine":
        stage_mine(args.events, args.summary, args.out, args.mode, args.min_sup,
                   args.top_k, args.min_len, clusters_path=args.clusters,
                   cluster_id=args.cluster_id)
    elif args.command == "cluster":
        stage_cluster(args.events, args.summary, args.out, args.linkage,
                      args.k_max, args.dtw_window, threads)
    elif args.command == "stats":
        stage_stats(args.network, args.events, args.summary, args.out, args.alpha)
    elif args.command == "pipeline":
        stage_pipeline(PipelineConfig(
            input=args.input, format=args.format, out=args.out,
            slice_len=args.slice_len, overlap=args.overlap, origin=args.origin,
            slice_count=args.count, min_sup=args.min_sup, top_k=args.top_k,
            min_len=args.min_len, linkage=args.linkage, k_max=args.k_max,
            dtw_window=args.dtw_window, threads=threads, seed=args.seed,
        ))
    else:  # pragma: no cover - argparse enforces the choices
        raise ContractError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _dispatch(args)
    except (ParseError, OSError) as exc:
        sys.stderr.write(f"nevo: data error: {exc}\n")
        return 2
    except ContractError as exc:
        sys.stderr.write(f"nevo: data error: {exc}\n")
        return 2
    except NevoError as exc:
        sys.stderr.write(f"nevo: internal error: {exc}\n")
        return 3
    except Exception as exc:  # invariant violations surface as exit 3
        sys.stderr.write(f"nevo: internal error: {type(exc).__name__}: {exc}\n")
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
