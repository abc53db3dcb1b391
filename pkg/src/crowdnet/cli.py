"""Command-line interface.

Subcommands cover the full pipeline (``analyze``) plus every stage in
isolation (``synth``, ``ingest``, ``network``, ``cluster``, ``metrics``,
``stats``, ``report``) so intermediate artifacts can be produced and
inspected independently.  Exit codes: 0 success, 1 analysis-level failure
(for example an edgeless network or invalid data content), 2 usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .community import Partition, cluster_sizes, greedy_cluster
from .dataio import (
    Dataset,
    DatasetError,
    parse_dataset,
    read_dataset,
    save_dataset,
    serialize_dataset,
    write_dataset_csvs,
)
from .graph import graph_from_edges
from .metrics import build_metric_table
from .pipeline import (
    PipelineError,
    PipelineFlags,
    anova_artifact,
    anova_from_body,
    dump_json,
    graph_artifact,
    metrics_artifact,
    partition_artifact,
    provenance,
    run_pipeline,
    sha256_text,
    summary_artifact,
    build_network,
    write_run_directory,
)
from .synth import SynthConfig, SynthConfigError, generate_synthetic

log = logging.getLogger("crowdnet")


def _load_data(path) -> Dataset:
    """Accept a canonical dataset document or a directory of the three CSVs."""
    p = Path(path)
    if p.is_dir():
        return parse_dataset(
            p / "tasks.csv", p / "registrations.csv", p / "workers.csv")
    return read_dataset(p)


def _load_partition(path) -> tuple[Partition, str]:
    text = Path(path).read_text(encoding="utf-8")
    doc = json.loads(text)
    assignment = {w: int(c) for w, c in doc["assignment"].items()}
    part = Partition(
        assignment=assignment,
        modularity=float(doc.get("modularity", 0.0)),
        merge_trace=tuple(
            (a, b, float(dq)) for a, b, dq in doc.get("merge_trace", [])),
    )
    return part, sha256_text(text)


def _load_graph(path):
    text = Path(path).read_text(encoding="utf-8")
    doc = json.loads(text)
    return graph_from_edges(doc["edges"], nodes=doc["nodes"]), sha256_text(text)


def _csv_ints(raw: str) -> tuple[int, ...]:
    return tuple(int(part) for part in raw.split(",") if part.strip())


def _csv_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(part) for part in raw.split(",") if part.strip())


def _flags(args) -> PipelineFlags:
    return PipelineFlags(
        weighted=getattr(args, "weighted", False),
        min_weight=getattr(args, "min_weight", 1),
        cn_scope=getattr(args, "cn_scope", "cluster"),
        anova_unit=getattr(args, "anova_unit", "worker"),
    )


def _write_artifact(out_dir, name: str, doc: dict) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(dump_json(doc), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_synth(args) -> int:
    cfg = SynthConfig(
        worker_count=args.workers,
        task_count=args.tasks,
        project_count=args.projects,
        planted_cluster_count=args.clusters,
        cluster_sizes=_csv_ints(args.sizes) if args.sizes else None,
        p_in=args.p_in,
        p_out=args.p_out,
        cluster_submission_offset=(
            _csv_floats(args.offsets) if args.offsets else None),
        valid_prob=args.valid_prob,
        inactive_fraction=args.inactive_fraction,
        seed=args.seed,
    )
    dataset = generate_synthetic(cfg)
    out = Path(args.out)
    write_dataset_csvs(dataset, out)
    save_dataset(dataset, out / "dataset.json")
    print(f"wrote {len(dataset.workers)} workers, {len(dataset.tasks)} tasks, "
          f"{len(dataset.events)} events to {out}")
    return 0


def _cmd_ingest(args) -> int:
    dataset = parse_dataset(args.tasks, args.registrations, args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(dataset, out / "dataset.json")
    rejected = dataset.metadata.get("rejected_rows", 0)
    for line in dataset.metadata.get("diagnostics", []):
        log.warning("%s", line)
    print(f"ingested {len(dataset.workers)} workers, {len(dataset.tasks)} tasks, "
          f"{len(dataset.events)} events ({rejected} rows rejected)")
    return 0


def _cmd_network(args) -> int:
    dataset = _load_data(args.data)
    flags = _flags(args)
    graph, active = build_network(dataset, flags)
    doc = graph_artifact(graph, active, dataset, flags,
                         sha256_text(serialize_dataset(dataset)))
    path = _write_artifact(args.out, "graph.json", doc)
    print(f"wrote {path} ({graph.n_nodes} nodes, {graph.n_edges} edges)")
    return 0


def _cmd_cluster(args) -> int:
    graph, graph_hash = _load_graph(args.graph)
    flags = _flags(args)
    partition = greedy_cluster(graph, weighted=flags.weighted)
    doc = partition_artifact(partition, flags, graph_hash)
    path = _write_artifact(args.out, "partition.json", doc)
    print(f"wrote {path} ({partition.n_clusters} clusters, "
          f"modularity {partition.modularity:.6g})")
    return 0


def _cmd_metrics(args) -> int:
    dataset = _load_data(args.data)
    flags = _flags(args)
    partition, partition_hash = _load_partition(args.partition)
    dataset_hash = sha256_text(serialize_dataset(dataset))

    if args.graph:
        from .centrality import centrality_scores, summarize_clusters

        graph, _ = _load_graph(args.graph)
        scores = centrality_scores(graph, partition, cn_scope=flags.cn_scope)
        summary = summarize_clusters(scores, partition)
        _write_artifact(args.out, "network_summary.json",
                        summary_artifact(summary, flags, partition_hash))

    table = build_metric_table(dataset, partition.assignment)
    doc = metrics_artifact(table, flags,
                           {"dataset": dataset_hash, "partition": partition_hash})
    path = _write_artifact(args.out, "metrics.json", doc)
    print(f"wrote {path} ({len(table.per_worker)} workers in "
          f"{len(table.cluster_rows)} clusters)")
    return 0


def _cmd_stats(args) -> int:
    text = Path(args.metrics).read_text(encoding="utf-8")
    body = json.loads(text)
    flags = _flags(args)
    anova = anova_from_body(body, flags.anova_unit)
    doc = anova_artifact(anova, flags, sha256_text(text))
    path = _write_artifact(args.out, "anova.json", doc)
    tested = sum(1 for t in doc["tests"].values() if t is not None)
    print(f"wrote {path} ({tested} metrics tested)")
    return 0


def _cmd_analyze(args) -> int:
    dataset = _load_data(args.data)
    run = run_pipeline(dataset, _flags(args))
    paths = write_run_directory(run, args.out)
    print(f"run directory: {args.out}")
    print(f"clusters: {run.partition.n_clusters} sizes {cluster_sizes(run.partition)} "
          f"modularity {run.partition.modularity:.6g}")
    print(f"report: {paths['report']}")
    return 0


def _cmd_report(args) -> int:
    from .report import write_report_from_run_dir

    paths = write_report_from_run_dir(args.run)
    print(f"wrote {paths['report']}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_out(parser, required=True):
    parser.add_argument("--out", required=required, help="output directory")


def _add_network_flags(parser):
    parser.add_argument("--min-weight", type=int, default=1,
                        help="minimum co-registration count for an edge (default 1)")


def _add_cluster_flags(parser):
    parser.add_argument("--weighted", action="store_true",
                        help="use edge weights in the modularity objective")


def _add_metric_flags(parser):
    parser.add_argument("--cn-scope", choices=("cluster", "global"), default="cluster",
                        help="peer scope for common-neighbor averages")


def _add_stats_flags(parser):
    parser.add_argument("--anova-unit", choices=("worker", "cell"), default="worker",
                        help="observation unit for the worker-metric ANOVAs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdnet",
        description="Crowd-worker co-registration network analytics")
    parser.add_argument("--version", action="version", version=f"crowdnet {__version__}")
    parser.add_argument("--quiet", action="store_true", help="suppress progress logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--workers", type=int, default=200)
    p.add_argument("--tasks", type=int, default=400)
    p.add_argument("--projects", type=int, default=40)
    p.add_argument("--clusters", type=int, default=4)
    p.add_argument("--sizes", help="comma-separated cluster sizes (default near-equal)")
    p.add_argument("--p-in", type=float, default=0.3,
                   help="registration probability for the task's home cluster")
    p.add_argument("--p-out", type=float, default=0.01,
                   help="registration probability for other workers")
    p.add_argument("--offsets",
                   help="comma-separated per-cluster submission-probability offsets")
    p.add_argument("--valid-prob", type=float, default=0.8)
    p.add_argument("--inactive-fraction", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="parse and validate the three delimited files")
    p.add_argument("--tasks", required=True)
    p.add_argument("--registrations", required=True)
    p.add_argument("--workers", required=True)
    _add_out(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("network", help="build the co-registration graph")
    p.add_argument("--data", required=True,
                   help="canonical dataset.json or a directory with the three CSVs")
    _add_network_flags(p)
    _add_out(p)
    p.set_defaults(func=_cmd_network)

    p = sub.add_parser("cluster", help="cluster a graph by greedy modularity")
    p.add_argument("--graph", required=True, help="graph.json from the network stage")
    _add_cluster_flags(p)
    _add_out(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("metrics", help="worker metric table (and network summary)")
    p.add_argument("--data", required=True)
    p.add_argument("--partition", required=True, help="partition.json")
    p.add_argument("--graph", help="graph.json; enables network_summary.json")
    _add_metric_flags(p)
    _add_out(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("stats", help="cross-cluster ANOVA from a metrics document")
    p.add_argument("--metrics", required=True, help="metrics.json")
    _add_stats_flags(p)
    _add_out(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("analyze", help="full pipeline into a run directory")
    p.add_argument("--data", required=True)
    _add_network_flags(p)
    _add_cluster_flags(p)
    _add_metric_flags(p)
    _add_stats_flags(p)
    _add_out(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("report", help="render report.md and charts from a run directory")
    p.add_argument("--run", required=True, help="run directory with stage artifacts")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except SynthConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
