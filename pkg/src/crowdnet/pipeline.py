"""End-to-end analysis pipeline and its JSON artifacts.

Stages: co-registration network, modularity clustering, network metric
summaries, worker metric table, per-metric ANOVA.  Every artifact is JSON
with sorted keys and floats rounded to nine significant digits, and each
stage records the SHA-256 of its input stage, so identical inputs yield
byte-identical runs with verifiable lineage.  Artifact builders take
explicit inputs so the standalone stage commands and the full ``analyze``
command share one serialization path.  Wall-clock timings go to the log,
never into artifacts.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .centrality import (
    CentralityScores,
    ClusterNetworkSummary,
    DEFAULT_DAMPING,
    centrality_scores,
    summarize_clusters,
)
from .community import Partition, cluster_sizes, greedy_cluster
from .dataio import Dataset, serialize_dataset
from .graph import WorkerGraph, build_bipartite, project_workers
from .metrics import MetricTable, active_workers, build_metric_table
from .stats import AnovaResult, one_way_anova

log = logging.getLogger("crowdnet")

ANOVA_METRICS = ("reliability", "trustworthiness", "success", "efficiency", "elasticity")
WORKER_LEVEL_METRICS = ("reliability", "trustworthiness", "success", "efficiency")


class PipelineError(RuntimeError):
    """Analysis-level failure (distinct from usage/configuration errors)."""


@dataclass(frozen=True)
class PipelineFlags:
    weighted: bool = False
    min_weight: int = 1
    cn_scope: str = "cluster"
    anova_unit: str = "worker"

    def as_dict(self) -> dict:
        return {
            "weighted": self.weighted,
            "min_weight": self.min_weight,
            "cn_scope": self.cn_scope,
            "anova_unit": self.anova_unit,
        }


@dataclass
class PipelineRun:
    dataset: Dataset
    flags: PipelineFlags
    graph: WorkerGraph
    partition: Partition
    scores: CentralityScores
    summary: ClusterNetworkSummary
    table: MetricTable
    anova: dict[str, AnovaResult | None]
    active: set[str]
    timings: dict[str, float] = field(default_factory=dict)


def _round9(obj):
    """Round every float to nine significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_round9(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def provenance(stage: str, input_hash, flags: PipelineFlags) -> dict:
    return {
        "stage": stage,
        "input_sha256": input_hash,
        "tool_version": __version__,
        "flags": flags.as_dict(),
    }


# ---------------------------------------------------------------------------
# Stage computations


def build_network(dataset: Dataset, flags: PipelineFlags) -> tuple[WorkerGraph, set[str]]:
    """Active-worker filter plus bipartite projection; errors when edgeless."""
    active = active_workers(dataset.events)
    events = [e for e in dataset.events if e.worker_id in active]
    bipartite = build_bipartite(events)
    graph = project_workers(bipartite, min_weight=flags.min_weight)
    if graph.n_edges == 0:
        raise PipelineError(
            "co-registration network has no edges: no task was registered by "
            "two workers (at the configured minimum weight); nothing to cluster")
    return graph, active


def run_pipeline(dataset: Dataset, flags: PipelineFlags = PipelineFlags()) -> PipelineRun:
    """Execute every stage in memory; raises PipelineError on an edgeless network."""
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    graph, active = build_network(dataset, flags)
    timings["network"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    partition = greedy_cluster(graph, weighted=flags.weighted)
    timings["cluster"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    scores = centrality_scores(graph, partition, cn_scope=flags.cn_scope)
    summary = summarize_clusters(scores, partition)
    timings["centrality"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    table = build_metric_table(dataset, partition.assignment)
    timings["metrics"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    anova = anova_from_body(metrics_body(table), flags.anova_unit)
    timings["stats"] = time.perf_counter() - t0

    for stage, seconds in timings.items():
        log.info("stage %-10s %.3fs", stage, seconds)
    return PipelineRun(
        dataset=dataset, flags=flags, graph=graph, partition=partition,
        scores=scores, summary=summary, table=table, anova=anova,
        active=active, timings=timings,
    )


def anova_from_body(body: dict, unit: str = "worker") -> dict[str, AnovaResult | None]:
    """One ANOVA per metric across clusters, from a metrics document.

    ``unit`` picks the observation level for the four worker metrics:
    per-worker values or per-belt cell means.  Elasticity is cluster-level
    by definition, so its observations are the per-project capacity shares.
    """
    if unit not in ("worker", "cell"):
        raise ValueError(f"anova unit must be 'worker' or 'cell', got {unit!r}")
    clusters = sorted(row["cluster"] for row in body["cluster_rows"])
    results: dict[str, AnovaResult | None] = {}
    for metric in WORKER_LEVEL_METRICS:
        groups = []
        for c in clusters:
            if unit == "worker":
                values = [
                    row[metric]
                    for _, row in sorted(body["per_worker"].items())
                    if row["cluster"] == c and row[metric] is not None
                ]
            else:
                values = [
                    cell[metric]
                    for cell in body["belt_cells"]
                    if cell["cluster"] == c and cell[metric] is not None
                ]
            if values:
                groups.append(values)
        results[metric] = _try_anova(groups)
    el_groups = [
        body["elasticity_observations"][str(c)]
        for c in clusters if body["elasticity_observations"].get(str(c))
    ]
    results["elasticity"] = _try_anova(el_groups)
    return results


def _try_anova(groups) -> AnovaResult | None:
    if len(groups) < 2:
        return None
    if sum(len(g) for g in groups) - len(groups) < 1:
        return None
    return one_way_anova(groups)


# ---------------------------------------------------------------------------
# Artifact documents


def graph_artifact(
    graph: WorkerGraph,
    active: set[str],
    dataset: Dataset,
    flags: PipelineFlags,
    dataset_hash: str,
) -> dict:
    isolated = sum(1 for v in graph.nodes if graph.degree(v) == 0)
    return {
        "nodes": list(graph.nodes),
        "edges": [[u, v, w] for (u, v), w in graph.edges.items()],
        "n_nodes": graph.n_nodes,
        "n_edges": graph.n_edges,
        "isolated_nodes": isolated,
        "active_workers": len(active),
        "total_workers": len(dataset.workers),
        "active_ratio": (len(active) / len(dataset.workers)) if dataset.workers else None,
        "dataset": {
            "workers": len(dataset.workers),
            "tasks": len(dataset.tasks),
            "projects": len({t.project_id for t in dataset.tasks}),
            "events": len(dataset.events),
            "seed": dataset.metadata.get("seed"),
        },
        "provenance": provenance("network", dataset_hash, flags),
    }


def partition_artifact(p: Partition, flags: PipelineFlags, graph_hash: str) -> dict:
    return {
        "assignment": dict(sorted(p.assignment.items())),
        "modularity": p.modularity,
        "n_clusters": p.n_clusters,
        "cluster_sizes": cluster_sizes(p),
        "merge_trace": [[a, b, dq] for a, b, dq in p.merge_trace],
        "provenance": provenance("cluster", graph_hash, flags),
    }


def summary_artifact(
    summary: ClusterNetworkSummary, flags: PipelineFlags, partition_hash: str
) -> dict:
    rows = []
    for r in summary.rows:
        rows.append({
            "cluster": r.cluster,
            "n_workers": r.size,
            "common_neighbors": {"mean": r.cn_mean, "std": r.cn_std},
            "worker_rank": {"mean": r.wr_mean, "std": r.wr_std},
            "closeness": {"mean": r.cc_mean, "std": r.cc_std},
            "betweenness": {"mean": r.bc_mean, "std": r.bc_std},
        })
    return {
        "clusters": rows,
        "worker_rank_method": {"kind": "damped-link-analysis", "damping": DEFAULT_DAMPING,
                               "teleport": "uniform", "edge_weights": "counts"},
        "provenance": provenance("network-summary", partition_hash, flags),
    }


def metrics_body(t: MetricTable) -> dict:
    belt_cells = [
        {
            "cluster": c.cluster, "belt": c.belt, "n_workers": c.n_workers,
            "reliability": c.reliability, "trustworthiness": c.trustworthiness,
            "success": c.success, "efficiency": c.efficiency,
        }
        for c in t.belt_cells
    ]
    cluster_rows = [
        {
            "cluster": r.cluster, "n_workers": r.n_workers,
            "elasticity": r.elasticity, "strategy_n": r.strategy_n,
            "mean_registrations": r.mean_registrations,
            "mean_confidence": r.mean_confidence,
            "mean_contest": r.mean_contest,
            "mean_deceitfulness": r.mean_deceitfulness,
        }
        for r in t.cluster_rows
    ]
    per_worker = {
        w: {
            "cluster": row.cluster, "belt": row.belt,
            "registrations": row.registrations,
            "reliability": row.reliability,
            "trustworthiness": row.trustworthiness,
            "success": row.success, "efficiency": row.efficiency,
            "contest": row.contest, "confidence": row.confidence,
            "deceitfulness": row.deceitfulness,
            "proficiency": dict(sorted(row.proficiency.items())),
        }
        for w, row in sorted(t.per_worker.items())
    }
    return {
        "belt_cells": belt_cells,
        "cluster_rows": cluster_rows,
        "per_worker": per_worker,
        "elasticity_observations": {
            str(c): obs for c, obs in sorted(t.elasticity_by_cluster.items())
        },
    }


def metrics_artifact(t: MetricTable, flags: PipelineFlags, inputs) -> dict:
    body = metrics_body(t)
    body["provenance"] = provenance("metrics", inputs, flags)
    return body


def anova_artifact(
    anova: dict[str, AnovaResult | None], flags: PipelineFlags, metrics_hash: str
) -> dict:
    tests = {}
    for metric in ANOVA_METRICS:
        res = anova.get(metric)
        if res is None:
            tests[metric] = None
            continue
        tests[metric] = {
            "f_statistic": res.f_statistic,
            "df_between": res.df_between,
            "df_within": res.df_within,
            "p_value": res.p_value,
            "group_means": list(res.group_means),
            "grand_mean": res.grand_mean,
            "degenerate": res.degenerate,
        }
    return {
        "tests": tests,
        "unit": flags.anova_unit,
        "design_note": "between-groups one-way ANOVA over disjoint worker clusters",
        "provenance": provenance("stats", metrics_hash, flags),
    }


def _write(out: Path, name: str, doc: dict) -> tuple[Path, str]:
    text = dump_json(doc)
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path, sha256_text(text)


def write_run_directory(run: PipelineRun, out_dir) -> dict[str, Path]:
    """Write all stage artifacts plus report and charts; returns the paths."""
    from .report import write_report_from_run_dir  # keeps matplotlib import lazy

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    dataset_text = serialize_dataset(run.dataset)
    (out / "dataset.json").write_text(dataset_text, encoding="utf-8")
    paths["dataset"] = out / "dataset.json"
    dataset_hash = sha256_text(dataset_text)

    paths["graph"], graph_hash = _write(
        out, "graph.json",
        graph_artifact(run.graph, run.active, run.dataset, run.flags, dataset_hash))
    paths["partition"], partition_hash = _write(
        out, "partition.json",
        partition_artifact(run.partition, run.flags, graph_hash))
    paths["network_summary"], _ = _write(
        out, "network_summary.json",
        summary_artifact(run.summary, run.flags, partition_hash))
    paths["metrics"], metrics_hash = _write(
        out, "metrics.json",
        metrics_artifact(run.table, run.flags,
                         {"dataset": dataset_hash, "partition": partition_hash}))

    # The serialized ANOVA is recomputed from the metrics document just
    # written, so the standalone stats command reproduces it byte for byte.
    metrics_doc = json.loads(paths["metrics"].read_text(encoding="utf-8"))
    anova = anova_from_body(metrics_doc, run.flags.anova_unit)
    paths["anova"], _ = _write(
        out, "anova.json", anova_artifact(anova, run.flags, metrics_hash))

    paths.update(write_report_from_run_dir(out))
    return paths
