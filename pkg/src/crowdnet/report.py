"""Human-readable run report: markdown summary plus the metric charts.

Rendering consumes the stage artifacts already written to the run
directory, so every number in the report is traceable to a stage output;
the only report-side logic is formatting and the 0.05 significance
annotation on the ANOVA rows.
"""

from __future__ import annotations

import json
from pathlib import Path

from .charts import render_bar_chart
from .pipeline import ANOVA_METRICS, sha256_text

BELT_SERIES = ["Gray", "Green", "Blue", "Yellow"]

CHART_METRICS = (
    ("reliability", "Average worker reliability per belt per cluster"),
    ("trustworthiness", "Average worker trustworthiness per belt per cluster"),
    ("success", "Average worker success per belt per cluster"),
    ("efficiency", "Average worker efficiency per belt per cluster"),
)

SIGNIFICANCE_LEVEL = 0.05

ARTIFACT_FILES = ("graph", "partition", "network_summary", "metrics", "anova")


def _fmt(x, digits: int = 6) -> str:
    if x is None:
        return "—"
    if isinstance(x, float):
        return f"{x:.{digits}g}"
    return str(x)


def write_report_from_run_dir(run_dir) -> dict[str, Path]:
    """Render charts/*.svg and report.md from the artifacts in a run directory."""
    run_dir = Path(run_dir)
    docs = {}
    hashes = {}
    for name in ARTIFACT_FILES:
        path = run_dir / f"{name}.json"
        if not path.exists():
            raise FileNotFoundError(f"run directory is missing {path.name}")
        text = path.read_text(encoding="utf-8")
        docs[name] = json.loads(text)
        hashes[name] = sha256_text(text)

    charts_dir = run_dir / "charts"
    clusters = sorted(row["cluster"] for row in docs["metrics"]["cluster_rows"])

    chart_paths: dict[str, Path] = {}
    for metric, title in CHART_METRICS:
        cells = {
            (cell["cluster"], cell["belt"]): cell[metric]
            for cell in docs["metrics"]["belt_cells"]
        }
        chart_paths[metric] = render_bar_chart(
            cells, clusters, BELT_SERIES, title, metric,
            charts_dir / f"{metric}.svg")
    el_cells = {
        (row["cluster"], "value"): row["elasticity"]
        for row in docs["metrics"]["cluster_rows"]
    }
    chart_paths["elasticity"] = render_bar_chart(
        el_cells, clusters, ["value"], "Cluster elasticity", "elasticity",
        charts_dir / "elasticity.svg")

    report = run_dir / "report.md"
    report.write_text(_render_markdown(docs, hashes), encoding="utf-8")
    paths = {f"chart_{k}": v for k, v in chart_paths.items()}
    paths["report"] = report
    return paths


def _cell_lookup(metrics_doc: dict):
    return {
        (cell["cluster"], cell["belt"]): cell for cell in metrics_doc["belt_cells"]
    }


def _render_markdown(docs: dict, artifact_hashes: dict) -> str:
    graph = docs["graph"]
    partition = docs["partition"]
    summary = docs["network_summary"]
    metrics_doc = docs["metrics"]
    anova = docs["anova"]
    flags = anova["provenance"]["flags"]

    lines: list[str] = []
    add = lines.append
    add("# Worker network analysis report")
    add("")

    info = graph.get("dataset", {})
    add("## Dataset")
    add("")
    add(f"- workers: {graph['total_workers']} ({graph['active_workers']} active, "
        f"ratio {_fmt(graph['active_ratio'], 4)})")
    add(f"- tasks: {info.get('tasks', '—')} in {info.get('projects', '—')} projects")
    add(f"- registration events: {info.get('events', '—')}")
    if info.get("seed") is not None:
        add(f"- generator seed: {info['seed']}")
    add("")

    add("## Co-registration network")
    add("")
    add(f"- nodes: {graph['n_nodes']}, edges: {graph['n_edges']}, "
        f"isolated nodes: {graph['isolated_nodes']}")
    add(f"- clustering mode: {'weighted' if flags['weighted'] else 'unweighted'}, "
        f"minimum edge weight {flags['min_weight']}")
    add("")

    add("## Clusters")
    add("")
    add(f"- clusters found: {partition['n_clusters']} "
        f"with sizes {partition['cluster_sizes']}")
    add(f"- modularity: {_fmt(partition['modularity'], 9)}")
    add("")
    add("| cluster | workers | #CN mean | #CN std | WR mean | WR std | "
        "CC mean | CC std | BC mean | BC std |")
    add("|---|---|---|---|---|---|---|---|---|---|")
    for r in summary["clusters"]:
        add(f"| C{r['cluster']} | {r['n_workers']} | "
            f"{_fmt(r['common_neighbors']['mean'])} | {_fmt(r['common_neighbors']['std'])} | "
            f"{_fmt(r['worker_rank']['mean'])} | {_fmt(r['worker_rank']['std'])} | "
            f"{_fmt(r['closeness']['mean'])} | {_fmt(r['closeness']['std'])} | "
            f"{_fmt(r['betweenness']['mean'])} | {_fmt(r['betweenness']['std'])} |")
    add("")

    add("## Worker metrics per belt per cluster")
    add("")
    add("Absent cells (no eligible workers) are shown as —, never as 0.")
    add("")
    cells = _cell_lookup(metrics_doc)
    clusters = sorted(row["cluster"] for row in metrics_doc["cluster_rows"])
    for metric, _title in CHART_METRICS:
        add(f"### {metric.capitalize()}")
        add("")
        add("| cluster | " + " | ".join(BELT_SERIES) + " |")
        add("|---" * (len(BELT_SERIES) + 1) + "|")
        for cluster in clusters:
            row = [f"C{cluster}"]
            for belt in BELT_SERIES:
                cell = cells.get((cluster, belt))
                row.append(_fmt(cell[metric] if cell else None))
            add("| " + " | ".join(row) + " |")
        add("")
        add(f"![{metric}](charts/{metric}.svg)")
        add("")

    add("## Strategy per cluster (Blue and Yellow workers)")
    add("")
    add("| cluster | workers | R | CL | CT | DL | elasticity |")
    add("|---|---|---|---|---|---|---|")
    for r in metrics_doc["cluster_rows"]:
        add(f"| C{r['cluster']} | {r['strategy_n']} | {_fmt(r['mean_registrations'])} | "
            f"{_fmt(r['mean_confidence'])} | {_fmt(r['mean_contest'])} | "
            f"{_fmt(r['mean_deceitfulness'])} | {_fmt(r['elasticity'])} |")
    add("")
    add("![elasticity](charts/elasticity.svg)")
    add("")

    add("## Cross-cluster ANOVA")
    add("")
    add("| metric | F | df | p-value | at 0.05 |")
    add("|---|---|---|---|---|")
    for metric in ANOVA_METRICS:
        res = anova["tests"].get(metric)
        if res is None:
            add(f"| {metric} | — | — | — | not testable |")
            continue
        marker = ("significant" if res["p_value"] < SIGNIFICANCE_LEVEL
                  else "not significant")
        if res.get("degenerate"):
            marker += " (degenerate: zero within-group variance)"
        add(f"| {metric} | {_fmt(res['f_statistic'])} | "
            f"({res['df_between']}, {res['df_within']}) | "
            f"{_fmt(res['p_value'])} | {marker} |")
    add("")
    add(f"Observation unit: per-{anova['unit']} values per cluster; "
        "elasticity uses per-project capacity shares.")
    add("")

    add("## Provenance")
    add("")
    add("| artifact | sha256 |")
    add("|---|---|")
    for name in ARTIFACT_FILES:
        add(f"| {name}.json | `{artifact_hashes[name]}` |")
    add("")
    add(f"Flags: `{flags}`")
    add("")
    return "\n".join(lines)
