"""Bar-chart rendering for the metric tables.

Charts are grouped bars (one group per cluster, one bar per belt) written
as standalone SVG.  Output is byte-reproducible: the SVG hash salt is
pinned and the creation date is stripped, so identical tables render to
identical documents.  Absent cells leave gaps instead of zero-height bars.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

matplotlib.rcParams["svg.hashsalt"] = "crowdnet"

SERIES_COLORS = {
    "Gray": "#9e9e9e",
    "Green": "#43a047",
    "Blue": "#1e88e5",
    "Yellow": "#fbc02d",
    "Red": "#e53935",
    "value": "#546e7a",
}
_FALLBACK_COLOR = "#78909c"


def render_bar_chart(
    cells: dict[tuple[int, str], float | None],
    clusters: list[int],
    series: list[str],
    title: str,
    ylabel: str,
    path,
) -> Path:
    """Render grouped bars for (cluster, series) cells to a standalone SVG.

    ``cells`` maps (cluster, series name) to a value or None; None cells
    are skipped, leaving a gap.  A table with no present values renders an
    empty chart annotated "no data".
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.8 * len(clusters)), 3.4))
    width = 0.8 / max(1, len(series))
    any_value = False
    for si, name in enumerate(series):
        xs, ys = [], []
        for ci, cluster in enumerate(clusters):
            value = cells.get((cluster, name))
            if value is None:
                continue
            xs.append(ci + (si - (len(series) - 1) / 2.0) * width)
            ys.append(value)
        if xs:
            any_value = True
            ax.bar(xs, ys, width=width,
                   color=SERIES_COLORS.get(name, _FALLBACK_COLOR),
                   edgecolor="white", linewidth=0.4, label=name)
    ax.set_title(title)
    ax.set_ylabel(ylabel)
    ax.set_xlabel("cluster")
    ax.set_xticks(range(len(clusters)))
    ax.set_xticklabels([f"C{c}" for c in clusters])
    if any_value:
        if len(series) > 1:
            ax.legend(fontsize=8, ncol=min(5, len(series)), frameon=False)
    else:
        ax.annotate("no data", xy=(0.5, 0.5), xycoords="axes fraction",
                    ha="center", va="center", fontsize=14, color="#666666")
    ax.margins(x=0.02)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
