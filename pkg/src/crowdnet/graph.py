"""Worker-task incidence and its one-mode projection onto workers.

The bipartite graph records which workers registered for which tasks.
Projecting it onto the worker side yields an undirected co-registration
network whose edge weights count the tasks both endpoints registered for.
Both structures are immutable after construction and iterate in sorted
identifier order, so downstream stages are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def _as_pair(event) -> tuple[str, str]:
    """Accept (worker_id, task_id) tuples or objects with those attributes."""
    if isinstance(event, tuple):
        worker, task = event
        return str(worker), str(task)
    return str(event.worker_id), str(event.task_id)


@dataclass(frozen=True)
class BipartiteGraph:
    """Worker-task registration incidence.

    ``incidence`` maps each task id to the sorted tuple of workers
    registered for it.  ``duplicate_count`` counts input registrations
    that repeated an already-seen (worker, task) pair and were dropped.
    """

    worker_ids: tuple[str, ...]
    task_ids: tuple[str, ...]
    incidence: dict[str, tuple[str, ...]]
    duplicate_count: int = 0

    @property
    def n_workers(self) -> int:
        return len(self.worker_ids)

    @property
    def n_tasks(self) -> int:
        return len(self.task_ids)

    def registrants(self, task_id: str) -> tuple[str, ...]:
        return self.incidence[task_id]


@dataclass(frozen=True)
class WorkerGraph:
    """Undirected weighted co-registration network.

    Edges are keyed by (u, v) with u < v; weights are positive integers
    counting shared tasks.  ``adjacency`` mirrors the edge set in both
    directions for traversal.  Treat all fields as read-only.
    """

    nodes: tuple[str, ...]
    edges: dict[tuple[str, str], int]
    adjacency: dict[str, dict[str, int]] = field(repr=False, default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def weight(self, u: str, v: str) -> int:
        key = (u, v) if u < v else (v, u)
        return self.edges.get(key, 0)

    def neighbors(self, u: str) -> dict[str, int]:
        return self.adjacency[u]

    def degree(self, u: str) -> int:
        return len(self.adjacency[u])

    def index(self) -> dict[str, int]:
        """Node id -> position in the sorted node tuple."""
        return {v: i for i, v in enumerate(self.nodes)}


def build_bipartite(events) -> BipartiteGraph:
    """Collect distinct (worker, task) registration pairs into a bipartite graph.

    Repeated pairs are dropped and counted in ``duplicate_count`` rather
    than rejected; real registration exports contain repeats.
    """
    seen: set[tuple[str, str]] = set()
    by_task: dict[str, list[str]] = {}
    workers: set[str] = set()
    duplicates = 0
    for event in events:
        worker, task = _as_pair(event)
        if (worker, task) in seen:
            duplicates += 1
            continue
        seen.add((worker, task))
        workers.add(worker)
        by_task.setdefault(task, []).append(worker)
    incidence = {task: tuple(sorted(regs)) for task, regs in by_task.items()}
    return BipartiteGraph(
        worker_ids=tuple(sorted(workers)),
        task_ids=tuple(sorted(incidence)),
        incidence=incidence,
        duplicate_count=duplicates,
    )


def project_workers(b: BipartiteGraph, min_weight: int = 1) -> WorkerGraph:
    """One-mode projection: edge (u, v) weighted by the number of shared tasks.

    ``min_weight`` drops edges whose co-registration count falls below the
    threshold (nodes are kept regardless).
    """
    counts: dict[tuple[str, str], int] = {}
    for task in b.task_ids:
        regs = b.incidence[task]
        for i in range(len(regs)):
            for j in range(i + 1, len(regs)):
                pair = (regs[i], regs[j])
                counts[pair] = counts.get(pair, 0) + 1
    edges = {pair: w for pair, w in sorted(counts.items()) if w >= min_weight}
    adjacency: dict[str, dict[str, int]] = {v: {} for v in b.worker_ids}
    for (u, v), w in edges.items():
        adjacency[u][v] = w
        adjacency[v][u] = w
    return WorkerGraph(nodes=b.worker_ids, edges=edges, adjacency=adjacency)


def degree_sequence(g: WorkerGraph) -> dict[str, int]:
    """Unweighted degree per node; degrees sum to twice the edge count."""
    return {v: len(g.adjacency[v]) for v in g.nodes}


def graph_from_edges(edges, nodes=()) -> WorkerGraph:
    """Build a WorkerGraph directly from (u, v[, weight]) triples.

    Convenience for tests and for loading serialized graphs; input order
    does not matter, self-loops are rejected.
    """
    edge_map: dict[tuple[str, str], int] = {}
    node_set: set[str] = {str(v) for v in nodes}
    for item in edges:
        if len(item) == 2:
            u, v = item
            w = 1
        else:
            u, v, w = item
        u, v = str(u), str(v)
        if u == v:
            raise ValueError(f"self-loop on node {u!r}")
        if int(w) < 1:
            raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
        key = (u, v) if u < v else (v, u)
        edge_map[key] = int(w)
        node_set.update(key)
    ordered = tuple(sorted(node_set))
    edges_sorted = dict(sorted(edge_map.items()))
    adjacency: dict[str, dict[str, int]] = {v: {} for v in ordered}
    for (u, v), w in edges_sorted.items():
        adjacency[u][v] = w
        adjacency[v][u] = w
    return WorkerGraph(nodes=ordered, edges=edges_sorted, adjacency=adjacency)
