"""Greedy agglomerative modularity clustering.

Starts from singleton communities and repeatedly merges the adjacent pair
with the largest modularity gain, recording the full merge sequence.  The
returned partition is the one with maximum modularity along that path, so
plateaus never cause a premature stop.  The graph is treated as unweighted
by default; ``weighted=True`` generalizes the intra-cluster edge mass and
degree sums to edge-weight sums.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .graph import WorkerGraph

MergeRecord = tuple[str, str, float]


@dataclass(frozen=True)
class Partition:
    """Cluster assignment plus the modularity it achieves.

    Cluster indices are contiguous from 0, ordered by descending cluster
    size (ties broken by smallest member id).  ``merge_trace`` records the
    full agglomeration as (community_a, community_b, gain) with communities
    named by their smallest member.
    """

    assignment: dict[str, int]
    modularity: float
    merge_trace: tuple[MergeRecord, ...]

    @property
    def n_clusters(self) -> int:
        return max(self.assignment.values()) + 1 if self.assignment else 0

    def members(self) -> list[tuple[str, ...]]:
        """Cluster index -> sorted member tuple."""
        groups: dict[int, list[str]] = {}
        for node, c in self.assignment.items():
            groups.setdefault(c, []).append(node)
        return [tuple(sorted(groups[c])) for c in range(len(groups))]


def _edge_weight(w: int, weighted: bool) -> float:
    return float(w) if weighted else 1.0


def modularity(g: WorkerGraph, assignment: dict[str, int], weighted: bool = False) -> float:
    """Partition quality: intra-cluster edge fraction minus its degree-based expectation.

    Sum over clusters of L_c/m - (D_c/2m)^2 with L_c the intra-cluster edge
    mass, D_c the cluster degree mass and m the total edge mass.
    """
    if g.n_edges == 0:
        raise ValueError("modularity undefined for m=0")
    missing = [v for v in g.nodes if v not in assignment]
    if missing:
        raise ValueError(f"assignment missing {len(missing)} nodes, e.g. {missing[0]!r}")
    m = sum(_edge_weight(w, weighted) for w in g.edges.values())
    intra: dict[int, float] = {}
    degree_mass: dict[int, float] = {}
    for (u, v), w in g.edges.items():
        ew = _edge_weight(w, weighted)
        cu, cv = assignment[u], assignment[v]
        if cu == cv:
            intra[cu] = intra.get(cu, 0.0) + ew
        degree_mass[cu] = degree_mass.get(cu, 0.0) + ew
        degree_mass[cv] = degree_mass.get(cv, 0.0) + ew
    q = 0.0
    for c in sorted(degree_mass):
        q += intra.get(c, 0.0) / m - (degree_mass[c] / (2.0 * m)) ** 2
    return q


def _canonical_assignment(groups: list[list[int]], nodes: tuple[str, ...]) -> dict[str, int]:
    """Relabel clusters 0..k-1 by descending size, ties by smallest member id."""
    named = [sorted(nodes[i] for i in grp) for grp in groups if grp]
    named.sort(key=lambda members: (-len(members), members[0]))
    assignment: dict[str, int] = {}
    for idx, members in enumerate(named):
        for node in members:
            assignment[node] = idx
    return assignment


def greedy_cluster(g: WorkerGraph, weighted: bool = False) -> Partition:
    """Agglomerate communities by maximal modularity gain; return the best point.

    Deterministic: equal gains break ties by the lexicographically smallest
    (min label, max label) community pair, where a merged community keeps
    the smaller of its parents' labels (labels start as node ids).  Merging
    continues while any adjacent pair remains, tracking the partition of
    maximum modularity along the way; disconnected components never merge
    with each other because a cross merge has no edge mass.
    """
    if g.n_edges == 0:
        raise ValueError("cannot cluster a graph with no edges")
    nodes = g.nodes
    n = len(nodes)
    index = {v: i for i, v in enumerate(nodes)}

    m = sum(_edge_weight(w, weighted) for w in g.edges.values())
    # a[i]: community degree mass / 2m; dq maps neighbor pairs to merge gains.
    a = [0.0] * n
    for (u, v), w in g.edges.items():
        ew = _edge_weight(w, weighted)
        a[index[u]] += ew / (2.0 * m)
        a[index[v]] += ew / (2.0 * m)

    dq: list[dict[int, float]] = [{} for _ in range(n)]
    heap: list[tuple[float, int, int]] = []
    for (u, v), w in g.edges.items():
        i, j = index[u], index[v]
        if i > j:
            i, j = j, i
        gain = _edge_weight(w, weighted) / m - 2.0 * a[i] * a[j]
        dq[i][j] = gain
        dq[j][i] = gain
        heap.append((-gain, i, j))
    heapq.heapify(heap)

    alive = [True] * n
    q = -sum(x * x for x in a)  # all-singleton starting point
    best_q = q
    best_step = 0
    merges: list[tuple[int, int]] = []
    trace: list[MergeRecord] = []

    while heap:
        neg_gain, i, j = heapq.heappop(heap)
        gain = -neg_gain
        if not alive[i] or not alive[j]:
            continue
        current = dq[i].get(j)
        if current is None or current != gain:
            continue  # stale entry superseded by a later update

        # Merge community j into i (i < j, so the merged label is the smaller).
        merges.append((i, j))
        trace.append((nodes[i], nodes[j], gain))
        q += gain

        neigh_i = dq[i]
        neigh_j = dq[j]
        del neigh_i[j]
        del neigh_j[i]
        for k in sorted(set(neigh_i) | set(neigh_j)):
            in_i = k in neigh_i
            in_j = k in neigh_j
            if in_i and in_j:
                new_gain = neigh_i[k] + neigh_j[k]
            elif in_i:
                new_gain = neigh_i[k] - 2.0 * a[j] * a[k]
            else:
                new_gain = neigh_j[k] - 2.0 * a[i] * a[k]
            neigh_i[k] = new_gain
            dq[k][i] = new_gain
            dq[k].pop(j, None)
            lo, hi = (i, k) if i < k else (k, i)
            heapq.heappush(heap, (-new_gain, lo, hi))
        a[i] += a[j]
        a[j] = 0.0
        dq[j] = {}
        alive[j] = False

        if q > best_q:
            best_q = q
            best_step = len(merges)

    # Replay the merge prefix that reached the best modularity.
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in merges[:best_step]:
        parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    assignment = _canonical_assignment(list(groups.values()), nodes)
    return Partition(
        assignment=assignment,
        modularity=modularity(g, assignment, weighted=weighted),
        merge_trace=tuple(trace),
    )


def cluster_sizes(p: Partition) -> list[int]:
    """Cluster member counts, sorted descending."""
    counts: dict[int, int] = {}
    for c in p.assignment.values():
        counts[c] = counts.get(c, 0) + 1
    return sorted(counts.values(), reverse=True)


def normalized_mutual_information(a: dict[str, int], b: dict[str, int]) -> float:
    """NMI between two partitions of the same node set (arithmetic normalization).

    1.0 for identical partitions up to relabeling; 0.0 when the partitions
    are independent.  Two trivial (single-cluster) partitions compare as 1.
    """
    if set(a) != set(b):
        raise ValueError("partitions cover different node sets")
    n = len(a)
    if n == 0:
        raise ValueError("empty partitions")
    joint: dict[tuple[int, int], int] = {}
    count_a: dict[int, int] = {}
    count_b: dict[int, int] = {}
    for node in a:
        ca, cb = a[node], b[node]
        joint[(ca, cb)] = joint.get((ca, cb), 0) + 1
        count_a[ca] = count_a.get(ca, 0) + 1
        count_b[cb] = count_b.get(cb, 0) + 1
    h_a = -sum((c / n) * math.log(c / n) for c in count_a.values())
    h_b = -sum((c / n) * math.log(c / n) for c in count_b.values())
    if h_a == 0.0 and h_b == 0.0:
        return 1.0
    if h_a == 0.0 or h_b == 0.0:
        return 0.0
    info = 0.0
    for (ca, cb), c in joint.items():
        info += (c / n) * math.log(n * c / (count_a[ca] * count_b[cb]))
    return 2.0 * info / (h_a + h_b)
