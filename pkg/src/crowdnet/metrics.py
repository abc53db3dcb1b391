"""Belt assignment, activity filtering, and the nine worker metrics.

Performance (reliability, trustworthiness, success) is the worker's
submission / valid-submission / win ratio over registrations on tasks
where at least one same-cluster peer also registered.  Preference covers
per-technology proficiency, its average (efficiency), and the cluster's
elasticity (share of peak per-project registration capacity).  Strategy
covers contest (share of lower-belt opponents), confidence (largest field
the worker still submits into) and deceitfulness (fraction of registered
tasks that starve).

A metric whose denominator is empty is *absent* (None), never zero; cell
averages skip absent values.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .dataio import Dataset, RegistrationEvent


class Belt(IntEnum):
    GRAY = 0
    GREEN = 1
    BLUE = 2
    YELLOW = 3
    RED = 4

    @property
    def label(self) -> str:
        return self.name.capitalize()


BELT_ORDER = (Belt.GRAY, Belt.GREEN, Belt.BLUE, Belt.YELLOW, Belt.RED)

# Upper rating bound of each belt; boundary ratings belong to the upper belt.
_BELT_UPPER = ((Belt.GRAY, 900.0), (Belt.GREEN, 1200.0),
               (Belt.BLUE, 1500.0), (Belt.YELLOW, 2200.0))

STRATEGY_BELTS = (Belt.BLUE, Belt.YELLOW)


def assign_belt(rating: float) -> Belt:
    """Map a numeric rating onto its belt band."""
    if rating < 0:
        raise ValueError(f"rating must be non-negative, got {rating}")
    for belt, upper in _BELT_UPPER:
        if rating < upper:
            return belt
    return Belt.RED


def monthly_activity(events) -> dict[tuple[int, int], set[str]]:
    """Registering workers grouped by calendar month."""
    months: dict[tuple[int, int], set[str]] = {}
    for e in events:
        key = (e.registration_date.year, e.registration_date.month)
        months.setdefault(key, set()).add(e.worker_id)
    return months


def active_workers(events, months=None) -> set[str]:
    """Workers with at least one registration in some calendar month.

    ``months`` optionally restricts the (year, month) windows considered.
    """
    activity = monthly_activity(events)
    if months is not None:
        wanted = set(months)
        activity = {k: v for k, v in activity.items() if k in wanted}
    out: set[str] = set()
    for group in activity.values():
        out |= group
    return out


@dataclass(frozen=True)
class WorkerProfile:
    worker_id: str
    rating: float
    belt: Belt
    registrations: int
    submissions: int
    valid_submissions: int
    wins: int
    technologies: tuple[str, ...]


@dataclass(frozen=True)
class TaskContext:
    task_id: str
    project_id: str
    status: str
    competition_level: int
    starved: bool
    technologies: tuple[str, ...]
    platforms: tuple[str, ...]


class DataView:
    """Indexed view of a dataset for metric evaluation."""

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.contexts = build_task_contexts(dataset)
        self.profiles = build_worker_profiles(dataset)
        self.events_by_worker: dict[str, list[RegistrationEvent]] = {}
        self.registrants: dict[str, list[str]] = {t: [] for t in self.contexts}
        for e in dataset.events:
            self.events_by_worker.setdefault(e.worker_id, []).append(e)
            self.registrants[e.task_id].append(e.worker_id)


def build_task_contexts(dataset: Dataset) -> dict[str, TaskContext]:
    by_task = dataset.events_by_task()
    contexts: dict[str, TaskContext] = {}
    for t in dataset.tasks:
        evs = by_task.get(t.task_id, [])
        submitted = sum(1 for e in evs if e.submitted)
        contexts[t.task_id] = TaskContext(
            task_id=t.task_id,
            project_id=t.project_id,
            status=t.status,
            competition_level=len(evs),
            starved=(submitted == 0 and t.status == "failed"),
            technologies=t.technologies,
            platforms=t.platforms,
        )
    return contexts


def build_worker_profiles(dataset: Dataset) -> dict[str, WorkerProfile]:
    """Aggregate registration counters per worker; enforces W <= VS <= S <= R."""
    task_map = dataset.task_map()
    counters = {w.worker_id: [0, 0, 0, 0] for w in dataset.workers}
    techs: dict[str, set[str]] = {w.worker_id: set() for w in dataset.workers}
    for e in dataset.events:
        c = counters[e.worker_id]
        c[0] += 1
        c[1] += int(e.submitted)
        c[2] += int(e.valid)
        c[3] += int(e.won)
        techs[e.worker_id].update(task_map[e.task_id].technologies)
    profiles = {}
    for w in dataset.workers:
        r, s, vs, wins = counters[w.worker_id]
        if not wins <= vs <= s <= r:
            raise ValueError(
                f"worker {w.worker_id}: counter chain violated "
                f"(W={wins}, VS={vs}, S={s}, R={r})")
        profiles[w.worker_id] = WorkerProfile(
            worker_id=w.worker_id,
            rating=w.rating,
            belt=assign_belt(w.rating),
            registrations=r,
            submissions=s,
            valid_submissions=vs,
            wins=wins,
            technologies=tuple(sorted(techs[w.worker_id])),
        )
    return profiles


def _peer_competitions(view: DataView, worker: str, members: set[str]):
    """The worker's registrations on tasks with >= 1 other same-cluster registrant."""
    out = []
    for e in view.events_by_worker.get(worker, []):
        if any(r != worker and r in members for r in view.registrants[e.task_id]):
            out.append(e)
    return out


def _performance(view: DataView, worker: str, members: set[str], key) -> float | None:
    eligible = _peer_competitions(view, worker, members)
    if not eligible:
        return None
    return sum(1 for e in eligible if key(e)) / len(eligible)


def reliability(view: DataView, worker: str, members: set[str]) -> float | None:
    """Submission ratio over same-cluster competitions."""
    return _performance(view, worker, members, lambda e: e.submitted)


def trustworthiness(view: DataView, worker: str, members: set[str]) -> float | None:
    """Valid-submission ratio over same-cluster competitions."""
    return _performance(view, worker, members, lambda e: e.valid)


def success_rate(view: DataView, worker: str, members: set[str]) -> float | None:
    """Win ratio over same-cluster competitions."""
    return _performance(view, worker, members, lambda e: e.won)


def proficiency(view: DataView, worker: str, tech: str, members: set[str]) -> float | None:
    """Worker's share of cluster registrations on the technology's tasks.

    The share is taken over the tech-requiring tasks the worker entered:
    own registrations divided by all same-cluster registrations on those
    tasks.  A worker with no registrations on the technology scores 0 when
    the cluster has any; absent when nobody in the cluster touched it.
    """
    my_tasks = [
        e.task_id for e in view.events_by_worker.get(worker, [])
        if tech in view.contexts[e.task_id].technologies
    ]
    if not my_tasks:
        cluster_touches = any(
            tech in view.contexts[e.task_id].technologies
            for m in sorted(members)
            for e in view.events_by_worker.get(m, [])
        )
        return 0.0 if cluster_touches else None
    denom = sum(
        sum(1 for r in view.registrants[t] if r in members) for t in my_tasks
    )
    return len(my_tasks) / denom


def efficiency(view: DataView, worker: str, members: set[str]) -> float | None:
    """Mean proficiency over the technologies of the worker's registered tasks."""
    techs = sorted({
        tech
        for e in view.events_by_worker.get(worker, [])
        for tech in view.contexts[e.task_id].technologies
    })
    if not techs:
        return None
    values = [proficiency(view, worker, tech, members) for tech in techs]
    return sum(values) / len(values)


def elasticity_by_project(view: DataView, members: set[str]) -> dict[str, tuple[int, int]]:
    """Project -> (peak same-cluster registrants, peak total registrants) over its tasks."""
    peaks: dict[str, tuple[int, int]] = {}
    for task_id, ctx in view.contexts.items():
        regs = view.registrants[task_id]
        ours = sum(1 for r in regs if r in members)
        rc, tc = peaks.get(ctx.project_id, (0, 0))
        peaks[ctx.project_id] = (max(rc, ours), max(tc, len(regs)))
    return peaks


def elasticity(view: DataView, members: set[str]) -> float | None:
    """Cluster share of peak per-project registration capacity."""
    peaks = elasticity_by_project(view, members)
    num = sum(rc for rc, _ in peaks.values())
    den = sum(tc for _, tc in peaks.values())
    if den == 0:
        return None
    return num / den


def elasticity_observations(view: DataView, members: set[str]) -> list[float]:
    """Per-project capacity-share ratios (the terms pooled by elasticity)."""
    peaks = elasticity_by_project(view, members)
    return [rc / tc for _, (rc, tc) in sorted(peaks.items()) if tc > 0]


def contest(view: DataView, worker: str) -> float | None:
    """Share of lower-belt registrants across the worker's competitions."""
    events = view.events_by_worker.get(worker, [])
    if not events:
        return None
    belt = view.profiles[worker].belt
    lower = 0
    total = 0
    for e in events:
        regs = view.registrants[e.task_id]
        lower += sum(1 for r in regs if view.profiles[r].belt < belt)
        total += len(regs)
    if total == 0:
        return None
    return lower / total


def confidence(view: DataView, worker: str) -> int:
    """Largest competition level among tasks the worker submitted to; 0 if none."""
    levels = [
        view.contexts[e.task_id].competition_level
        for e in view.events_by_worker.get(worker, [])
        if e.submitted
    ]
    return max(levels) if levels else 0


def deceitfulness(view: DataView, worker: str) -> float | None:
    """Fraction of the worker's registered tasks that starved."""
    events = view.events_by_worker.get(worker, [])
    if not events:
        return None
    starved = sum(1 for e in events if view.contexts[e.task_id].starved)
    return starved / len(events)


@dataclass(frozen=True)
class WorkerMetricRow:
    worker_id: str
    cluster: int
    belt: str
    registrations: int
    reliability: float | None
    trustworthiness: float | None
    success: float | None
    efficiency: float | None
    contest: float | None
    confidence: int
    deceitfulness: float | None
    proficiency: dict[str, float]


@dataclass(frozen=True)
class BeltCell:
    cluster: int
    belt: str
    n_workers: int
    reliability: float | None
    trustworthiness: float | None
    success: float | None
    efficiency: float | None


@dataclass(frozen=True)
class ClusterRow:
    cluster: int
    n_workers: int
    elasticity: float | None
    strategy_n: int
    mean_registrations: float | None
    mean_confidence: float | None
    mean_contest: float | None
    mean_deceitfulness: float | None


@dataclass(frozen=True)
class MetricTable:
    belt_cells: tuple[BeltCell, ...]
    cluster_rows: tuple[ClusterRow, ...]
    per_worker: dict[str, WorkerMetricRow]
    elasticity_by_cluster: dict[int, list[float]]

    def cell(self, cluster: int, belt: str) -> BeltCell | None:
        for c in self.belt_cells:
            if c.cluster == cluster and c.belt == belt:
                return c
        return None


def _mean_present(values) -> float | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return sum(present) / len(present)


def build_metric_table(dataset: Dataset, assignment: dict[str, int]) -> MetricTable:
    """Evaluate all metrics for the partitioned workers and aggregate them.

    Belt-level cells average reliability/trustworthiness/success/efficiency
    per cluster per belt, excluding Red-belt workers; cluster rows carry
    elasticity plus the strategy columns averaged over Blue and Yellow
    workers.  Empty cells stay absent.
    """
    view = DataView(dataset)
    clusters = sorted(set(assignment.values()))
    members: dict[int, set[str]] = {c: set() for c in clusters}
    for worker, c in assignment.items():
        members[c].add(worker)

    per_worker: dict[str, WorkerMetricRow] = {}
    for worker in sorted(assignment):
        c = assignment[worker]
        profile = view.profiles[worker]
        mset = members[c]
        prof = {
            tech: proficiency(view, worker, tech, mset)
            for tech in profile.technologies
        }
        per_worker[worker] = WorkerMetricRow(
            worker_id=worker,
            cluster=c,
            belt=profile.belt.label,
            registrations=profile.registrations,
            reliability=reliability(view, worker, mset),
            trustworthiness=trustworthiness(view, worker, mset),
            success=success_rate(view, worker, mset),
            efficiency=_mean_present(prof.values()),
            contest=contest(view, worker),
            confidence=confidence(view, worker),
            deceitfulness=deceitfulness(view, worker),
            proficiency={t: v for t, v in prof.items() if v is not None},
        )

    belt_cells = []
    for c in clusters:
        for belt in BELT_ORDER:
            if belt == Belt.RED:
                continue
            rows = [
                per_worker[w] for w in sorted(members[c])
                if view.profiles[w].belt == belt
            ]
            belt_cells.append(BeltCell(
                cluster=c,
                belt=belt.label,
                n_workers=len(rows),
                reliability=_mean_present(r.reliability for r in rows),
                trustworthiness=_mean_present(r.trustworthiness for r in rows),
                success=_mean_present(r.success for r in rows),
                efficiency=_mean_present(r.efficiency for r in rows),
            ))

    cluster_rows = []
    elasticity_obs: dict[int, list[float]] = {}
    for c in clusters:
        strategy = [
            per_worker[w] for w in sorted(members[c])
            if view.profiles[w].belt in STRATEGY_BELTS
        ]
        cluster_rows.append(ClusterRow(
            cluster=c,
            n_workers=len(members[c]),
            elasticity=elasticity(view, members[c]),
            strategy_n=len(strategy),
            mean_registrations=_mean_present(r.registrations for r in strategy),
            mean_confidence=_mean_present(r.confidence for r in strategy),
            mean_contest=_mean_present(r.contest for r in strategy),
            mean_deceitfulness=_mean_present(r.deceitfulness for r in strategy),
        ))
        elasticity_obs[c] = elasticity_observations(view, members[c])

    return MetricTable(
        belt_cells=tuple(belt_cells),
        cluster_rows=tuple(cluster_rows),
        per_worker=per_worker,
        elasticity_by_cluster=elasticity_obs,
    )
