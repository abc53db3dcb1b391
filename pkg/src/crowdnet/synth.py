"""Seeded synthetic dataset generator with planted worker clusters.

Workers are split into ground-truth clusters; every task is anchored to a
home cluster whose members register with probability ``p_in`` while all
other workers register with probability ``p_out``, so same-cluster pairs
co-register far more often whenever p_in >> p_out.  Belts follow the
configured rating-band distribution, submission behaviour follows per-belt
probabilities (optionally shifted per cluster to inject a reliability
effect), valid submissions pass review with a fixed probability, and each
completed task has exactly one winner.  Everything is drawn from a single
seeded PCG64 stream in a fixed order, so a given seed reproduces the
dataset byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .dataio import Dataset, RegistrationEvent, TaskRecord, WorkerRecord

GENERATOR_NAME = "pcg64"

# Rating bands: (belt name, low, high) with half-open [low, high) intervals.
RATING_BANDS = (
    ("Gray", 0.0, 900.0),
    ("Green", 900.0, 1200.0),
    ("Blue", 1200.0, 1500.0),
    ("Yellow", 1500.0, 2200.0),
    ("Red", 2200.0, 3000.0),
)

DEFAULT_BELT_DISTRIBUTION = {
    "Gray": 0.9002,
    "Green": 0.0288,
    "Blue": 0.0539,
    "Yellow": 0.0154,
    "Red": 0.0016,
}

DEFAULT_SUBMISSION_PROB = {
    "Gray": 0.25,
    "Green": 0.45,
    "Blue": 0.39,
    "Yellow": 0.60,
    "Red": 0.60,
}

TECH_CATALOG = ("java", "python", "javascript", "sql", "csharp", "cpp", "ruby", "go")
PLATFORM_CATALOG = ("web", "mobile", "desktop", "cloud")

WINDOW_START = date(2014, 1, 1)
WINDOW_DAYS = 424  # through 2015-02-28, a 14-month span


class SynthConfigError(ValueError):
    """Invalid or infeasible generator configuration."""


@dataclass(frozen=True)
class SynthConfig:
    worker_count: int = 200
    task_count: int = 400
    project_count: int = 40
    planted_cluster_count: int = 4
    cluster_sizes: tuple[int, ...] | None = None
    p_in: float = 0.3
    p_out: float = 0.01
    belt_distribution: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_BELT_DISTRIBUTION))
    submission_prob: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_SUBMISSION_PROB))
    cluster_submission_offset: tuple[float, ...] | None = None
    valid_prob: float = 0.8
    inactive_fraction: float = 0.0
    seed: int = 0

    def resolved_sizes(self) -> tuple[int, ...]:
        if self.cluster_sizes is not None:
            return tuple(self.cluster_sizes)
        k = self.planted_cluster_count
        base, extra = divmod(self.worker_count, k)
        return tuple(base + (1 if i < extra else 0) for i in range(k))


def _validate(cfg: SynthConfig) -> tuple[int, ...]:
    if cfg.worker_count < 1 or cfg.task_count < 1 or cfg.project_count < 1:
        raise SynthConfigError("worker, task and project counts must be positive")
    if cfg.planted_cluster_count < 1:
        raise SynthConfigError("planted_cluster_count must be >= 1")
    if cfg.project_count > cfg.task_count:
        raise SynthConfigError("more projects than tasks")
    sizes = cfg.resolved_sizes()
    if len(sizes) != cfg.planted_cluster_count:
        raise SynthConfigError(
            f"cluster_sizes has {len(sizes)} entries for "
            f"{cfg.planted_cluster_count} clusters")
    if any(s < 1 for s in sizes):
        raise SynthConfigError("every cluster must have at least one worker")
    if sum(sizes) != cfg.worker_count:
        raise SynthConfigError(
            f"cluster sizes sum to {sum(sizes)}, expected {cfg.worker_count}")
    for name, p in (("p_in", cfg.p_in), ("p_out", cfg.p_out),
                    ("valid_prob", cfg.valid_prob),
                    ("inactive_fraction", cfg.inactive_fraction)):
        if not 0.0 <= p <= 1.0:
            raise SynthConfigError(f"{name} must lie in [0, 1], got {p}")
    if cfg.planted_cluster_count > 1 and cfg.p_in <= cfg.p_out:
        raise SynthConfigError("planted clusters require p_in > p_out")
    belts = [b for b, _, _ in RATING_BANDS]
    if sorted(cfg.belt_distribution) != sorted(belts):
        raise SynthConfigError(f"belt_distribution must cover exactly {belts}")
    if any(p < 0 for p in cfg.belt_distribution.values()):
        raise SynthConfigError("belt shares must be non-negative")
    total = sum(cfg.belt_distribution.values())
    if total <= 0:
        raise SynthConfigError("belt shares must sum to a positive value")
    if sorted(cfg.submission_prob) != sorted(belts):
        raise SynthConfigError(f"submission_prob must cover exactly {belts}")
    if any(not 0.0 <= p <= 1.0 for p in cfg.submission_prob.values()):
        raise SynthConfigError("submission probabilities must lie in [0, 1]")
    if cfg.cluster_submission_offset is not None and \
            len(cfg.cluster_submission_offset) != cfg.planted_cluster_count:
        raise SynthConfigError("cluster_submission_offset length must match cluster count")
    return sizes


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Draw a full dataset from the configured model; deterministic per seed."""
    sizes = _validate(cfg)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = cfg.worker_count
    width = max(5, len(str(n)))
    worker_ids = [f"w{i:0{width}d}" for i in range(n)]

    cluster_of = np.repeat(np.arange(len(sizes)), sizes)

    belts = [b for b, _, _ in RATING_BANDS]
    shares = np.array([cfg.belt_distribution[b] for b in belts], dtype=float)
    shares /= shares.sum()
    belt_idx = rng.choice(len(belts), size=n, p=shares)
    low = np.array([band[1] for band in RATING_BANDS])
    high = np.array([band[2] for band in RATING_BANDS])
    ratings = low[belt_idx] + rng.random(n) * (high[belt_idx] - low[belt_idx])
    workers = tuple(
        WorkerRecord(worker_ids[i], float(round(ratings[i], 2))) for i in range(n)
    )

    active = np.ones(n, dtype=bool)
    if cfg.inactive_fraction > 0.0:
        active = rng.random(n) >= cfg.inactive_fraction

    offsets = np.zeros(len(sizes))
    if cfg.cluster_submission_offset is not None:
        offsets = np.asarray(cfg.cluster_submission_offset, dtype=float)
    base_submit = np.array([cfg.submission_prob[belts[bi]] for bi in belt_idx])
    p_submit = np.clip(base_submit + offsets[cluster_of], 0.0, 1.0)

    t_width = max(5, len(str(cfg.task_count)))
    p_width = max(4, len(str(cfg.project_count)))
    tasks_per_project = np.full(cfg.project_count, cfg.task_count // cfg.project_count)
    tasks_per_project[: cfg.task_count % cfg.project_count] += 1
    project_of_task = np.repeat(np.arange(cfg.project_count), tasks_per_project)

    tasks: list[TaskRecord] = []
    events: list[RegistrationEvent] = []
    for t in range(cfg.task_count):
        task_id = f"t{t:0{t_width}d}"
        project_id = f"p{project_of_task[t]:0{p_width}d}"
        home = int(rng.integers(len(sizes)))
        posting = WINDOW_START + timedelta(days=int(rng.integers(WINDOW_DAYS)))
        deadline = posting + timedelta(days=7 + int(rng.integers(15)))
        n_tech = 1 + int(rng.integers(3))
        techs = tuple(sorted(
            str(x) for x in rng.choice(TECH_CATALOG, size=n_tech, replace=False)))
        platforms = tuple(sorted(
            str(x) for x in rng.choice(
                PLATFORM_CATALOG, size=1 + int(rng.integers(2)), replace=False)))

        draw = rng.random(n)
        p_reg = np.where(cluster_of == home, cfg.p_in, cfg.p_out)
        registrants = np.flatnonzero((draw < p_reg) & active)

        reg_offsets = rng.integers(0, (deadline - posting).days + 1, size=len(registrants))
        submit_draw = rng.random(len(registrants))
        valid_draw = rng.random(len(registrants))
        score_draw = rng.random(len(registrants))

        submitted = submit_draw < p_submit[registrants]
        valid = submitted & (valid_draw < cfg.valid_prob)
        valid_positions = np.flatnonzero(valid)
        winner_pos = -1
        if len(valid_positions) > 0:
            winner_pos = int(valid_positions[int(rng.integers(len(valid_positions)))])

        status = "completed" if winner_pos >= 0 else "failed"
        tasks.append(TaskRecord(
            task_id=task_id,
            project_id=project_id,
            status=status,
            posting_date=posting,
            submission_deadline=deadline,
            prize=float(50 + int(rng.integers(20)) * 25),
            technologies=techs,
            platforms=platforms,
        ))
        for pos, widx in enumerate(registrants):
            score = None
            if submitted[pos]:
                lo_s, hi_s = (75.0, 100.0) if valid[pos] else (10.0, 75.0)
                score = float(round(lo_s + score_draw[pos] * (hi_s - lo_s), 2))
            events.append(RegistrationEvent(
                worker_id=worker_ids[widx],
                task_id=task_id,
                registration_date=posting + timedelta(days=int(reg_offsets[pos])),
                submitted=bool(submitted[pos]),
                valid=bool(valid[pos]),
                won=pos == winner_pos,
                score=score,
            ))

    metadata = {
        "generator": GENERATOR_NAME,
        "seed": cfg.seed,
        "planted_clusters": {worker_ids[i]: int(cluster_of[i]) for i in range(n)},
        "config": {
            "worker_count": cfg.worker_count,
            "task_count": cfg.task_count,
            "project_count": cfg.project_count,
            "planted_cluster_count": cfg.planted_cluster_count,
            "cluster_sizes": list(sizes),
            "p_in": cfg.p_in,
            "p_out": cfg.p_out,
            "valid_prob": cfg.valid_prob,
            "inactive_fraction": cfg.inactive_fraction,
            "cluster_submission_offset": (
                list(cfg.cluster_submission_offset)
                if cfg.cluster_submission_offset is not None else None),
        },
    }
    events_sorted = tuple(sorted(events, key=lambda e: (e.task_id, e.worker_id)))
    return Dataset(workers, tuple(tasks), events_sorted, metadata)
