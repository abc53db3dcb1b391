"""Dataset model, delimited-file ingestion, and the canonical interchange form.

Three delimited inputs describe a crowdsourcing export: tasks (with project
membership, status, deadlines, technologies, platforms), registration events
(with submitted/valid/won flags), and worker ratings.  Ingestion validates
referential integrity and the won => valid => submitted flag chain; rows
that break per-row rules are rejected with row-numbered diagnostics rather
than aborting the parse.  The canonical form is a single checksummed JSON
document that round-trips a Dataset exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

SCHEMA_VERSION = 1

TASK_COLUMNS = [
    "task_id", "project_id", "status", "posting_date", "submission_deadline",
    "prize", "technologies", "platforms",
]
EVENT_COLUMNS = [
    "worker_id", "task_id", "registration_date", "submitted", "valid", "won", "score",
]
WORKER_COLUMNS = ["worker_id", "rating"]

TASK_STATUSES = ("completed", "failed")


class DatasetError(ValueError):
    """Malformed input files or canonical documents."""


@dataclass(frozen=True)
class WorkerRecord:
    worker_id: str
    rating: float


@dataclass(frozen=True)
class TaskRecord:
    task_id: str
    project_id: str
    status: str
    posting_date: date
    submission_deadline: date
    prize: float
    technologies: tuple[str, ...]
    platforms: tuple[str, ...]


@dataclass(frozen=True)
class RegistrationEvent:
    worker_id: str
    task_id: str
    registration_date: date
    submitted: bool
    valid: bool
    won: bool
    score: float | None = None


@dataclass(frozen=True)
class Dataset:
    """Validated worker/task/event records plus free-form metadata.

    Records are stored sorted by identifier so that all derived artifacts
    are deterministic.  Metadata holds provenance (seed, generator name)
    and ingestion diagnostics; values must be JSON-serializable.
    """

    workers: tuple[WorkerRecord, ...]
    tasks: tuple[TaskRecord, ...]
    events: tuple[RegistrationEvent, ...]
    metadata: dict = field(default_factory=dict)

    def registration_pairs(self) -> list[tuple[str, str]]:
        return [(e.worker_id, e.task_id) for e in self.events]

    def task_map(self) -> dict[str, TaskRecord]:
        return {t.task_id: t for t in self.tasks}

    def worker_map(self) -> dict[str, WorkerRecord]:
        return {w.worker_id: w for w in self.workers}

    def events_by_task(self) -> dict[str, list[RegistrationEvent]]:
        out: dict[str, list[RegistrationEvent]] = {t.task_id: [] for t in self.tasks}
        for e in self.events:
            out.setdefault(e.task_id, []).append(e)
        return out

    def events_by_worker(self) -> dict[str, list[RegistrationEvent]]:
        out: dict[str, list[RegistrationEvent]] = {w.worker_id: [] for w in self.workers}
        for e in self.events:
            out.setdefault(e.worker_id, []).append(e)
        return out


def _normalize(ds: Dataset) -> Dataset:
    return replace(
        ds,
        workers=tuple(sorted(ds.workers, key=lambda w: w.worker_id)),
        tasks=tuple(sorted(ds.tasks, key=lambda t: t.task_id)),
        events=tuple(sorted(ds.events, key=lambda e: (e.task_id, e.worker_id))),
    )


def _read_rows(path, expected_columns: list[str], label: str):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise DatasetError(f"{label} file {path} is empty (header required)")
        missing = [c for c in expected_columns if c not in header]
        if missing:
            raise DatasetError(f"{label} file {path} missing columns: {', '.join(missing)}")
        return list(reader)


def _parse_flag(raw: str, column: str, where: str) -> bool:
    if raw == "0":
        return False
    if raw == "1":
        return True
    raise DatasetError(f"{where}: column {column} must be 0 or 1, got {raw!r}")


def _parse_date(raw: str, column: str, where: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError as exc:
        raise DatasetError(f"{where}: column {column} is not an ISO date: {raw!r}") from exc


def _split_multi(raw: str) -> tuple[str, ...]:
    parts = [p.strip() for p in raw.split("|") if p.strip()]
    return tuple(sorted(set(parts)))


def parse_dataset(tasks_file, registrations_file, workers_file) -> Dataset:
    """Ingest and validate the three delimited files.

    Raises DatasetError for structural problems (missing columns, unknown
    worker/task references).  Per-row rule violations (flag chain,
    duplicate registrations, registration after the deadline, negative
    rating) drop the row and leave a row-numbered diagnostic in
    ``metadata["diagnostics"]``.
    """
    diagnostics: list[str] = []

    workers: list[WorkerRecord] = []
    seen_workers: set[str] = set()
    for i, row in enumerate(_read_rows(workers_file, WORKER_COLUMNS, "workers"), start=2):
        where = f"workers row {i}"
        wid = row["worker_id"].strip()
        try:
            rating = float(row["rating"])
        except ValueError:
            diagnostics.append(f"{where}: rating is not a number: {row['rating']!r}")
            continue
        if not wid:
            diagnostics.append(f"{where}: empty worker_id")
            continue
        if rating < 0:
            diagnostics.append(f"{where}: negative rating {rating}")
            continue
        if wid in seen_workers:
            diagnostics.append(f"{where}: duplicate worker {wid}")
            continue
        seen_workers.add(wid)
        workers.append(WorkerRecord(wid, rating))

    tasks: list[TaskRecord] = []
    seen_tasks: set[str] = set()
    for i, row in enumerate(_read_rows(tasks_file, TASK_COLUMNS, "tasks"), start=2):
        where = f"tasks row {i}"
        tid = row["task_id"].strip()
        if not tid:
            diagnostics.append(f"{where}: empty task_id")
            continue
        if tid in seen_tasks:
            diagnostics.append(f"{where}: duplicate task {tid}")
            continue
        status = row["status"].strip()
        if status not in TASK_STATUSES:
            diagnostics.append(f"{where}: unknown status {status!r}")
            continue
        try:
            posting = _parse_date(row["posting_date"], "posting_date", where)
            deadline = _parse_date(row["submission_deadline"], "submission_deadline", where)
            prize = float(row["prize"]) if row["prize"].strip() else 0.0
        except DatasetError as exc:
            diagnostics.append(str(exc))
            continue
        if deadline < posting:
            diagnostics.append(f"{where}: submission_deadline precedes posting_date")
            continue
        seen_tasks.add(tid)
        tasks.append(TaskRecord(
            task_id=tid,
            project_id=row["project_id"].strip(),
            status=status,
            posting_date=posting,
            submission_deadline=deadline,
            prize=prize,
            technologies=_split_multi(row["technologies"]),
            platforms=_split_multi(row["platforms"]),
        ))
    task_map = {t.task_id: t for t in tasks}

    events: list[RegistrationEvent] = []
    seen_pairs: set[tuple[str, str]] = set()
    unknown_refs: list[str] = []
    for i, row in enumerate(_read_rows(registrations_file, EVENT_COLUMNS, "registrations"), start=2):
        where = f"registrations row {i}"
        wid = row["worker_id"].strip()
        tid = row["task_id"].strip()
        try:
            reg_date = _parse_date(row["registration_date"], "registration_date", where)
            submitted = _parse_flag(row["submitted"].strip(), "submitted", where)
            valid = _parse_flag(row["valid"].strip(), "valid", where)
            won = _parse_flag(row["won"].strip(), "won", where)
        except DatasetError as exc:
            diagnostics.append(str(exc))
            continue
        score_raw = (row["score"] or "").strip()
        score = float(score_raw) if score_raw else None
        if (won and not valid) or (valid and not submitted):
            diagnostics.append(
                f"{where}: flag chain violated (won={int(won)}, valid={int(valid)}, "
                f"submitted={int(submitted)}) for worker {wid} on task {tid}"
            )
            continue
        if wid not in seen_workers or tid not in task_map:
            unknown_refs.append(f"{where}: worker {wid!r}, task {tid!r}")
            continue
        if (wid, tid) in seen_pairs:
            diagnostics.append(f"{where}: duplicate registration of {wid} on {tid}")
            continue
        if reg_date > task_map[tid].submission_deadline:
            diagnostics.append(f"{where}: registration after deadline for {wid} on {tid}")
            continue
        seen_pairs.add((wid, tid))
        events.append(RegistrationEvent(wid, tid, reg_date, submitted, valid, won, score))

    if unknown_refs:
        raise DatasetError(
            "registrations reference unknown workers or tasks:\n  " + "\n  ".join(unknown_refs)
        )

    metadata = {"source": "delimited"}
    if diagnostics:
        metadata["diagnostics"] = diagnostics
        metadata["rejected_rows"] = len(diagnostics)
    return _normalize(Dataset(tuple(workers), tuple(tasks), tuple(events), metadata))


def derive_worker_expertise(d: Dataset) -> dict[str, set[str]]:
    """Worker -> technologies of the tasks they registered for."""
    task_map = d.task_map()
    expertise: dict[str, set[str]] = {w.worker_id: set() for w in d.workers}
    for e in d.events:
        expertise.setdefault(e.worker_id, set()).update(task_map[e.task_id].technologies)
    return expertise


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _dataset_body(d: Dataset) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "metadata": d.metadata,
        "workers": [{"worker_id": w.worker_id, "rating": w.rating} for w in d.workers],
        "tasks": [
            {
                "task_id": t.task_id,
                "project_id": t.project_id,
                "status": t.status,
                "posting_date": t.posting_date.isoformat(),
                "submission_deadline": t.submission_deadline.isoformat(),
                "prize": t.prize,
                "technologies": list(t.technologies),
                "platforms": list(t.platforms),
            }
            for t in d.tasks
        ],
        "events": [
            {
                "worker_id": e.worker_id,
                "task_id": e.task_id,
                "registration_date": e.registration_date.isoformat(),
                "submitted": e.submitted,
                "valid": e.valid,
                "won": e.won,
                "score": e.score,
            }
            for e in d.events
        ],
    }


def serialize_dataset(d: Dataset) -> str:
    """Canonical UTF-8 JSON document with stable key order and a checksum."""
    body = _dataset_body(_normalize(d))
    checksum = hashlib.sha256(_canonical_json(body).encode("utf-8")).hexdigest()
    body["checksum"] = checksum
    return _canonical_json(body) + "\n"


def load_dataset(text: str) -> Dataset:
    """Inverse of serialize_dataset; verifies schema version and checksum."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"canonical document is not valid JSON: {exc}") from exc
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DatasetError(f"schema-version mismatch: expected {SCHEMA_VERSION}, got {version}")
    stored = doc.pop("checksum", None)
    if stored is None:
        raise DatasetError("canonical document has no checksum")
    actual = hashlib.sha256(_canonical_json(doc).encode("utf-8")).hexdigest()
    if stored != actual:
        raise DatasetError("checksum mismatch: document was modified")
    workers = tuple(
        WorkerRecord(w["worker_id"], float(w["rating"])) for w in doc["workers"]
    )
    tasks = tuple(
        TaskRecord(
            task_id=t["task_id"],
            project_id=t["project_id"],
            status=t["status"],
            posting_date=date.fromisoformat(t["posting_date"]),
            submission_deadline=date.fromisoformat(t["submission_deadline"]),
            prize=float(t["prize"]),
            technologies=tuple(t["technologies"]),
            platforms=tuple(t["platforms"]),
        )
        for t in doc["tasks"]
    )
    events = tuple(
        RegistrationEvent(
            worker_id=e["worker_id"],
            task_id=e["task_id"],
            registration_date=date.fromisoformat(e["registration_date"]),
            submitted=bool(e["submitted"]),
            valid=bool(e["valid"]),
            won=bool(e["won"]),
            score=None if e["score"] is None else float(e["score"]),
        )
        for e in doc["events"]
    )
    return Dataset(workers, tasks, events, doc.get("metadata", {}))


def save_dataset(d: Dataset, path) -> None:
    Path(path).write_text(serialize_dataset(d), encoding="utf-8")


def read_dataset(path) -> Dataset:
    return load_dataset(Path(path).read_text(encoding="utf-8"))


def _fmt_float(x: float) -> str:
    return repr(float(x))


def write_dataset_csvs(d: Dataset, out_dir) -> dict[str, Path]:
    """Write tasks.csv, registrations.csv and workers.csv; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "tasks": out / "tasks.csv",
        "registrations": out / "registrations.csv",
        "workers": out / "workers.csv",
    }
    with paths["tasks"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TASK_COLUMNS)
        for t in d.tasks:
            writer.writerow([
                t.task_id, t.project_id, t.status,
                t.posting_date.isoformat(), t.submission_deadline.isoformat(),
                _fmt_float(t.prize), "|".join(t.technologies), "|".join(t.platforms),
            ])
    with paths["registrations"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENT_COLUMNS)
        for e in d.events:
            writer.writerow([
                e.worker_id, e.task_id, e.registration_date.isoformat(),
                int(e.submitted), int(e.valid), int(e.won),
                "" if e.score is None else _fmt_float(e.score),
            ])
    with paths["workers"].open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(WORKER_COLUMNS)
        for w in d.workers:
            writer.writerow([w.worker_id, _fmt_float(w.rating)])
    return paths
