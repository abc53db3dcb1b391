"""Crowd-worker co-registration network analytics.

Builds the worker co-registration network from task-registration records,
detects worker clusters by greedy modularity maximization, computes
network and worker behaviour metrics per cluster, tests cross-cluster
differences with one-way ANOVA, and emits reproducible reports.
"""

__version__ = "0.1.0"

from .community import Partition, cluster_sizes, greedy_cluster, modularity
from .dataio import (
    Dataset,
    DatasetError,
    RegistrationEvent,
    TaskRecord,
    WorkerRecord,
    load_dataset,
    parse_dataset,
    serialize_dataset,
)
from .graph import BipartiteGraph, WorkerGraph, build_bipartite, degree_sequence, project_workers
from .metrics import Belt, assign_belt, build_metric_table
from .stats import AnovaResult, f_cdf, one_way_anova
from .synth import SynthConfig, SynthConfigError, generate_synthetic

__all__ = [
    "AnovaResult",
    "Belt",
    "BipartiteGraph",
    "Dataset",
    "DatasetError",
    "Partition",
    "RegistrationEvent",
    "SynthConfig",
    "SynthConfigError",
    "TaskRecord",
    "WorkerGraph",
    "WorkerRecord",
    "assign_belt",
    "build_bipartite",
    "build_metric_table",
    "cluster_sizes",
    "degree_sequence",
    "f_cdf",
    "generate_synthetic",
    "greedy_cluster",
    "load_dataset",
    "modularity",
    "one_way_anova",
    "parse_dataset",
    "project_workers",
    "serialize_dataset",
    "__version__",
]
