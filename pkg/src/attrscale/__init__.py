"""attrscale: a numeric scale of inter-attribute dependency from query workloads."""

from .analytics import (
    AffinityRanking,
    AttributeGroup,
    PairExplanation,
    RankedPair,
    explain_pair,
    rank_pairs,
    strongest_partner,
    suggest_groups,
)
from .catalog import AttributeCatalog, load_catalog
from .errors import (
    AttrScaleError,
    DiagonalPairError,
    EmptyAnalysisError,
    SelectionError,
    SnapshotError,
    SqlSyntaxError,
    UnknownAttributeError,
    UnsupportedSqlError,
    WorkloadFormatError,
)
from .matrices import DependencyMatrix, MaskedRealMatrix, StatsTable, UsageMatrix
from .pipeline import (
    ScaleBundle,
    build_adm,
    build_pdm,
    build_qaum,
    compute_mvsd,
    compute_nnsm,
    compute_nsm,
    run_pipeline,
)
from .snapshot import RunConfig, Snapshot, load_snapshot, save_snapshot, write_outputs
from .sql_columns import extract_attributes
from .workload import QueryRecord, SelectionSpec, UsageSet, build_usage_set, load_workload, select_queries

__version__ = "0.1.0"

__all__ = [
    "AffinityRanking",
    "AttributeCatalog",
    "AttributeGroup",
    "AttrScaleError",
    "DependencyMatrix",
    "DiagonalPairError",
    "EmptyAnalysisError",
    "MaskedRealMatrix",
    "PairExplanation",
    "QueryRecord",
    "RankedPair",
    "RunConfig",
    "ScaleBundle",
    "SelectionError",
    "SelectionSpec",
    "Snapshot",
    "SnapshotError",
    "SqlSyntaxError",
    "StatsTable",
    "UnknownAttributeError",
    "UnsupportedSqlError",
    "UsageMatrix",
    "UsageSet",
    "WorkloadFormatError",
    "build_adm",
    "build_pdm",
    "build_qaum",
    "build_usage_set",
    "compute_mvsd",
    "compute_nnsm",
    "compute_nsm",
    "explain_pair",
    "extract_attributes",
    "load_catalog",
    "load_snapshot",
    "load_workload",
    "rank_pairs",
    "run_pipeline",
    "save_snapshot",
    "select_queries",
    "strongest_partner",
    "suggest_groups",
    "write_outputs",
]
