"""Explain the shift between two tabular datasets with interpretable transport maps."""

from .data import (
    GeneratorSpec,
    SplitSpec,
    TabularDataset,
    generate,
    load_adult,
    load_csv,
    load_wisconsin,
    split_csv,
    split_dataset,
    write_csv,
)
from .exceptions import (
    ClusteringError,
    ConvergenceError,
    CsvError,
    DegeneratePlanError,
    EmptySplitError,
    NothingToExplainError,
    ShiftExplainError,
    SizeLimitExceededError,
)
from .maps import (
    KClusterShift,
    KSparseMeanShift,
    KSparseOTShift,
    VectorShift,
    assign_cluster,
    load_shift_map,
    make_shift_map,
    select_active_set,
    shift_map_from_dict,
)
from .metrics import (
    ExplanationReport,
    distance_to_ot,
    empirical_objective,
    evaluate_map,
    percent_explained,
    render_report_csv,
    render_report_table,
    transport_cost,
)
from .ot import (
    OTConfig,
    OTSolution,
    TransportPlan,
    barycentric_map,
    exact_ot_plan,
    ot_plan,
    ot_point_map,
    sinkhorn_plan,
    solve_ot,
    w2_squared,
)
from .sweep import SweepResult, SweepRow, derive_k_seed, render_sweep, run_sweep, sweep_result_from_json

__version__ = "0.1.0"

__all__ = [
    "ClusteringError",
    "ConvergenceError",
    "CsvError",
    "DegeneratePlanError",
    "EmptySplitError",
    "ExplanationReport",
    "GeneratorSpec",
    "KClusterShift",
    "KSparseMeanShift",
    "KSparseOTShift",
    "NothingToExplainError",
    "OTConfig",
    "OTSolution",
    "ShiftExplainError",
    "SizeLimitExceededError",
    "SplitSpec",
    "SweepResult",
    "SweepRow",
    "TabularDataset",
    "TransportPlan",
    "VectorShift",
    "assign_cluster",
    "barycentric_map",
    "derive_k_seed",
    "distance_to_ot",
    "empirical_objective",
    "evaluate_map",
    "exact_ot_plan",
    "generate",
    "load_adult",
    "load_csv",
    "load_shift_map",
    "load_wisconsin",
    "make_shift_map",
    "ot_plan",
    "ot_point_map",
    "percent_explained",
    "render_report_csv",
    "render_report_table",
    "render_sweep",
    "run_sweep",
    "select_active_set",
    "shift_map_from_dict",
    "sinkhorn_plan",
    "solve_ot",
    "split_csv",
    "split_dataset",
    "sweep_result_from_json",
    "transport_cost",
    "w2_squared",
    "write_csv",
]
