"""Distance shrinkage estimation for Euclidean distance matrices.

All distance matrices in this package hold squared Euclidean distances.
The estimator subtracts a constant from every observed squared distance
and projects onto the EDM cone with Dykstra's alternating projections,
which solves the trace-penalized kernel estimation problem exactly.
"""

from .core import (
    EdmMatrix,
    Embedding,
    KernelMatrix,
    MinTraceKernel,
    SymHollowMatrix,
    TruncationWarning,
    average_squared_loss,
    center_gram,
    centering_matrix,
    certify_edm,
    distances_from_kernel,
    edm_from_coords,
    eigh_descending,
    extract_embedding,
    gram_matrix,
    is_edm,
    kruskal_stress,
    min_trace_kernel,
    similarity_to_dissimilarity,
)
from .noise import NoiseModel, add_noise, pair_stream
from .projection import (
    Dim3Analysis,
    DykstraConfig,
    HouseholderQ,
    NotConvergedError,
    ProjectionDiagnostics,
    analyze_dim3,
    householder_q,
    project_c1,
    project_c2,
    project_edm_cone,
)
from .shrinkage import (
    RankTruncatedFit,
    ShrinkageFit,
    classical_mds,
    distance_shrinkage,
    objective_value,
    recommended_lambda,
    risk_bound,
    spectral_norm,
    truncate_rank,
)
from .simulate import (
    MethodStats,
    ReplicateRecord,
    SimConfig,
    StressReport,
    helix_coords,
    report_csv,
    report_json,
    report_write,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "EdmMatrix",
    "Embedding",
    "KernelMatrix",
    "MinTraceKernel",
    "SymHollowMatrix",
    "TruncationWarning",
    "average_squared_loss",
    "center_gram",
    "centering_matrix",
    "certify_edm",
    "distances_from_kernel",
    "edm_from_coords",
    "eigh_descending",
    "extract_embedding",
    "gram_matrix",
    "is_edm",
    "kruskal_stress",
    "min_trace_kernel",
    "similarity_to_dissimilarity",
    "NoiseModel",
    "add_noise",
    "pair_stream",
    "Dim3Analysis",
    "DykstraConfig",
    "HouseholderQ",
    "NotConvergedError",
    "ProjectionDiagnostics",
    "analyze_dim3",
    "householder_q",
    "project_c1",
    "project_c2",
    "project_edm_cone",
    "RankTruncatedFit",
    "ShrinkageFit",
    "classical_mds",
    "distance_shrinkage",
    "objective_value",
    "recommended_lambda",
    "risk_bound",
    "spectral_norm",
    "truncate_rank",
    "MethodStats",
    "ReplicateRecord",
    "SimConfig",
    "StressReport",
    "helix_coords",
    "report_csv",
    "report_json",
    "report_write",
    "run_experiment",
]
