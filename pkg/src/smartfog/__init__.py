"""Fog overlay simulator and algorithm library.

Pipeline: betweenness centrality -> Pareto non-dominated sorting -> per-area
gateway selection -> spectral clustering into functional areas -> seeded
discrete-event simulation comparing the managed mode against an unoptimized
baseline.
"""

from .centrality import CentralityMode, CentralityScores, betweenness
from .clustering import (
    FunctionalArea,
    SimilarityMatrix,
    areas_to_json,
    cluster_functional_areas,
    device_features,
    jacobi_eigh,
    k_means,
    similarity_matrix,
    spectral_embed,
)
from .decision import (
    AreaType,
    DeviceEvaluation,
    GatewayAssignment,
    evaluate_devices,
    partition_front,
    select_gateways,
)
from .errors import (
    CapacityError,
    ChurnRejectedError,
    ConfigurationError,
    ConflictError,
    ContractError,
    NumericalError,
    SmartFogError,
    TopologyError,
)
from .harness import ExperimentConfig, run_experiment, run_smartfog_pipeline, timing_report
from .overlay import (
    Arch,
    ChurnEvent,
    FogDevice,
    FogOverlay,
    Join,
    Leave,
    Link,
    OverlayParams,
    apply_churn,
    build_overlay,
    latency_to_cloud,
    shortest_paths,
)
from .pareto import ObjectiveVector, ParetoFronts, Sense, dominates, non_dominated_sort, pareto_front
from .simulation import (
    Mode,
    Placement,
    SensorAttachment,
    SimulationReport,
    TupleKind,
    WorkloadSpec,
    attach_sensors,
    place_edge_ward,
)
from .simulation import run as run_simulation

__version__ = "0.1.0"

__all__ = [
    "Arch",
    "AreaType",
    "CapacityError",
    "CentralityMode",
    "CentralityScores",
    "ChurnEvent",
    "ChurnRejectedError",
    "ConfigurationError",
    "ConflictError",
    "ContractError",
    "DeviceEvaluation",
    "ExperimentConfig",
    "FogDevice",
    "FogOverlay",
    "FunctionalArea",
    "GatewayAssignment",
    "Join",
    "Leave",
    "Link",
    "Mode",
    "NumericalError",
    "ObjectiveVector",
    "OverlayParams",
    "ParetoFronts",
    "Placement",
    "Sense",
    "SensorAttachment",
    "SimilarityMatrix",
    "SimulationReport",
    "SmartFogError",
    "TopologyError",
    "TupleKind",
    "WorkloadSpec",
    "apply_churn",
    "areas_to_json",
    "attach_sensors",
    "betweenness",
    "build_overlay",
    "cluster_functional_areas",
    "device_features",
    "dominates",
    "evaluate_devices",
    "jacobi_eigh",
    "k_means",
    "latency_to_cloud",
    "non_dominated_sort",
    "pareto_front",
    "partition_front",
    "place_edge_ward",
    "run_experiment",
    "run_simulation",
    "run_smartfog_pipeline",
    "select_gateways",
    "shortest_paths",
    "similarity_matrix",
    "spectral_embed",
    "timing_report",
]
