from .community import detect_communities, louvain_once, modularity
from .measures import (
    ConvergenceWarning,
    accessibility,
    betweenness,
    closeness,
    clustering,
    degree,
    distances,
    eccentricity,
    eigenvector_centrality,
    generalized_accessibility,
    neighborhood,
    symmetry,
    symmetry_levels,
    transition_matrix,
    walk_kernel,
)
from .record import (
    CSV_HEADER,
    FEATURE_NAMES,
    NODE_MEASURES,
    MeasurementRecord,
    measure_network,
    node_measures,
    read_csv,
    summarize,
    write_csv,
)

__all__ = [
    "detect_communities",
    "louvain_once",
    "modularity",
    "CSV_HEADER",
    "ConvergenceWarning",
    "FEATURE_NAMES",
    "MeasurementRecord",
    "NODE_MEASURES",
    "accessibility",
    "betweenness",
    "closeness",
    "clustering",
    "degree",
    "distances",
    "eccentricity",
    "eigenvector_centrality",
    "generalized_accessibility",
    "measure_network",
    "neighborhood",
    "node_measures",
    "read_csv",
    "summarize",
    "symmetry",
    "symmetry_levels",
    "transition_matrix",
    "walk_kernel",
    "write_csv",
]
