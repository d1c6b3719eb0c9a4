"""Application services layer – comb arithmetic, graph construction and verification.

The pipeline orchestrator lives in :mod:`comb_cluster.services.pipeline_service` and is
imported from there; it depends on the adapters layer, which in turn uses these services.
"""

from .comb_index import (
    compound_to_frequency,
    frequency_of,
    frequency_to_compound,
    lattice_offsets,
    lattice_specs,
    macronode_of,
    pump_frequency,
    pump_index_of,
    pump_indices,
)
from .gaussian_engine import (
    apply_interferometer,
    cluster_graph,
    covariance_from_graph,
    expm_graph_oracle,
    graph_inverse,
    initial_graph,
    is_pure,
    squeezing_db,
    symplectic_eigenvalues,
    vacuum_units,
)
from .hgraph_service import adjacency_matrix, build_hgraph, components, matching_projector_check
from .interferometer_service import build_block_interferometer, sylvester_splitter, user_splitter
from .lattice_service import coarse_grain, count_copies, verify_hypercubic, verify_lattice
from .nullifier_service import (
    monte_carlo_nullifiers,
    nullifier_cov_analytic,
    nullifier_cov_numeric,
    nullifier_rows,
    two_tone_support,
)
from .sampling import sample_quadratures

__all__ = [
    # comb-core
    "compound_to_frequency",
    "frequency_of",
    "frequency_to_compound",
    "lattice_offsets",
    "lattice_specs",
    "macronode_of",
    "pump_frequency",
    "pump_index_of",
    "pump_indices",
    # hgraph
    "adjacency_matrix",
    "build_hgraph",
    "components",
    "matching_projector_check",
    # interferometer
    "build_block_interferometer",
    "sylvester_splitter",
    "user_splitter",
    # gaussian-engine
    "apply_interferometer",
    "cluster_graph",
    "covariance_from_graph",
    "expm_graph_oracle",
    "graph_inverse",
    "initial_graph",
    "is_pure",
    "monte_carlo_nullifiers",
    "nullifier_cov_analytic",
    "nullifier_cov_numeric",
    "nullifier_rows",
    "sample_quadratures",
    "squeezing_db",
    "symplectic_eigenvalues",
    "two_tone_support",
    "vacuum_units",
    # lattice-verify
    "coarse_grain",
    "count_copies",
    "verify_hypercubic",
    "verify_lattice",
]
