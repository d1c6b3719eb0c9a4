"""Domain models and exceptions for comb cluster-state simulation."""

from .exceptions import (
    BadPartition,
    CombClusterError,
    CombIndexError,
    ConfigError,
    CopyLabelOutOfRange,
    DimensionMismatch,
    EmptyWindow,
    EvenPumpIndex,
    ExportError,
    GaussianEngineError,
    HGraphError,
    InterferometerError,
    InternalIndexError,
    LatticeError,
    NonpositiveFSR,
    NotAMatching,
    NotBalanced,
    NotOrthogonal,
    NotPositiveDefinite,
    OracleSizeExceeded,
    OrderMismatch,
    ParseError,
    RaggedMacronode,
    UnsupportedOrder,
    ValidationError,
)
from .models import (
    BalancedSplitter,
    BlockInterferometer,
    CombWindow,
    ComponentLevel,
    CompoundIndex,
    GraphState,
    HGraph,
    LatticeReport,
    LatticeVerdict,
    MacronodeGraph,
    MacronodePartition,
    MonteCarloResult,
    NullifierSet,
    OpoSpec,
    Polarization,
    QuadratureCovariance,
    QumodeId,
    SqueezingScalars,
    SLOT_ORDERING,
)

__all__ = [
    # Exceptions
    "BadPartition",
    "CombClusterError",
    "CombIndexError",
    "ConfigError",
    "CopyLabelOutOfRange",
    "DimensionMismatch",
    "EmptyWindow",
    "EvenPumpIndex",
    "ExportError",
    "GaussianEngineError",
    "HGraphError",
    "InterferometerError",
    "InternalIndexError",
    "LatticeError",
    "NonpositiveFSR",
    "NotAMatching",
    "NotBalanced",
    "NotOrthogonal",
    "NotPositiveDefinite",
    "OracleSizeExceeded",
    "OrderMismatch",
    "ParseError",
    "RaggedMacronode",
    "UnsupportedOrder",
    "ValidationError",
    # Models
    "BalancedSplitter",
    "BlockInterferometer",
    "CombWindow",
    "ComponentLevel",
    "CompoundIndex",
    "GraphState",
    "HGraph",
    "LatticeReport",
    "LatticeVerdict",
    "MacronodeGraph",
    "MacronodePartition",
    "MonteCarloResult",
    "NullifierSet",
    "OpoSpec",
    "Polarization",
    "QuadratureCovariance",
    "QumodeId",
    "SqueezingScalars",
    "SLOT_ORDERING",
]
