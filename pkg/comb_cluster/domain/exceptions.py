"""Exception classes for the comb cluster-state simulator.

Every error carries a ``module`` tag naming the pipeline stage that raised it so
the orchestrator and CLI can report provenance without inspecting tracebacks.
"""

from __future__ import annotations


class CombClusterError(Exception):
    """Base exception for all comb cluster-state errors."""

    module: str = "comb-cluster"

    def __str__(self) -> str:
        return f"[{self.module}] {super().__str__()}"


# ---------------------------------------------------------------------------
# comb-core
# ---------------------------------------------------------------------------


class CombIndexError(CombClusterError):
    """Raised when frequency-comb index arithmetic receives invalid input."""

    module = "comb-core"


class EvenPumpIndex(CombIndexError):
    """Raised when an OPO specification yields an even pump index."""

    def __init__(self, delta_m: int, copies: int, p_y: int, p_z: int) -> None:
        self.delta_m = delta_m
        self.copies = copies
        self.p_y = p_y
        self.p_z = p_z
        super().__init__(
            f"even pump index: delta_m={delta_m}, copies={copies} gives (p_Y, p_Z)=({p_y}, {p_z}); "
            "nondegenerate downconversion requires an odd pump index"
        )


class NonpositiveFSR(CombIndexError):
    """Raised when the free spectral range is not strictly positive."""


class CopyLabelOutOfRange(CombIndexError):
    """Raised when a compound index copy label is outside 0..M-1."""


class InternalIndexError(CombIndexError):
    """Raised when the compound index inversion finds no preimage (coding bug)."""


class EmptyWindow(CombIndexError):
    """Raised when a comb window contains no frequency index."""


# ---------------------------------------------------------------------------
# hgraph
# ---------------------------------------------------------------------------


class HGraphError(CombClusterError):
    """Raised when an H-graph cannot be built or used."""

    module = "hgraph"


class NotAMatching(HGraphError):
    """Raised when an H-graph is not a weight-1 matching (G squared is not a projector)."""


# ---------------------------------------------------------------------------
# interferometer
# ---------------------------------------------------------------------------


class InterferometerError(CombClusterError):
    """Raised when a balanced splitter or block interferometer is invalid."""

    module = "interferometer"


class UnsupportedOrder(InterferometerError):
    """Raised when no Sylvester Hadamard matrix of the requested order exists."""

    def __init__(self, order: int) -> None:
        self.order = order
        super().__init__(
            f"unsupported splitter order {order}: a real Hadamard matrix of order {order} is "
            "unavailable from the Sylvester construction (orders 2, 4, 8, ... only); "
            "supply a normalized Hadamard matrix through user_splitter instead"
        )


class NotOrthogonal(InterferometerError):
    """Raised when a user splitter fails H H^T = I."""


class NotBalanced(InterferometerError):
    """Raised when a user splitter has entries of unequal magnitude."""


class OrderMismatch(InterferometerError):
    """Raised when the splitter order differs from the macronode size 2D."""


class RaggedMacronode(InterferometerError):
    """Raised when a macronode does not hold all 2D member qumodes."""


# ---------------------------------------------------------------------------
# gaussian-engine
# ---------------------------------------------------------------------------


class GaussianEngineError(CombClusterError):
    """Raised by the Gaussian graph-state engine."""

    module = "gaussian-engine"


class DimensionMismatch(GaussianEngineError):
    """Raised when matrix operands disagree in size."""


class NotPositiveDefinite(GaussianEngineError):
    """Raised when Im Z or a covariance matrix is not positive definite."""


class OracleSizeExceeded(GaussianEngineError):
    """Raised when a dense oracle is asked to handle too many modes."""


# ---------------------------------------------------------------------------
# lattice-verify
# ---------------------------------------------------------------------------


class LatticeError(CombClusterError):
    """Raised when lattice verification receives inconsistent input."""

    module = "lattice-verify"


class BadPartition(LatticeError):
    """Raised when a macronode partition does not cover the matrix modes."""


# ---------------------------------------------------------------------------
# cli-io
# ---------------------------------------------------------------------------


class ConfigError(CombClusterError):
    """Raised when a pipeline configuration cannot be loaded."""

    module = "cli-io"


class ParseError(ConfigError):
    """Raised when a configuration document is syntactically malformed."""

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(ConfigError):
    """Raised when a configuration document violates a pipeline invariant."""

    def __init__(self, message: str, *, fields: list[str] | None = None) -> None:
        self.fields = fields or []
        super().__init__(message)


class ExportError(CombClusterError):
    """Raised when artifacts cannot be written."""

    module = "cli-io"
