"""Domain models for the frequency-comb cluster-state pipeline.

The value objects here hold integer comb indices and the matrices that flow between
services. They validate their own invariants on construction and know how to serialize
themselves, but they never call into *services* or *adapters*; the arithmetic that
produces them lives in the services layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp

from .exceptions import EmptyWindow, NonpositiveFSR


class Polarization(str, Enum):
    """Field polarization of a qumode; Z sorts before Y in the canonical order."""

    Z = "Z"
    Y = "Y"

    @property
    def slot(self) -> int:
        """Position of this polarization inside an OPO's pair of macronode slots."""
        return 0 if self is Polarization.Z else 1

    @classmethod
    def ordered(cls) -> List["Polarization"]:
        return [cls.Z, cls.Y]


class ComponentLevel(str, Enum):
    """Granularity at which H-graph components are computed."""

    QUMODE = "qumode"
    MACRONODE = "macronode"


@dataclass(frozen=True)
class QumodeId:
    """One field mode: OPO number (1-based), polarization and comb frequency index."""

    opo: int
    pol: Polarization
    n: int

    def __post_init__(self) -> None:  # type: ignore[override]
        if self.opo < 1:
            raise ValueError(f"OPO index must be >= 1, got {self.opo}")

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        """Canonical ordering key: OPO ascending, Z before Y, frequency ascending."""
        return (self.opo, self.pol.slot, self.n)

    @property
    def slot(self) -> int:
        """Slot within the macronode block: 2*(opo-1) + (0 for Z, 1 for Y)."""
        return 2 * (self.opo - 1) + self.pol.slot

    def to_dict(self) -> Dict[str, Any]:
        return {"opo": self.opo, "pol": self.pol.value, "n": self.n}


@dataclass(frozen=True)
class OpoSpec:
    """Pump prescription of one OPO: macronode spacing and number of lattice copies."""

    delta_m: int
    copies: int = 1

    def __post_init__(self) -> None:  # type: ignore[override]
        if self.delta_m < 1:
            raise ValueError(f"delta_m must be a positive integer, got {self.delta_m}")
        if self.copies < 1:
            raise ValueError(f"copies must be a positive integer, got {self.copies}")

    def to_dict(self) -> Dict[str, int]:
        return {"delta_m": self.delta_m, "copies": self.copies}


@dataclass(frozen=True)
class CombWindow:
    """Inclusive truncation n_min..n_max of the (unbounded) frequency comb."""

    n_min: int
    n_max: int

    def __post_init__(self) -> None:  # type: ignore[override]
        if self.n_min > self.n_max:
            raise EmptyWindow(f"empty comb window: n_min={self.n_min} > n_max={self.n_max}")

    @classmethod
    def symmetric(cls, half_width: int) -> "CombWindow":
        return cls(-half_width, half_width)

    @classmethod
    def from_bandwidth(cls, bandwidth: float, fsr: float) -> "CombWindow":
        """Symmetric window holding at most floor(bandwidth / fsr) comb lines."""
        if fsr <= 0:
            raise NonpositiveFSR(f"free spectral range must be positive, got {fsr}")
        lines = math.floor(bandwidth / fsr)
        if lines < 1:
            raise EmptyWindow(f"bandwidth {bandwidth} holds no comb line at spacing {fsr}")
        return cls.symmetric((lines - 1) // 2)

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def is_symmetric(self) -> bool:
        return self.n_min == -self.n_max

    def frequencies(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def contains(self, n: int) -> bool:
        return self.n_min <= n <= self.n_max

    def to_dict(self) -> Dict[str, int]:
        return {"n_min": self.n_min, "n_max": self.n_max}


@dataclass(frozen=True)
class CompoundIndex:
    """Macronode index ``m`` inside lattice copy ``k``."""

    m: int
    k: int


@dataclass(frozen=True)
class HGraph:
    """Weight-1 matching over qumodes plus the boundary modes left unmatched.

    ``edges`` hold pairs of indices into ``modes`` with the smaller index first. No
    matching check happens here so malformed graphs can still be represented and
    diagnosed by :func:`matching_projector_check`.
    """

    modes: Tuple[QumodeId, ...]
    edges: Tuple[Tuple[int, int], ...]
    unmatched: Tuple[int, ...]
    specs: Tuple[OpoSpec, ...] = ()
    window: CombWindow | None = None

    def __post_init__(self) -> None:  # type: ignore[override]
        n = len(self.modes)
        for i, j in self.edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) references a mode outside 0..{n - 1}")

    @property
    def num_modes(self) -> int:
        return len(self.modes)

    @property
    def dimension(self) -> int:
        """Number of OPOs D."""
        if self.specs:
            return len(self.specs)
        return max((mode.opo for mode in self.modes), default=0)

    @cached_property
    def frequencies(self) -> np.ndarray:
        return np.array([mode.n for mode in self.modes], dtype=np.int64)

    @cached_property
    def macronodes(self) -> np.ndarray:
        n = self.frequencies
        return np.where(n % 2 == 0, n, -n)

    @cached_property
    def matched_mask(self) -> np.ndarray:
        mask = np.zeros(self.num_modes, dtype=bool)
        for i, j in self.edges:
            mask[i] = True
            mask[j] = True
        return mask


@dataclass(frozen=True)
class MacronodePartition:
    """Grouping of qumodes into frequency-degenerate macronodes.

    ``members[b]`` lists the mode indices of macronode ``macronodes[b]`` in slot order.
    """

    macronodes: Tuple[int, ...]
    members: Tuple[Tuple[int, ...], ...]
    num_modes: int

    @cached_property
    def block_of_mode(self) -> np.ndarray:
        """Position (into ``macronodes``) of the block holding each mode; -1 if none."""
        owner = np.full(self.num_modes, -1, dtype=np.int64)
        for b, slots in enumerate(self.members):
            owner[list(slots)] = b
        return owner

    def to_dict(self) -> Dict[str, Any]:
        return {
            "macronodes": list(self.macronodes),
            "members": [list(slots) for slots in self.members],
        }


@dataclass(frozen=True, eq=False)
class BalancedSplitter:
    """Normalized real Hadamard matrix of order 2D."""

    matrix: np.ndarray
    order: int
    construction: str = "sylvester"

    def __post_init__(self) -> None:  # type: ignore[override]
        if self.matrix.shape != (self.order, self.order):
            raise ValueError(
                f"splitter matrix shape {self.matrix.shape} does not match order {self.order}"
            )


@dataclass(frozen=True, eq=False)
class BlockInterferometer:
    """Real orthogonal R = direct sum of identical splitter blocks, one per macronode."""

    block: BalancedSplitter
    partition: MacronodePartition
    matrix: sp.csr_array

    @property
    def num_modes(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True, eq=False)
class GraphState:
    """Gaussian pure state exp(i q^T Z q / 2) with its squeezing parameter.

    ``z`` is either a scipy sparse array or a dense ndarray; ``modes`` is the canonical
    mode map shared with the H-graph.
    """

    z: Any
    alpha: float
    modes: Tuple[QumodeId, ...] = ()
    label: str = "Z"

    def __post_init__(self) -> None:  # type: ignore[override]
        rows, cols = self.z.shape
        if rows != cols:
            raise ValueError(f"graph matrix must be square, got {self.z.shape}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")

    @property
    def num_modes(self) -> int:
        return int(self.z.shape[0])

    def dense(self) -> np.ndarray:
        return self.z.toarray() if sp.issparse(self.z) else np.asarray(self.z)

    def symmetry_error(self) -> float:
        diff = self.z - self.z.T
        return float(abs(diff).max()) if diff.size else 0.0


@dataclass(frozen=True, eq=False)
class QuadratureCovariance:
    """Quadrature covariance in (q_1..q_N, p_1..p_N) order, vacuum variance 1/2."""

    sigma: np.ndarray

    def __post_init__(self) -> None:  # type: ignore[override]
        rows, cols = self.sigma.shape
        if rows != cols or rows % 2:
            raise ValueError(f"covariance must be square of even order, got {self.sigma.shape}")

    @property
    def num_modes(self) -> int:
        return self.sigma.shape[0] // 2

    @property
    def qq(self) -> np.ndarray:
        n = self.num_modes
        return self.sigma[:n, :n]

    @property
    def qp(self) -> np.ndarray:
        n = self.num_modes
        return self.sigma[:n, n:]

    @property
    def pp(self) -> np.ndarray:
        n = self.num_modes
        return self.sigma[n:, n:]


@dataclass(frozen=True, eq=False)
class NullifierSet:
    """Coefficient rows of n_theta over the (q, p) quadrature basis."""

    theta: float
    rows: sp.csr_array
    alpha: float

    @property
    def num_modes(self) -> int:
        return int(self.rows.shape[0])

    @property
    def q_part(self) -> sp.csr_array:
        return self.rows[:, : self.num_modes]

    @property
    def p_part(self) -> sp.csr_array:
        return self.rows[:, self.num_modes :]


@dataclass(frozen=True, eq=False)
class MacronodeGraph:
    """Coarse-grained graph over macronodes; edge weight is the max qumode coupling."""

    graph: nx.Graph

    @property
    def nodes(self) -> List[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Tuple[int, int, float]]:
        out = [
            (min(a, b), max(a, b), float(data.get("weight", 1.0)))
            for a, b, data in self.graph.edges(data=True)
        ]
        return sorted(out)

    def neighbors(self, node: int) -> List[int]:
        return sorted(self.graph.neighbors(node))

    def degree(self, node: int) -> int:
        return int(self.graph.degree(node))


@dataclass(frozen=True)
class SqueezingScalars:
    """Derived scalars of the squeezing parameter a.

    c = cosh 2a, s = sinh 2a, eps = sech 2a and t = tanh 2a.
    """

    alpha: float
    c: float
    s: float
    epsilon: float
    t: float

    @classmethod
    def from_alpha(cls, alpha: float) -> "SqueezingScalars":
        if alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {alpha}")
        two_alpha = 2.0 * alpha
        c = math.cosh(two_alpha)
        return cls(
            alpha=alpha,
            c=c,
            s=math.sinh(two_alpha),
            epsilon=1.0 / c,
            t=math.tanh(two_alpha),
        )

    def to_dict(self) -> Dict[str, float]:
        return {"alpha": self.alpha, "c": self.c, "s": self.s, "epsilon": self.epsilon, "t": self.t}


@dataclass(frozen=True, eq=False)
class MonteCarloResult:
    """Sampled nullifier variances against their analytic values, one entry per row."""

    theta: float
    count: int
    estimate: np.ndarray
    analytic: np.ndarray
    std_error: np.ndarray

    @property
    def z_scores(self) -> np.ndarray:
        return (self.estimate - self.analytic) / self.std_error

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z_scores), initial=0.0))

    def passed(self, z_limit: float) -> bool:
        return self.max_abs_z < z_limit

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta": self.theta,
            "count": self.count,
            "max_abs_z": self.max_abs_z,
            "rows": [
                {"estimate": float(e), "analytic": float(a), "std_error": float(se), "z": float(z)}
                for e, a, se, z in zip(self.estimate, self.analytic, self.std_error, self.z_scores)
            ],
        }


class LatticeVerdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True)
class LatticeReport:
    """Outcome of checking a macronode graph against a hypercubic offset prescription."""

    dimensionality: int
    offsets: Tuple[int, ...]
    interior_nodes: Tuple[int, ...]
    boundary_nodes: Tuple[int, ...]
    copy_components: int
    verdict: LatticeVerdict
    diagnostics: Tuple[str, ...] = ()
    copies: int = 1
    window_symmetric: bool = True
    copy_reports: Tuple["LatticeReport", ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:  # type: ignore[override]
        if self.verdict is LatticeVerdict.PASS and self.diagnostics:
            raise ValueError("a passing lattice report cannot carry failure diagnostics")

    @property
    def passed(self) -> bool:
        return self.verdict is LatticeVerdict.PASS

    @property
    def interior_degree(self) -> int:
        return 2 * len(self.offsets)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "dimensionality": self.dimensionality,
            "offsets": list(self.offsets),
            "interior_nodes": list(self.interior_nodes),
            "boundary_nodes": list(self.boundary_nodes),
            "copy_components": self.copy_components,
            "copies": self.copies,
            "verdict": self.verdict.value,
            "diagnostics": list(self.diagnostics),
            "window_symmetric": self.window_symmetric,
        }
        if self.copy_reports:
            result["copy_reports"] = [report.to_dict() for report in self.copy_reports]
        return result


SLOT_ORDERING = (
    "slot = 2*(opo-1) + (0 for Z, 1 for Y); modes ordered by opo, Z before Y, n ascending"
)
