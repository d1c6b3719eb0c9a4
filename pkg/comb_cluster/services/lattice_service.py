"""Macronode-level lattice verification.

Qumode matrices are coarse-grained onto macronodes and the resulting graph is checked
against a hypercubic offset prescription {+/-dm_1, ..., +/-dm_D}. Multi-copy lattices are
split by the copy label of the compound index and each copy is checked on its own.
Failed checks are verdicts carried by :class:`LatticeReport`, never exceptions.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp

from comb_cluster.domain import (
    BadPartition,
    CombWindow,
    CompoundIndex,
    HGraph,
    LatticeError,
    LatticeReport,
    LatticeVerdict,
    MacronodeGraph,
    MacronodePartition,
)
from comb_cluster.observability import get_logger
from comb_cluster.services.comb_index import (
    compound_to_frequency,
    frequency_of,
    frequency_to_compound,
    macronode_of,
    window_macronodes,
)
from comb_cluster.services.hgraph_service import adjacency_matrix, macronode_partition
from comb_cluster.settings import get_settings

logger = get_logger(__name__)

MAX_DIAGNOSTICS = 25


def coarse_grain(
    matrix: sp.sparray | np.ndarray,
    partition: MacronodePartition,
    rel_threshold: Optional[float] = None,
) -> MacronodeGraph:
    """Collapse a symmetric qumode matrix onto the macronode partition.

    Blocks (m1, m2) are joined when their largest |entry| exceeds ``rel_threshold`` times the
    largest off-block |entry| of the whole matrix. Intra-block entries are ignored.
    """
    threshold = rel_threshold if rel_threshold is not None else get_settings().REL_THRESHOLD
    if not 0.0 < threshold < 1.0:
        raise LatticeError(f"rel_threshold must lie in (0, 1), got {threshold}")

    size = matrix.shape[0]
    owner = partition.block_of_mode
    if partition.num_modes != size or np.any(owner < 0):
        uncovered = int(np.count_nonzero(owner < 0)) if partition.num_modes == size else size
        raise BadPartition(
            f"partition over {partition.num_modes} modes leaves {uncovered} of {size} "
            "matrix modes uncovered"
        )

    graph = nx.Graph()
    graph.add_nodes_from(partition.macronodes)

    coo = sp.coo_array(matrix)
    values = np.abs(coo.data)
    first, second = owner[coo.row], owner[coo.col]
    off_block = (first != second) & (values > 0)
    if not np.any(off_block):
        return MacronodeGraph(graph=graph)

    cutoff = threshold * values[off_block].max()
    keep = off_block & (values > cutoff)
    low = np.minimum(first[keep], second[keep])
    high = np.maximum(first[keep], second[keep])
    keys, inverse = np.unique(low * len(partition.macronodes) + high, return_inverse=True)
    weights = np.zeros(keys.shape[0])
    np.maximum.at(weights, inverse, values[keep])

    ids = np.asarray(partition.macronodes, dtype=np.int64)
    blocks = len(partition.macronodes)
    for key, weight in zip(keys, weights):
        a, b = divmod(int(key), blocks)
        graph.add_edge(int(ids[a]), int(ids[b]), weight=float(weight))
    return MacronodeGraph(graph=graph)


def hgraph_macronode_graph(g: HGraph) -> MacronodeGraph:
    """Macronode graph of the H-graph itself (no interferometer)."""
    return coarse_grain(adjacency_matrix(g), macronode_partition(g))


def count_copies(mg: MacronodeGraph) -> int:
    """Number of connected components of the macronode graph."""
    if mg.graph.number_of_nodes() == 0:
        return 0
    return nx.number_connected_components(mg.graph)


def _check_offsets(offsets: Sequence[int]) -> Tuple[int, ...]:
    values = tuple(int(o) for o in offsets)
    if not values or values[0] < 1 or any(b <= a for a, b in zip(values, values[1:])):
        raise LatticeError(
            f"offsets must be strictly increasing positive integers, got {list(values)}"
        )
    return values


def _truncate(diagnostics: List[str]) -> Tuple[str, ...]:
    if len(diagnostics) <= MAX_DIAGNOSTICS:
        return tuple(diagnostics)
    extra = len(diagnostics) - MAX_DIAGNOSTICS
    return tuple(diagnostics[:MAX_DIAGNOSTICS]) + (f"... and {extra} more",)


def verify_hypercubic(
    mg: MacronodeGraph,
    offsets: Sequence[int],
    window: Optional[CombWindow] = None,
) -> LatticeReport:
    """Check every interior node against the neighbor offsets {+/-dm_j}.

    A node is interior when all 2D expected neighbors are present; without a window the
    graph's own node set stands in for the in-window macronodes.
    """
    steps = _check_offsets(offsets)
    if window is not None:
        present: Set[int] = set(window_macronodes(window.n_min, window.n_max))
    else:
        present = set(mg.nodes)
    expected = sorted([-o for o in steps] + list(steps))

    diagnostics: List[str] = []
    for a, b, _ in mg.edges:
        if abs(b - a) not in steps:
            diagnostics.append(f"unexpected edge ({a}, {b}) with offset {b - a}")

    interior: List[int] = []
    boundary: List[int] = []
    for node in mg.nodes:
        if all(node + delta in present for delta in expected):
            interior.append(node)
            actual = sorted(neighbor - node for neighbor in mg.neighbors(node))
            if actual != expected:
                diagnostics.append(
                    f"node {node} has neighbor offsets {actual}, expected {expected}"
                )
        else:
            boundary.append(node)

    verdict = LatticeVerdict.FAIL if diagnostics else LatticeVerdict.PASS
    report = LatticeReport(
        dimensionality=len(steps),
        offsets=steps,
        interior_nodes=tuple(interior),
        boundary_nodes=tuple(boundary),
        copy_components=count_copies(mg),
        verdict=verdict,
        diagnostics=_truncate(diagnostics),
        window_symmetric=window.is_symmetric if window else True,
    )
    logger.debug(
        "hypercubic check",
        offsets=list(steps),
        interior=len(interior),
        boundary=len(boundary),
        verdict=verdict.value,
    )
    return report


def split_copies(mg: MacronodeGraph, copies: int) -> Tuple[Dict[int, MacronodeGraph], List[str]]:
    """Relabel nodes by compound index and split the graph into one graph per copy label.

    Returns the per-copy graphs keyed by k and diagnostics for any edge joining two copies.
    """
    label: Dict[int, Tuple[int, int]] = {}
    for node in mg.nodes:
        compound = frequency_to_compound(frequency_of(node), copies)
        label[node] = (compound.k, compound.m)

    graphs = {k: nx.Graph() for k in range(copies)}
    for node, (k, m) in label.items():
        graphs[k].add_node(m)

    crossing: List[str] = []
    for a, b, weight in mg.edges:
        (ka, ma), (kb, mb) = label[a], label[b]
        if ka != kb:
            crossing.append(f"edge ({a}, {b}) joins copies {ka} and {kb}")
            continue
        graphs[ka].add_edge(ma, mb, weight=weight)
    return {k: MacronodeGraph(graph=graph) for k, graph in graphs.items()}, crossing


def _to_macronodes(compound_ms: Iterable[int], k: int, copies: int) -> List[int]:
    return sorted(
        macronode_of(compound_to_frequency(CompoundIndex(m, k), copies)) for m in compound_ms
    )


def verify_lattice(
    mg: MacronodeGraph,
    offsets: Sequence[int],
    copies: int = 1,
    window: Optional[CombWindow] = None,
) -> LatticeReport:
    """Hypercubic check that understands M > 1 copies.

    With several copies each copy is verified under compound indexing; the overall verdict
    passes when every copy passes, no edge joins two copies and exactly ``copies``
    components exist.
    """
    if copies < 1:
        raise LatticeError(f"copies must be positive, got {copies}")
    if copies == 1:
        return verify_hypercubic(mg, offsets, window)

    per_copy, crossing = split_copies(mg, copies)
    copy_reports = tuple(verify_hypercubic(per_copy[k], offsets) for k in range(copies))
    components = count_copies(mg)

    diagnostics = list(crossing)
    if components != copies:
        diagnostics.append(f"found {components} components, expected {copies} copies")
    for k, report in enumerate(copy_reports):
        if not report.passed:
            reason = report.diagnostics[0] if report.diagnostics else "see copy report"
            diagnostics.append(f"copy {k} failed: {reason}")

    interior: List[int] = []
    boundary: List[int] = []
    for k, report in enumerate(copy_reports):
        interior.extend(_to_macronodes(report.interior_nodes, k, copies))
        boundary.extend(_to_macronodes(report.boundary_nodes, k, copies))

    verdict = LatticeVerdict.FAIL if diagnostics else LatticeVerdict.PASS
    return LatticeReport(
        dimensionality=len(_check_offsets(offsets)),
        offsets=tuple(int(o) for o in offsets),
        interior_nodes=tuple(sorted(interior)),
        boundary_nodes=tuple(sorted(boundary)),
        copy_components=components,
        verdict=verdict,
        diagnostics=_truncate(diagnostics),
        copies=copies,
        window_symmetric=window.is_symmetric if window else True,
        copy_reports=copy_reports,
    )

