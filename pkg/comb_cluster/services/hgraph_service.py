"""H-graph construction and analysis.

The H-graph of D two-pump OPOs is a weight-1 matching: for every OPO, polarization and
odd macronode m inside the window there is one edge to macronode m + p. Modes whose
partner lies outside the window stay in the graph as unmatched vacuum modes.
"""
from __future__ import annotations

from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from comb_cluster.domain import (
    CombWindow,
    ComponentLevel,
    HGraph,
    HGraphError,
    MacronodePartition,
    OpoSpec,
    Polarization,
    QumodeId,
)
from comb_cluster.observability import get_logger
from comb_cluster.services.comb_index import pump_indices

logger = get_logger(__name__)


def _mode_index(opo: int, pol: Polarization, n: int, window: CombWindow) -> int:
    return ((opo - 1) * 2 + pol.slot) * window.size + (n - window.n_min)


def build_hgraph(specs: Sequence[OpoSpec], window: CombWindow) -> HGraph:
    """Build the matching H-graph for ``specs`` over ``window`` in canonical mode order."""
    if not specs:
        raise HGraphError("at least one OPO specification is required")

    pumps = [pump_indices(spec) for spec in specs]

    modes = tuple(
        QumodeId(opo=opo, pol=pol, n=n)
        for opo in range(1, len(specs) + 1)
        for pol in Polarization.ordered()
        for n in window.frequencies()
    )

    freqs = np.arange(window.n_min, window.n_max + 1, dtype=np.int64)
    macro = np.where(freqs % 2 == 0, freqs, -freqs)
    odd = macro % 2 != 0

    edges: List[Tuple[int, int]] = []
    for opo, (p_y, p_z) in enumerate(pumps, start=1):
        for pol, p in ((Polarization.Z, p_z), (Polarization.Y, p_y)):
            m_first = macro[odd]
            m_second = m_first + p
            n_first = -m_first
            n_second = np.where(m_second % 2 == 0, m_second, -m_second)
            inside = (n_second >= window.n_min) & (n_second <= window.n_max)
            base = _mode_index(opo, pol, window.n_min, window)
            for a, b in zip(n_first[inside], n_second[inside]):
                i = base + int(a) - window.n_min
                j = base + int(b) - window.n_min
                edges.append((min(i, j), max(i, j)))

    edges.sort()
    covered = np.zeros(len(modes), dtype=bool)
    for i, j in edges:
        covered[i] = covered[j] = True
    unmatched = tuple(int(i) for i in np.flatnonzero(~covered))

    graph = HGraph(
        modes=modes,
        edges=tuple(edges),
        unmatched=unmatched,
        specs=tuple(specs),
        window=window,
    )
    logger.info(
        "hgraph built",
        opos=len(specs),
        modes=graph.num_modes,
        edges=len(edges),
        unmatched=len(unmatched),
        pumps=[list(p) for p in pumps],
    )
    return graph


def adjacency_matrix(g: HGraph) -> sp.csr_array:
    """Symmetric 0/1 adjacency G over the qumodes of ``g``."""
    size = g.num_modes
    if not g.edges:
        return sp.csr_array((size, size), dtype=np.float64)
    pairs = np.asarray(g.edges, dtype=np.int64)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    data = np.ones(rows.shape[0], dtype=np.float64)
    return sp.coo_array((data, (rows, cols)), shape=(size, size)).tocsr()


def matched_projector(g: HGraph) -> sp.csr_array:
    """Diagonal projector P onto modes that appear in some edge."""
    return sp.diags_array(g.matched_mask.astype(np.float64), format="csr")


def matching_projector_check(g: HGraph) -> Tuple[int, bool]:
    """Check G @ G == P exactly; returns (number of matched modes, verdict)."""
    adjacency = adjacency_matrix(g)
    square = (adjacency @ adjacency).tocsr()
    diff = square - matched_projector(g)
    diff.eliminate_zeros()
    ok = diff.nnz == 0
    matched = int(g.matched_mask.sum())
    if not ok:
        logger.warning("hgraph is not a matching", matched=matched, defects=int(diff.nnz))
    return matched, ok


def _macronode_ids(g: HGraph) -> np.ndarray:
    return np.unique(g.macronodes)


def components(
    g: HGraph, level: ComponentLevel | str = ComponentLevel.MACRONODE
) -> List[Tuple[int, ...]]:
    """Connected components at qumode level (mode indices) or macronode level (ids)."""
    level = ComponentLevel(level)
    if level is ComponentLevel.QUMODE:
        labels_of = np.arange(g.num_modes)
        size = g.num_modes
        node_ids = labels_of
        adjacency = adjacency_matrix(g)
    else:
        node_ids = _macronode_ids(g)
        size = node_ids.shape[0]
        position = np.searchsorted(node_ids, g.macronodes)
        if g.edges:
            pairs = np.asarray(g.edges, dtype=np.int64)
            rows, cols = position[pairs[:, 0]], position[pairs[:, 1]]
            adjacency = sp.coo_array(
                (np.ones(rows.shape[0]), (rows, cols)), shape=(size, size)
            ).tocsr()
        else:
            adjacency = sp.csr_array((size, size))

    count, labels = connected_components(adjacency, directed=False)
    groups: Dict[int, List[int]] = {}
    for node, label in zip(node_ids, labels):
        groups.setdefault(int(label), []).append(int(node))
    result = sorted((tuple(sorted(members)) for members in groups.values()), key=lambda c: c[0])
    logger.debug("hgraph components", level=level.value, count=count)
    return result


def macronode_partition(g: HGraph) -> MacronodePartition:
    """Group modes by macronode; members are listed in slot order 2*(opo-1) + pol."""
    buckets: Dict[int, Dict[int, int]] = {}
    for index, mode in enumerate(g.modes):
        m = int(g.macronodes[index])
        buckets.setdefault(m, {})[mode.slot] = index
    macronodes = tuple(sorted(buckets))
    members = tuple(
        tuple(buckets[m][slot] for slot in sorted(buckets[m])) for m in macronodes
    )
    return MacronodePartition(macronodes=macronodes, members=members, num_modes=g.num_modes)


def edge_records(g: HGraph) -> List[Dict[str, Any]]:
    """Edge list as plain records ``{opo, pol, m1, m2, n1, n2}`` (odd macronode first)."""
    records = []
    for i, j in g.edges:
        first, second = g.modes[i], g.modes[j]
        if first.n % 2 == 0:
            first, second = second, first
        records.append(
            {
                "opo": first.opo,
                "pol": first.pol.value,
                "m1": -first.n if first.n % 2 else first.n,
                "m2": -second.n if second.n % 2 else second.n,
                "n1": first.n,
                "n2": second.n,
            }
        )
    return records


def boundary_modes(g: HGraph) -> List[Dict[str, Any]]:
    """Unmatched (vacuum) modes with their macronode index."""
    return [
        {**g.modes[i].to_dict(), "index": i, "m": int(g.macronodes[i])} for i in g.unmatched
    ]
