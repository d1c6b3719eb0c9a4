"""Balanced 2D-splitters and the macronode-block interferometer R."""
from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.sparse as sp

from comb_cluster.domain import (
    BalancedSplitter,
    BlockInterferometer,
    HGraph,
    InterferometerError,
    NotBalanced,
    NotOrthogonal,
    OrderMismatch,
    RaggedMacronode,
    UnsupportedOrder,
)
from comb_cluster.observability import get_logger
from comb_cluster.services.comb_index import is_power_of_two
from comb_cluster.services.hgraph_service import macronode_partition
from comb_cluster.settings import get_settings

logger = get_logger(__name__)

_H1_SIGNS = np.array([[1, 1], [1, -1]], dtype=np.int64)


def sylvester_signs(order: int) -> np.ndarray:
    """Unnormalized +/-1 Sylvester Hadamard matrix of a power-of-two ``order``."""
    if order < 2 or not is_power_of_two(order):
        raise UnsupportedOrder(order)
    signs = np.ones((1, 1), dtype=np.int64)
    while signs.shape[0] < order:
        signs = np.kron(_H1_SIGNS, signs)
    return signs


def sylvester_splitter(two_d: int) -> BalancedSplitter:
    """Normalized Sylvester splitter H_1 tensored log2(two_d) times."""
    signs = sylvester_signs(two_d)
    matrix = signs.astype(np.float64) / np.sqrt(two_d)
    return BalancedSplitter(matrix=matrix, order=two_d, construction="sylvester")


def orthogonality_error(matrix: np.ndarray | sp.sparray) -> float:
    """Max-norm of M M^T - I; sparse input stays sparse."""
    if sp.issparse(matrix):
        csr = sp.csr_array(matrix)
        diff = csr @ csr.T - sp.eye_array(csr.shape[0], format="csr")
        return float(abs(diff).max()) if diff.nnz else 0.0
    dense = np.asarray(matrix)
    product = dense @ dense.T
    return float(np.max(np.abs(product - np.eye(product.shape[0])), initial=0.0))


def user_splitter(m: np.ndarray, tolerance: Optional[float] = None) -> BalancedSplitter:
    """Validate and wrap a user-supplied normalized Hadamard matrix.

    Orthogonality is checked before balance, so a permutation matrix is rejected as
    unbalanced rather than non-orthogonal.
    """
    tol = tolerance if tolerance is not None else get_settings().ORTHOGONALITY_TOLERANCE
    matrix = np.asarray(m, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise InterferometerError(
            f"splitter matrix must be square and nonempty, got shape {matrix.shape}"
        )

    order = matrix.shape[0]
    ortho = orthogonality_error(matrix)
    if ortho > tol:
        raise NotOrthogonal(f"H H^T deviates from identity by {ortho:.3e} (tolerance {tol:.1e})")

    expected = order ** -0.5
    imbalance = float(np.max(np.abs(np.abs(matrix) - expected)))
    if imbalance > tol:
        raise NotBalanced(
            f"entries must all have magnitude {expected:.17g}; worst deviation {imbalance:.3e}"
        )
    return BalancedSplitter(matrix=matrix, order=order, construction="user")


def build_block_interferometer(h: BalancedSplitter, g: HGraph) -> BlockInterferometer:
    """Assemble R as one copy of ``h`` per macronode, slots in canonical order."""
    two_d = 2 * g.dimension
    if h.order != two_d:
        raise OrderMismatch(f"splitter order {h.order} does not match macronode size 2D={two_d}")

    partition = macronode_partition(g)
    expected_slots = list(range(two_d))
    for m, members in zip(partition.macronodes, partition.members):
        slots = [g.modes[i].slot for i in members]
        if slots != expected_slots:
            raise RaggedMacronode(
                f"macronode {m} holds slots {slots}; expected all {two_d} slots {expected_slots}"
            )

    members = np.asarray(partition.members, dtype=np.int64).reshape(-1, two_d)
    rows = np.broadcast_to(members[:, :, None], (members.shape[0], two_d, two_d)).ravel()
    cols = np.broadcast_to(members[:, None, :], (members.shape[0], two_d, two_d)).ravel()
    data = np.broadcast_to(h.matrix, (members.shape[0], two_d, two_d)).ravel()
    size = g.num_modes
    matrix = sp.coo_array((data, (rows, cols)), shape=(size, size)).tocsr()

    logger.info(
        "interferometer assembled",
        order=h.order,
        construction=h.construction,
        macronodes=len(partition.macronodes),
        modes=size,
    )
    return BlockInterferometer(block=h, partition=partition, matrix=matrix)


def resolve_splitter(two_d: int, matrix: Optional[np.ndarray] = None) -> BalancedSplitter:
    """Sylvester splitter of order ``two_d`` unless a user matrix is supplied."""
    if matrix is None:
        return sylvester_splitter(two_d)
    splitter = user_splitter(matrix)
    if splitter.order != two_d:
        raise OrderMismatch(f"user splitter order {splitter.order} does not match 2D={two_d}")
    return splitter
