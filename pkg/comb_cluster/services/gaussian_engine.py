"""Graphical calculus for Gaussian pure states.

A state is held as the complex symmetric matrix Z of its wavefunction exp(i q^T Z q / 2).
For a weight-1 matching G with projector P onto matched modes the squeezer acts in
closed form, i exp(-2 alpha G) = i[(I - P) + cP - sG], so no matrix exponential is
needed outside the dense oracle. Unmatched modes stay in vacuum with diagonal i.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from comb_cluster.domain import (
    BlockInterferometer,
    DimensionMismatch,
    GaussianEngineError,
    GraphState,
    HGraph,
    NotAMatching,
    NotPositiveDefinite,
    OracleSizeExceeded,
    QuadratureCovariance,
    SqueezingScalars,
)
from comb_cluster.observability import get_logger
from comb_cluster.services.hgraph_service import (
    adjacency_matrix,
    matched_projector,
    matching_projector_check,
)
from comb_cluster.settings import get_settings

logger = get_logger(__name__)

VACUUM_VARIANCE = 0.5

ORACLE_MODE_LIMIT = 512


def _require_matching(g: HGraph) -> None:
    matched, ok = matching_projector_check(g)
    if not ok:
        raise NotAMatching(
            f"G @ G differs from the matched-mode projector ({matched} matched of {g.num_modes})"
        )


def _check_interferometer(n: int, r: BlockInterferometer) -> None:
    if r.num_modes != n:
        raise DimensionMismatch(f"interferometer acts on {r.num_modes} modes, state has {n}")


def initial_graph(g: HGraph, alpha: float) -> GraphState:
    """Z0 = i exp(-2 alpha G) in closed form."""
    _require_matching(g)
    k = SqueezingScalars.from_alpha(alpha)
    size = g.num_modes
    matched = g.matched_mask.astype(np.float64)
    diagonal = (1.0 - matched) + k.c * matched
    real_part = sp.diags_array(diagonal, format="csr") - k.s * adjacency_matrix(g)
    z = (1j * real_part).tocsr()
    logger.debug("initial graph built", modes=size, alpha=alpha)
    return GraphState(z=z, alpha=alpha, modes=g.modes, label="Z0")


def expm_graph_oracle(g: HGraph, alpha: float, limit: int = ORACLE_MODE_LIMIT) -> np.ndarray:
    """Dense i * expm(-2 alpha G); only for cross-checking small graphs."""
    if g.num_modes > limit:
        raise OracleSizeExceeded(f"dense expm oracle limited to {limit} modes, got {g.num_modes}")
    dense = adjacency_matrix(g).toarray()
    return 1j * la.expm(-2.0 * alpha * dense)


def apply_interferometer(state: GraphState, r: BlockInterferometer) -> GraphState:
    """Passive evolution Z -> R Z R^T."""
    _check_interferometer(state.num_modes, r)
    rotation = r.matrix
    if sp.issparse(state.z):
        z = (rotation @ state.z @ rotation.T).tocsr()
    else:
        z = rotation @ np.asarray(state.z) @ rotation.T
    return GraphState(z=z, alpha=state.alpha, modes=state.modes, label="Z")


def rotated_graph(g: HGraph, r: BlockInterferometer) -> sp.csr_array:
    """R G R^T, the qumode-level adjacency after the interferometer."""
    _check_interferometer(g.num_modes, r)
    return (r.matrix @ adjacency_matrix(g) @ r.matrix.T).tocsr()


def cluster_graph(g: HGraph, r: BlockInterferometer, alpha: float) -> GraphState:
    """Z_C = i[(I - RPR^T) + eps RPR^T] + t RGR^T; reduces to i eps I + t RGR^T without boundary."""
    _require_matching(g)
    _check_interferometer(g.num_modes, r)
    k = SqueezingScalars.from_alpha(alpha)
    rotation = r.matrix
    projector = (rotation @ matched_projector(g) @ rotation.T).tocsr()
    identity = sp.eye_array(g.num_modes, format="csr")
    imag = identity - projector + k.epsilon * projector
    z = (1j * imag + k.t * rotated_graph(g, r)).tocsr()
    return GraphState(z=z, alpha=alpha, modes=g.modes, label="Z_C")


def graph_inverse(g: HGraph, r: BlockInterferometer, alpha: float) -> sp.csr_array:
    """Closed-form inverse of the entangled Z: -i[(I - RPR^T) + c RPR^T + s RGR^T]."""
    _require_matching(g)
    _check_interferometer(g.num_modes, r)
    k = SqueezingScalars.from_alpha(alpha)
    rotation = r.matrix
    projector = (rotation @ matched_projector(g) @ rotation.T).tocsr()
    identity = sp.eye_array(g.num_modes, format="csr")
    inner = identity - projector + k.c * projector + k.s * rotated_graph(g, r)
    return (-1j * inner).tocsr()


def covariance_from_graph(state: GraphState) -> QuadratureCovariance:
    """Quadrature covariance of the pure state Z = V + iU.

    sigma_qq = U^-1 / 2, sigma_qp = U^-1 V / 2, sigma_pp = (U + V U^-1 V) / 2, with U^-1
    applied through a Cholesky factorization.
    """
    z = state.dense()
    real_part = np.ascontiguousarray(z.real)
    imag_part = np.ascontiguousarray(z.imag)
    try:
        factor = la.cho_factor(imag_part, lower=True)
    except la.LinAlgError as exc:
        raise NotPositiveDefinite(f"Im Z is not positive definite: {exc}") from exc

    n = state.num_modes
    u_inv = la.cho_solve(factor, np.eye(n))
    u_inv_v = la.cho_solve(factor, real_part)
    qq = 0.5 * u_inv
    qp = 0.5 * u_inv_v
    pp = 0.5 * (imag_part + real_part @ u_inv_v)
    sigma = np.block([[qq, qp], [qp.T, pp]])
    return QuadratureCovariance(sigma=0.5 * (sigma + sigma.T))


def symplectic_form(n: int) -> np.ndarray:
    """Standard symplectic form [[0, I], [-I, 0]] in (q, p) ordering."""
    identity = np.eye(n)
    zeros = np.zeros((n, n))
    return np.block([[zeros, identity], [-identity, zeros]])


def transform_covariance(
    sigma: QuadratureCovariance, r: BlockInterferometer
) -> QuadratureCovariance:
    """Covariance after the passive map R (+) R acting on q and p alike."""
    _check_interferometer(sigma.num_modes, r)
    block = sp.block_diag((r.matrix, r.matrix), format="csr")
    moved = block @ (block @ sigma.sigma).T
    return QuadratureCovariance(sigma=0.5 * (moved + moved.T))


def symplectic_eigenvalues(sigma: QuadratureCovariance | np.ndarray) -> np.ndarray:
    """Symplectic spectrum: moduli of the eigenvalues of i Omega sigma, each pair once."""
    matrix = sigma.sigma if isinstance(sigma, QuadratureCovariance) else np.asarray(sigma)
    n = matrix.shape[0] // 2
    spectrum = np.sort(np.abs(la.eigvals(symplectic_form(n) @ matrix).imag))
    return spectrum[::2]


def is_pure(sigma: QuadratureCovariance | np.ndarray, tol: Optional[float] = None) -> bool:
    """True when every symplectic eigenvalue equals the vacuum value 1/2 within ``tol``."""
    tolerance = tol if tol is not None else get_settings().PURITY_TOLERANCE
    deviation = np.abs(symplectic_eigenvalues(sigma) - VACUUM_VARIANCE)
    return bool(np.all(deviation <= tolerance))


def satisfies_uncertainty(sigma: QuadratureCovariance, tol: float = 1e-10) -> bool:
    """Robertson-Schrodinger bound sigma + i Omega / 2 >= 0."""
    hermitian = sigma.sigma + 0.5j * symplectic_form(sigma.num_modes)
    return bool(la.eigvalsh(hermitian).min() >= -tol)


def vacuum_units(variance: float | np.ndarray) -> float | np.ndarray:
    """Variance in units of vacuum noise (1/2)."""
    units = np.asarray(variance, dtype=np.float64) / VACUUM_VARIANCE
    return float(units) if units.ndim == 0 else units


def squeezing_db(variance: float | np.ndarray) -> float | np.ndarray:
    """Squeezing in dB relative to vacuum; positive below the vacuum level."""
    units = np.asarray(vacuum_units(variance))
    if np.any(units <= 0):
        raise GaussianEngineError("squeezing is undefined for nonpositive variance")
    result = -10.0 * np.log10(units)
    return float(result) if result.ndim == 0 else result
