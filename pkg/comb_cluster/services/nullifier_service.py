"""Theta-indexed nullifiers n_theta = R^T q_theta - t G R^T q_(-theta) and their variances."""
from __future__ import annotations

import math
from typing import List, Optional, Set

import numpy as np
import scipy.sparse as sp

from comb_cluster.domain import (
    BlockInterferometer,
    DimensionMismatch,
    GaussianEngineError,
    HGraph,
    MonteCarloResult,
    NullifierSet,
    QuadratureCovariance,
    SqueezingScalars,
)
from comb_cluster.observability import get_logger
from comb_cluster.services.gaussian_engine import VACUUM_VARIANCE, symplectic_form
from comb_cluster.services.hgraph_service import adjacency_matrix, matched_projector

logger = get_logger(__name__)

# cos/sin below this are treated as exact zeros (theta on a multiple of pi/2)
_TRIG_SNAP = 1e-15


def _trig(theta: float) -> tuple[float, float]:
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return (0.0 if abs(cos_t) < _TRIG_SNAP else cos_t, 0.0 if abs(sin_t) < _TRIG_SNAP else sin_t)


def nullifier_rows(theta: float, r: BlockInterferometer, g: HGraph, alpha: float) -> NullifierSet:
    """Coefficient rows of n_theta over (q, p).

    With q_theta = q cos theta + p sin theta the q-block is (R^T - t G R^T) cos theta and the
    p-block is (R^T + t G R^T) sin theta.
    """
    if r.num_modes != g.num_modes:
        raise DimensionMismatch(
            f"interferometer acts on {r.num_modes} modes, H-graph has {g.num_modes}"
        )
    t = SqueezingScalars.from_alpha(alpha).t
    cos_t, sin_t = _trig(theta)
    r_t = r.matrix.T.tocsr()
    g_r_t = (adjacency_matrix(g) @ r_t).tocsr()
    q_block = cos_t * (r_t - t * g_r_t)
    p_block = sin_t * (r_t + t * g_r_t)
    rows = sp.hstack([q_block, p_block], format="csr")
    rows.eliminate_zeros()
    return NullifierSet(theta=theta, rows=rows, alpha=alpha)


def commutator_matrix(rows: NullifierSet) -> np.ndarray:
    """Pairwise symplectic products rows Omega rows^T; zero for commuting nullifiers."""
    dense = rows.rows.toarray()
    return dense @ symplectic_form(rows.num_modes) @ dense.T


def nullifier_cov_analytic(theta: float, g: HGraph, alpha: float) -> sp.csr_array:
    """(eps/2)(P - t G cos 2 theta) + (I - P)/2 over all modes.

    On matched modes this is (eps/2)(I - t G cos 2 theta); boundary rows keep the vacuum
    variance 1/2.
    """
    k = SqueezingScalars.from_alpha(alpha)
    projector = matched_projector(g)
    identity = sp.eye_array(g.num_modes, format="csr")
    cos_2t = _trig(2.0 * theta)[0]
    squeezed = 0.5 * k.epsilon * (projector - k.t * cos_2t * adjacency_matrix(g))
    cov = (squeezed + VACUUM_VARIANCE * (identity - projector)).tocsr()
    cov.eliminate_zeros()
    return cov


def nullifier_cov_numeric(sigma: QuadratureCovariance, rows: NullifierSet) -> np.ndarray:
    """rows sigma rows^T evaluated against a dense covariance."""
    if rows.rows.shape[1] != sigma.sigma.shape[0]:
        raise DimensionMismatch(
            f"nullifier rows span {rows.rows.shape[1]} quadratures, "
            f"covariance has {sigma.sigma.shape[0]}"
        )
    half = rows.rows @ sigma.sigma
    cov = np.asarray(rows.rows @ half.T)
    return 0.5 * (cov + cov.T)


def max_deviation(analytic: sp.sparray | np.ndarray, numeric: np.ndarray, g: HGraph) -> float:
    """max |analytic - numeric| restricted to the matched submatrix."""
    dense = analytic.toarray() if sp.issparse(analytic) else np.asarray(analytic)
    mask = g.matched_mask
    diff = np.abs(dense[np.ix_(mask, mask)] - numeric[np.ix_(mask, mask)])
    return float(np.max(diff, initial=0.0))


def boundary_deviation(numeric: np.ndarray, g: HGraph) -> float:
    """max |variance - 1/2| over boundary (unmatched) nullifier rows."""
    unmatched = np.asarray(g.unmatched, dtype=np.int64)
    if unmatched.size == 0:
        return 0.0
    return float(np.max(np.abs(numeric[unmatched, unmatched] - VACUUM_VARIANCE)))


def two_tone_support(rows: NullifierSet, g: HGraph) -> List[Set[int]]:
    """Distinct frequency indices n touched by each nullifier row.

    Support is read from the stored sparsity pattern, which ``nullifier_rows`` keeps free of
    exact zeros, so partner coefficients of order t count however small t is. At alpha = 0
    (t = 0) every row collapses onto its own macronode and touches one frequency.
    """
    n_modes = g.num_modes
    if rows.num_modes != n_modes:
        raise DimensionMismatch(
            f"nullifier set has {rows.num_modes} rows, H-graph has {n_modes} modes"
        )
    frequencies = g.frequencies
    matrix = sp.csr_array(rows.rows, copy=True)
    matrix.eliminate_zeros()
    supports: List[Set[int]] = []
    for i in range(matrix.shape[0]):
        columns = matrix.indices[matrix.indptr[i] : matrix.indptr[i + 1]]
        supports.append({int(frequencies[c % n_modes]) for c in columns})
    return supports


def monte_carlo_nullifiers(
    samples: np.ndarray,
    rows: NullifierSet,
    analytic: Optional[np.ndarray] = None,
) -> MonteCarloResult:
    """Estimate nullifier variances from quadrature samples.

    The nullifiers have known zero mean, so the estimate is mean(x^2) with standard error
    sqrt(2 / count) times the analytic variance.
    """
    if samples.ndim != 2 or samples.shape[1] != rows.rows.shape[1]:
        raise DimensionMismatch(
            f"samples of shape {samples.shape} do not match {rows.rows.shape[1]} quadratures"
        )
    count = samples.shape[0]
    if count < 2:
        raise GaussianEngineError("at least two samples are needed for a variance estimate")
    values = np.asarray(rows.rows @ samples.T)
    estimate = np.mean(values**2, axis=1)
    expected = np.asarray(analytic, dtype=np.float64) if analytic is not None else estimate
    std_error = expected * math.sqrt(2.0 / count)
    result = MonteCarloResult(
        theta=rows.theta,
        count=count,
        estimate=estimate,
        analytic=expected,
        std_error=std_error,
    )
    logger.info("monte carlo nullifiers", theta=rows.theta, count=count, max_abs_z=result.max_abs_z)
    return result
