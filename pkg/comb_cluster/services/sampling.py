"""Seeded Gaussian sampling of quadrature records.

Rows are drawn in fixed-size chunks, each from its own counter-based Philox stream keyed
by (seed, chunk index). The sample matrix therefore depends on the seed, the count and the
chunk size, but never on how many workers produce the chunks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
import scipy.linalg as la

from comb_cluster.domain import GaussianEngineError, NotPositiveDefinite, QuadratureCovariance
from comb_cluster.observability import get_logger
from comb_cluster.settings import get_settings

logger = get_logger(__name__)


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Independent generator for one chunk of rows."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def sample_quadratures(
    sigma: QuadratureCovariance,
    count: int,
    seed: int,
    *,
    chunk_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Draw ``count`` zero-mean samples with covariance sigma; shape (count, 2N)."""
    if count < 1:
        raise GaussianEngineError(f"sample count must be positive, got {count}")
    settings = get_settings()
    chunk_size = chunk_size or settings.SAMPLE_CHUNK
    workers = workers or settings.SAMPLE_WORKERS

    try:
        factor = la.cholesky(sigma.sigma, lower=True)
    except la.LinAlgError as exc:
        raise NotPositiveDefinite(f"covariance is not positive definite: {exc}") from exc

    dimension = sigma.sigma.shape[0]
    starts = list(range(0, count, chunk_size))

    def draw(index: int) -> np.ndarray:
        rows = min(chunk_size, count - starts[index])
        normals = chunk_generator(seed, index).standard_normal((rows, dimension))
        return normals @ factor.T

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks: List[np.ndarray] = list(pool.map(draw, range(len(starts))))
    else:
        blocks = [draw(index) for index in range(len(starts))]

    logger.debug(
        "quadratures sampled", count=count, chunks=len(starts), workers=workers, seed=seed
    )
    return np.vstack(blocks)


def sample_covariance(samples: np.ndarray) -> np.ndarray:
    """Second-moment estimate about the known zero mean."""
    return samples.T @ samples / samples.shape[0]
