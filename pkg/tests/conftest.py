"""Shared fixtures: small H-graphs, their interferometers and config files."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, Dict

import numpy as np
import pytest

from comb_cluster import get_settings
from comb_cluster.domain import CombWindow, OpoSpec
from comb_cluster.services.hgraph_service import build_hgraph
from comb_cluster.services.interferometer_service import (
    build_block_interferometer,
    sylvester_splitter,
)


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def wire():
    """D=1, delta_m=1 over n in [-2, 2]: 10 modes, 4 edges, 2 boundary modes."""
    return build_hgraph([OpoSpec(delta_m=1)], CombWindow(-2, 2))


@pytest.fixture
def wire_r(wire):
    return build_block_interferometer(sylvester_splitter(2), wire)


@pytest.fixture
def square():
    """D=2 lattice with offsets (1, 3) over n in [-4, 4]: 36 modes."""
    return build_hgraph([OpoSpec(delta_m=1), OpoSpec(delta_m=3)], CombWindow(-4, 4))


@pytest.fixture
def square_r(square):
    return build_block_interferometer(sylvester_splitter(4), square)


@pytest.fixture
def paley12() -> np.ndarray:
    """Normalized Paley Hadamard matrix of order 12 (q = 11)."""
    q = 11
    residues = {(x * x) % q for x in range(1, q)}
    chi = np.array([0] + [1 if x in residues else -1 for x in range(1, q)])
    jacobsthal = np.array([[chi[(j - i) % q] for j in range(q)] for i in range(q)])
    skew = np.zeros((q + 1, q + 1), dtype=np.int64)
    skew[0, 1:] = 1
    skew[1:, 0] = -1
    skew[1:, 1:] = jacobsthal
    signs = np.eye(q + 1, dtype=np.int64) + skew
    return signs / np.sqrt(q + 1)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    def _write(payload: Dict[str, Any], name: str = "run.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def wire_config() -> Dict[str, Any]:
    return {"window": [-2, 2], "opos": [{"delta_m": 1}], "alpha": 0.5}
