import math

import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, settings
from hypothesis import strategies as st

from comb_cluster.domain import (
    CombWindow,
    DimensionMismatch,
    GaussianEngineError,
    GraphState,
    HGraph,
    NotAMatching,
    NotPositiveDefinite,
    OpoSpec,
    OracleSizeExceeded,
    Polarization,
    QuadratureCovariance,
    QumodeId,
    SqueezingScalars,
)
from comb_cluster.services import gaussian_engine as engine
from comb_cluster.services.hgraph_service import adjacency_matrix, build_hgraph
from comb_cluster.services.interferometer_service import (
    build_block_interferometer,
    sylvester_splitter,
)


def _pair() -> HGraph:
    modes = (QumodeId(1, Polarization.Z, -1), QumodeId(1, Polarization.Z, 0))
    return HGraph(modes=modes, edges=((0, 1),), unmatched=())


def test_vacuum_initial_graph(wire):
    z0 = engine.initial_graph(wire, 0.0)
    np.testing.assert_array_equal(z0.dense(), 1j * np.eye(10))


def test_single_pair_initial_graph():
    z0 = engine.initial_graph(_pair(), 0.5).dense()
    expected = 1j * np.array([[1.5431, -1.1752], [-1.1752, 1.5431]])
    np.testing.assert_allclose(z0, expected, atol=1e-4)
    np.testing.assert_allclose(
        z0,
        1j * np.array([[math.cosh(1), -math.sinh(1)], [-math.sinh(1), math.cosh(1)]]),
        atol=1e-15,
    )


def test_single_pair_oracle_closed_form():
    oracle = engine.expm_graph_oracle(_pair(), 0.25)
    c, s = math.cosh(0.5), math.sinh(0.5)
    np.testing.assert_allclose(oracle, 1j * np.array([[c, -s], [-s, c]]), atol=1e-14)


def test_boundary_modes_stay_in_vacuum(wire):
    z0 = engine.initial_graph(wire, 0.7).dense()
    for i in wire.unmatched:
        assert z0[i, i] == 1j
        assert np.count_nonzero(z0[i]) == 1


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 1.0])
def test_closed_form_matches_expm(square, alpha):
    z0 = engine.initial_graph(square, alpha).dense()
    np.testing.assert_allclose(z0, engine.expm_graph_oracle(square, alpha), rtol=0, atol=1e-12)


DELTAS_BY_DIMENSION = {1: (1,), 2: (1, 3), 4: (1, 3, 5, 7)}


@pytest.mark.parametrize("dimension", [1, 2, 4])
@pytest.mark.parametrize("alpha", [0.1, 0.5, 1.0])
def test_closed_form_matches_expm_per_dimension(dimension, alpha):
    specs = [OpoSpec(delta_m=d) for d in DELTAS_BY_DIMENSION[dimension]]
    g = build_hgraph(specs, CombWindow.symmetric(6))
    z0 = engine.initial_graph(g, alpha).dense()
    np.testing.assert_allclose(z0, engine.expm_graph_oracle(g, alpha), rtol=0, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    dimension=st.sampled_from([1, 2, 4]),
    delta_m=st.sampled_from([1, 3, 5]),
    half_width=st.integers(min_value=1, max_value=12),
    alpha=st.floats(min_value=0.0, max_value=1.5),
)
def test_closed_form_matches_expm_property(dimension, delta_m, half_width, alpha):
    deltas = [delta_m * d for d in DELTAS_BY_DIMENSION[dimension]]
    g = build_hgraph([OpoSpec(delta_m=d) for d in deltas], CombWindow.symmetric(half_width))
    z0 = engine.initial_graph(g, alpha).dense()
    np.testing.assert_allclose(z0, engine.expm_graph_oracle(g, alpha), rtol=0, atol=1e-12)


def test_oracle_size_limit(wire):
    with pytest.raises(OracleSizeExceeded):
        engine.expm_graph_oracle(wire, 0.5, limit=4)


def test_non_matching_is_rejected():
    modes = tuple(QumodeId(1, Polarization.Z, n) for n in range(3))
    g = HGraph(modes=modes, edges=((0, 1), (1, 2)), unmatched=())
    with pytest.raises(NotAMatching):
        engine.initial_graph(g, 0.5)


def test_vacuum_is_invariant_under_interferometer(wire, wire_r):
    z = engine.apply_interferometer(engine.initial_graph(wire, 0.0), wire_r)
    np.testing.assert_allclose(z.dense(), 1j * np.eye(10), atol=1e-15)
    assert z.label == "Z"


def test_h1_blocks_are_an_involution(wire, wire_r):
    z0 = engine.initial_graph(wire, 0.5)
    twice = engine.apply_interferometer(engine.apply_interferometer(z0, wire_r), wire_r)
    np.testing.assert_allclose(twice.dense(), z0.dense(), atol=1e-12)


def test_dense_and_sparse_states_evolve_alike(square, square_r):
    z0 = engine.initial_graph(square, 0.5)
    dense = GraphState(z=z0.dense(), alpha=0.5)
    sparse_out = engine.apply_interferometer(z0, square_r).dense()
    dense_out = engine.apply_interferometer(dense, square_r).dense()
    np.testing.assert_allclose(sparse_out, dense_out, atol=1e-14)


def test_interferometer_size_must_match(wire_r):
    with pytest.raises(DimensionMismatch):
        engine.apply_interferometer(engine.initial_graph(_pair(), 0.5), wire_r)


def test_entangled_graph_is_symmetric(square, square_r):
    z = engine.apply_interferometer(engine.initial_graph(square, 0.8), square_r)
    assert z.symmetry_error() < 1e-14


def test_vacuum_cluster_graph(wire, wire_r):
    vacuum = engine.cluster_graph(wire, wire_r, 0.0).dense()
    np.testing.assert_allclose(vacuum, 1j * np.eye(10), atol=1e-15)


def test_cluster_graph_saturates(square, square_r):
    zc = engine.cluster_graph(square, square_r, 5.0).dense()
    rgr = engine.rotated_graph(square, square_r).toarray()
    assert np.max(np.abs(zc.real - rgr)) < 1e-4
    assert la.eigvalsh(zc.imag).min() > 0


def test_cluster_graph_without_boundary():
    g = _two_macronodes()
    r = build_block_interferometer(sylvester_splitter(2), g)
    k = SqueezingScalars.from_alpha(0.5)
    zc = engine.cluster_graph(g, r, 0.5).dense()
    expected = 1j * k.epsilon * np.eye(4) + k.t * engine.rotated_graph(g, r).toarray()
    np.testing.assert_allclose(zc, expected, atol=1e-15)


def _two_macronodes() -> HGraph:
    """Two macronodes (m=-1, m=0), each pair of slots matched across them."""
    modes = (
        QumodeId(1, Polarization.Z, 0),
        QumodeId(1, Polarization.Z, 1),
        QumodeId(1, Polarization.Y, 0),
        QumodeId(1, Polarization.Y, 1),
    )
    return HGraph(modes=modes, edges=((0, 1), (2, 3)), unmatched=(), specs=(OpoSpec(delta_m=1),))


def test_graph_inverse(square, square_r):
    z = engine.apply_interferometer(engine.initial_graph(square, 0.5), square_r).dense()
    inverse = engine.graph_inverse(square, square_r, 0.5).toarray()
    np.testing.assert_allclose(z @ inverse, np.eye(square.num_modes), atol=1e-12)


def test_vacuum_covariance(wire):
    sigma = engine.covariance_from_graph(engine.initial_graph(wire, 0.0))
    np.testing.assert_allclose(sigma.sigma, 0.5 * np.eye(20), atol=1e-15)


def test_single_pair_covariance():
    sigma = engine.covariance_from_graph(engine.initial_graph(_pair(), 0.5))
    c, s = math.cosh(1), math.sinh(1)
    np.testing.assert_allclose(sigma.qq, 0.5 * np.array([[c, s], [s, c]]), atol=1e-14)
    np.testing.assert_allclose(sigma.pp, 0.5 * np.array([[c, -s], [-s, c]]), atol=1e-14)
    np.testing.assert_allclose(sigma.qp, np.zeros((2, 2)), atol=1e-15)


def test_covariance_transport(square, square_r):
    z0 = engine.initial_graph(square, 0.6)
    moved = engine.covariance_from_graph(engine.apply_interferometer(z0, square_r))
    transported = engine.transform_covariance(engine.covariance_from_graph(z0), square_r)
    np.testing.assert_allclose(moved.sigma, transported.sigma, rtol=0, atol=1e-11)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.2])
def test_every_stage_is_pure(square, square_r, alpha):
    z0 = engine.initial_graph(square, alpha)
    states = [
        z0,
        engine.apply_interferometer(z0, square_r),
        engine.cluster_graph(square, square_r, alpha),
    ]
    for state in states:
        sigma = engine.covariance_from_graph(state)
        np.testing.assert_allclose(engine.symplectic_eigenvalues(sigma), 0.5, atol=1e-9)
        assert engine.is_pure(sigma)
        assert engine.satisfies_uncertainty(sigma)


def test_thermal_state_is_not_pure():
    sigma = QuadratureCovariance(sigma=np.eye(4))
    np.testing.assert_allclose(engine.symplectic_eigenvalues(sigma), [1.0, 1.0])
    assert not engine.is_pure(sigma)
    assert engine.is_pure(sigma, tol=0.6)


def test_indefinite_imaginary_part():
    state = GraphState(z=np.diag([1j, -1j]), alpha=0.0)
    with pytest.raises(NotPositiveDefinite) as info:
        engine.covariance_from_graph(state)
    assert str(info.value).startswith("[gaussian-engine]")


def test_symplectic_form():
    omega = engine.symplectic_form(2)
    np.testing.assert_array_equal(omega @ omega, -np.eye(4))
    np.testing.assert_array_equal(omega.T, -omega)


def test_vacuum_units_and_decibels():
    assert engine.vacuum_units(0.25) == 0.5
    assert engine.squeezing_db(0.5) == 0.0
    assert engine.squeezing_db(0.25) == pytest.approx(3.0103, abs=1e-4)
    np.testing.assert_allclose(engine.vacuum_units(np.array([0.5, 1.0])), [1.0, 2.0])
    with pytest.raises(GaussianEngineError):
        engine.squeezing_db(0.0)


def test_adjacency_of_rotated_graph_is_symmetric(square, square_r):
    rgr = engine.rotated_graph(square, square_r)
    assert abs(rgr - rgr.T).max() < 1e-15
    assert rgr.shape == adjacency_matrix(square).shape
