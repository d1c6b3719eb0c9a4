import numpy as np
import pytest
import scipy.sparse as sp

from comb_cluster.domain import (
    BadPartition,
    CombWindow,
    LatticeError,
    LatticeVerdict,
    MacronodePartition,
    OpoSpec,
)
from comb_cluster.services import gaussian_engine as engine
from comb_cluster.services.comb_index import frequency_of, frequency_to_compound, lattice_specs
from comb_cluster.services.hgraph_service import build_hgraph, macronode_partition
from comb_cluster.services.interferometer_service import (
    build_block_interferometer,
    sylvester_splitter,
)
from comb_cluster.services.lattice_service import (
    MAX_DIAGNOSTICS,
    coarse_grain,
    count_copies,
    hgraph_macronode_graph,
    split_copies,
    verify_hypercubic,
    verify_lattice,
)


def _entangled_macronodes(specs, window):
    g = build_hgraph(specs, window)
    r = build_block_interferometer(sylvester_splitter(2 * len(specs)), g)
    return g, coarse_grain(engine.rotated_graph(g, r), r.partition)


def test_wire_is_a_uniform_path(wire, wire_r):
    mg = coarse_grain(engine.rotated_graph(wire, wire_r), wire_r.partition)
    assert mg.nodes == [-2, -1, 0, 1, 2]
    assert [(a, b) for a, b, _ in mg.edges] == [(-2, -1), (-1, 0), (0, 1), (1, 2)]
    weights = [w for _, _, w in mg.edges]
    np.testing.assert_allclose(weights, weights[0])


def test_empty_graph_has_no_edges(wire):
    partition = macronode_partition(wire)
    mg = coarse_grain(sp.csr_array((10, 10)), partition)
    assert mg.edges == []
    assert mg.nodes == [-2, -1, 0, 1, 2]


def test_partition_must_cover_matrix(wire):
    partition = macronode_partition(wire)
    with pytest.raises(BadPartition):
        coarse_grain(sp.eye_array(12, format="csr"), partition)

    partial = MacronodePartition(macronodes=(0,), members=((0, 1),), num_modes=10)
    with pytest.raises(BadPartition):
        coarse_grain(sp.eye_array(10, format="csr"), partial)


@pytest.mark.parametrize("threshold", [0.0, 1.0, -0.5])
def test_threshold_must_be_a_fraction(wire, threshold):
    with pytest.raises(LatticeError):
        coarse_grain(
            sp.eye_array(10, format="csr"), macronode_partition(wire), rel_threshold=threshold
        )


def test_threshold_drops_weak_couplings(wire):
    # modes 0, 1, 2 sit on macronodes -2, 1, 0
    dense = np.zeros((10, 10))
    dense[0, 1] = dense[1, 0] = 1.0
    dense[1, 2] = dense[2, 1] = 1e-9
    mg = coarse_grain(dense, macronode_partition(wire))
    assert [(a, b) for a, b, _ in mg.edges] == [(-2, 1)]


def test_wire_passes_linear_check(wire, wire_r):
    mg = coarse_grain(engine.rotated_graph(wire, wire_r), wire_r.partition)
    report = verify_hypercubic(mg, [1], wire.window)
    assert report.passed
    assert report.interior_nodes == (-1, 0, 1)
    assert report.boundary_nodes == (-2, 2)
    assert report.interior_degree == 2
    assert all(mg.degree(node) == 2 for node in report.interior_nodes)


def test_square_lattice_with_offsets_one_and_seven():
    window = CombWindow(-35, 35)
    _, mg = _entangled_macronodes([OpoSpec(delta_m=1), OpoSpec(delta_m=7)], window)
    assert mg.neighbors(0) == [-7, -1, 1, 7]
    report = verify_hypercubic(mg, [1, 7], window)
    assert report.passed, report.diagnostics
    assert report.dimensionality == 2
    assert all(mg.degree(node) == 4 for node in report.interior_nodes)


def test_cubic_lattice_at_hgraph_level():
    window = CombWindow(-100, 100)
    g = build_hgraph(lattice_specs([7, 13]), window)
    mg = hgraph_macronode_graph(g)
    assert mg.neighbors(0) == [-91, -7, -1, 1, 7, 91]
    report = verify_hypercubic(mg, [1, 7, 91], window)
    assert report.passed
    assert len(report.interior_nodes) > 0


@pytest.mark.slow
def test_four_dimensional_lattice():
    window = CombWindow(-110, 110)
    specs = lattice_specs([3, 5, 7])
    _, mg = _entangled_macronodes(specs, window)
    assert mg.neighbors(0) == [-105, -15, -3, -1, 1, 3, 15, 105]
    report = verify_hypercubic(mg, [1, 3, 15, 105], window)
    assert report.passed
    assert report.interior_degree == 8


def test_interferometer_keeps_macronode_adjacency(square, square_r):
    entangled = coarse_grain(engine.rotated_graph(square, square_r), square_r.partition)
    reference = hgraph_macronode_graph(square)
    assert [e[:2] for e in entangled.edges] == [e[:2] for e in reference.edges]


def test_wrong_offsets_fail_without_raising(wire, wire_r):
    mg = coarse_grain(engine.rotated_graph(wire, wire_r), wire_r.partition)
    report = verify_hypercubic(mg, [2], wire.window)
    assert report.verdict is LatticeVerdict.FAIL
    assert any("unexpected edge" in line for line in report.diagnostics)


def test_diagnostics_are_truncated():
    window = CombWindow(-40, 40)
    mg = hgraph_macronode_graph(build_hgraph([OpoSpec(delta_m=1)], window))
    report = verify_hypercubic(mg, [2], window)
    assert not report.passed
    assert len(report.diagnostics) == MAX_DIAGNOSTICS + 1
    assert report.diagnostics[-1].startswith("... and ")


@pytest.mark.parametrize("offsets", [[], [0], [3, 1], [1, 1]])
def test_offsets_must_increase(wire, offsets):
    with pytest.raises(LatticeError):
        verify_hypercubic(hgraph_macronode_graph(wire), offsets)


def test_count_copies():
    wire = build_hgraph([OpoSpec(delta_m=1)], CombWindow(-10, 10))
    chains = build_hgraph([OpoSpec(delta_m=3)], CombWindow(-10, 10))
    assert count_copies(hgraph_macronode_graph(wire)) == 1
    assert count_copies(hgraph_macronode_graph(chains)) == 3


def test_three_copies_of_a_linear_lattice():
    window = CombWindow(-30, 29)
    _, mg = _entangled_macronodes([OpoSpec(delta_m=1, copies=3)], window)
    assert count_copies(mg) == 3

    report = verify_lattice(mg, [1], copies=3, window=window)
    assert report.passed, report.diagnostics
    assert report.copies == 3
    assert report.copy_components == 3
    assert len(report.copy_reports) == 3
    assert all(copy.passed for copy in report.copy_reports)
    assert not report.window_symmetric


def test_copies_follow_the_compound_index():
    window = CombWindow(-30, 29)
    _, mg = _entangled_macronodes([OpoSpec(delta_m=1, copies=3)], window)
    per_copy, crossing = split_copies(mg, 3)
    assert crossing == []
    for graph in per_copy.values():
        for a, b, _ in graph.edges:
            assert abs(b - a) == 1
    for node in mg.nodes:
        compound = frequency_to_compound(frequency_of(node), 3)
        assert compound.m in per_copy[compound.k].nodes


def test_copy_count_mismatch_fails():
    window = CombWindow(-30, 29)
    _, mg = _entangled_macronodes([OpoSpec(delta_m=1, copies=3)], window)
    report = verify_lattice(mg, [1], copies=2, window=window)
    assert not report.passed


def test_single_copy_lattice_delegates(wire, wire_r):
    mg = coarse_grain(engine.rotated_graph(wire, wire_r), wire_r.partition)
    assert verify_lattice(mg, [1], window=wire.window) == verify_hypercubic(mg, [1], wire.window)
    with pytest.raises(LatticeError):
        verify_lattice(mg, [1], copies=0)


def test_report_serializes(wire, wire_r):
    mg = coarse_grain(engine.rotated_graph(wire, wire_r), wire_r.partition)
    payload = verify_hypercubic(mg, [1], wire.window).to_dict()
    assert payload["verdict"] == "pass"
    assert payload["offsets"] == [1]
    assert "copy_reports" not in payload
