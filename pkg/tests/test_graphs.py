"""Graph construction, spectra, and bound tests."""

import numpy as np
import pytest

from netsync.errors import DisconnectedError, InvalidParamsError, TooSmallError
from netsync.graphs import (
    BarabasiAlbert,
    ErdosRenyi,
    Graph,
    RegularKind,
    WattsStrogatz,
    barabasi_albert,
    build_random,
    build_regular,
    degrees,
    diameter,
    erdos_renyi,
    graph_from_edges,
    is_connected,
    lambda2_analytic,
    lambda2_bounds,
    laplacian,
    read_edge_list,
    spectrum,
    watts_strogatz,
    write_edge_list,
)

# regression fixture: degree histogram of the preferential-attachment draw
# below, recorded from the generator itself
_BA_30_2_SEED7_HISTOGRAM = [0, 0, 16, 3, 4, 2, 0, 1, 0, 2, 1, 0, 1]


def test_graph_validation():
    with pytest.raises(InvalidParamsError):
        graph_from_edges(3, [(0, 0)])
    with pytest.raises(InvalidParamsError):
        graph_from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidParamsError):
        graph_from_edges(2, [(0, 5)])
    with pytest.raises(InvalidParamsError):
        Graph(n=0, edges=frozenset())


def test_build_regular_edge_sets():
    assert build_regular(RegularKind.COMPLETE, 3).edges == {(0, 1), (0, 2), (1, 2)}
    assert build_regular(RegularKind.STAR, 4).edges == {(0, 1), (0, 2), (0, 3)}
    assert build_regular(RegularKind.RING, 4).edges == {(0, 1), (1, 2), (2, 3), (0, 3)}
    assert build_regular(RegularKind.PATH, 3).edges == {(0, 1), (1, 2)}
    with pytest.raises(TooSmallError):
        build_regular(RegularKind.RING, 2)
    with pytest.raises(TooSmallError):
        build_regular(RegularKind.COMPLETE, 1)


def test_laplacian_entries():
    assert np.array_equal(laplacian(build_regular(RegularKind.COMPLETE, 2)),
                          [[1.0, -1.0], [-1.0, 1.0]])
    assert np.array_equal(laplacian(build_regular(RegularKind.STAR, 3)),
                          [[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    ring4_row0 = laplacian(build_regular(RegularKind.RING, 4))[0]
    assert np.array_equal(ring4_row0, [2.0, -1.0, 0.0, -1.0])


def test_diameter_values():
    assert diameter(build_regular(RegularKind.COMPLETE, 5)) == 1
    assert diameter(build_regular(RegularKind.PATH, 4)) == 3
    assert diameter(build_regular(RegularKind.RING, 6)) == 3
    with pytest.raises(DisconnectedError):
        diameter(graph_from_edges(4, [(0, 1), (2, 3)]))


def test_erdos_renyi_full_probability_gives_complete():
    g = erdos_renyi(4, 1.0, seed=123)
    assert g.edges == build_regular(RegularKind.COMPLETE, 4).edges


def test_erdos_renyi_deterministic_and_validated():
    g1 = erdos_renyi(20, 0.3, seed=5)
    g2 = build_random(ErdosRenyi(p=0.3), 20, seed=5)
    assert g1.edges == g2.edges
    assert is_connected(g1)
    with pytest.raises(InvalidParamsError):
        erdos_renyi(5, 1.5, seed=0)
    with pytest.raises(DisconnectedError):
        erdos_renyi(4, 0.0, seed=0)


def test_watts_strogatz_zero_rewiring_is_ring():
    g = watts_strogatz(5, 2, 0.0, seed=99)
    assert g.edges == build_regular(RegularKind.RING, 5).edges


def test_watts_strogatz_deterministic_and_degree_preserving():
    g1 = watts_strogatz(16, 4, 0.3, seed=21)
    g2 = build_random(WattsStrogatz(k=4, p=0.3), 16, seed=21)
    assert g1.edges == g2.edges
    # rewiring moves endpoints but never changes the edge count
    assert len(g1.edges) == 16 * 4 // 2
    with pytest.raises(InvalidParamsError):
        watts_strogatz(10, 3, 0.2, seed=0)
    with pytest.raises(InvalidParamsError):
        watts_strogatz(4, 4, 0.2, seed=0)


def test_barabasi_albert_fixture():
    g = barabasi_albert(30, 2, seed=7)
    assert is_connected(g)
    deg = degrees(g)
    assert deg.max() >= 1.5 * deg.mean()
    assert np.bincount(deg).tolist() == _BA_30_2_SEED7_HISTOGRAM
    assert build_random(BarabasiAlbert(m=2), 30, seed=7).edges == g.edges
    with pytest.raises(InvalidParamsError):
        barabasi_albert(5, 5, seed=0)


def test_spectrum_regular_families():
    assert np.allclose(spectrum(build_regular(RegularKind.COMPLETE, 3)).eigenvalues,
                       [0.0, 3.0, 3.0], atol=1e-9)
    assert np.allclose(spectrum(build_regular(RegularKind.STAR, 4)).eigenvalues,
                       [0.0, 1.0, 1.0, 4.0], atol=1e-9)


def test_spectrum_zero_multiplicity_counts_components():
    two_edges = graph_from_edges(4, [(0, 1), (2, 3)])
    vals = spectrum(two_edges).eigenvalues
    assert np.count_nonzero(np.abs(vals) <= 1e-9) == 2


def test_spectrum_cap():
    with pytest.raises(InvalidParamsError):
        spectrum(build_regular(RegularKind.RING, 10), cap=5)


def test_laplacian_invariants_on_generated_graphs():
    gs = [
        build_regular(RegularKind.RING, 9),
        build_regular(RegularKind.STAR, 7),
        erdos_renyi(12, 0.4, seed=3),
        watts_strogatz(12, 4, 0.2, seed=4),
        barabasi_albert(12, 2, seed=5),
    ]
    for g in gs:
        lap = laplacian(g)
        assert np.array_equal(lap, lap.T)
        assert np.allclose(lap.sum(axis=1), 0.0, atol=1e-12)
        assert np.trace(lap) == 2 * len(g.edges)
        decomp = spectrum(g)
        assert np.all(decomp.eigenvalues >= -1e-9)
        # the zero mode is the constant vector
        v0 = decomp.eigenvectors[:, 0]
        assert np.max(np.abs(v0 - v0[0])) <= 1e-8


@pytest.mark.parametrize("kind", list(RegularKind))
def test_lambda2_matches_analytic(kind):
    for n in range(3, 13):
        g = build_regular(kind, n)
        lam2 = spectrum(g).eigenvalues[1]
        assert abs(lam2 - lambda2_analytic(kind, n)) <= 1e-9


def test_lambda2_analytic_values():
    assert lambda2_analytic(RegularKind.COMPLETE, 10) == 10.0
    assert abs(lambda2_analytic(RegularKind.RING, 4) - 2.0) <= 1e-12
    assert abs(lambda2_analytic(RegularKind.PATH, 2) - 2.0) <= 1e-12
    assert lambda2_analytic(RegularKind.STAR, 2) == 2.0
    assert lambda2_analytic(RegularKind.STAR, 9) == 1.0
    with pytest.raises(TooSmallError):
        lambda2_analytic(RegularKind.RING, 2)


def test_lambda2_bounds_examples():
    lo, hi = lambda2_bounds(build_regular(RegularKind.COMPLETE, 4))
    assert (lo, hi) == (1.0, 4.0)
    assert lo <= 4.0 <= hi

    p3 = build_regular(RegularKind.PATH, 3)
    lo, hi = lambda2_bounds(p3)
    assert np.isclose(lo, 4.0 / 6.0) and np.isclose(hi, 1.5)
    lam2 = spectrum(p3).eigenvalues[1]
    assert lo <= lam2 <= hi
    assert np.isclose(lam2, 1.0, atol=1e-9)

    r6 = build_regular(RegularKind.RING, 6)
    lo, hi = lambda2_bounds(r6)
    assert np.isclose(lo, 4.0 / 18.0) and np.isclose(hi, 2.4)
    assert lo <= spectrum(r6).eigenvalues[1] <= hi

    with pytest.raises(DisconnectedError):
        lambda2_bounds(graph_from_edges(4, [(0, 1), (2, 3)]))


def test_edge_list_round_trip(tmp_path):
    g = erdos_renyi(10, 0.4, seed=8)
    path = tmp_path / "graph.txt"
    write_edge_list(g, path)
    back = read_edge_list(path)
    assert back.n == g.n and back.edges == g.edges
    assert np.array_equal(laplacian(back), laplacian(g))


def test_edge_list_reader_rejects_bad_files(tmp_path):
    loop = tmp_path / "loop.txt"
    loop.write_text("3\n1 1\n")
    with pytest.raises(InvalidParamsError):
        read_edge_list(loop)
    dup = tmp_path / "dup.txt"
    dup.write_text("3\n0 1\n1 0\n")
    with pytest.raises(InvalidParamsError):
        read_edge_list(dup)
    bad = tmp_path / "bad.txt"
    bad.write_text("x\n")
    with pytest.raises(InvalidParamsError):
        read_edge_list(bad)
