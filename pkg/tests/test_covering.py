import pytest

from fillbound.complexes import Chain, WeightedComplex, boundary
from fillbound.corpus import gen_flat_ball
from fillbound.covering import (CoverageError, GeodesicGraph, GraphChain,
                                SkeletonMetric, build_covering, build_nerve,
                                graph_cycle_to_nerve, natural_map,
                                nerve_filling_to_triangles, shortest_path,
                                triangle_boundary_chain)


@pytest.fixture
def path_complex():
    return WeightedComplex([(0, 1), (1, 2), (2, 3), (3, 4)])


def test_shortest_path_trivial(path_complex):
    path, length = shortest_path(path_complex, 2, 2)
    assert path == [] and length == 0.0


def test_shortest_path_adjacent(path_complex):
    path, length = shortest_path(path_complex, 1, 2)
    assert path == [(1, 2)] and length == 1.0


def test_shortest_path_prefers_cheap_detour():
    cx = WeightedComplex([(0, 1), (1, 2), (2, 3), (0, 3)],
                         volumes={(0, 1): 1.0, (1, 2): 1.0, (2, 3): 1.0,
                                  (0, 3): 10.0})
    path, length = shortest_path(cx, 0, 3)
    assert path == [(0, 1), (1, 2), (2, 3)]
    assert length == 3.0


def test_shortest_path_disconnected():
    cx = WeightedComplex([(0, 1), (2, 3)])
    with pytest.raises(ValueError, match="disconnected"):
        shortest_path(cx, 0, 3)


def test_shortest_path_deterministic_ties():
    # two equal-length routes 0-1-3 and 0-2-3: the tie breaks toward the
    # lexicographically smaller predecessor
    cx = WeightedComplex([(0, 1), (1, 3), (0, 2), (2, 3)])
    path, _ = shortest_path(cx, 0, 3)
    assert path == [(0, 1), (1, 3)]


def test_build_covering_single_ball(path_complex):
    cov = build_covering(path_complex, [2], [10.0], regions=["A"],
                         region_vertices={"A": {0, 1, 2, 3, 4}})
    assert cov.balls[0].members == {0, 1, 2, 3, 4}


def test_build_covering_tiny_radii_fail(path_complex):
    with pytest.raises(CoverageError) as err:
        build_covering(path_complex, [0, 4], [0.5, 0.5],
                       regions=["A", "A"],
                       region_vertices={"A": {0, 1, 2, 3, 4}})
    assert err.value.uncovered == [1, 2, 3]
    # every vertex a center -> coverage holds
    cov = build_covering(path_complex, [0, 1, 2, 3, 4], [0.5] * 5,
                         regions=["A"] * 5,
                         region_vertices={"A": {0, 1, 2, 3, 4}})
    for b in cov.balls:
        assert b.members == {b.center}


def test_nerve_disjoint_and_overlapping(path_complex):
    cov = build_covering(path_complex, [0, 4], [1.5, 1.5])
    nerve = build_nerve(cov)
    assert nerve.complex.simplices_of_dim(1) == []
    cov2 = build_covering(path_complex, [0, 2, 4], [1.5, 1.5, 1.5])
    nerve2 = build_nerve(cov2)
    assert nerve2.complex.simplices_of_dim(1) == [(0, 1), (1, 2)]


def test_nerve_triple_intersection():
    cx = WeightedComplex([(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)])
    cov = build_covering(cx, [3, 4, 5], [2.5] * 3)
    nerve = build_nerve(cov)
    assert nerve.complex.simplices_of_dim(2) == [(0, 1, 2)]
    assert set(nerve.complex.simplices_of_dim(1)) == {(0, 1), (0, 2), (1, 2)}


def test_nerve_soundness_witnesses():
    inst = gen_flat_ball(4, 1.0)
    cov = inst.tree.covering
    nerve = inst.tree.scope_nerve(None)
    balls = cov.by_index
    for k in range(1, nerve.complex.dim + 1):
        for s in nerve.complex.simplices_of_dim(k):
            common = set.intersection(*(balls[i].members for i in s))
            assert common, f"nerve simplex {s} has no witness vertex"
    for v in inst.complex.vertices:
        sim = natural_map(v, cov)
        if len(sim) - 1 <= nerve.max_dim:
            assert nerve.complex.has_simplex(sim)


def test_natural_map(path_complex):
    cov = build_covering(path_complex, [0, 2, 4], [1.5, 1.5, 1.5])
    assert natural_map(0, cov) == (0,)
    assert natural_map(1, cov) == (0, 1)
    with pytest.raises(ValueError, match="no ball"):
        cov2 = build_covering(path_complex, [0], [1.5])
        natural_map(4, cov2)


def test_graph_edges_bounded_by_n_squared():
    inst = gen_flat_ball(4, 1.0)
    g = inst.tree.scope_graph(None)
    n = len(inst.tree.covering.balls)
    assert len(g.edges) <= n * n


def test_graph_chain_roundtrip_cancellation():
    cx = WeightedComplex([(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)])
    cov = build_covering(cx, [3, 4, 5], [2.5] * 3)
    g = GeodesicGraph(cov)
    nerve = build_nerve(cov)
    gc = GraphChain(g)
    gc.add(0, 1)
    gc.add(1, 2)
    gc.add(2, 0)
    assert gc.is_closed()
    assert gc.simplicial_length() == 3
    nz = graph_cycle_to_nerve(gc, nerve)
    assert boundary(nz).is_empty()
    assert sum(abs(c) for c in nz.coefficients.values()) == 3
    # doubled opposite edges cancel
    gc2 = GraphChain(g)
    gc2.add(0, 1)
    gc2.add(1, 0)
    assert gc2.is_empty()
    assert graph_cycle_to_nerve(gc2, nerve).is_empty()
    # empty in, empty out
    assert graph_cycle_to_nerve(GraphChain(g), nerve).is_empty()


def test_nerve_filling_to_triangles():
    cx = WeightedComplex([(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)])
    cov = build_covering(cx, [3, 4, 5], [2.5] * 3)
    g = GeodesicGraph(cov)
    nerve = build_nerve(cov)
    F = Chain.from_terms(nerve.complex, 2, [((0, 1, 2), 2)])
    tris = nerve_filling_to_triangles(F, g)
    assert tris == [((0, 1, 2), 2)]
    assert nerve_filling_to_triangles(Chain(nerve.complex, 2), g) == []


def test_triangle_roundtrip_boundary_identity():
    inst = gen_flat_ball(4, 1.0)
    tree = inst.tree
    g = tree.scope_graph(None)
    nerve = tree.scope_nerve(None)
    tri = nerve.complex.simplices_of_dim(2)
    assert tri, "flat-ball nerve should contain triangles"
    F = Chain.from_terms(nerve.complex, 2, [(tri[0], 1), (tri[-1], -2)])
    total = Chain(inst.complex, 1)
    for triple, coeff in nerve_filling_to_triangles(F, g):
        total = total + coeff * triangle_boundary_chain(
            triple, g, inst.complex)
    want = Chain(inst.complex, 1)
    bd = boundary(F)
    gc = GraphChain(g)
    for (i, j), m in bd.coefficients.items():
        gc.add(i, j, m)
    assert total == gc.as_complex_chain(inst.complex)


def test_metric_symmetry_and_triangle_inequality():
    inst = gen_flat_ball(2, 1.0)
    metric = SkeletonMetric(inst.complex)
    vs = inst.complex.vertices
    for u in vs[:5]:
        for v in vs[:5]:
            assert metric.dist(u, v) == pytest.approx(metric.dist(v, u))
            for w in vs[:5]:
                assert metric.dist(u, v) <= metric.dist(u, w) \
                    + metric.dist(w, v) + 1e-12
