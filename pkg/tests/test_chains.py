import random

import pytest

from fillbound.complexes import (Chain, ComplexValidationError,
                                 WeightedComplex, boundary,
                                 induced_subcomplex, is_cycle, mass,
                                 transfer_chain)

FACES = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


@pytest.fixture
def tetra():
    return WeightedComplex(FACES)


def test_boundary_of_single_triangle(tetra):
    c = Chain.from_terms(tetra, 2, [((0, 1, 2), 1)])
    b = boundary(c)
    assert b.terms() == [((0, 1), 1), ((0, 2), -1), ((1, 2), 1)]


def test_boundary_squared_zero(tetra):
    rng = random.Random(1)
    for _ in range(50):
        c = Chain(tetra, 2)
        for t in FACES:
            c.add_term(t, rng.randint(-4, 4))
        assert boundary(boundary(c)).is_empty()


def test_shared_edge_cancels_with_coherent_orientations():
    # hand expansion on the 4-vertex complex:
    #   d[0,1,2] = (1,2) - (0,2) + (0,1)
    #   d(-[1,2,3]) = -(2,3) + (1,3) - (1,2)
    # so the shared edge (1,2) cancels and four edges remain
    cx = WeightedComplex([(0, 1, 2), (1, 2, 3)])
    c = Chain.from_terms(cx, 2, [((0, 1, 2), 1), ((1, 3, 2), 1)])
    b = boundary(c)
    assert (1, 2) not in b.coefficients
    assert b.terms() == [((0, 1), 1), ((0, 2), -1), ((1, 3), 1), ((2, 3), -1)]


def test_orientation_sign_from_vertex_order(tetra):
    c = Chain.from_terms(tetra, 2, [((1, 0, 2), 1)])
    assert c.coefficients == {(0, 1, 2): -1}
    c2 = Chain.from_terms(tetra, 2, [((2, 0, 1), 1)])
    assert c2.coefficients == {(0, 1, 2): 1}


def test_mass_examples():
    cx = WeightedComplex([(0, 1, 2), (1, 2, 3)],
                         volumes={(0, 1, 2): 0.5, (1, 2, 3): 0.25})
    assert mass(Chain(cx, 2)) == 0.0
    assert mass(Chain.from_terms(cx, 2, [((0, 1, 2), 2)])) == 1.0
    cx2 = WeightedComplex([(0, 1, 2), (1, 2, 3)],
                          volumes={(0, 1, 2): 1.0, (1, 2, 3): 0.25})
    c = Chain.from_terms(cx2, 2, [((0, 1, 2), 3), ((1, 2, 3), -2)])
    assert mass(c) == 3.5


def test_mass_subadditive_and_homogeneous(tetra):
    rng = random.Random(2)
    for _ in range(50):
        a = Chain(tetra, 2)
        b = Chain(tetra, 2)
        for t in FACES:
            a.add_term(t, rng.randint(-3, 3))
            b.add_term(t, rng.randint(-3, 3))
        assert mass(a + b) <= mass(a) + mass(b) + 1e-12
        n = rng.randint(-5, 5)
        assert mass(n * a) == pytest.approx(abs(n) * mass(a))
    # equality when supports are disjoint
    a = Chain.from_terms(tetra, 2, [((0, 1, 2), 2)])
    b = Chain.from_terms(tetra, 2, [((0, 1, 3), -1)])
    assert mass(a + b) == pytest.approx(mass(a) + mass(b))


def test_is_cycle(tetra):
    c = Chain.from_terms(tetra, 2, [((0, 1, 2), 1), ((1, 2, 3), -2)])
    assert is_cycle(boundary(c))
    assert not is_cycle(Chain.from_terms(tetra, 1, [((0, 1), 1)]))
    tri = Chain.from_terms(tetra, 1,
                           [((0, 1), 1), ((1, 2), 1), ((2, 0), 1)])
    assert is_cycle(tri)


def test_boundary_rejects_degree_zero(tetra):
    with pytest.raises(ValueError, match="degree 0"):
        boundary(Chain.from_terms(tetra, 0, [((0,), 1)]))


def test_degenerate_simplex_rejected():
    with pytest.raises(ComplexValidationError, match="degenerate"):
        WeightedComplex([(0, 1, 1)])


def test_closure_is_automatic(tetra):
    assert tetra.has_simplex((0, 1))
    assert tetra.has_simplex((3,))
    tetra.validate()


def test_triangle_inequality_enforced():
    with pytest.raises(ComplexValidationError, match="triangle inequality"):
        WeightedComplex([(0, 1, 2)],
                        volumes={(0, 1): 1.0, (1, 2): 1.0, (0, 2): 5.0,
                                 (0, 1, 2): 1.0})


def test_nonpositive_volume_rejected():
    with pytest.raises(ComplexValidationError, match="nonpositive"):
        WeightedComplex([(0, 1)], volumes={(0, 1): -2.0})


def test_chain_algebra(tetra):
    a = Chain.from_terms(tetra, 2, [((0, 1, 2), 2)])
    b = Chain.from_terms(tetra, 2, [((0, 1, 2), -2), ((0, 1, 3), 1)])
    s = a + b
    assert s.coefficients == {(0, 1, 3): 1}
    assert (s - s).is_empty()
    assert (0 * a).is_empty()


def test_induced_subcomplex_and_transfer(tetra):
    sub = induced_subcomplex(tetra, {0, 1, 2})
    assert sub.simplices_of_dim(2) == [(0, 1, 2)]
    c = Chain.from_terms(tetra, 1, [((0, 1), 1), ((1, 2), 1), ((0, 2), -1)])
    cs = transfer_chain(c, sub)
    assert cs.coefficients == c.coefficients
    back = transfer_chain(cs, tetra)
    assert back == c
    with pytest.raises(ComplexValidationError):
        transfer_chain(Chain.from_terms(tetra, 1, [((0, 3), 1)]), sub)
