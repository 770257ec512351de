import math
import random

import pytest

from fillbound.bounds import log2_bigint
from fillbound.complexes import Chain, WeightedComplex, boundary, is_cycle, mass
from fillbound.corpus import gen_lens_neck
from fillbound.homology import (H1Structure, InfeasibleError,
                                bounded_filling, brute_force_filling,
                                fills_exist, hf1_estimate,
                                homology_rank_and_torsion,
                                minimal_mass_filling, nr_coefficient_bound,
                                nr_coefficient_bound_exact, reduced_filling,
                                shortest_h1_basis, some_filling)

FACES = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


@pytest.fixture
def tetra():
    return WeightedComplex(FACES)


@pytest.fixture
def circle():
    return WeightedComplex([(0, 1), (1, 2), (0, 2)])


@pytest.fixture(scope="module")
def lens5():
    return gen_lens_neck(5, 1, 1)


def circle_generator(circle):
    return Chain.from_terms(circle, 1,
                            [((0, 1), 1), ((1, 2), 1), ((2, 0), 1)])


# -- ranks and torsion ---------------------------------------------------


def test_homology_circle(circle):
    assert homology_rank_and_torsion(circle, 1) == (1, [])
    assert homology_rank_and_torsion(circle, 0) == (1, [])


def test_homology_tetra_boundary(tetra):
    assert homology_rank_and_torsion(tetra, 1) == (0, [])
    assert homology_rank_and_torsion(tetra, 2) == (1, [])


def test_homology_lens_torsion(lens5):
    assert homology_rank_and_torsion(lens5.complex, 1) == (0, [5])


def test_homology_degree_out_of_range(tetra):
    with pytest.raises(ValueError, match="out of range"):
        homology_rank_and_torsion(tetra, 5)


# -- existence -----------------------------------------------------------


def test_fills_exist_tetra_face(tetra):
    z = boundary(Chain.from_terms(tetra, 2, [((0, 1, 2), 1)]))
    assert fills_exist(z)


def test_fills_exist_circle_generator(circle):
    assert not fills_exist(circle_generator(circle))


def test_torsion_multiple_bounds(lens5):
    gen = Chain.from_terms(lens5.complex, 1,
                           [(e, 1) for e in lens5.metadata["generator_cycle"]])
    assert is_cycle(gen)
    assert not fills_exist(gen)
    for k in (2, 3, 4):
        assert not fills_exist(k * gen)
    assert fills_exist(5 * gen)


def test_fills_exist_rejects_non_cycle(tetra):
    with pytest.raises(ValueError, match="not a cycle"):
        fills_exist(Chain.from_terms(tetra, 1, [((0, 1), 1)]))


# -- particular solutions -------------------------------------------------


def test_some_filling_boundary_exact(tetra):
    sigma = Chain.from_terms(tetra, 2, [((0, 1, 2), 1)])
    z = boundary(sigma)
    res = some_filling(z)
    assert boundary(res.filling) == z
    z3 = boundary(3 * sigma)
    res3 = some_filling(z3)
    assert boundary(res3.filling) == z3


def test_some_filling_empty_cycle(tetra):
    res = some_filling(Chain(tetra, 1), tetra)
    assert res.filling.is_empty() and res.mass == 0.0


def test_some_filling_infeasible(circle):
    with pytest.raises(InfeasibleError, match="does not bound"):
        some_filling(circle_generator(circle))


# -- bounded fillings ------------------------------------------------------


def test_bounded_filling_unit_bound_returns_face(tetra):
    z = boundary(Chain.from_terms(tetra, 2, [((0, 1, 2), 1)]))
    res = bounded_filling(z, 1)
    assert res is not None
    assert res.max_abs_coeff == 1
    assert boundary(res.filling) == z
    assert res.filling.coefficients == {(0, 1, 2): 1}


def test_bounded_filling_absent_when_bound_too_small():
    # a single triangle: filling 2*d(sigma) forces coefficient 2
    cx = WeightedComplex([(0, 1, 2)])
    sigma = Chain.from_terms(cx, 2, [((0, 1, 2), 1)])
    z = boundary(2 * sigma)
    assert bounded_filling(z, 1, cx) is None
    oracle = brute_force_filling(z, 1, cx)
    assert oracle is None
    res = bounded_filling(z, 2, cx)
    assert res is not None and res.max_abs_coeff == 2


def test_bounded_filling_never_absent_at_nr_bound(tetra):
    rng = random.Random(3)
    n0 = len(tetra.vertices)
    bound = nr_coefficient_bound_exact(n0, 2, 4)
    for _ in range(20):
        c = Chain(tetra, 2)
        for t in FACES:
            c.add_term(t, rng.randint(-4, 4))
        z = boundary(c)
        res = bounded_filling(z, bound)
        assert res is not None
        assert boundary(res.filling) == z
        assert res.max_abs_coeff <= bound


def test_bounded_filling_infeasible_gives_absent(circle):
    assert bounded_filling(circle_generator(circle), 10) is None


# -- minimal mass ----------------------------------------------------------


def test_minimal_mass_tetra_face_unit_areas(tetra):
    z = boundary(Chain.from_terms(tetra, 2, [((0, 1, 2), 1)]))
    res = minimal_mass_filling(z)
    assert res.optimal
    assert res.mass == pytest.approx(1.0)
    oracle = brute_force_filling(z, 2)
    assert oracle.mass == pytest.approx(res.mass)


def test_minimal_mass_heavy_face_prefers_complement():
    vols = {(0, 1, 2): 10.0}
    cx = WeightedComplex(FACES, volumes=vols)
    z = boundary(Chain.from_terms(cx, 2, [((0, 1, 2), 1)]))
    res = minimal_mass_filling(z)
    assert res.mass == pytest.approx(3.0)
    assert (0, 1, 2) not in res.filling.coefficients
    oracle = brute_force_filling(z, 2, cx)
    assert oracle.mass == pytest.approx(3.0)


def test_minimal_mass_empty(tetra):
    res = minimal_mass_filling(Chain(tetra, 1), tetra)
    assert res.mass == 0.0 and res.optimal


def test_minimal_matches_brute_force_on_random_instances():
    rng = random.Random(99)
    done = 0
    while done < 25:
        nv = rng.randint(4, 7)
        tris = set()
        for _ in range(rng.randint(3, 10)):
            t = tuple(sorted(rng.sample(range(nv), 3)))
            tris.add(t)
        tris = sorted(tris)
        if len(tris) > 12:
            continue
        vols = {}
        for t in tris:
            vols[t] = rng.randint(1, 16) / 8.0
        cx = WeightedComplex(tris, volumes=vols)
        c = Chain(cx, 2)
        for t in tris:
            c.add_term(t, rng.randint(-2, 2))
        z = boundary(c)
        res = minimal_mass_filling(z, cx)
        oracle = brute_force_filling(z, 3, cx)
        assert res.optimal
        assert oracle is not None
        assert abs(res.mass - oracle.mass) < 1e-9
        assert boundary(res.filling) == z
        done += 1


def test_brute_force_guard_rails(tetra, circle):
    assert brute_force_filling(circle_generator(circle), 3) is None
    z = Chain(tetra, 1)
    res = brute_force_filling(z, 0)
    assert res is not None and res.mass == 0.0
    znz = boundary(Chain.from_terms(tetra, 2, [((0, 1, 2), 1)]))
    assert brute_force_filling(znz, 0) is None
    big = WeightedComplex([tuple(sorted((i, i + 1, i + 2)))
                           for i in range(17)])
    with pytest.raises(ValueError, match="too large"):
        brute_force_filling(Chain(big, 1), 1, big)


# -- the coefficient bound --------------------------------------------------


def test_nr_coefficient_bound_values():
    assert nr_coefficient_bound(1, 1, 1) == 0.0
    assert nr_coefficient_bound(3, 2, 1) == pytest.approx(72 * math.log2(3))
    assert nr_coefficient_bound(2, 4, 5) == pytest.approx(256 + math.log2(5))


def test_nr_coefficient_bound_matches_exact_bigint():
    for (n0, n, mc) in ((1, 1, 1), (3, 2, 1), (2, 4, 5), (4, 3, 7)):
        exact = nr_coefficient_bound_exact(n0, n, mc)
        assert nr_coefficient_bound(n0, n, mc) == pytest.approx(
            log2_bigint(exact), rel=1e-12)


# -- the HF_1 estimator ------------------------------------------------------


def test_hf1_requires_trivial_h1(circle):
    with pytest.raises(ValueError, match="nontrivial H1"):
        hf1_estimate(circle, 10.0, 3, seed=1)


def test_hf1_reproducible_and_monotone(tetra):
    a = hf1_estimate(tetra, 4.0, 8, seed=5)
    b = hf1_estimate(tetra, 4.0, 8, seed=5)
    assert a == b
    assert all(m1 <= 4.0 for m1, _ in a)
    # running-max estimates are monotone in the budget
    def estimate(l):
        pairs = hf1_estimate(tetra, l, 8, seed=5)
        return max((fm for _, fm in pairs), default=0.0)
    vals = [estimate(l) for l in (3.0, 3.5, 4.0)]
    assert vals == sorted(vals)


def test_hf1_empty_below_shortest_cycle(tetra):
    assert hf1_estimate(tetra, 0.5, 4, seed=2) == []


# -- H1 coordinates and short bases -------------------------------------------


def test_h1_structure_on_lens(lens5):
    h1 = H1Structure(lens5.complex)
    assert h1.invariants() == (0, [5])
    gen = Chain.from_terms(lens5.complex, 1,
                           [(e, 1) for e in lens5.metadata["generator_cycle"]])
    cls = h1.class_coords(gen)
    assert len(cls) == 1 and math.gcd(cls[0], 5) == 1
    assert h1.is_trivial(5 * gen)


def test_shortest_basis_circle(circle):
    basis = shortest_h1_basis(circle)
    assert len(basis) == 1
    cyc, cls = basis[0]
    assert mass(cyc) == pytest.approx(3.0)
    assert any(c != 0 for c in cls)


def test_shortest_basis_lens(lens5):
    basis = shortest_h1_basis(lens5.complex)
    assert len(basis) == 1
    cyc, cls = basis[0]
    assert math.gcd(cls[0], 5) == 1
    assert is_cycle(cyc)
    # Gromov-style bound: basis loops are short relative to the diameter
    from fillbound.covering import SkeletonMetric
    metric = SkeletonMetric(lens5.complex)
    diam = max(max(metric._tree(v)[0].values())
               for v in lens5.complex.vertices)
    assert mass(cyc) <= 2.0 * diam + 1e-9


def test_reduced_filling_smaller_or_equal(tetra):
    rng = random.Random(8)
    for _ in range(10):
        c = Chain(tetra, 2)
        for t in FACES:
            c.add_term(t, rng.randint(-3, 3))
        z = boundary(c)
        raw = some_filling(z)
        red = reduced_filling(z)
        assert boundary(red.filling) == z
        assert red.mass <= raw.mass + 1e-12
