import random

import pytest

from torick.errors import BasisCheckFailed, NotCompleteOrSmooth, NotSmooth
from torick.fan import Fan, StackyFan, Subgroup, TrivialGroup, product_fan, shelling_order
from torick.golden import (
    b_mu2_beta,
    cyclic_quotient,
    full_torus,
    golden_stacky_fans,
    p1,
    p1xp1,
    p12_beta,
    p12_subgroup,
    p2,
    projective_space,
    single_cone,
)
from torick.ktheory import (
    cell_basis,
    character_ideal,
    character_relations,
    edge_and_tor,
    expected_rank,
    k0_presentation,
    kt0,
    regenerated_k0,
    simplify,
    split_data,
    stanley_reisner_ideal,
    tensor_split,
    wps_coarse_presentations,
    wps_presentation,
    wps_relation,
)
from torick.lattice import FgAbelianGroup, SublatticeSpec
from torick.laurent.groebner import INFINITE, groebner, ideal_equal
from torick.laurent.poly import LaurentPoly
from torick.laurent.presentation import CoefficientTag, RingPresentation

GOLDEN = golden_stacky_fans()
# ranks frozen from the standard-monomial count, cross-checked against sympy
# over Q and F_2 in test_laurent and against #cones x |G^dual|
GOLDEN_RANKS = {"P1": 2, "P2": 3, "P1xP1": 4, "P1xP2": 6,
                "[P1/mu2]": 4, "[P1/mu3]": 6, "[P2/mu2]": 6, "[P1xP1/mu2]": 8}


def x(n, i, k=1):
    return LaurentPoly.variable(n, i, k)


def test_stanley_reisner_examples():
    assert stanley_reisner_ideal(p1()) == [(x(2, 0) - 1) * (x(2, 1) - 1)]
    assert stanley_reisner_ideal(p2()) == [(x(3, 0) - 1) * (x(3, 1) - 1) * (x(3, 2) - 1)]
    assert stanley_reisner_ideal(p1xp1()) == [(x(4, 0) - 1) * (x(4, 1) - 1), (x(4, 2) - 1) * (x(4, 3) - 1)]


def test_character_ideal_examples():
    assert character_ideal(p1(), SublatticeSpec.whole(1)) == [x(2, 0, -1) * x(2, 1) - 1]
    assert character_ideal(p1(), SublatticeSpec.from_rows(1, [[2]])) == [x(2, 0, -2) * x(2, 1, 2) - 1]
    assert character_ideal(p1(), SublatticeSpec.zero(1)) == []


def test_k0_p1_mu2():
    p = k0_presentation(GOLDEN["[P1/mu2]"])
    assert p.coefficient_tag == CoefficientTag.INTEGERS
    assert p.variables == ("t1", "t2")
    assert p.relations == ((x(2, 0) - 1) * (x(2, 1) - 1), x(2, 0, -2) * x(2, 1, 2) - 1)
    assert p.quotient_report().z_rank == 4


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_ranks(name):
    sf = GOLDEN[name]
    r = k0_presentation(sf).quotient_report()
    assert r.z_rank == GOLDEN_RANKS[name] == expected_rank(sf)
    assert r.is_free


def test_k0_p2_reduces_to_one_variable():
    p = k0_presentation(StackyFan(p2()))
    # the character relations force t1 = t2 = t3; the Stanley-Reisner one becomes (t-1)^3
    images = [x(1, 0)] * 3
    assert [r.substitute(images) for r in p.relations] == [(x(1, 0) - 1) ** 3, LaurentPoly(1), LaurentPoly(1)]
    s, subs = simplify(p)
    assert s.arity == 1
    assert ideal_equal(s.groebner(), groebner(1, [(x(1, 0) - 1) ** 3]))
    assert set(subs) == {"t1", "t2"}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_projective_space_specialisation(n):
    s, _ = simplify(k0_presentation(StackyFan(projective_space(n))))
    assert s.arity == 1
    assert ideal_equal(groebner(1, s.relations), groebner(1, [(x(1, 0) - 1) ** (n + 1)]))
    assert s.quotient_report().z_rank == n + 1


def test_full_torus_is_kt0():
    for f in (p1(), p2(), p1xp1()):
        assert k0_presentation(full_torus(f)).same_ideal(kt0(f))
        assert kt0(f).quotient_report().z_rank == INFINITE


def test_singular_fan_rejected():
    f = Fan.make(2, [(1, 0), (1, 2)], [[0, 1]])
    with pytest.raises(NotSmooth):
        k0_presentation(StackyFan(f))
    with pytest.raises(NotSmooth):
        kt0(f)


def test_tensor_split_examples():
    p = k0_presentation(StackyFan(p1()))
    assert tensor_split(p, FgAbelianGroup(1)).quotient_report().z_rank == INFINITE
    q = tensor_split(p, FgAbelianGroup(0, (2,)))
    assert q.arity == 3 and q.quotient_report().z_rank == 4
    assert tensor_split(p, FgAbelianGroup()) is p


def test_b_mu2_k0():
    sf = b_mu2_beta()
    G, F, H = split_data(sf)
    assert G == FgAbelianGroup(0, (2,)) and F.is_trivial and H == G
    p = k0_presentation(sf)
    assert p.variables == ("u1",)
    assert p.quotient_report().z_rank == 2
    # the group ring of Z/2, written in u^-1
    assert ideal_equal(p.groebner(), groebner(1, [x(1, 0, 2) - 1]))


def test_p12_beta_equals_subgroup_form():
    a, b = k0_presentation(p12_beta()), k0_presentation(p12_subgroup())
    assert a.same_ideal(b)
    assert a.quotient_report().z_rank == 3


def test_weighted_projective_line_matches_wps():
    # K_0 of P(1,2) via the fan, after eliminating t1 = t2^-2, is (1-t)(1-t^2)
    s, _ = simplify(k0_presentation(p12_subgroup()))
    assert s.arity == 1
    t = x(1, 0)
    ideal = groebner(1, s.relations)
    target = [wps_relation((1, 2))]
    # the surviving variable may be t or t^-1
    assert ideal_equal(ideal, groebner(1, target)) or ideal_equal(
        ideal, groebner(1, [r.substitute([t ** -1]) for r in target]))


@pytest.mark.parametrize("q", [(1,), (1, 2), (1, 1), (1, 1, 1), (2, 3), (1, 2, 3), (3, 4, 5)])
def test_wps_presentation(q):
    p = wps_presentation(q)
    assert p.coefficient_tag == CoefficientTag.GRADED_K_OF_FIELD
    assert p.variables == ("t",)
    t = x(1, 0)
    rel = LaurentPoly.constant(1, 1)
    for qi in q:
        rel = rel * (1 - t ** qi)
    assert p.relations == (rel,)
    assert p.quotient_report().z_rank == sum(q)


def test_wps_all_ones_is_projective_space():
    p = wps_presentation((1, 1, 1))
    assert ideal_equal(p.groebner(), groebner(1, [(x(1, 0) - 1) ** 3]))


def test_wps_coarse():
    stack, coarse = wps_coarse_presentations((1, 2))
    assert stack.quotient_report().z_rank == 4
    assert coarse.coefficient_tag == CoefficientTag.RATIONAL
    stack, _ = wps_coarse_presentations((1, 1))
    s, _ = simplify(stack)
    assert s.arity == 1 and ideal_equal(s.groebner(), groebner(1, [(x(1, 0) - 1) ** 2]))
    _, coarse = wps_coarse_presentations((1, 1, 1))
    assert coarse.relations == ((x(1, 0) - 1) ** 3,)
    assert coarse.quotient_report().z_rank == 3


def test_wps_rejects_bad_weights():
    with pytest.raises(ValueError):
        wps_presentation((0, 1))


# -- cell basis -------------------------------------------------------------


def test_p1_cell_basis():
    cb = cell_basis(StackyFan(p1()))
    assert [cb.elements[c] for c in cb.order.order] == [LaurentPoly.constant(2, 1), 1 - x(2, 1)]
    assert cb.report.passed and abs(cb.report.determinant) == 1


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_cell_basis_on_golden_fans(name):
    cb = cell_basis(GOLDEN[name])
    assert cb.report.passed
    assert cb.report.expected_rank == cb.report.quotient_rank == GOLDEN_RANKS[name]
    assert len(cb.elements) == len(GOLDEN[name].fan.max_cones)


def test_cell_basis_full_torus_specialises():
    cb = cell_basis(full_torus(p2()))
    assert cb.report.quotient_rank == 3 and cb.report.passed


def test_cell_basis_needs_complete_fan():
    with pytest.raises(NotCompleteOrSmooth):
        cell_basis(StackyFan(single_cone()))


def test_cell_basis_detects_a_non_basis():
    # a valid ordering of P1 whose cells are then swapped with the wrong cone
    f = p1()
    so = shelling_order(f)
    from torick.fan import ShellingOrder
    bad = ShellingOrder(so.order, (frozenset(), frozenset()), so.tau_prime)
    with pytest.raises(BasisCheckFailed):
        cell_basis(StackyFan(f), bad)


# -- Tor and the edge map ---------------------------------------------------


def test_tor_p1():
    rep = edge_and_tor(StackyFan(p1()), 1)
    assert rep.tor.degree(0).group == FgAbelianGroup(2)
    assert rep.tor.degree(1).vanishes
    assert rep.edge_isomorphism


def test_tor_p1_mu2():
    rep = edge_and_tor(GOLDEN["[P1/mu2]"], 1)
    assert rep.edge_isomorphism and rep.degenerate


@pytest.mark.parametrize("name", ["P2", "P1xP1", "[P2/mu2]", "[P1xP1/mu2]"])
def test_tor_golden(name):
    rep = edge_and_tor(GOLDEN[name], 3)
    assert rep.edge_isomorphism and rep.degenerate
    assert rep.tor.degree(0).group == FgAbelianGroup(GOLDEN_RANKS[name])


# -- properties -------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_character_basis_independence(name):
    sf = GOLDEN[name]
    p = k0_presentation(sf)
    rng = random.Random(11)
    for _ in range(3):
        assert regenerated_k0(sf, rng).same_ideal(p)


def test_character_relations_any_generating_set():
    # a redundant generating set of M' = <2> in Z
    p = k0_presentation(GOLDEN["[P1/mu2]"])
    f = p1()
    rels = tuple(stanley_reisner_ideal(f) + character_relations(f, [[4], [6]]))
    q = RingPresentation(p.coefficient_tag, p.variables, rels, p.annotations)
    assert q.same_ideal(p)


@pytest.mark.parametrize("f1, f2", [(p1, p1), (p1, p2)])
def test_kunneth_rank(f1, f2):
    a = k0_presentation(StackyFan(f1())).quotient_report().z_rank
    b = k0_presentation(StackyFan(f2())).quotient_report().z_rank
    prod = k0_presentation(StackyFan(product_fan(f1(), f2()))).quotient_report().z_rank
    assert prod == a * b


def test_kunneth_rank_with_groups():
    sf1 = cyclic_quotient(p1(), [[2]])
    f = product_fan(p1(), p1())
    sf = StackyFan(f, Subgroup(SublatticeSpec.from_rows(2, [[2, 0], [0, 1]])))
    a = k0_presentation(sf1).quotient_report().z_rank
    b = k0_presentation(StackyFan(p1(), TrivialGroup())).quotient_report().z_rank
    assert k0_presentation(sf).quotient_report().z_rank == a * b
