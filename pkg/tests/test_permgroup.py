from concurrent.futures import ThreadPoolExecutor

import pytest

from spheregate.errors import CapExceeded, DegreeMismatch, NotASubgroup, NotASubset, NotNormal
from spheregate.permgroup import (center, closure, conj_classes, core, derived_subgroup, element_order_counts,
                                  format_perm, index_two_subgroups, is_simple, is_solvable, normal_closure,
                                  normal_subgroups, normalizer, perm_from_cycles, perm_inv, perm_mul, perm_order,
                                  quotient, subgroup, subgroup_from_elements, sylow)

from .conftest import alt, sym


def test_products_apply_left_first():
    a = (1, 2, 0)
    b = (1, 0, 2)
    assert perm_mul(a, b) == (0, 2, 1)
    assert perm_mul(a, perm_inv(a)) == (0, 1, 2)


def test_cycle_notation():
    g = perm_from_cycles([(0, 1, 2), (3, 4)], 6)
    assert format_perm(g) == "(0,1,2)(3,4)"
    assert perm_order(g) == 6
    assert format_perm(perm_from_cycles([], 3)) == "()"


@pytest.mark.parametrize("n,order,classes", [(3, 6, 3), (4, 24, 5), (5, 120, 7)])
def test_symmetric_groups(n, order, classes):
    G = sym(n)
    assert G.order == order
    assert len(conj_classes(G)) == classes
    assert sum(cls.size for cls in conj_classes(G)) == order


def test_alternating_a5():
    G = alt(5)
    assert G.order == 60
    assert element_order_counts(G) == {1: 1, 2: 15, 3: 20, 5: 24}
    assert is_simple(G)
    assert not is_solvable(G)


def test_closure_errors():
    with pytest.raises(DegreeMismatch):
        closure([(1, 0), (1, 2, 0)])
    with pytest.raises(CapExceeded):
        closure(sym(6).generators, order_cap=100)


def test_empty_closure_is_trivial():
    G = closure([], degree=4)
    assert G.order == 1
    assert G.identity == (0, 1, 2, 3)


def test_subgroup_membership_checks():
    G = alt(4)
    with pytest.raises(NotASubset):
        subgroup(G, [perm_from_cycles([(0, 1)], 4)])
    with pytest.raises(NotASubgroup):
        subgroup_from_elements(G, [G.identity, perm_from_cycles([(0, 1, 2)], 4)])


def test_center_and_derived():
    S4 = sym(4)
    assert center(S4).order == 1
    assert derived_subgroup(S4).order == 12
    assert derived_subgroup(derived_subgroup(S4)).order == 4
    assert is_solvable(S4)


def test_normal_subgroups_of_s4():
    assert [N.order for N in normal_subgroups(sym(4))] == [1, 4, 12, 24]


def test_index_two_subgroups():
    assert [H.order for H in index_two_subgroups(sym(4))] == [12]
    assert index_two_subgroups(alt(5)) == []
    klein = closure([perm_from_cycles([(0, 1)], 4), perm_from_cycles([(2, 3)], 4)])
    assert len(index_two_subgroups(klein)) == 3


@pytest.mark.parametrize("n,p,order", [(4, 2, 8), (5, 2, 4), (5, 5, 5), (6, 3, 9), (5, 3, 3)])
def test_sylow_orders(n, p, order):
    G = alt(n) if n in (5, 6) else sym(n)
    P = sylow(G, p)
    assert P.order == order
    assert P.members <= G.members


def test_normal_closure_and_core():
    S4 = sym(4)
    t = perm_from_cycles([(0, 1)], 4)
    assert normal_closure(S4, [t]).order == 24
    H = subgroup(S4, [perm_from_cycles([(0, 1, 2, 3)], 4), perm_from_cycles([(0, 2)], 4)])
    assert H.order == 8
    assert core(S4, H).order == 4
    assert normalizer(S4, H).order == 8


def test_quotient_by_klein_four():
    S4 = sym(4)
    V = normal_subgroups(S4)[1]
    Q = quotient(S4, V)
    assert Q.order == 6
    assert not is_simple(Q)


def test_quotient_requires_normality():
    S4 = sym(4)
    with pytest.raises(NotNormal):
        quotient(S4, subgroup(S4, [perm_from_cycles([(0, 1)], 4)]))


def test_classes_are_memoized():
    G = alt(5)
    assert conj_classes(G) is conj_classes(G)


def test_closure_ignores_generator_order_and_repeats():
    r = perm_from_cycles([(0, 1, 2, 3)], 4)
    s = perm_from_cycles([(0, 2)], 4)
    groups = [closure([r, s]), closure([s, r]), closure([s, r, s, r, perm_mul(r, s)])]
    assert {G.order for G in groups} == {8}
    assert groups[0].members == groups[1].members == groups[2].members
    assert groups[0].elements == groups[2].elements


def test_memoized_classes_are_shared_across_threads():
    G = alt(6)
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(lambda _: conj_classes(G), range(8)))
    assert all(classes is results[0] for classes in results)
    assert len(results[0]) == 7
