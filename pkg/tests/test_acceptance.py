"""End-to-end checks over the bundled manifests and the headline results."""

import pytest
from sympy import primerange

from spheregate.constructors import build, orthogonal_model
from spheregate.fixdim import CspOptions, check_dimfn, enumerate_dimfns, lattice_from_group, orthogonal_dimfn, \
    uniform_borel_check
from spheregate.permgroup import conj_classes, index_two_subgroups, perm_from_cycles, subgroup_conjugacy_partition
from spheregate.rules import check, load_manifest, survey
from spheregate.schemas import RunConfig, SurveyReport, Verdict
from spheregate.structure import classify_structure
from spheregate.subgroups import EAWitness, find_metacyclic, max_ea_rank, multiplier_admissible, \
    psl2_borel_multipliers


def test_borel_equations_are_infeasible(table):
    for text, count in (("PSL2(25)", 6), ("PSL2(8)", 7), ("PSL2(16)", 15)):
        assert check(build(text), 4, table=table).status == "excluded"
        assert not uniform_borel_check(4, count, range(-1, 4), range(-1, 4)).feasible


@pytest.mark.slow
def test_desk_survey_leaves_a5_and_a6(table):
    report = survey(load_manifest("gorenstein_desk"), 4, RunConfig(threads=4), table)
    assert report.errors == []
    assert report.simple_survivors == ["Alt(5)", "Alt(6)"]


def test_psl2_multiplier_rule_over_small_primes():
    passing = [p for p in primerange(2, 32)
               if all(multiplier_admissible(t, p, 4) for t in psl2_borel_multipliers(p))]
    assert passing == [2, 3, 5]


def test_order_three_multipliers_fail_for_13_and_31():
    for p in (13, 31):
        orders_three = [t for t in range(2, p) if pow(t, 3, p) == 1]
        assert orders_three
        assert not any(multiplier_admissible(t, p, 4) for t in orders_three)
    witnesses = find_metacyclic(build("PSL3(3)"), 13, 3)
    assert witnesses and not any(multiplier_admissible(w.t, 13, 4) for w in witnesses)


def test_a6_orthogonal_function_is_enumerated():
    model = orthogonal_model("Alt(6)")
    witness = EAWitness(3, 2, (perm_from_cycles([(0, 1, 2)], 6), perm_from_cycles([(3, 4, 5)], 6)), model.group)
    f = orthogonal_dimfn(model, witness)
    L = lattice_from_group(model.group, witness)
    assert [f.values[i] for i in f.lattice.cyclic] == [2, 2, 0, 0]
    assert f.values[-1] == 0
    assert check_dimfn(L, 4, CspOptions(), f) == []
    assert f.values in {s.values for s in enumerate_dimfns(L, 4)}


def test_central_involution_descent(table):
    assert "R-CENTRAL" in check(build("SL2(7)"), 4, table=table).violations
    assert "R-CENTRAL" in check(build("SL2(9)"), 4, table=table).violations
    assert check(build("SL2(5)"), 4, table=table).status == "not_excluded"
    report = survey(["Alt(6)", "PSL2(7)", "SL2(7)"], 3, table=table)
    assert [row.status for row in report.rows] == ["excluded"] * 3


def test_psl2_orders_match_the_formula():
    for q in (4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27):
        assert build(f"PSL2({q})").order == q * (q * q - 1) // (2 if q % 2 else 1)


@pytest.mark.slow
def test_suzuki_group():
    G = build("Sz(8)")
    assert G.order == 29120
    assert len([c for c in conj_classes(G) if c.element_order == 2]) == 1
    assert max_ea_rank(G, 2)[0] == 3


def test_index_two_subgroups_of_a_psl2_8_four_group_are_conjugate():
    G = build("PSL2(8)")
    rank, witness = max_ea_rank(G, 2)
    assert rank == 3
    hyperplanes = index_two_subgroups(witness.subgroup())
    assert len(hyperplanes) == 7
    assert subgroup_conjugacy_partition(G, hyperplanes) == [list(range(7))]


@pytest.mark.parametrize("text,case", [
    ("Perms[(0,2,4,6,8)(1,3,5,7,9);(0,2,4)(1,3,5);(0,1)(2,3)]", "A"),
    ("Sym(6)", "B"),
    ("PGL2(9)", "OutsideList"),
    ("DirProd(Alt(5),Perms[(0,1,2,3,4,5,6)])", "C"),
    ("Alt(7)", "OutsideList"),
])
def test_classifier_cases(text, case):
    assert classify_structure(build(text)).tag == case


@pytest.mark.slow
def test_witness_manifest_survives(table):
    report = survey(load_manifest("witnesses"), 4, table=table)
    assert report.errors == []
    assert len(report.survivors) == len(report.rows)


def test_reports_are_deterministic_and_valid(table):
    specs = ["Alt(5)", "PSL2(7)", "PSL2(25)", "SL2(5)"]
    first = survey(specs, table=table).to_json()
    assert survey(specs, table=table).to_json() == first
    assert SurveyReport.model_validate_json(first).to_json() == first
    verdict = check(build("PSL2(8)"), 4, table=table)
    assert Verdict.model_validate_json(verdict.to_json()) == verdict
