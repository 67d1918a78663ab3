import pytest

from spheregate.constructors import build
from spheregate.errors import SolvableInput
from spheregate.structure import (CASE_C_NOTE, analyze_structure, classify_structure, components, fitting_subgroup,
                                  is_dihedral, is_quasisimple, matches_fingerprint)

from .conftest import alt, sym

ORDER_960 = "Perms[(0,2,4,6,8)(1,3,5,7,9);(0,2,4)(1,3,5);(0,1)(2,3)]"


@pytest.fixture(scope="module")
def central_product():
    return build("CentProd(SL2(5),SL2(5))")


@pytest.mark.parametrize("text,expected", [
    ("Alt(5)", True),
    ("SL2(5)", True),
    ("SL2(7)", True),
    ("Sym(5)", False),
    ("EA(2,2)", False),
    ("DirProd(Alt(5),Perms[(0,1)])", False),
])
def test_is_quasisimple(text, expected):
    assert is_quasisimple(build(text)) is expected


def test_fitting_subgroup():
    assert fitting_subgroup(sym(4)).order == 4
    assert fitting_subgroup(build("SL2(5)")).order == 2
    assert fitting_subgroup(alt(5)).order == 1
    assert fitting_subgroup(build(ORDER_960)).order == 16


def test_structure_of_binary_icosahedral_group():
    report = analyze_structure(build("SL2(5)"))
    assert not report.solvable
    assert report.center_order == 2
    assert [K.order for K in report.components] == [120]
    assert report.e_subgroup.order == 120
    record = report.to_record()
    assert record.fitting_order == 2
    assert record.element_orders["4"] == 30


def test_structure_of_solvable_group():
    report = analyze_structure(sym(4))
    assert report.solvable
    assert report.components == []
    assert report.e_subgroup.order == 1


def test_direct_product_component():
    G = build("DirProd(Alt(5),Perms[(0,1,2,3,4,5,6)])")
    assert [K.order for K in components(G)] == [60]
    assert fitting_subgroup(G).order == 7


@pytest.mark.slow
def test_central_product_components(central_product):
    assert [K.order for K in components(central_product)] == [120, 120]


def test_fingerprints():
    assert matches_fingerprint(alt(6), "A6")
    assert matches_fingerprint(build("Sym(6)"), "S6")
    assert not matches_fingerprint(build("PGL2(9)"), "S6")


def test_dihedral_recognition():
    assert is_dihedral(build("Perms[(0,1,2,3);(0,2)]"))
    assert not is_dihedral(build("Perms[(0,1,2,3,4,5)]"))
    assert not is_dihedral(alt(4))


@pytest.mark.parametrize("text,case,quotient", [
    (ORDER_960, "A", "A5"),
    ("SignedEven(5)", "A", "S5"),
])
def test_case_a(text, case, quotient):
    result = classify_structure(build(text))
    assert result.tag == case
    assert result.witness["normal_subgroup_order"] == 16
    assert result.witness["quotient"] == quotient


@pytest.mark.parametrize("text,match", [("Alt(6)", "A6"), ("Sym(6)", "S6")])
def test_case_b(text, match):
    result = classify_structure(build(text))
    assert result.tag == "B"
    assert result.witness["match"] == match


def test_case_c_direct_product():
    result = classify_structure(build("DirProd(Alt(5),Perms[(0,1,2,3,4,5,6)])"))
    assert result.tag == "C"
    assert result.witness == {"index": 1, "form": "A5 x C", "cofactor": "cyclic", "cofactor_order": 7}
    assert result.notes == []


def test_case_c_through_an_index_two_subgroup():
    result = classify_structure(sym(5))
    assert result.tag == "C"
    assert result.witness["index"] == 2
    assert result.witness["cofactor_order"] == 1


def test_case_c_binary_icosahedral_with_cofactor():
    result = classify_structure(build("SL2(5)"))
    assert result.tag == "C"
    assert result.witness["form"] == "A5* o C"
    assert result.notes == [CASE_C_NOTE]


@pytest.mark.slow
def test_case_c_central_product(central_product):
    result = classify_structure(central_product)
    assert result.tag == "C"
    assert result.witness["form"] == "A5* o A5*"


@pytest.mark.parametrize("text", ["PGL2(9)", "Alt(7)", "PSL2(7)"])
def test_outside_the_list(text):
    result = classify_structure(build(text))
    assert result.tag == "OutsideList"
    assert result.witness["order"] == build(text).order


def test_solvable_input_is_rejected():
    with pytest.raises(SolvableInput):
        classify_structure(sym(4))
