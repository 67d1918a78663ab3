import numpy as np
import pytest

from spheregate.constructors import build, formula_order, orthogonal_model, parse_groupspec
from spheregate.errors import (CapExceeded, DegreeCapExceeded, ParameterError, SpecSyntaxError,
                               UnsupportedFamily)
from spheregate.permgroup import center, conj_classes, is_simple, perm_inv, perm_mul, perm_pow


@pytest.mark.parametrize("text", [
    "PSL2(7)",
    "Meta(7,3,2)",
    "CentProd(SL2(5),SL2(5))",
    "DirProd(Alt(5),Perms[(0,1,2,3,4,5,6)])",
    "Perms[(0,1)(2,3);(0,2)]",
])
def test_canonical_text(text):
    assert str(parse_groupspec(text)) == text


def test_surrounding_whitespace_is_ignored():
    assert parse_groupspec("  Alt(6) \n") == parse_groupspec("Alt(6)")


@pytest.mark.parametrize("text,position", [
    ("PSL2(7", 6),
    ("Foo(3)", 0),
    ("PSL2(7)x", 7),
    ("Alt()", 4),
    ("Perms[1]", 6),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(SpecSyntaxError) as excinfo:
        parse_groupspec(text)
    assert excinfo.value.position == position


@pytest.mark.parametrize("text", [
    "PSL2(6)",
    "Meta(7,3,3)",
    "Sz(32)",
    "EA(4,2)",
    "Alt(1)",
    "Perms[(0,1)(1,2)]",
])
def test_parameter_errors(text):
    with pytest.raises(ParameterError):
        parse_groupspec(text)


def test_wrong_parameter_count():
    with pytest.raises(SpecSyntaxError):
        parse_groupspec("EA(2)")


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27])
def test_psl2_orders(q):
    G = build(f"PSL2({q})")
    assert G.order == q * (q * q - 1) // (1 if q % 2 == 0 else 2)
    assert G.degree == q + 1


@pytest.mark.parametrize("text,order", [
    ("SL2(3)", 24),
    ("SL2(5)", 120),
    ("SL2(7)", 336),
    ("PGL2(9)", 720),
    ("PSL3(2)", 168),
    ("PSL3(3)", 5616),
    ("Alt(7)", 2520),
    ("Sym(6)", 720),
    ("EA(3,2)", 9),
    ("Meta(7,3,2)", 21),
    ("SignedEven(5)", 1920),
    ("DirProd(Alt(5),Perms[(0,1,2,3,4,5,6)])", 420),
])
def test_family_orders(text, order):
    G = build(text)
    assert G.order == order
    assert formula_order(parse_groupspec(text)) in (order, None)
    assert G.name == text


def test_sl2_has_central_involution():
    assert center(build("SL2(5)")).order == 2
    assert center(build("SL2(7)")).order == 2


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11])
def test_small_psl2_are_simple(q):
    assert is_simple(build(f"PSL2({q})"))


def test_metacyclic_relation():
    G = build("Meta(7,3,2)")
    a, b = G.generators
    assert perm_mul(perm_mul(b, a), perm_inv(b)) == perm_pow(a, 2)


def test_builds_are_cached():
    assert build("Alt(5)") is build(parse_groupspec("Alt(5)"))


def test_caps():
    with pytest.raises(CapExceeded):
        build("Alt(6)", order_cap=100)
    with pytest.raises(DegreeCapExceeded):
        build("PSL2(25)", degree_cap=10)


def test_central_product_needs_central_involutions():
    with pytest.raises(ParameterError):
        build("CentProd(Alt(5),Alt(5))")


@pytest.mark.slow
def test_central_product_of_binary_icosahedral_groups():
    G = build("CentProd(SL2(5),SL2(5))")
    assert G.order == 7200
    assert center(G).order == 2


@pytest.mark.slow
def test_suzuki_group():
    G = build("Sz(8)")
    assert G.order == 29120
    assert G.degree == 65
    assert len([cls for cls in conj_classes(G) if cls.element_order == 2]) == 1


@pytest.mark.parametrize("text,dimension", [("Alt(5)", 4), ("Alt(6)", 5), ("Sym(6)", 5), ("SignedEven(5)", 5)])
def test_orthogonal_models(text, dimension):
    model = orthogonal_model(text)
    assert model.dimension == dimension
    for g in model.group.elements[:40]:
        M = model.matrix_of(g)
        assert model.is_orthogonal(M)
        assert model.determinant(M) == 1


def test_orthogonal_model_is_a_homomorphism():
    model = orthogonal_model("Alt(5)")
    a, b = model.group.generators[:2]
    assert np.array_equal(model.matrix_of(perm_mul(a, b)), model.matrix_of(b) @ model.matrix_of(a))


@pytest.mark.parametrize("text", ["Sym(5)", "PSL2(7)", "Alt(2)"])
def test_unsupported_orthogonal_models(text):
    with pytest.raises(UnsupportedFamily):
        orthogonal_model(text)
