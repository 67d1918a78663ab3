import pytest

from spheregate.errors import DivisionByZero, FieldMismatch, NonPrime, TooLarge
from spheregate.gf import (ff_add, ff_elem, ff_elements, ff_inv, ff_make, ff_mul, ff_one, ff_order, ff_pow,
                           ff_primitive, ff_squares, ff_sub, ff_zero, first_irreducible, is_irreducible)


@pytest.mark.parametrize("p,n,modulus", [
    (2, 2, (1, 1, 1)),
    (2, 3, (1, 1, 0, 1)),
    (3, 2, (2, 2, 1)),
    (5, 2, (2, 4, 1)),
])
def test_conway_moduli(p, n, modulus):
    assert ff_make(p, n).modulus == modulus


def test_untabulated_modulus_is_first_irreducible():
    # x^2 + 1 is the first monic irreducible quadratic over Z_7
    assert ff_make(7, 2).modulus == (1, 0, 1)
    assert first_irreducible(7, 2) == (1, 0, 1)


def test_irreducibility():
    assert is_irreducible(2, (1, 1, 1))
    assert not is_irreducible(2, (1, 0, 1))
    assert not is_irreducible(3, (0, 1, 1))


def test_bad_parameters():
    with pytest.raises(NonPrime):
        ff_make(4, 1)
    with pytest.raises(TooLarge):
        ff_make(2, 17)
    with pytest.raises(TooLarge):
        ff_make(3, 0)


def test_labels_and_coefficients():
    F = ff_make(3, 2)
    a = ff_elem(F, [1, 2])
    assert a.label == 7
    assert ff_elem(F, 7) == a
    with pytest.raises(FieldMismatch):
        ff_elem(F, 9)
    with pytest.raises(FieldMismatch):
        ff_elem(F, [1, 2, 0])


def test_gf8_multiplication():
    F = ff_make(2, 3)
    x, x2 = ff_elem(F, 2), ff_elem(F, 4)
    # x^3 = x + 1 under x^3 + x + 1
    assert ff_mul(F, x, x2).label == 3
    assert ff_pow(F, x, 7) == ff_one(F)


@pytest.mark.parametrize("p,n", [(2, 4), (3, 2), (5, 2), (7, 1), (3, 3)])
def test_field_axioms(p, n):
    F = ff_make(p, n)
    one = ff_one(F)
    elements = ff_elements(F)
    assert len(elements) == F.q
    for a in elements[1:]:
        assert ff_mul(F, a, ff_inv(F, a)) == one
        assert ff_sub(F, ff_add(F, a, one), one) == a
    assert ff_order(F, ff_primitive(F)) == F.q - 1


def test_frobenius_is_additive():
    F = ff_make(3, 3)
    elements = ff_elements(F)
    for a in elements[::5]:
        for b in elements[::7]:
            assert ff_pow(F, ff_add(F, a, b), 3) == ff_add(F, ff_pow(F, a, 3), ff_pow(F, b, 3))


def test_zero_has_no_inverse():
    F = ff_make(5, 1)
    with pytest.raises(DivisionByZero):
        ff_inv(F, ff_zero(F))
    with pytest.raises(ZeroDivisionError):
        ff_order(F, ff_zero(F))


def test_mixed_fields_rejected():
    F4, F8 = ff_make(2, 2), ff_make(2, 3)
    with pytest.raises(FieldMismatch):
        ff_add(F4, ff_one(F4), ff_one(F8))


def test_squares_mod_7():
    F = ff_make(7, 1)
    assert [a.label for a in ff_squares(F)] == [1, 2, 4]
