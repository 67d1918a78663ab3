"""
Finite Field Arithmetic for spheregate

Exact arithmetic in GF(p^n), used to build matrix groups over GF(q).
Elements are dense coefficient vectors in the polynomial basis
(constant term first); polynomial arithmetic over Z_p is delegated to
sympy's galoistools.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple, Union

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_mul, gf_neg, gf_pow_mod, gf_rem, gf_strip, gf_sub

from .errors import DivisionByZero, FieldMismatch, NoIrreducibleFound, NonPrime, TooLarge

logger = logging.getLogger(__name__)

MAX_FIELD_SIZE = 2**16

# Conway polynomials, constant term first
CONWAY_POLYNOMIALS: Dict[Tuple[int, int], Tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
}


@dataclass(frozen=True)
class FieldSpec:
    p: int
    n: int
    modulus: Tuple[int, ...]  # monic, constant term first, length n + 1

    @property
    def q(self) -> int:
        return self.p ** self.n

    @property
    def key(self) -> Tuple[int, Tuple[int, ...]]:
        return (self.p, self.modulus)

    def __str__(self) -> str:
        return f"GF({self.q})"


@dataclass(frozen=True, order=True)
class FieldElem:
    coeffs: Tuple[int, ...]
    field: Tuple[int, Tuple[int, ...]]

    @property
    def label(self) -> int:
        """Integer label: coefficients read as base-p digits, constant term least significant."""
        p = self.field[0]
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self) -> str:
        return f"FieldElem({self.label})"


def _to_poly(coeffs: Sequence[int]) -> List[int]:
    return gf_strip([ZZ(c) for c in reversed(coeffs)])


def _from_poly(poly: Sequence[int], n: int) -> Tuple[int, ...]:
    low_first = [int(c) for c in reversed(poly)]
    return tuple(low_first + [0] * (n - len(low_first)))


def _monic_polys(p: int, degree: int):
    """Monic polynomials of the given degree (constant term first), lower coefficients in base-p order."""
    for digits in itertools.product(range(p), repeat=degree):
        yield tuple(reversed(digits)) + (1,)


def is_irreducible(p: int, modulus: Sequence[int]) -> bool:
    """Trial division by every monic polynomial of degree at most n/2."""
    n = len(modulus) - 1
    if n < 1 or modulus[-1] % p != 1:
        return False
    target = _to_poly(modulus)
    for degree in range(1, n // 2 + 1):
        for factor in _monic_polys(p, degree):
            if not gf_rem(target, _to_poly(factor), p, ZZ):
                return False
    return True


def first_irreducible(p: int, n: int) -> Tuple[int, ...]:
    for candidate in _monic_polys(p, n):
        if is_irreducible(p, candidate):
            return candidate
    raise NoIrreducibleFound(f"no irreducible polynomial of degree {n} over Z_{p}")


@lru_cache(maxsize=None)
def ff_make(p: int, n: int) -> FieldSpec:
    """Build GF(p^n) with a deterministic modulus.

    Args:
        p (int): characteristic, must be prime
        n (int): extension degree, at least 1

    Returns:
        FieldSpec: the field, using the Conway polynomial when one is tabulated
    """
    if not isprime(p):
        raise NonPrime(f"{p} is not prime")
    if n < 1 or p**n > MAX_FIELD_SIZE:
        raise TooLarge(f"GF({p}^{n}) is outside the supported range 1 <= n, p^n <= {MAX_FIELD_SIZE}")
    modulus = CONWAY_POLYNOMIALS.get((p, n))
    if modulus is None:
        modulus = first_irreducible(p, n)
    if not is_irreducible(p, modulus):
        raise NoIrreducibleFound(f"modulus {modulus} is reducible over Z_{p}")
    logger.debug(f"GF({p}^{n}) modulus {modulus}")
    return FieldSpec(p=p, n=n, modulus=tuple(modulus))


def _check(spec: FieldSpec, *elems: FieldElem) -> None:
    for a in elems:
        if a.field != spec.key:
            raise FieldMismatch(f"element {a!r} does not belong to {spec}")


def ff_elem(spec: FieldSpec, value: Union[int, Sequence[int]]) -> FieldElem:
    """Element from an integer label or a coefficient vector."""
    if isinstance(value, int):
        if not 0 <= value < spec.q:
            raise FieldMismatch(f"label {value} outside {spec}")
        digits = []
        for _ in range(spec.n):
            value, digit = divmod(value, spec.p)
            digits.append(digit)
        return FieldElem(tuple(digits), spec.key)
    coeffs = tuple(int(c) % spec.p for c in value)
    if len(coeffs) != spec.n:
        raise FieldMismatch(f"expected {spec.n} coordinates for {spec}, got {len(coeffs)}")
    return FieldElem(coeffs, spec.key)


def ff_zero(spec: FieldSpec) -> FieldElem:
    return ff_elem(spec, 0)


def ff_one(spec: FieldSpec) -> FieldElem:
    return ff_elem(spec, 1)


def ff_elements(spec: FieldSpec) -> List[FieldElem]:
    """All q elements in label order."""
    return [ff_elem(spec, label) for label in range(spec.q)]


def ff_add(spec: FieldSpec, a: FieldElem, b: FieldElem) -> FieldElem:
    _check(spec, a, b)
    return FieldElem(_from_poly(gf_add(_to_poly(a.coeffs), _to_poly(b.coeffs), spec.p, ZZ), spec.n), spec.key)


def ff_sub(spec: FieldSpec, a: FieldElem, b: FieldElem) -> FieldElem:
    _check(spec, a, b)
    return FieldElem(_from_poly(gf_sub(_to_poly(a.coeffs), _to_poly(b.coeffs), spec.p, ZZ), spec.n), spec.key)


def ff_neg(spec: FieldSpec, a: FieldElem) -> FieldElem:
    _check(spec, a)
    return FieldElem(_from_poly(gf_neg(_to_poly(a.coeffs), spec.p, ZZ), spec.n), spec.key)


def ff_mul(spec: FieldSpec, a: FieldElem, b: FieldElem) -> FieldElem:
    _check(spec, a, b)
    product = gf_mul(_to_poly(a.coeffs), _to_poly(b.coeffs), spec.p, ZZ)
    return FieldElem(_from_poly(gf_rem(product, _to_poly(spec.modulus), spec.p, ZZ), spec.n), spec.key)


def ff_pow(spec: FieldSpec, a: FieldElem, k: int) -> FieldElem:
    _check(spec, a)
    if k < 0:
        return ff_pow(spec, ff_inv(spec, a), -k)
    if k == 0:
        return ff_one(spec)
    if a.is_zero():
        return a
    result = gf_pow_mod(_to_poly(a.coeffs), k, _to_poly(spec.modulus), spec.p, ZZ)
    return FieldElem(_from_poly(result, spec.n), spec.key)


def ff_inv(spec: FieldSpec, a: FieldElem) -> FieldElem:
    _check(spec, a)
    if a.is_zero():
        raise DivisionByZero(f"zero has no inverse in {spec}")
    return ff_pow(spec, a, spec.q - 2)


def ff_order(spec: FieldSpec, a: FieldElem) -> int:
    """Multiplicative order of a nonzero element."""
    if a.is_zero():
        raise DivisionByZero("zero has no multiplicative order")
    one = ff_one(spec)
    order = spec.q - 1
    for prime, exponent in factorint(spec.q - 1).items():
        for _ in range(exponent):
            if ff_pow(spec, a, order // prime) == one:
                order //= prime
            else:
                break
    return order


@lru_cache(maxsize=None)
def ff_primitive(spec: FieldSpec) -> FieldElem:
    """First element in label order whose multiplicative order is q - 1."""
    for label in range(1, spec.q):
        candidate = ff_elem(spec, label)
        if ff_order(spec, candidate) == spec.q - 1:
            return candidate
    raise NoIrreducibleFound(f"{spec} has no primitive element; modulus is not irreducible")


def ff_squares(spec: FieldSpec) -> List[FieldElem]:
    """Nonzero squares in label order."""
    seen = {}
    for a in ff_elements(spec)[1:]:
        square = ff_mul(spec, a, a)
        seen[square.label] = square
    return [seen[label] for label in sorted(seen)]
