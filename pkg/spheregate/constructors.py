"""
Group Constructors for spheregate

Parses the group-spec mini-language and builds faithful permutation
representations of every family it names:

    PSL2(q) | SL2(q) | PGL2(q) | PSL3(q) | Alt(n) | Sym(n) | EA(p,k)
    Meta(p,q,t) | Sz(8) | SignedEven(n) | CentProd(spec,spec)
    DirProd(spec,spec) | Perms[(0,1,2)(3,4);(0,1)]

Matrix groups act on projective points (or nonzero vectors for SL2) of
their natural module; points are numbered through field-element labels.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Matrix, factorint, isprime

from .config import DEFAULT_DEGREE_CAP, DEFAULT_ORDER_CAP
from .errors import (CapExceeded, DegreeCapExceeded, ModelMismatch, ParameterError, SpecSyntaxError,
                     UnsupportedFamily)
from .gf import FieldElem, FieldSpec, ff_add, ff_elem, ff_inv, ff_make, ff_mul, ff_neg, ff_one, ff_pow, ff_primitive, ff_zero
from .permgroup import (GroupHandle, Perm, center, closure, perm_from_cycles, perm_is_even,
                        perm_mul, quotient, subgroup)

logger = logging.getLogger(__name__)

NUMERIC_FAMILIES = {
    "PSL2": 1, "SL2": 1, "PGL2": 1, "PSL3": 1,
    "Alt": 1, "Sym": 1, "EA": 2, "Meta": 3, "Sz": 1, "SignedEven": 1,
}
PRODUCT_FAMILIES = ("CentProd", "DirProd")
ALL_FAMILIES = tuple(NUMERIC_FAMILIES) + PRODUCT_FAMILIES + ("Perms",)


@dataclass(frozen=True)
class GroupSpec:
    family: str
    params: Tuple[int, ...] = ()
    children: Tuple["GroupSpec", ...] = ()
    perms: Tuple[Tuple[Tuple[int, ...], ...], ...] = ()

    def __str__(self) -> str:
        if self.family in PRODUCT_FAMILIES:
            return f"{self.family}({self.children[0]},{self.children[1]})"
        if self.family == "Perms":
            rendered = []
            for cycles in self.perms:
                rendered.append("".join("(" + ",".join(map(str, c)) + ")" for c in cycles) or "()")
            return "Perms[" + ";".join(rendered) + "]"
        return f"{self.family}(" + ",".join(map(str, self.params)) + ")"


# --- parsing ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, position: Optional[int] = None) -> SpecSyntaxError:
        position = self.pos if position is None else position
        return SpecSyntaxError(f"{message} at position {position} in {self.text!r}", position)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        if self.peek() != char:
            found = self.peek() or "end of input"
            raise self.error(f"expected {char!r}, found {found!r}")
        self.pos += 1

    def read_int(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected an integer")
        return int(self.text[start:self.pos])

    def read_tag(self) -> str:
        start = self.pos
        while self.peek().isalnum():
            self.pos += 1
        tag = self.text[start:self.pos]
        if tag not in ALL_FAMILIES:
            raise self.error(f"unknown group family {tag!r}", start)
        return tag

    def parse_spec(self) -> GroupSpec:
        start = self.pos
        tag = self.read_tag()
        if tag == "Perms":
            return self.parse_perms()
        self.expect("(")
        if tag in PRODUCT_FAMILIES:
            left = self.parse_spec()
            self.expect(",")
            right = self.parse_spec()
            self.expect(")")
            return GroupSpec(tag, children=(left, right))
        params = [self.read_int()]
        while self.peek() == ",":
            self.pos += 1
            params.append(self.read_int())
        self.expect(")")
        if len(params) != NUMERIC_FAMILIES[tag]:
            raise self.error(f"{tag} takes {NUMERIC_FAMILIES[tag]} parameter(s), got {len(params)}", start)
        spec = GroupSpec(tag, params=tuple(params))
        _validate(spec)
        return spec

    def parse_perms(self) -> GroupSpec:
        self.expect("[")
        perms = [self.parse_cycles()]
        while self.peek() == ";":
            self.pos += 1
            perms.append(self.parse_cycles())
        self.expect("]")
        spec = GroupSpec("Perms", perms=tuple(perms))
        _validate(spec)
        return spec

    def parse_cycles(self) -> Tuple[Tuple[int, ...], ...]:
        cycles = []
        if self.peek() != "(":
            raise self.error("expected a cycle")
        while self.peek() == "(":
            self.pos += 1
            if self.peek() == ")":
                self.pos += 1
                continue
            cycle = [self.read_int()]
            while self.peek() == ",":
                self.pos += 1
                cycle.append(self.read_int())
            self.expect(")")
            if len(cycle) > 1:
                cycles.append(tuple(cycle))
        return tuple(cycles)


def _is_prime_power(q: int) -> bool:
    return q >= 2 and len(factorint(q)) == 1


def _validate(spec: GroupSpec) -> None:
    family, params = spec.family, spec.params
    if family in ("PSL2", "SL2", "PGL2", "PSL3"):
        if not _is_prime_power(params[0]):
            raise ParameterError(f"{spec}: {params[0]} is not a prime power")
    elif family in ("Alt", "Sym", "SignedEven"):
        if params[0] < 2:
            raise ParameterError(f"{spec}: n must be at least 2")
    elif family == "EA":
        p, k = params
        if not isprime(p):
            raise ParameterError(f"{spec}: {p} is not prime")
        if k < 1:
            raise ParameterError(f"{spec}: rank must be at least 1")
    elif family == "Meta":
        p, q, t = params
        if not isprime(p):
            raise ParameterError(f"{spec}: {p} is not prime")
        if q < 2:
            raise ParameterError(f"{spec}: q must be at least 2")
        if not 0 < t < p or pow(t, q, p) != 1:
            raise ParameterError(f"{spec}: multiplier {t} does not satisfy t^{q} = 1 mod {p}")
    elif family == "Sz":
        if params[0] != 8:
            raise ParameterError(f"{spec}: only Sz(8) is supported")
    elif family == "Perms":
        for cycles in spec.perms:
            points = [x for c in cycles for x in c]
            if len(points) != len(set(points)):
                raise ParameterError(f"{spec}: cycles of one permutation must be disjoint")


def parse_groupspec(text: str) -> GroupSpec:
    """Parse a group-spec string.

    Raises:
        SpecSyntaxError: malformed text (carries the offending position)
        ParameterError: well-formed text with invalid parameters
    """
    parser = _Parser(text.strip())
    spec = parser.parse_spec()
    if parser.pos != len(parser.text):
        raise parser.error("unexpected trailing input")
    return spec


# --- linear algebra over GF(q) ----------------------------------------------

FieldMatrix = Tuple[Tuple[FieldElem, ...], ...]


def _matrix(F: FieldSpec, rows: Sequence[Sequence[Union[int, FieldElem]]]) -> FieldMatrix:
    return tuple(tuple(x if isinstance(x, FieldElem) else ff_elem(F, x) for x in row) for row in rows)


def _apply(F: FieldSpec, M: FieldMatrix, v: Sequence[FieldElem]) -> Tuple[FieldElem, ...]:
    result = []
    for row in M:
        total = ff_zero(F)
        for a, x in zip(row, v):
            if not a.is_zero() and not x.is_zero():
                total = ff_add(F, total, ff_mul(F, a, x))
        result.append(total)
    return tuple(result)


def _normalize(F: FieldSpec, v: Sequence[FieldElem]) -> Tuple[int, ...]:
    """Projective point as labels, scaled so the first nonzero coordinate is 1."""
    for x in v:
        if not x.is_zero():
            scale = ff_inv(F, x)
            return tuple(ff_mul(F, scale, y).label for y in v)
    raise ParameterError("the zero vector is not a projective point")


def _action(points: List[Tuple[int, ...]], image: Callable[[Tuple[int, ...]], Tuple[int, ...]]) -> Perm:
    index = {pt: i for i, pt in enumerate(points)}
    try:
        return tuple(index[image(pt)] for pt in points)
    except KeyError as exc:
        raise ModelMismatch(f"generator does not preserve the point set: {exc}") from exc


def _projective_points(F: FieldSpec, dim: int) -> List[Tuple[int, ...]]:
    points = []
    for lead in range(dim):
        for tail in range(F.q ** (dim - lead - 1)):
            labels = []
            for _ in range(dim - lead - 1):
                tail, digit = divmod(tail, F.q)
                labels.append(digit)
            points.append(tuple([0] * lead + [1] + list(reversed(labels))))
    return points


def _projective_perm(F: FieldSpec, M: FieldMatrix, points: List[Tuple[int, ...]]) -> Perm:
    def image(pt):
        return _normalize(F, _apply(F, M, [ff_elem(F, x) for x in pt]))

    return _action(points, image)


def _sl2_generators(F: FieldSpec, with_pgl: bool = False) -> List[FieldMatrix]:
    w = ff_primitive(F)
    minus_one = ff_neg(F, ff_one(F))
    gens = [
        _matrix(F, [[1, 1], [0, 1]]),
        _matrix(F, [[w, 0], [0, ff_inv(F, w)]]),
        _matrix(F, [[0, 1], [minus_one, 0]]),
    ]
    if with_pgl:
        gens.append(_matrix(F, [[w, 0], [0, 1]]))
    return gens


def _field_of(q: int) -> FieldSpec:
    (p, n), = factorint(q).items()
    return ff_make(p, n)


# --- families ---------------------------------------------------------------

def _build_projective_line(q: int, with_pgl: bool) -> Tuple[int, List[Perm]]:
    F = _field_of(q)
    points = _projective_points(F, 2)
    return len(points), [_projective_perm(F, M, points) for M in _sl2_generators(F, with_pgl)]


def _build_sl2(q: int) -> Tuple[int, List[Perm]]:
    F = _field_of(q)
    vectors = [(x, y) for x in range(q) for y in range(q) if (x, y) != (0, 0)]

    def linear(M):
        return lambda v: tuple(a.label for a in _apply(F, M, [ff_elem(F, x) for x in v]))

    return len(vectors), [_action(vectors, linear(M)) for M in _sl2_generators(F)]


def _build_psl3(q: int) -> Tuple[int, List[Perm]]:
    F = _field_of(q)
    w = ff_primitive(F)
    w_inv = ff_inv(F, w)
    gens = []
    for i in range(3):
        for j in range(3):
            if i != j:
                rows = [[1 if r == c else 0 for c in range(3)] for r in range(3)]
                rows[i][j] = 1
                gens.append(_matrix(F, rows))
    gens.append(_matrix(F, [[w, 0, 0], [0, w_inv, 0], [0, 0, 1]]))
    gens.append(_matrix(F, [[1, 0, 0], [0, w, 0], [0, 0, w_inv]]))
    points = _projective_points(F, 3)
    return len(points), [_projective_perm(F, M, points) for M in gens]


def _suzuki_unipotent(F: FieldSpec, a: FieldElem, b: FieldElem, theta: int) -> FieldMatrix:
    zero, one = ff_zero(F), ff_one(F)
    a_theta = ff_pow(F, a, theta)
    c31 = ff_add(F, ff_mul(F, a, a_theta), b)
    c41 = ff_add(F, ff_add(F, ff_mul(F, ff_mul(F, a, a), a_theta), ff_mul(F, a, b)), ff_pow(F, b, theta))
    return (
        (one, zero, zero, zero),
        (a, one, zero, zero),
        (c31, a_theta, one, zero),
        (c41, b, a, one),
    )


def _build_suzuki() -> Tuple[int, List[Perm]]:
    """Sz(8) on the 65 points of the Suzuki-Tits ovoid in PG(3,8)."""
    F = ff_make(2, 3)
    theta = 4
    w = ff_primitive(F)
    zero, one = ff_zero(F), ff_one(F)
    gens = [
        _suzuki_unipotent(F, one, zero, theta),
        _suzuki_unipotent(F, zero, one, theta),
        _matrix(F, [[1, 0, 0, 0], [0, w, 0, 0], [0, 0, ff_pow(F, w, 1 + theta), 0],
                    [0, 0, 0, ff_pow(F, w, 2 + theta)]]),
        _matrix(F, [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]),
    ]
    start = (1, 0, 0, 0)
    points = [start]
    seen = {start}
    for pt in points:
        for M in gens:
            image = _normalize(F, _apply(F, M, [ff_elem(F, x) for x in pt]))
            if image not in seen:
                seen.add(image)
                points.append(image)
    if len(points) != 65:
        raise ModelMismatch(f"ovoid orbit has {len(points)} points, expected 65")
    points.sort()
    return len(points), [_projective_perm(F, M, points) for M in gens]


def _build_alt(n: int) -> Tuple[int, List[Perm]]:
    return n, [perm_from_cycles([(0, 1, i)], n) for i in range(2, n)]


def _build_sym(n: int) -> Tuple[int, List[Perm]]:
    return n, [perm_from_cycles([(0, 1)], n), perm_from_cycles([tuple(range(n))], n)]


def _build_ea(p: int, k: int) -> Tuple[int, List[Perm]]:
    degree = p * k
    return degree, [perm_from_cycles([tuple(range(i * p, (i + 1) * p))], degree) for i in range(k)]


def _build_meta(p: int, q: int, t: int) -> Tuple[int, List[Perm]]:
    """Z_p regular block plus a q-cycle; b scales the Z_p block by t^-1 so that b a b^-1 = a^t."""
    degree = p + q
    a = tuple((i + 1) % p if i < p else i for i in range(degree))
    s = pow(t, -1, p)
    b = tuple((s * i) % p if i < p else p + (i - p + 1) % q for i in range(degree))
    return degree, [a, b]


def _signed_point(coordinate: int, negative: bool) -> int:
    return 2 * coordinate + (1 if negative else 0)


def _signed_perm(n: int, images: Dict[int, Tuple[int, bool]]) -> Perm:
    """Signed permutation of coordinates, given as e_i -> +-e_j, on the 2n points +-e_i."""
    result = list(range(2 * n))
    for i, (j, negative) in images.items():
        result[_signed_point(i, False)] = _signed_point(j, negative)
        result[_signed_point(i, True)] = _signed_point(j, not negative)
    return tuple(result)


def _build_signed_even(n: int) -> Tuple[int, List[Perm]]:
    rotation = _signed_perm(n, {0: (1, False), 1: (0, True)})
    cycle = {i: (i + 1, False) for i in range(n - 1)}
    cycle[n - 1] = (0, n % 2 == 0)
    flips = _signed_perm(n, {0: (0, True), 1: (1, True)})
    return 2 * n, [rotation, _signed_perm(n, cycle), flips]


def _build_perms(spec: GroupSpec) -> Tuple[int, List[Perm]]:
    points = [x for cycles in spec.perms for c in cycles for x in c]
    degree = max(points) + 1 if points else 1
    return degree, [perm_from_cycles(cycles, degree) for cycles in spec.perms]


def formula_order(spec: GroupSpec) -> Optional[int]:
    """Closed-form order where the family has one."""
    f, params = spec.family, spec.params
    if f in ("PSL2", "SL2", "PGL2", "PSL3"):
        q = params[0]
        sl2 = q * (q * q - 1)
        if f == "SL2":
            return sl2
        if f == "PGL2":
            return sl2
        if f == "PSL2":
            return sl2 // (1 if q % 2 == 0 else 2)
        return q**3 * (q**3 - 1) * (q * q - 1) // (3 if (q - 1) % 3 == 0 else 1)
    if f in ("Alt", "Sym"):
        n = params[0]
        total = 1
        for i in range(2, n + 1):
            total *= i
        return total // 2 if f == "Alt" else total
    if f == "EA":
        return params[0] ** params[1]
    if f == "Meta":
        return params[0] * params[1]
    if f == "Sz":
        return 29120
    if f == "SignedEven":
        n = params[0]
        total = 2 ** (n - 1)
        for i in range(2, n + 1):
            total *= i
        return total
    if f in PRODUCT_FAMILIES:
        left, right = (formula_order(c) for c in spec.children)
        if left is None or right is None:
            return None
        return left * right // (2 if f == "CentProd" else 1)
    return None


# --- building ---------------------------------------------------------------

def _shift(g: Perm, offset: int, degree: int) -> Perm:
    result = list(range(degree))
    for i, image in enumerate(g):
        result[offset + i] = offset + image
    return tuple(result)


def _direct_product(A: GroupHandle, B: GroupHandle, order_cap: int, name: str) -> Tuple[GroupHandle, Callable]:
    degree = A.degree + B.degree
    if A.order * B.order > order_cap:
        raise CapExceeded(f"{name}: order {A.order * B.order} exceeds cap {order_cap}")
    gens = [_shift(a, 0, degree) for a in A.generators] + [_shift(b, A.degree, degree) for b in B.generators]

    def pair(a: Perm, b: Perm) -> Perm:
        return tuple(list(a) + [A.degree + x for x in b])

    return closure(gens, order_cap=order_cap, degree=degree, name=name), pair


def _central_involution(G: GroupHandle, label: str) -> Perm:
    involutions = [z for z in center(G).elements if z != G.identity and perm_mul(z, z) == G.identity]
    if len(involutions) != 1:
        raise ParameterError(f"{label} must have a unique central involution, found {len(involutions)}")
    return involutions[0]


def _build_central_product(spec: GroupSpec, order_cap: int, degree_cap: int) -> GroupHandle:
    left, right = spec.children
    A = build(left, order_cap=order_cap, degree_cap=degree_cap)
    B = build(right, order_cap=order_cap, degree_cap=degree_cap)
    D, pair = _direct_product(A, B, order_cap, f"DirProd({left},{right})")
    z = pair(_central_involution(A, str(left)), _central_involution(B, str(right)))
    N = subgroup(D, [z])
    candidates = []
    if str(left) == str(right):
        candidates.append(subgroup(D, [pair(g, g) for g in A.generators]))
    Q = quotient(D, N, candidates=candidates, degree_cap=degree_cap)
    return GroupHandle(Q.degree, Q.generators, Q.elements, name=str(spec))


def _generators_for(spec: GroupSpec) -> Tuple[int, List[Perm]]:
    f, params = spec.family, spec.params
    if f == "PSL2":
        return _build_projective_line(params[0], with_pgl=False)
    if f == "PGL2":
        return _build_projective_line(params[0], with_pgl=True)
    if f == "SL2":
        return _build_sl2(params[0])
    if f == "PSL3":
        return _build_psl3(params[0])
    if f == "Sz":
        return _build_suzuki()
    if f == "Alt":
        return _build_alt(params[0])
    if f == "Sym":
        return _build_sym(params[0])
    if f == "EA":
        return _build_ea(*params)
    if f == "Meta":
        return _build_meta(*params)
    if f == "SignedEven":
        return _build_signed_even(params[0])
    if f == "Perms":
        return _build_perms(spec)
    raise UnsupportedFamily(f"no builder for {f}")


@lru_cache(maxsize=64)
def _build_cached(text: str, order_cap: int, degree_cap: int) -> GroupHandle:
    spec = parse_groupspec(text)
    expected = formula_order(spec)
    if expected is not None and expected > order_cap:
        raise CapExceeded(f"{spec}: order {expected} exceeds cap {order_cap}")
    if spec.family == "CentProd":
        G = _build_central_product(spec, order_cap, degree_cap)
    elif spec.family == "DirProd":
        A = build(spec.children[0], order_cap=order_cap, degree_cap=degree_cap)
        B = build(spec.children[1], order_cap=order_cap, degree_cap=degree_cap)
        G, _ = _direct_product(A, B, order_cap, text)
    else:
        degree, gens = _generators_for(spec)
        if degree > degree_cap:
            raise DegreeCapExceeded(f"{spec}: degree {degree} exceeds cap {degree_cap}")
        G = closure(gens, order_cap=order_cap, degree=degree, name=text)
    if G.degree > degree_cap:
        raise DegreeCapExceeded(f"{spec}: degree {G.degree} exceeds cap {degree_cap}")
    if expected is not None and G.order != expected:
        raise ModelMismatch(f"{spec}: built order {G.order}, expected {expected}")
    logger.info(f"✅ Built {spec}: order {G.order} on {G.degree} points")
    return G


def build(spec: Union[str, GroupSpec], order_cap: int = DEFAULT_ORDER_CAP,
          degree_cap: int = DEFAULT_DEGREE_CAP) -> GroupHandle:
    """Build the faithful permutation representation of a group spec.

    Args:
        spec: a GroupSpec or its text form
        order_cap: maximum group order to materialize
        degree_cap: maximum number of points

    Returns:
        GroupHandle: the group, named by its canonical spec text
    """
    text = str(spec) if isinstance(spec, GroupSpec) else str(parse_groupspec(spec))
    return _build_cached(text, order_cap, degree_cap)


# --- orthogonal models ------------------------------------------------------

@dataclass
class OrthogonalModel:
    """Integer orthogonal representation of a permutation group."""

    spec: str
    dimension: int
    gram: np.ndarray
    group: GroupHandle
    matrix_fn: Callable[[Perm], np.ndarray] = field(repr=False)
    matrices: List[np.ndarray] = field(default_factory=list)

    def matrix_of(self, g: Perm) -> np.ndarray:
        """Matrix of ``g``; products compose as ``matrix_of(a then b) = M_b @ M_a``."""
        return self.matrix_fn(g)

    def is_orthogonal(self, M: np.ndarray) -> bool:
        return bool(np.array_equal(M.T @ self.gram @ M, self.gram))

    @staticmethod
    def determinant(M: np.ndarray) -> int:
        return int(Matrix(M.tolist()).det())


def _deleted_permutation_matrix(g: Perm, negate_odd: bool) -> np.ndarray:
    """Action on the basis e_i - e_{n-1} of the sum-zero hyperplane."""
    n = len(g)
    M = np.zeros((n - 1, n - 1), dtype=np.int64)
    last = g[n - 1]
    for i in range(n - 1):
        if g[i] != n - 1:
            M[g[i], i] += 1
        if last != n - 1:
            M[last, i] -= 1
    if negate_odd and not perm_is_even(g):
        M = -M
    return M


def _signed_permutation_matrix(g: Perm) -> np.ndarray:
    n = len(g) // 2
    M = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        image = g[2 * i]
        M[image // 2, i] = -1 if image % 2 else 1
    return M


def orthogonal_model(spec: Union[str, GroupSpec], order_cap: int = DEFAULT_ORDER_CAP) -> OrthogonalModel:
    """Integer matrices for Alt(n), Sym(n) with n even, and SignedEven(n).

    Sym(n) composes odd permutations with -id so every matrix has determinant +1.
    """
    spec = parse_groupspec(spec) if isinstance(spec, str) else spec
    n = spec.params[0] if spec.params else 0
    if spec.family in ("Alt", "Sym"):
        if n < 3:
            raise UnsupportedFamily(f"{spec}: deleted permutation model needs n >= 3")
        if spec.family == "Sym" and n % 2 == 1:
            raise UnsupportedFamily(f"{spec}: -id preserves orientation only in odd dimension, need n even")
        negate = spec.family == "Sym"
        dimension = n - 1
        gram = np.eye(dimension, dtype=np.int64) + np.ones((dimension, dimension), dtype=np.int64)

        def matrix_fn(g: Perm) -> np.ndarray:
            return _deleted_permutation_matrix(g, negate)
    elif spec.family == "SignedEven":
        dimension = n
        gram = np.eye(dimension, dtype=np.int64)
        matrix_fn = _signed_permutation_matrix
    else:
        raise UnsupportedFamily(f"no orthogonal model for {spec.family}")
    G = build(spec, order_cap=order_cap)
    model = OrthogonalModel(spec=str(spec), dimension=dimension, gram=gram, group=G, matrix_fn=matrix_fn)
    model.matrices = [model.matrix_of(g) for g in G.generators]
    for M in model.matrices:
        if not model.is_orthogonal(M) or model.determinant(M) != 1:
            raise ModelMismatch(f"{spec}: generator matrix is not in SO for the model form")
    logger.debug(f"orthogonal model for {spec}: dimension {dimension}")
    return model

