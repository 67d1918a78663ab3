"""
Permutation Group Engine for spheregate

Finite groups are carried as fully materialized sets of permutations.
A permutation is a tuple of point images (``g[i]`` is the image of ``i``);
products are read left to right, so ``perm_mul(a, b)`` applies ``a`` first.

Every structural query (classes, centralizers, normalizers, cores, Sylow
subgroups, quotients) works directly on the element set; results are
memoized on the handle, which is immutable once built.
"""

import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from sympy import factorint, isprime, primefactors
from sympy.combinatorics import Permutation

from .config import DEFAULT_DEGREE_CAP, DEFAULT_ORDER_CAP
from .errors import CapExceeded, DegreeCapExceeded, DegreeMismatch, NotASubgroup, NotASubset, NotNormal

logger = logging.getLogger(__name__)

Perm = Tuple[int, ...]


# --- permutation arithmetic -------------------------------------------------

def perm_identity(degree: int) -> Perm:
    return tuple(range(degree))


def perm_mul(a: Perm, b: Perm) -> Perm:
    """Apply ``a`` then ``b``."""
    return tuple(map(b.__getitem__, a))


def perm_inv(a: Perm) -> Perm:
    result = [0] * len(a)
    for i, image in enumerate(a):
        result[image] = i
    return tuple(result)


def perm_pow(a: Perm, k: int) -> Perm:
    if k < 0:
        a, k = perm_inv(a), -k
    result = perm_identity(len(a))
    base = a
    while k:
        if k & 1:
            result = perm_mul(result, base)
        base = perm_mul(base, base)
        k >>= 1
    return result


def perm_conj(x: Perm, g: Perm, g_inv: Optional[Perm] = None) -> Perm:
    """``g^-1 x g``."""
    if g_inv is None:
        g_inv = perm_inv(g)
    return tuple(map(g.__getitem__, map(x.__getitem__, g_inv)))


def perm_commutator(a: Perm, b: Perm) -> Perm:
    """``a^-1 b^-1 a b``."""
    return perm_mul(perm_mul(perm_inv(a), perm_inv(b)), perm_mul(a, b))


def perm_cycle_lengths(a: Perm) -> List[int]:
    seen = bytearray(len(a))
    lengths = []
    for start in range(len(a)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = 1
            i = a[i]
            length += 1
        lengths.append(length)
    return lengths


def perm_order(a: Perm) -> int:
    return math.lcm(*perm_cycle_lengths(a)) if a else 1


def perm_is_even(a: Perm) -> bool:
    return sum(length - 1 for length in perm_cycle_lengths(a)) % 2 == 0


def perm_from_cycles(cycles: Sequence[Sequence[int]], degree: int) -> Perm:
    if not cycles:
        return perm_identity(degree)
    return tuple(Permutation([list(c) for c in cycles], size=degree).array_form)


def perm_to_cycles(a: Perm) -> List[List[int]]:
    return [list(c) for c in Permutation(list(a)).cyclic_form]


def format_perm(a: Perm) -> str:
    cycles = perm_to_cycles(a)
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(i) for i in c) + ")" for c in cycles)


# --- handles ----------------------------------------------------------------

class GroupHandle:
    """A finite permutation group with its full, canonically sorted element set."""

    def __init__(self, degree: int, generators: Sequence[Perm], elements: Iterable[Perm],
                 name: Optional[str] = None):
        self.degree = degree
        self.generators: Tuple[Perm, ...] = tuple(generators)
        self.elements: Tuple[Perm, ...] = tuple(sorted(elements))
        self.order = len(self.elements)
        self.members: FrozenSet[Perm] = frozenset(self.elements)
        self.name = name
        self._cache: Dict[tuple, object] = {}

    @property
    def identity(self) -> Perm:
        return perm_identity(self.degree)

    def __contains__(self, g: Perm) -> bool:
        return g in self.members

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        label = self.name or "group"
        return f"<{type(self).__name__} {label} order={self.order} degree={self.degree}>"


class SubgroupHandle(GroupHandle):
    """A subgroup of ``parent``; itself a full group handle."""

    def __init__(self, parent: GroupHandle, generators: Sequence[Perm], elements: Iterable[Perm],
                 name: Optional[str] = None):
        super().__init__(parent.degree, generators, elements, name=name)
        self.parent = parent
        if parent.order % self.order != 0:
            raise NotASubgroup(f"order {self.order} does not divide parent order {parent.order}")
        if not self.members <= parent.members:
            raise NotASubgroup("subgroup elements are not contained in the parent")


@dataclass(frozen=True)
class ConjClass:
    representative: Perm
    members: FrozenSet[Perm]
    element_order: int

    @property
    def size(self) -> int:
        return len(self.members)


def _memoized(method):
    """Cache ``method(G, *args)`` on ``G._cache``.

    Survey workers share handles without a lock: two threads may both
    compute a value, and the first one stored is what every caller gets.
    """
    name = method.__name__

    @functools.wraps(method)
    def wrapper(G: GroupHandle, *args):
        key = (name,) + args
        try:
            return G._cache[key]
        except KeyError:
            pass
        return G._cache.setdefault(key, method(G, *args))

    return wrapper


# --- generation -------------------------------------------------------------

def dimino_extend(elements: List[Perm], members: Set[Perm], gens: List[Perm], g: Perm, order_cap: int) -> bool:
    """Dimino step: grow the group in ``elements`` to the one generated with ``g``.

    ``members`` is always a union of right cosets of the old group, so a
    product already present implies its whole coset is present.
    """
    if g in members:
        return False
    base = list(elements)
    gens.append(g)
    reps = [g]
    coset = [perm_mul(h, g) for h in base]
    elements.extend(coset)
    members.update(coset)
    i = 0
    while i < len(reps):
        r = reps[i]
        i += 1
        for s in gens:
            y = perm_mul(r, s)
            if y in members:
                continue
            coset = [perm_mul(h, y) for h in base]
            elements.extend(coset)
            members.update(coset)
            if len(elements) > order_cap:
                raise CapExceeded(f"group order exceeds cap {order_cap}")
            reps.append(y)
    return True


def _generate(degree: int, generators: Iterable[Perm], order_cap: int) -> Tuple[List[Perm], List[Perm]]:
    identity = perm_identity(degree)
    elements = [identity]
    members = {identity}
    used: List[Perm] = []
    for g in generators:
        dimino_extend(elements, members, used, g, order_cap)
    return elements, used


def closure(generators: Sequence[Perm], order_cap: int = DEFAULT_ORDER_CAP,
            degree: Optional[int] = None, name: Optional[str] = None) -> GroupHandle:
    """Materialize the group generated by ``generators``.

    Args:
        generators: permutations of one common degree (may be empty)
        order_cap: raise CapExceeded beyond this many elements
        degree: degree to use when ``generators`` is empty

    Returns:
        GroupHandle: the generated group with its sorted element set
    """
    generators = [tuple(g) for g in generators]
    degrees = {len(g) for g in generators}
    if len(degrees) > 1:
        raise DegreeMismatch(f"generators have different degrees: {sorted(degrees)}")
    if degrees:
        degree = degrees.pop()
    elif degree is None:
        degree = 1
    elements, used = _generate(degree, generators, order_cap)
    logger.debug(f"closure: order {len(elements)} on {degree} points ({len(used)} generators used)")
    return GroupHandle(degree, used, elements, name=name)


def subgroup(G: GroupHandle, generators: Iterable[Perm], name: Optional[str] = None) -> SubgroupHandle:
    """Subgroup of ``G`` generated by the given elements of ``G``."""
    generators = list(generators)
    for g in generators:
        if g not in G.members:
            raise NotASubset(f"{format_perm(g)} is not an element of {G!r}")
    elements, used = _generate(G.degree, generators, G.order)
    return SubgroupHandle(G, used, elements, name=name)


def subgroup_from_elements(G: GroupHandle, elements: Iterable[Perm], name: Optional[str] = None) -> SubgroupHandle:
    """Wrap a known subgroup element set, choosing a short generating set greedily."""
    wanted = sorted(set(elements))
    found = [G.identity]
    members = {G.identity}
    used: List[Perm] = []
    for g in wanted:
        dimino_extend(found, members, used, g, G.order)
    if len(found) != len(wanted):
        raise NotASubgroup(f"element set of size {len(wanted)} is not closed (generates {len(found)})")
    return SubgroupHandle(G, used, found, name=name)


def trivial_subgroup(G: GroupHandle) -> SubgroupHandle:
    return SubgroupHandle(G, [], [G.identity])


def whole(G: GroupHandle) -> SubgroupHandle:
    """``G`` viewed as a subgroup of itself."""
    return SubgroupHandle(G, G.generators, G.elements, name=G.name)


def join(G: GroupHandle, *parts: GroupHandle) -> SubgroupHandle:
    gens = [g for part in parts for g in part.generators]
    return subgroup(G, gens)


def intersection(G: GroupHandle, A: GroupHandle, B: GroupHandle) -> SubgroupHandle:
    return subgroup_from_elements(G, A.members & B.members)


def _generators_of(S: Union[GroupHandle, Iterable[Perm]]) -> List[Perm]:
    if isinstance(S, GroupHandle):
        return list(S.generators)
    return list(S)


def _require_subset(G: GroupHandle, S: Union[GroupHandle, Iterable[Perm]]) -> None:
    items = S.elements if isinstance(S, GroupHandle) else S
    for g in items:
        if g not in G.members:
            raise NotASubset(f"{format_perm(g)} is not an element of {G!r}")


# --- element data -----------------------------------------------------------

def element_order(g: Perm) -> int:
    return perm_order(g)


def is_abelian(G: GroupHandle) -> bool:
    return all(perm_mul(a, b) == perm_mul(b, a) for a, b in itertools.combinations(G.generators, 2))


def is_cyclic(G: GroupHandle) -> bool:
    return any(cls.element_order == G.order for cls in conj_classes(G))


def is_elementary_abelian(G: GroupHandle) -> bool:
    if G.order == 1:
        return True
    primes = primefactors(G.order)
    if len(primes) != 1 or not is_abelian(G):
        return False
    return all(cls.element_order in (1, primes[0]) for cls in conj_classes(G))


def is_p_group(G: GroupHandle) -> bool:
    return G.order == 1 or len(primefactors(G.order)) == 1


# --- conjugacy --------------------------------------------------------------

@_memoized
def conj_classes(G: GroupHandle) -> List[ConjClass]:
    """Conjugacy classes, each represented by its least element, in representative order."""
    class_of: Dict[Perm, int] = {}
    classes: List[ConjClass] = []
    conjugators = [(g, perm_inv(g)) for g in G.generators]
    for x in G.elements:
        if x in class_of:
            continue
        orbit = [x]
        seen = {x}
        for y in orbit:
            for g, g_inv in conjugators:
                z = perm_conj(y, g, g_inv)
                if z not in seen:
                    seen.add(z)
                    orbit.append(z)
        index = len(classes)
        for y in orbit:
            class_of[y] = index
        classes.append(ConjClass(representative=x, members=frozenset(seen), element_order=perm_order(x)))
    G._cache[("class_index",)] = class_of
    logger.debug(f"{G!r}: {len(classes)} conjugacy classes")
    return classes


def class_index(G: GroupHandle) -> Dict[Perm, int]:
    """Map element -> index of its class in ``conj_classes(G)``."""
    conj_classes(G)
    return G._cache[("class_index",)]


def class_of(G: GroupHandle, g: Perm) -> ConjClass:
    return conj_classes(G)[class_index(G)[g]]


def element_order_counts(G: GroupHandle) -> Dict[int, int]:
    counts: Dict[int, int] = {}
    for cls in conj_classes(G):
        counts[cls.element_order] = counts.get(cls.element_order, 0) + cls.size
    return dict(sorted(counts.items()))


def fingerprint(G: GroupHandle) -> Tuple[int, int, Tuple[Tuple[int, int], ...]]:
    """(order, class count, element-order multiset)."""
    return (G.order, len(conj_classes(G)), tuple(element_order_counts(G).items()))


def centralizer(G: GroupHandle, S: Union[GroupHandle, Iterable[Perm]]) -> SubgroupHandle:
    """Elements of ``G`` commuting with every element of ``S``."""
    if not isinstance(S, GroupHandle):
        S = list(S)
    _require_subset(G, S)
    gens = _generators_of(S)
    elements = [g for g in G.elements if all(perm_mul(g, s) == perm_mul(s, g) for s in gens)]
    return subgroup_from_elements(G, elements)


def normalizer_elements(G: GroupHandle, H: GroupHandle) -> List[Perm]:
    gens = list(H.generators)
    members = H.members
    result = []
    for g in G.elements:
        g_inv = perm_inv(g)
        if all(perm_conj(h, g, g_inv) in members for h in gens):
            result.append(g)
    return result


def normalizer(G: GroupHandle, H: GroupHandle) -> SubgroupHandle:
    _require_subset(G, H)
    return subgroup_from_elements(G, normalizer_elements(G, H))


@_memoized
def center(G: GroupHandle) -> SubgroupHandle:
    return centralizer(G, G.generators)


def is_normal(G: GroupHandle, H: GroupHandle) -> bool:
    _require_subset(G, H)
    members = H.members
    return all(perm_conj(h, g) in members for g in G.generators for h in H.generators)


def normal_closure(G: GroupHandle, S: Union[GroupHandle, Iterable[Perm]]) -> SubgroupHandle:
    """Smallest normal subgroup of ``G`` containing ``S``."""
    seeds = list(S.generators) if isinstance(S, GroupHandle) else list(S)
    _require_subset(G, seeds)
    index = class_index(G)
    classes = conj_classes(G)
    elements = [G.identity]
    members = {G.identity}
    used: List[Perm] = []
    for s in seeds:
        for y in sorted(classes[index[s]].members):
            if y not in members:
                dimino_extend(elements, members, used, y, G.order)
    return SubgroupHandle(G, used, elements)


def core(G: GroupHandle, H: GroupHandle) -> SubgroupHandle:
    """Largest normal subgroup of ``G`` inside ``H``: the union of classes contained in ``H``."""
    _require_subset(G, H)
    members = H.members
    elements = [y for cls in conj_classes(G) if cls.members <= members for y in cls.members]
    return subgroup_from_elements(G, elements)


# --- series and simplicity --------------------------------------------------

@_memoized
def derived_subgroup(G: GroupHandle) -> SubgroupHandle:
    commutators = [perm_commutator(a, b) for a, b in itertools.combinations(G.generators, 2)]
    commutators = [c for c in commutators if c != G.identity]
    if not commutators:
        return trivial_subgroup(G)
    return normal_closure(G, commutators)


def derived_series(G: GroupHandle) -> List[GroupHandle]:
    series = [G]
    while series[-1].order > 1:
        D = derived_subgroup(series[-1])
        if D.order == series[-1].order:
            break
        series.append(D)
    return series


def is_perfect(G: GroupHandle) -> bool:
    return derived_subgroup(G).order == G.order


@_memoized
def is_solvable(G: GroupHandle) -> bool:
    return derived_series(G)[-1].order == 1


def perfect_core(G: GroupHandle) -> GroupHandle:
    """Last term of the derived series (the solvable residual)."""
    return derived_series(G)[-1]


@_memoized
def is_simple(G: GroupHandle) -> bool:
    """Nontrivial, and every class generates all of ``G`` as a normal subgroup."""
    if G.order == 1:
        return False
    if isprime(G.order):
        return True
    for cls in conj_classes(G)[1:]:
        if normal_closure(G, [cls.representative]).order < G.order:
            return False
    return True


def is_nonabelian_simple(G: GroupHandle) -> bool:
    return G.order > 1 and not isprime(G.order) and is_simple(G)


@_memoized
def normal_subgroups(G: GroupHandle) -> List[SubgroupHandle]:
    """All normal subgroups: class closures and their joins, iterated until stable."""
    found: Dict[FrozenSet[Perm], SubgroupHandle] = {}
    for N in [trivial_subgroup(G), whole(G)]:
        found[N.members] = N
    for cls in conj_classes(G)[1:]:
        N = normal_closure(G, [cls.representative])
        found.setdefault(N.members, N)
    changed = True
    while changed:
        changed = False
        current = sorted(found.values(), key=lambda N: (N.order, N.elements))
        for A, B in itertools.combinations(current, 2):
            if A.members <= B.members or B.members <= A.members:
                continue
            J = join(G, A, B)
            if J.members not in found:
                found[J.members] = J
                changed = True
    result = sorted(found.values(), key=lambda N: (N.order, N.elements))
    logger.debug(f"{G!r}: {len(result)} normal subgroups")
    return result


def maximal_normal_subgroups(G: GroupHandle) -> List[SubgroupHandle]:
    proper = [N for N in normal_subgroups(G) if N.order < G.order]
    return [N for N in proper
            if not any(N.members < M.members for M in proper)]


@_memoized
def index_two_subgroups(G: GroupHandle) -> List[SubgroupHandle]:
    """Subgroups of index two, as kernels of the maps G -> G/<squares> -> Z_2."""
    squares = squares_subgroup(G)
    quotient_order = G.order // squares.order
    if quotient_order == 1:
        return []
    d = int(math.log2(quotient_order))
    basis: List[Perm] = []
    span = list(squares.elements)
    span_members = set(span)
    span_gens = list(squares.generators)
    for g in G.elements:
        if len(basis) == d:
            break
        if g not in span_members:
            basis.append(g)
            dimino_extend(span, span_members, span_gens, g, G.order)
    result = []
    for functional in range(1, 2**d):
        bits = [(functional >> i) & 1 for i in range(d)]
        pivot = bits.index(1)
        gens = list(squares.generators)
        for i, bit in enumerate(bits):
            if bit == 0:
                gens.append(basis[i])
            elif i != pivot:
                gens.append(perm_mul(basis[i], basis[pivot]))
        result.append(subgroup(G, gens))
    return sorted(result, key=lambda H: H.elements)


def squares_subgroup(G: GroupHandle, U: Optional[GroupHandle] = None) -> SubgroupHandle:
    """Subgroup of ``G`` generated by the squares of ``U`` (default ``G``)."""
    U = G if U is None else U
    elements = [G.identity]
    members = {G.identity}
    used: List[Perm] = []
    for g in U.elements:
        square = perm_mul(g, g)
        if square not in members:
            dimino_extend(elements, members, used, square, U.order)
    return SubgroupHandle(G, used, elements)


# --- Sylow subgroups --------------------------------------------------------

def p_part(n: int, p: int) -> int:
    return p ** factorint(n).get(p, 0)


@_memoized
def sylow(G: GroupHandle, p: int) -> SubgroupHandle:
    """Sylow p-subgroup by normalizer ascent from the least p-element of largest order."""
    target = p_part(G.order, p)
    if target == 1:
        return trivial_subgroup(G)
    p_classes = [cls for cls in conj_classes(G)
                 if cls.element_order > 1 and p_part(cls.element_order, p) == cls.element_order]
    top = max(cls.element_order for cls in p_classes)
    start = min(min(cls.members) for cls in p_classes if cls.element_order == top)
    P = subgroup(G, [start])
    while P.order < target:
        step = None
        for y in normalizer_elements(G, P):
            if y not in P.members and perm_pow(y, p) in P.members:
                step = y
                break
        if step is None:
            raise NotASubgroup(f"normalizer ascent stalled at order {P.order} for p={p}")
        P = subgroup(G, list(P.generators) + [step])
    logger.debug(f"{G!r}: Sylow {p}-subgroup of order {P.order}")
    return P


# --- conjugacy of subgroups -------------------------------------------------

def _conjugate_set(members: FrozenSet[Perm], g: Perm, g_inv: Perm) -> FrozenSet[Perm]:
    return frozenset(perm_conj(h, g, g_inv) for h in members)


def subgroup_conjugacy_partition(G: GroupHandle, subgroups: Sequence[GroupHandle]) -> List[List[int]]:
    """Partition subgroup indices into ``G``-conjugacy classes, in order of first appearance."""
    for H in subgroups:
        if not H.members <= G.members:
            raise NotASubgroup(f"{H!r} is not contained in {G!r}")
    conjugators = [(g, perm_inv(g)) for g in G.generators]
    assigned: Dict[int, int] = {}
    partition: List[List[int]] = []
    for i, H in enumerate(subgroups):
        if i in assigned:
            continue
        orbit = [H.members]
        seen = {H.members}
        for X in orbit:
            for g, g_inv in conjugators:
                Y = _conjugate_set(X, g, g_inv)
                if Y not in seen:
                    seen.add(Y)
                    orbit.append(Y)
        block = [j for j, K in enumerate(subgroups) if j not in assigned and K.members in seen]
        for j in block:
            assigned[j] = len(partition)
        partition.append(block)
    return partition


# --- quotients --------------------------------------------------------------

def _core_free_overgroup(G: GroupHandle, N: GroupHandle,
                         candidates: Sequence[GroupHandle] = (), max_trials: int = 64) -> SubgroupHandle:
    """Largest subgroup found greedily with core exactly ``N``."""

    def acceptable(K: GroupHandle) -> bool:
        return K.order < G.order and N.members <= K.members and core(G, K).order == N.order

    for candidate in candidates:
        if candidate.order > N.order and acceptable(candidate):
            return subgroup_from_elements(G, candidate.elements)
    K: GroupHandle = N
    for p in primefactors(G.order // K.order):
        trial = subgroup(G, list(K.generators) + list(sylow(G, p).generators))
        if acceptable(trial):
            K = trial
    trials = 0
    for cls in conj_classes(G)[1:]:
        if trials >= max_trials:
            break
        if cls.representative in K.members:
            continue
        trials += 1
        trial = subgroup(G, list(K.generators) + [cls.representative])
        if acceptable(trial):
            K = trial
    if not isinstance(K, SubgroupHandle) or K.parent is not G:
        K = subgroup_from_elements(G, K.elements)
    return K


def coset_action(G: GroupHandle, K: GroupHandle) -> Tuple[List[Perm], Dict[Perm, int]]:
    """Images of the generators of ``G`` acting on the right cosets of ``K``."""
    coset_of: Dict[Perm, int] = {}
    reps: List[Perm] = []
    for g in G.elements:
        if g in coset_of:
            continue
        index = len(reps)
        reps.append(g)
        for k in K.elements:
            coset_of[perm_mul(k, g)] = index
    images = [tuple(coset_of[perm_mul(r, s)] for r in reps) for s in G.generators]
    return images, coset_of


def quotient(G: GroupHandle, N: GroupHandle, candidates: Sequence[GroupHandle] = (),
             degree_cap: int = DEFAULT_DEGREE_CAP) -> GroupHandle:
    """Faithful permutation representation of ``G/N`` on the cosets of a core-free overgroup.

    Args:
        G: the group
        N: a normal subgroup of ``G``
        candidates: optional overgroups of ``N`` to try first for a small degree
        degree_cap: raise DegreeCapExceeded when the coset action is larger

    Returns:
        GroupHandle: a group of order |G|/|N|
    """
    if not is_normal(G, N):
        raise NotNormal(f"{N!r} is not normal in {G!r}")
    if N.order == G.order:
        return closure([], degree=1, name=f"{G.name or 'G'}/N")
    if N.order == 1:
        return GroupHandle(G.degree, G.generators, G.elements, name=G.name)
    K = _core_free_overgroup(G, N, candidates)
    degree = G.order // K.order
    if degree > degree_cap:
        raise DegreeCapExceeded(f"quotient action needs {degree} points, cap is {degree_cap}")
    images, _ = coset_action(G, K)
    Q = closure(images, order_cap=G.order, degree=degree, name=f"{G.name or 'G'}/N")
    if Q.order * N.order != G.order:
        raise NotNormal(f"coset action has order {Q.order}, expected {G.order // N.order}")
    logger.debug(f"quotient of order {Q.order} on {degree} points")
    return Q
