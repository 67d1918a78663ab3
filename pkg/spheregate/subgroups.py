"""
Subgroup searches used by the obstruction rules.

- elementary abelian p-rank, searched inside a Sylow p-subgroup
- metacyclic witnesses H(p:q) with their multipliers
- sectional 2-rank of the Sylow 2-subgroup
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Set, Tuple

from sympy import n_order

from .config import DEFAULT_TWO_GROUP_CAP, EA_SUBGROUP_CAP
from .errors import CapExceeded, WitnessInvalid
from .permgroup import (GroupHandle, Perm, class_index, conj_classes, is_abelian, perm_inv, perm_mul, perm_order,
                        perm_pow, squares_subgroup, subgroup, subgroup_conjugacy_partition, sylow, dimino_extend,
                        normalizer_elements)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EAWitness:
    p: int
    rank: int
    generators: Tuple[Perm, ...]
    group: GroupHandle = field(compare=False, repr=False)

    def subgroup(self):
        return subgroup(self.group, self.generators)


@dataclass(frozen=True)
class MetacyclicWitness:
    p: int
    q: int
    a: Perm
    b: Perm
    t: int
    b_order: int

    def validate(self) -> None:
        conjugate = perm_mul(perm_mul(self.b, self.a), perm_inv(self.b))
        if conjugate != perm_pow(self.a, self.t):
            raise WitnessInvalid(f"b a b^-1 != a^{self.t} for H({self.p}:{self.q})")


# --- elementary abelian rank ------------------------------------------------

def _ilog(n: int, p: int) -> int:
    """Largest r with p**r <= n."""
    r = 0
    while p ** (r + 1) <= n:
        r += 1
    return r


def _order_p_elements(P: GroupHandle, p: int) -> List[Perm]:
    return [g for cls in conj_classes(P) if cls.element_order == p for g in sorted(cls.members)]


def max_ea_rank(G: GroupHandle, p: int) -> Tuple[int, EAWitness]:
    """Largest rank of an elementary abelian p-subgroup of ``G``.

    Depth-first over increasing sequences of commuting order-p elements in
    one Sylow p-subgroup; the first maximum found is the canonical witness.
    """
    P = sylow(G, p)
    if P.order == 1:
        return 0, EAWitness(p, 0, (), G)
    ceiling = _ilog(P.order, p)
    candidates = _order_p_elements(P, p)
    best: List[Tuple[Perm, ...]] = [()]
    nodes = 0

    def search(chosen: Tuple[Perm, ...], members: Set[Perm], pool: List[Perm]) -> bool:
        nonlocal nodes
        nodes += 1
        rank = len(chosen)
        if rank > len(best[0]):
            best[0] = chosen
            if rank == ceiling:
                return True
        reachable = _ilog(len(pool) + len(members), p)
        if reachable <= len(best[0]):
            return False
        for i, x in enumerate(pool):
            span = set(members)
            elements = list(members)
            dimino_extend(elements, span, list(chosen), x, P.order)
            rest = [y for y in pool[i + 1:] if y not in span and perm_mul(x, y) == perm_mul(y, x)]
            if search(chosen + (x,), span, rest):
                return True
        return False

    search((), {P.identity}, candidates)
    logger.debug(f"{G!r}: {p}-rank {len(best[0])} after {nodes} search nodes")
    return len(best[0]), EAWitness(p, len(best[0]), best[0], G)


def maximal_ea_subgroups(G: GroupHandle, p: int, limit: int = EA_SUBGROUP_CAP) -> List[EAWitness]:
    """Maximal elementary abelian p-subgroups of a Sylow p-subgroup, one per ``G``-conjugacy class.

    Layer by layer over the elementary abelian subgroups of the Sylow
    subgroup; one with no commuting order-p element outside it is maximal.
    The ``max_ea_rank`` witness represents its own class and comes first;
    the rest follow by decreasing rank.

    Raises:
        CapExceeded: more than ``limit`` elementary abelian subgroups visited
    """
    P = sylow(G, p)
    if P.order == 1:
        return []
    candidates = _order_p_elements(P, p)
    layer: Dict[FrozenSet[Perm], Tuple[Perm, ...]] = {frozenset([P.identity]): ()}
    visited = 1
    maximal: List[Tuple[Perm, ...]] = []
    while layer:
        next_layer: Dict[FrozenSet[Perm], Tuple[Perm, ...]] = {}
        for members, chosen in layer.items():
            extended = False
            for x in candidates:
                if x in members or any(perm_mul(x, g) != perm_mul(g, x) for g in chosen):
                    continue
                extended = True
                elements = list(members)
                span = set(members)
                dimino_extend(elements, span, list(chosen), x, P.order)
                key = frozenset(span)
                if key in next_layer:
                    continue
                visited += 1
                if visited > limit:
                    raise CapExceeded(f"more than {limit} elementary abelian {p}-subgroups in {G!r}")
                next_layer[key] = chosen + (x,)
            if not extended:
                maximal.append(chosen)
        layer = next_layer
    _, canonical = max_ea_rank(G, p)
    generator_sets = [canonical.generators] + sorted(maximal, key=lambda gens: -len(gens))
    handles = [subgroup(G, gens) for gens in generator_sets]
    representatives = [generator_sets[block[0]] for block in subgroup_conjugacy_partition(G, handles)]
    logger.debug(f"{G!r}: {len(maximal)} maximal elementary abelian {p}-subgroups of the Sylow subgroup, "
                 f"{len(representatives)} up to conjugacy")
    return [EAWitness(p, len(gens), gens, G) for gens in representatives]


# --- metacyclic witnesses ---------------------------------------------------

def find_metacyclic(G: GroupHandle, p: int, q: int) -> List[MetacyclicWitness]:
    """Conjugacy-distinct H(p:q) witnesses: ``a`` of order p, ``b`` inducing a multiplier of order exactly q.

    One witness per class of <a> and per multiplier pair {t, t^-1}, reported
    with the smaller of the two.
    """
    index = class_index(G)
    classes = conj_classes(G)
    covered: Set[int] = set()
    witnesses: List[MetacyclicWitness] = []
    for cls in classes:
        if cls.element_order != p or index[cls.representative] in covered:
            continue
        a = cls.representative
        powers: Dict[Perm, int] = {}
        x = G.identity
        for k in range(p):
            powers[x] = k
            covered.add(index[x])
            x = perm_mul(x, a)
        A = subgroup(G, [a])
        by_multiplier: Dict[int, List[Perm]] = {}
        for y in normalizer_elements(G, A):
            t = powers[perm_mul(perm_mul(y, a), perm_inv(y))]
            by_multiplier.setdefault(t, []).append(y)
        for t in sorted(by_multiplier):
            if n_order(t, p) != q or t != min(t, pow(t, -1, p)):
                continue
            b = min(by_multiplier[t], key=lambda y: (perm_order(y), y))
            witness = MetacyclicWitness(p=p, q=q, a=a, b=b, t=t, b_order=perm_order(b))
            witness.validate()
            witnesses.append(witness)
    logger.debug(f"{G!r}: {len(witnesses)} H({p}:{q}) witnesses")
    return witnesses


def multiplier_admissible(t: int, p: int, sphere_dim: int) -> bool:
    """Does the multiplier ``t`` act compatibly with a smooth action on a homology ``sphere_dim``-sphere?

    Dimension 3 needs t = +-1 mod p; dimension 4 needs t^2 = +-1 mod p.
    """
    value = t % p if sphere_dim == 3 else (t * t) % p
    return value in (1 % p, (p - 1) % p)


def psl2_borel_multipliers(p: int) -> List[int]:
    """Multipliers induced by the diagonal torus of PSL(2,p) on a root subgroup: the nonzero squares mod p."""
    return sorted({(x * x) % p for x in range(1, p)})


# --- sectional 2-rank -------------------------------------------------------

def _frattini_rank(P: GroupHandle, U: GroupHandle) -> int:
    return _ilog(U.order // squares_subgroup(P, U).order, 2)


def sectional_2_rank(G: GroupHandle, two_group_order_cap: int = DEFAULT_TWO_GROUP_CAP) -> int:
    """Maximum generator count over subgroups of the Sylow 2-subgroup.

    Raises:
        CapExceeded: the Sylow 2-subgroup is larger than ``two_group_order_cap``
    """
    P = sylow(G, 2)
    if P.order > two_group_order_cap:
        raise CapExceeded(f"Sylow 2-subgroup of order {P.order} exceeds cap {two_group_order_cap}")
    if P.order == 1:
        return 0
    if is_abelian(P):
        involutions = sum(1 for g in P.elements if perm_mul(g, g) == P.identity)
        return _ilog(involutions, 2)
    ceiling = _ilog(P.order, 2)
    best = 0
    seen = {frozenset([P.identity])}
    queue = [subgroup(P, [])]
    for U in queue:
        best = max(best, _frattini_rank(P, U))
        if best == ceiling:
            break
        covered: Set[Perm] = set(U.members)
        for x in P.elements:
            if x in covered:
                continue
            covered.update(perm_mul(u, x) for u in U.elements)
            V = subgroup(P, list(U.generators) + [x])
            if V.members not in seen:
                seen.add(V.members)
                queue.append(V)
    logger.debug(f"{G!r}: sectional 2-rank {best} over {len(seen)} subgroups of the Sylow 2-subgroup")
    return best
