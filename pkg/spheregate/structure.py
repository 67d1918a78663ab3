"""
Structure Analysis for spheregate

Fitting subgroup, components and the semisimple part E(G), plus a
classifier placing a nonsolvable group into the list of groups that can
act on a homology 4-sphere (cases A, B, C) or outside it.

Isomorphism types are recognized by fingerprints (order, class count,
element-order multiset) together with simplicity and derived-subgroup data.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from sympy import primefactors

from .errors import SolvableInput
from .permgroup import (GroupHandle, SubgroupHandle, center, centralizer, conj_classes, core, derived_subgroup,
                        element_order_counts, fingerprint, format_perm, index_two_subgroups, intersection,
                        is_cyclic, is_elementary_abelian, is_nonabelian_simple, is_perfect, is_solvable, join,
                        normal_closure, normal_subgroups, perfect_core, perm_mul, perm_order, perm_pow, quotient,
                        subgroup_from_elements, sylow, trivial_subgroup, whole)
from .schemas import StructureRecord

logger = logging.getLogger(__name__)

Fingerprint = Tuple[int, int, Tuple[Tuple[int, int], ...]]

# Separating invariants for the look-alikes of order 720: PGL(2,9) and M10
# have elements of order 8 and none of order 6; A6 x Z2 has 91 involutions.
FINGERPRINTS: Dict[str, Fingerprint] = {
    "A5": (60, 5, ((1, 1), (2, 15), (3, 20), (5, 24))),
    "S5": (120, 7, ((1, 1), (2, 25), (3, 20), (4, 30), (5, 24), (6, 20))),
    "A6": (360, 7, ((1, 1), (2, 45), (3, 80), (4, 90), (5, 144))),
    "S6": (720, 11, ((1, 1), (2, 75), (3, 80), (4, 180), (5, 144), (6, 240))),
}

CASE_C_NOTE = ("the cofactor C must also admit a free orientation-preserving action on the 3-sphere; "
               "this side condition is reported, not verified")


@dataclass
class StructureReport:
    order: int
    solvable: bool
    center_order: int
    fitting: SubgroupHandle
    components: List[SubgroupHandle]
    e_subgroup: SubgroupHandle
    fingerprint: Fingerprint

    def to_record(self) -> StructureRecord:
        return StructureRecord(
            order=self.order,
            solvable=self.solvable,
            center_order=self.center_order,
            fitting_order=self.fitting.order,
            component_orders=[K.order for K in self.components],
            e_subgroup_order=self.e_subgroup.order,
            class_count=self.fingerprint[1],
            element_orders={str(k): v for k, v in self.fingerprint[2]},
        )


@dataclass
class StructureCase:
    tag: str
    witness: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)


def is_quasisimple(G: GroupHandle) -> bool:
    """Perfect with G/Z(G) nonabelian simple.

    For perfect G this is the same as every non-central element generating
    G as a normal subgroup, which avoids building the quotient.
    """
    if G.order == 1 or not is_perfect(G):
        return False
    Z = center(G)
    if Z.order == G.order:
        return False
    for cls in conj_classes(G):
        if cls.representative in Z.members:
            continue
        if normal_closure(G, [cls.representative]).order < G.order:
            return False
    return True


def fitting_subgroup(G: GroupHandle) -> SubgroupHandle:
    """Product of the p-cores O_p(G) over the primes dividing |G|."""
    cores = [core(G, sylow(G, p)) for p in primefactors(G.order)]
    cores = [O for O in cores if O.order > 1]
    if not cores:
        return trivial_subgroup(G)
    return join(G, *cores)


def _components_within(G: GroupHandle, H: GroupHandle, found: Dict[frozenset, SubgroupHandle]) -> None:
    P = perfect_core(H)
    if P.order == 1 or P.members in found:
        return
    if is_quasisimple(P):
        found[P.members] = subgroup_from_elements(G, P.elements)
        return
    for N in normal_subgroups(P):
        if 1 < N.order < P.order:
            _components_within(G, N, found)


def components(G: GroupHandle) -> List[SubgroupHandle]:
    """Subnormal quasisimple subgroups of ``G``, by order then elements."""
    found: Dict[frozenset, SubgroupHandle] = {}
    _components_within(G, G, found)
    return sorted(found.values(), key=lambda K: (K.order, K.elements))


def analyze_structure(G: GroupHandle) -> StructureReport:
    comps = components(G)
    E = join(G, *comps) if comps else trivial_subgroup(G)
    report = StructureReport(
        order=G.order,
        solvable=is_solvable(G),
        center_order=center(G).order,
        fitting=fitting_subgroup(G),
        components=comps,
        e_subgroup=E,
        fingerprint=fingerprint(G),
    )
    logger.debug(f"{G!r}: fitting order {report.fitting.order}, components {[K.order for K in comps]}")
    return report


# --- classification ---------------------------------------------------------

def matches_fingerprint(G: GroupHandle, name: str) -> bool:
    return fingerprint(G) == FINGERPRINTS[name]


def is_dihedral(C: GroupHandle) -> bool:
    """Order 2n (n >= 2) with a cyclic subgroup of index 2 inverted by an involution outside it."""
    if C.order < 4 or C.order % 2:
        return False
    n = C.order // 2
    for x in C.elements:
        if perm_order(x) != n:
            continue
        rotations = {perm_pow(x, k) for k in range(n)}
        x_inv = perm_pow(x, n - 1)
        for y in C.elements:
            if y in rotations or perm_mul(y, y) != C.identity:
                continue
            if perm_mul(perm_mul(y, x), y) == x_inv:
                return True
        return False
    return False


def _case_a(G: GroupHandle) -> Optional[StructureCase]:
    if G.order not in (960, 1920):
        return None
    for N in normal_subgroups(G):
        if N.order != 16 or not is_elementary_abelian(N):
            continue
        Q = quotient(G, N)
        for name in ("A5", "S5"):
            if matches_fingerprint(Q, name):
                return StructureCase("A", {
                    "normal_subgroup_order": N.order,
                    "normal_subgroup": [format_perm(g) for g in N.generators],
                    "quotient_order": Q.order,
                    "quotient": name,
                })
    return None


def _case_b(G: GroupHandle) -> Optional[StructureCase]:
    if G.order == 360 and is_nonabelian_simple(G) and matches_fingerprint(G, "A6"):
        return StructureCase("B", {"match": "A6", "class_count": len(conj_classes(G))})
    if G.order == 720 and matches_fingerprint(G, "S6"):
        D = derived_subgroup(G)
        if D.order == 360 and is_nonabelian_simple(D):
            return StructureCase("B", {"match": "S6", "class_count": len(conj_classes(G)),
                                       "derived_order": D.order})
    return None


def _cofactor_kind(C: GroupHandle) -> Optional[str]:
    if is_cyclic(C):
        return "cyclic"
    if is_dihedral(C):
        return "dihedral"
    return None


def _case_c_in(H: GroupHandle, index: int) -> Optional[StructureCase]:
    comps = components(H)
    if len(comps) == 2 and all(K.order == 120 and center(K).order == 2 for K in comps):
        if join(H, *comps).order == H.order:
            return StructureCase("C", {"index": index, "form": "A5* o A5*", "component_orders": [120, 120]})
    for S in comps:
        C = centralizer(H, S)
        meet = intersection(H, S, C)
        if S.order * C.order != H.order * meet.order:
            continue
        if S.order == 60 and meet.order == 1 and matches_fingerprint(S, "A5"):
            kind = _cofactor_kind(C)
            if kind:
                return StructureCase("C", {"index": index, "form": "A5 x C", "cofactor": kind,
                                           "cofactor_order": C.order})
        if S.order == 120 and center(S).order == 2 and meet.order == 2 and is_solvable(C):
            return StructureCase("C", {"index": index, "form": "A5* o C", "cofactor": "solvable",
                                       "cofactor_order": C.order}, notes=[CASE_C_NOTE])
    return None


def classify_structure(G: GroupHandle) -> StructureCase:
    """Case A, B or C of the list of nonsolvable groups acting on a homology 4-sphere, else OutsideList.

    Raises:
        SolvableInput: ``G`` is solvable
    """
    if is_solvable(G):
        raise SolvableInput(f"{G.name or 'group'} of order {G.order} is solvable")
    case = _case_a(G) or _case_b(G)
    if case is None:
        for index, H in [(1, whole(G))] + [(2, K) for K in index_two_subgroups(G)]:
            case = _case_c_in(H, index)
            if case:
                break
    case = case or StructureCase("OutsideList", {"order": G.order,
                                                 "element_orders": {str(k): v for k, v in
                                                                    element_order_counts(G).items()}})
    logger.info(f"📊 {G.name or 'group'}: structure case {case.tag}")
    return case
