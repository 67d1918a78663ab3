"""
Fixed-Point Dimension Functions for spheregate

An elementary abelian p-group A = (Z_p)^k acting on a mod-p homology
m-sphere assigns to every subgroup H the dimension n(H) of its fixed set
(-1 when empty). This module enumerates every assignment compatible with
the Borel formula, imposed on every interval [B, C] of the subgroup
lattice ("Borel (recursive form)"), together with monotonicity,
faithfulness, orientation (allowed values on cyclic subgroups), conjugacy
colouring and optional rank descent axioms.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sympy import Matrix

from .constructors import OrthogonalModel
from .errors import ModelMismatch, ParameterError, TooLarge, WitnessInvalid
from .permgroup import GroupHandle, Perm, perm_mul, perm_order, perm_pow, subgroup, subgroup_conjugacy_partition
from .subgroups import EAWitness

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]
Basis = Tuple[Vector, ...]

BOREL_TRACE = "Borel (recursive form)"

# Constraint ids reported by check_dimfn
BOREL = "borel"
TOP_CYCLIC = "top-cyclic"
MONOTONE = "monotone"
FAITHFUL = "faithful"
COLORING = "coloring"
DESCENT = "descent"


@dataclass
class EALattice:
    """Subspace lattice of (Z_p)^k, subgroups numbered by (dimension, echelon form)."""

    p: int
    k: int
    bases: List[Basis]
    members: List[FrozenSet[Vector]]
    colors: List[int]
    witness: Optional[EAWitness] = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.bases)
        self.dims = [len(b) for b in self.bases]
        self.below: List[List[int]] = [
            [j for j in range(n) if j != i and self.members[j] <= self.members[i]] for i in range(n)
        ]
        self.maximal: List[List[int]] = [
            [j for j in self.below[i] if self.dims[j] == self.dims[i] - 1] for i in range(n)
        ]

    def __len__(self) -> int:
        return len(self.bases)

    @property
    def cyclic(self) -> List[int]:
        return [i for i, d in enumerate(self.dims) if d == 1]

    @property
    def top(self) -> int:
        return len(self.bases) - 1

    def count_by_dimension(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for d in self.dims:
            counts[d] = counts.get(d, 0) + 1
        return counts

    def color_classes(self) -> Dict[int, List[int]]:
        classes: Dict[int, List[int]] = {}
        for i, c in enumerate(self.colors):
            classes.setdefault(c, []).append(i)
        return classes

    def label(self, i: int) -> str:
        return "<" + ",".join("".join(map(str, row)) for row in self.bases[i]) + ">"


@dataclass(frozen=True)
class DimFn:
    values: Tuple[int, ...]
    m: int
    lattice: EALattice = field(compare=False, repr=False)

    def value(self, i: int) -> int:
        return self.values[i]

    @property
    def r(self) -> int:
        """Fixed dimension of the whole group."""
        return self.values[-1]

    def to_json(self) -> Dict[str, int]:
        return {str(i): v for i, v in enumerate(self.values)}


@dataclass(frozen=True)
class CspOptions:
    top_cyclic_values: Optional[FrozenSet[int]] = None
    use_descent_axioms: bool = True
    respect_coloring: bool = True

    def cyclic_values(self, m: int) -> Tuple[int, ...]:
        values = self.top_cyclic_values
        if values is None:
            values = frozenset({0, 2}) if m == 4 else frozenset({-1, 1})
        if not all(-1 <= v <= m - 1 for v in values):
            raise ParameterError(f"top cyclic values {sorted(values)} must lie in -1..{m - 1}")
        return tuple(sorted(values))


@dataclass(frozen=True)
class BorelCheck:
    equation: str
    solutions: Tuple[Tuple[int, int], ...]

    @property
    def feasible(self) -> bool:
        return bool(self.solutions)


# --- lattices ---------------------------------------------------------------

def _echelon_bases(p: int, k: int, d: int) -> Iterable[Basis]:
    for pivots in itertools.combinations(range(k), d):
        free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, k) if c not in pivots]
        for values in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * k for _ in range(d)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(free, values):
                rows[r][c] = v
            yield tuple(tuple(row) for row in rows)


def _span(p: int, k: int, basis: Basis) -> FrozenSet[Vector]:
    vectors = set()
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        vectors.add(tuple(sum(c * row[j] for c, row in zip(coeffs, basis)) % p for j in range(k)))
    return frozenset(vectors)


def lattice_abstract(p: int, k: int) -> EALattice:
    """Full subspace lattice of (Z_p)^k with the trivial colouring (every subgroup its own colour)."""
    if k < 1 or k > 5 or p**k > 2**16:
        raise TooLarge(f"lattice of (Z_{p})^{k} is outside k <= 5, p^k <= 65536")
    bases = sorted((b for d in range(k + 1) for b in _echelon_bases(p, k, d)), key=lambda b: (len(b), b))
    members = [_span(p, k, b) for b in bases]
    return EALattice(p=p, k=k, bases=bases, members=members, colors=list(range(len(bases))))


def _vector_element(witness: EAWitness, v: Vector) -> Perm:
    element = witness.group.identity
    for g, c in zip(witness.generators, v):
        if c:
            element = perm_mul(element, perm_pow(g, c))
    return element


def lattice_from_group(G: GroupHandle, w: EAWitness) -> EALattice:
    """Lattice of the witness subgroup, coloured by ``G``-conjugacy of the subgroups."""
    for g in w.generators:
        if g not in G.members:
            raise WitnessInvalid(f"witness generator is not an element of {G!r}")
        if perm_order(g) != w.p:
            raise WitnessInvalid(f"witness generator of order {perm_order(g)}, expected {w.p}")
    for a, b in itertools.combinations(w.generators, 2):
        if perm_mul(a, b) != perm_mul(b, a):
            raise WitnessInvalid("witness generators do not commute")
    if w.rank == 0:
        raise WitnessInvalid("witness has rank 0")
    if subgroup(G, w.generators).order != w.p**w.rank:
        raise WitnessInvalid(f"witness generators are not independent (rank {w.rank})")
    L = lattice_abstract(w.p, w.rank)
    handles = [subgroup(G, [_vector_element(w, row) for row in basis]) for basis in L.bases]
    colors = [0] * len(L)
    for color, block in enumerate(subgroup_conjugacy_partition(G, handles)):
        for i in block:
            colors[i] = color
    L.colors = colors
    L.witness = w
    logger.debug(f"{G!r}: ({w.p},{w.rank}) lattice with {len(set(colors))} colours")
    return L


# --- constraint checking ----------------------------------------------------

def _descent_limits(p: int) -> Tuple[int, int]:
    """Largest rank allowed when a cyclic subgroup fixes a 2-sphere, resp. a 0-sphere."""
    s2 = 3 if p == 2 else 1
    s3 = 3 if p == 2 else 2
    return 1 + s2, s3 + (1 if p == 2 else 0)


def _descent_ok(L: EALattice, value: int) -> bool:
    two_limit, zero_limit = _descent_limits(L.p)
    if value == 2 and L.k > two_limit:
        return False
    if value == 0 and L.k > zero_limit:
        return False
    return True


def _borel_pairs(L: EALattice, c: int) -> List[Tuple[int, List[int]]]:
    """(B, maximal subgroups of C containing B) for every B of codimension at least two in C."""
    pairs = []
    for b in L.below[c]:
        if L.dims[c] - L.dims[b] < 2:
            continue
        pairs.append((b, [h for h in L.maximal[c] if L.members[b] <= L.members[h]]))
    return pairs


def _borel_holds(values: Sequence[int], c: int, v: int, pairs: List[Tuple[int, List[int]]]) -> bool:
    return all(values[b] - v == sum(values[h] - v for h in hs) for b, hs in pairs)


def check_dimfn(L: EALattice, m: int, opts: CspOptions, dimfn: DimFn) -> List[str]:
    """Constraint ids violated by a complete assignment (empty when admissible)."""
    values = dimfn.values
    cyclic_values = set(opts.cyclic_values(m))
    violations = set()
    if values[0] != m:
        violations.add(FAITHFUL)
    for i in range(1, len(L)):
        if values[i] > m - 1 or values[i] < -1:
            violations.add(FAITHFUL)
        if L.dims[i] == 1:
            if values[i] not in cyclic_values:
                violations.add(TOP_CYCLIC)
            if opts.use_descent_axioms and m == 4 and not _descent_ok(L, values[i]):
                violations.add(DESCENT)
        if any(values[b] < values[i] for b in L.below[i]):
            violations.add(MONOTONE)
        if not _borel_holds(values, i, values[i], _borel_pairs(L, i)):
            violations.add(BOREL)
    if opts.respect_coloring:
        for members in L.color_classes().values():
            if len({values[i] for i in members}) > 1:
                violations.add(COLORING)
    return sorted(violations)


# --- enumeration ------------------------------------------------------------

def _search_order(L: EALattice) -> List[int]:
    """Cyclic subgroups in id order, each followed by the subgroups whose last cyclic subgroup it is."""
    placed_after: Dict[int, List[int]] = {c: [] for c in L.cyclic}
    for i in range(len(L)):
        if L.dims[i] >= 2:
            last = max(j for j in L.below[i] if L.dims[j] == 1)
            placed_after[last].append(i)
    order = []
    for c in L.cyclic:
        order.append(c)
        order.extend(sorted(placed_after[c], key=lambda i: (L.dims[i], i)))
    return order


def enumerate_dimfns(L: EALattice, m: int, opts: Optional[CspOptions] = None) -> List[DimFn]:
    """All admissible dimension functions on ``L`` for a homology ``m``-sphere, sorted by value tuple.

    Args:
        L: the subgroup lattice (with its colouring)
        m: sphere dimension, 3 or 4
        opts: allowed cyclic values, descent axioms, colouring

    Returns:
        list of DimFn; empty when the configuration is infeasible
    """
    if m not in (3, 4):
        raise ParameterError(f"sphere dimension must be 3 or 4, got {m}")
    opts = opts or CspOptions()
    cyclic_values = opts.cyclic_values(m)
    descent = opts.use_descent_axioms and m == 4
    order = _search_order(L)
    pairs = {i: _borel_pairs(L, i) for i in range(len(L))}
    values: List[Optional[int]] = [None] * len(L)
    values[0] = m
    color_value: Dict[int, int] = {}
    color_count: Dict[int, int] = {}
    solutions: List[Tuple[int, ...]] = []
    nodes = 0

    def assign(i: int, v: int) -> bool:
        if L.dims[i] == 1:
            if descent and not _descent_ok(L, v):
                return False
        elif any(values[b] < v for b in L.below[i]):
            return False
        elif not _borel_holds(values, i, v, pairs[i]):
            return False
        if opts.respect_coloring:
            color = L.colors[i]
            if color_value.get(color, v) != v:
                return False
        return True

    def place(i: int, v: int) -> None:
        values[i] = v
        if opts.respect_coloring:
            color = L.colors[i]
            color_value[color] = v
            color_count[color] = color_count.get(color, 0) + 1

    def unplace(i: int) -> None:
        values[i] = None
        if opts.respect_coloring:
            color = L.colors[i]
            color_count[color] -= 1
            if color_count[color] == 0:
                del color_count[color]
                del color_value[color]

    def backtrack(position: int) -> None:
        nonlocal nodes
        nodes += 1
        if position == len(order):
            solutions.append(tuple(values))
            return
        i = order[position]
        domain = cyclic_values if L.dims[i] == 1 else range(-1, m)
        for v in domain:
            if assign(i, v):
                place(i, v)
                backtrack(position + 1)
                unplace(i)

    if opts.respect_coloring:
        color_value[L.colors[0]] = m
        color_count[L.colors[0]] = 1
    backtrack(0)
    logger.debug(f"({L.p},{L.k}) lattice, m={m}: {len(solutions)} solutions after {nodes} nodes")
    return [DimFn(values=s, m=m, lattice=L) for s in sorted(solutions)]


def enumerate_dimfns_bruteforce(L: EALattice, m: int, opts: Optional[CspOptions] = None) -> List[DimFn]:
    """Every cyclic assignment, completed upward by the top-level Borel identity, then fully checked."""
    opts = opts or CspOptions()
    cyclic = L.cyclic
    higher = [i for i in range(len(L)) if L.dims[i] >= 2]
    found = []
    for choice in itertools.product(opts.cyclic_values(m), repeat=len(cyclic)):
        values = [m] * len(L)
        for i, v in zip(cyclic, choice):
            values[i] = v
        complete = True
        for i in higher:
            hyperplanes = L.maximal[i]
            forced = Fraction(sum(values[h] for h in hyperplanes) - m, len(hyperplanes) - 1)
            if forced.denominator != 1:
                complete = False
                break
            values[i] = int(forced)
        if not complete:
            continue
        candidate = DimFn(values=tuple(values), m=m, lattice=L)
        if not check_dimfn(L, m, opts, candidate):
            found.append(candidate)
    return sorted(found, key=lambda f: f.values)


def involution_profile(solutions: Sequence[DimFn]) -> List[Dict[int, int]]:
    """Per solution, how many cyclic subgroups take each value."""
    profiles = []
    for f in solutions:
        counts: Dict[int, int] = {}
        for i in f.lattice.cyclic:
            counts[f.values[i]] = counts.get(f.values[i], 0) + 1
        profiles.append(dict(sorted(counts.items())))
    return profiles


def zero_value_colors(f: DimFn) -> List[int]:
    """Colours of the cyclic subgroups with a 0-dimensional fixed set."""
    return sorted({f.lattice.colors[i] for i in f.lattice.cyclic if f.values[i] == 0})


# --- closed-form Borel instances --------------------------------------------

def _format_equation(m: int, subgroup_count: int) -> str:
    coefficient = subgroup_count - 1
    if coefficient == 0:
        left = f"{m}"
    elif coefficient == 1:
        left = f"{m} + r"
    else:
        left = f"{m} + {coefficient}r"
    right = "n(H)" if subgroup_count == 1 else f"{subgroup_count} n(H)"
    return f"{left} = {right}"


def uniform_borel_check(m: int, subgroup_count: int, allowed_n: Iterable[int],
                        r_range: Iterable[int]) -> BorelCheck:
    """Solve m - r = N (n - r) when all N corank-one subgroups share one value n."""
    if subgroup_count < 1:
        raise ParameterError("subgroup_count must be at least 1")
    allowed = sorted(set(allowed_n))
    solutions = tuple((r, n) for r in sorted(set(r_range)) for n in allowed
                      if m - r == subgroup_count * (n - r))
    return BorelCheck(equation=_format_equation(m, subgroup_count), solutions=solutions)


def descent_free_rank_scan(p: int, max_rank: int, m: int = 4) -> Dict[int, int]:
    """Solution counts per rank with the descent axioms switched off."""
    opts = CspOptions(use_descent_axioms=False)
    counts = {}
    for k in range(1, max_rank + 1):
        counts[k] = len(enumerate_dimfns(lattice_abstract(p, k), m, opts))
        logger.info(f"📊 p={p}, rank {k}: {counts[k]} solutions without descent axioms")
    return counts


# --- orthogonal cross-check -------------------------------------------------

def orthogonal_dimfn(model: OrthogonalModel, w: EAWitness) -> DimFn:
    """Dimension function of a linear action restricted to the unit sphere.

    Each subgroup maps to (dimension of its common fixed subspace) - 1,
    from the exact rank of the stacked blocks M - I over its generators.
    """
    G = model.group
    for g in w.generators:
        if g not in G.members:
            raise ModelMismatch(f"witness element is not in the modelled group {model.spec}")
    L = lattice_from_group(G, w)
    d = model.dimension
    identity = Matrix.eye(d)
    values = []
    for basis in L.bases:
        gens = [_vector_element(w, row) for row in basis]
        if not gens:
            values.append(d - 1)
            continue
        stacked = Matrix.vstack(*[Matrix(model.matrix_of(g).tolist()) - identity for g in gens])
        values.append(d - stacked.rank() - 1)
    return DimFn(values=tuple(values), m=d - 1, lattice=L)
