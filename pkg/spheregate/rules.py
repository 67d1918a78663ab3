"""
Obstruction Rules for spheregate

Runs the rank, sectional-rank, metacyclic, Borel, central-involution and
curated-table rules against a permutation group and reports a Verdict.
"not excluded" only means that no implemented rule fired.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError
from sympy import divisors, primefactors

from .config import axioms_path, bundled_manifest
from .constructors import build
from .errors import AxiomTableError, CapExceeded, ManifestError, SphereGateError, TooLarge
from .fixdim import (BOREL_TRACE, CspOptions, enumerate_dimfns, lattice_from_group, uniform_borel_check,
                     zero_value_colors)
from .permgroup import (GroupHandle, SubgroupHandle, center, conj_classes, derived_subgroup,
                        element_order_counts, format_perm, index_two_subgroups, is_nonabelian_simple, is_simple,
                        perfect_core, perm_mul, perm_order, perm_pow, quotient, subgroup)
from .schemas import (NOT_EXCLUDED_SUMMARY, AxiomTable, ContainmentEntry, Fingerprint, Manifest, ManifestEntry,
                      RuleFinding, RunConfig, Sphere3Entry, SurveyReport, SurveyRow, Verdict)
from .structure import is_quasisimple
from .subgroups import (EAWitness, MetacyclicWitness, find_metacyclic, max_ea_rank, maximal_ea_subgroups,
                        multiplier_admissible, sectional_2_rank)

logger = logging.getLogger(__name__)

CITATIONS = {
    "R-RANK": "an elementary abelian p-group acting on a homology 4-sphere has rank at most 2 for odd p "
              "and at most 4 for p = 2",
    "R-SECT": "a finite group acting on a homology 4-sphere has sectional 2-rank at most 4",
    "R-META": "a metacyclic group H(p:q) acting on a homology 4-sphere has multiplier t with t^2 = +-1 mod p",
    "R-BOREL": f"{BOREL_TRACE}: m - r = sum of (n(H) - r) over the index-p subgroups H, on every interval "
               "of the elementary abelian subgroup lattice",
    "R-CENTRAL": "a central involution fixes a 0- or 2-sphere: the quotient by a cyclic kernel acts on S^2, "
                 "or a subgroup of index at most 2 acts on a homology 3-sphere",
    "R-TABLE": "curated subgroup containments from the axiom table",
    "R-RANK3": "an elementary abelian p-group acting on a homology 3-sphere has rank at most 2 for odd p "
               "and at most 3 for p = 2",
    "R-META3": "a metacyclic group H(p:q) acting on a homology 3-sphere has multiplier t = +-1 mod p",
    "R-TABLE3": "curated facts on finite groups acting on homology 3-spheres from the axiom table",
}

RANK_LIMITS = {4: (2, 4), 3: (2, 3)}
MAX_BOREL_RANK = 5


# --- axiom table and manifests ----------------------------------------------

@lru_cache(maxsize=8)
def _load_axiom_table(resolved: str) -> AxiomTable:
    try:
        with open(resolved, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise AxiomTableError(f"axiom table not found: {resolved}")
    except json.JSONDecodeError as e:
        raise AxiomTableError(f"axiom table {resolved} is not valid JSON: {e}")
    try:
        table = AxiomTable.model_validate(data)
    except ValidationError as e:
        raise AxiomTableError(f"axiom table {resolved} is invalid: {e}")
    logger.info(f"✅ Loaded axiom table {resolved}: {len(table.sphere3_verdicts)} sphere-3 facts, "
                f"{len(table.containments)} containments")
    return table


def load_axiom_table(path: Optional[Union[str, Path]] = None) -> AxiomTable:
    """Load the curated table; ``path`` beats SPHEREGATE_AXIOMS beats the bundled file."""
    return _load_axiom_table(str(axioms_path(str(path) if path else None)))


def load_manifest(path: Union[str, Path]) -> Manifest:
    """Read a JSON manifest; a bare name is looked up among the bundled manifests.

    Group specs are not parsed here: a bad spec becomes an error row of the survey.
    """
    candidate = Path(path)
    if not candidate.exists() and not candidate.suffix:
        candidate = bundled_manifest(str(path))
    try:
        with open(candidate, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}")
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest {path} is not valid JSON: {e}")
    try:
        manifest = Manifest.model_validate(data)
    except ValidationError as e:
        raise ManifestError(f"manifest {path} is invalid: {e}")
    return manifest


# --- per-group facts --------------------------------------------------------

@dataclass
class _GroupFacts:
    """Lazily computed subgroup data shared by the rules of one check."""

    G: GroupHandle
    config: RunConfig
    table: AxiomTable
    _ranks: Dict[int, Tuple[int, EAWitness]] = field(default_factory=dict)
    _metacyclic: Optional[List[MetacyclicWitness]] = None

    @property
    def primes(self) -> List[int]:
        return primefactors(self.G.order)

    def rank(self, p: int) -> Tuple[int, EAWitness]:
        if p not in self._ranks:
            self._ranks[p] = max_ea_rank(self.G, p)
        return self._ranks[p]

    def metacyclic(self) -> List[MetacyclicWitness]:
        if self._metacyclic is None:
            found = []
            for p in self.primes:
                if p == 2:
                    continue
                for q in divisors(p - 1):
                    if q >= 2 and self.G.order % q == 0:
                        found.extend(find_metacyclic(self.G, p, q))
            self._metacyclic = found
        return self._metacyclic


def _finding(rule: str, outcome: str, **witness: Any) -> RuleFinding:
    return RuleFinding(rule=rule, citation=CITATIONS[rule], outcome=outcome, witness=witness)


# --- rules shared by both dimensions -----------------------------------------

def _rank_rule(facts: _GroupFacts, rule: str, sphere_dim: int) -> RuleFinding:
    odd_limit, two_limit = RANK_LIMITS[sphere_dim]
    ranks = {}
    failing = []
    for p in facts.primes:
        rank, witness = facts.rank(p)
        ranks[str(p)] = rank
        limit = two_limit if p == 2 else odd_limit
        if rank > limit:
            failing.append({"p": p, "rank": rank, "limit": limit,
                            "generators": [format_perm(g) for g in witness.generators]})
    if not ranks:
        return _finding(rule, "not_applicable", ranks=ranks)
    return _finding(rule, "violation" if failing else "pass", ranks=ranks, failing=failing)


def _meta_rule(facts: _GroupFacts, rule: str, sphere_dim: int) -> RuleFinding:
    witnesses = facts.metacyclic()
    if not witnesses:
        return _finding(rule, "not_applicable", checked=0)
    failing = []
    for w in witnesses:
        if multiplier_admissible(w.t, w.p, sphere_dim):
            continue
        record = {"p": w.p, "q": w.q, "t": w.t, "a": format_perm(w.a), "b": format_perm(w.b), "b_order": w.b_order}
        if sphere_dim == 4:
            record["t_squared_mod_p"] = (w.t * w.t) % w.p
        failing.append(record)
    return _finding(rule, "violation" if failing else "pass", checked=len(witnesses), failing=failing)


# --- sphere-4 rules ---------------------------------------------------------

def _sect_rule(facts: _GroupFacts) -> RuleFinding:
    try:
        value = sectional_2_rank(facts.G, facts.config.two_group_cap)
    except CapExceeded as e:
        logger.warning(f"⚠️ {facts.G.name}: R-SECT skipped: {e}")
        return _finding("R-SECT", "skipped", reason=str(e))
    return _finding("R-SECT", "violation" if value > 4 else "pass", sectional_2_rank=value, limit=4)


def _borel_witnesses(facts: _GroupFacts, p: int) -> Tuple[List[EAWitness], Optional[str]]:
    """Every maximal elementary abelian p-subgroup up to conjugacy, or the max-rank witness past the cap."""
    try:
        return maximal_ea_subgroups(facts.G, p), None
    except CapExceeded as e:
        logger.warning(f"⚠️ {facts.G.name}: R-BOREL checks only the maximal-rank {p}-subgroup: {e}")
        return [facts.rank(p)[1]], str(e)


def _borel_rule(facts: _GroupFacts) -> RuleFinding:
    opts = CspOptions(use_descent_axioms=facts.config.descent_axioms)
    lattices = []
    infeasible = False
    for p in facts.primes:
        if facts.rank(p)[0] < 2:
            continue
        witnesses, cap_note = _borel_witnesses(facts, p)
        for witness in witnesses:
            k = witness.rank
            if k < 2:
                continue
            record: Dict[str, Any] = {"p": p, "rank": k,
                                      "generators": [format_perm(g) for g in witness.generators]}
            if cap_note:
                record["search"] = cap_note
            uniform = uniform_borel_check(4, (p**k - 1) // (p - 1), range(-1, 4), range(-1, 4))
            record["equation"] = uniform.equation
            record["uniform_solutions"] = [list(s) for s in uniform.solutions]
            if k > MAX_BOREL_RANK:
                record["skipped"] = f"rank {k} above {MAX_BOREL_RANK}"
                lattices.append(record)
                continue
            try:
                L = lattice_from_group(facts.G, witness)
            except TooLarge as e:
                record["skipped"] = str(e)
                lattices.append(record)
                continue
            solutions = enumerate_dimfns(L, 4, opts)
            record["colors"] = len(set(L.colors))
            record["solutions"] = len(solutions)
            if p == 2 and k == 4:
                record["zero_value_colors"] = [zero_value_colors(f) for f in solutions]
            if not solutions:
                infeasible = True
            lattices.append(record)
    if not lattices:
        return _finding("R-BOREL", "not_applicable", lattices=lattices)
    if infeasible:
        outcome = "violation"
    elif all("skipped" in record for record in lattices):
        outcome = "skipped"
    else:
        outcome = "pass"
    return _finding("R-BOREL", outcome, lattices=lattices)


def cyclic_normal_kernels(G: GroupHandle, z) -> List[SubgroupHandle]:
    """Cyclic normal subgroups of ``G`` containing the central element ``z``, by order."""
    found: Dict[frozenset, SubgroupHandle] = {}
    for cls in conj_classes(G):
        g = cls.representative
        n = cls.element_order
        if cls.size > n:
            continue
        powers = {perm_pow(g, k) for k in range(n)}
        if z not in powers or not cls.members <= powers:
            continue
        key = frozenset(powers)
        if key not in found:
            found[key] = subgroup(G, [g])
    return sorted(found.values(), key=lambda K: (K.order, K.elements))


def _two_sphere_families(Q: GroupHandle) -> List[str]:
    families = []
    longest = max(perm_order(g) for g in Q.elements)
    if 4 * longest >= Q.order:
        families.append("cyclic-dihedral")
    if Q.order in (12, 24, 48):
        families.append("polyhedral")
    if Q.order == 60 and is_simple(Q):
        families.append("icosahedral")
    if Q.order == 120 and center(Q).order == 2 and derived_subgroup(Q).order == 60:
        families.append("icosahedral-times-two")
    return families


def acts_on_two_sphere(Q: GroupHandle, table: Optional[AxiomTable] = None) -> Optional[str]:
    """Name of the two-sphere family ``Q`` may belong to, or None.

    Conservative: cyclic or dihedral groups and their products with Z_2
    (a cyclic subgroup of index at most 4), every order 12, 24 or 48, the
    simple group of order 60, and order 120 with a central Z_2 beside a
    derived subgroup of order 60. Only families listed in ``table`` count.
    """
    allowed = {entry.name for entry in table.sphere2_groups} if table else None
    for family in _two_sphere_families(Q):
        if allowed is None or family in allowed:
            return family
    return None


def _central_rule(facts: _GroupFacts) -> RuleFinding:
    G = facts.G
    involutions = [z for z in center(G).elements if z != G.identity and perm_mul(z, z) == G.identity]
    if not involutions:
        return _finding("R-CENTRAL", "not_applicable", involutions=[])
    records = []
    excluded = False
    undecided = False
    for z in involutions:
        record: Dict[str, Any] = {"z": format_perm(z), "kernels": [], "sphere2": None, "sphere0": None}
        for K in cyclic_normal_kernels(G, z):
            record["kernels"].append(K.order)
            try:
                Q = quotient(G, K, degree_cap=facts.config.degree_cap)
            except CapExceeded as e:
                record.setdefault("unresolved", []).append(str(e))
                undecided = True
                continue
            match = acts_on_two_sphere(Q, facts.table)
            if match:
                record["sphere2"] = {"kernel_order": K.order, "quotient_order": Q.order, "family": match}
                break
        if record["sphere2"] is None:
            for H in [G] + list(index_two_subgroups(G)):
                sub_facts = facts if H is G else _GroupFacts(H, facts.config, facts.table)
                verdict = _run(sub_facts, 3)
                if verdict.status == "not_excluded":
                    record["sphere0"] = {"index": G.order // H.order, "order": H.order}
                    break
        if record["sphere2"] is None and record["sphere0"] is None and "unresolved" not in record:
            excluded = True
        records.append(record)
    if excluded:
        outcome = "violation"
    elif undecided and all(r["sphere2"] is None and r["sphere0"] is None for r in records):
        outcome = "skipped"
    else:
        outcome = "pass"
    return _finding("R-CENTRAL", outcome, involutions=records)


def _containment_rule(facts: _GroupFacts) -> RuleFinding:
    G = facts.G
    simple = is_nonabelian_simple(G)
    matches = []
    for entry in facts.table.containments:
        if _containment_matches(G, simple, entry):
            matches.append({"group": entry.group, "contains": entry.contains, "obstruction": entry.obstruction,
                            "provenance": entry.provenance, "machine_verified": entry.machine_verified})
    return _finding("R-TABLE", "violation" if matches else "pass",
                    entries_checked=len(facts.table.containments), matches=matches)


def _containment_matches(G: GroupHandle, simple: bool, entry: ContainmentEntry) -> bool:
    if entry.order != G.order or entry.simple != simple:
        return False
    if entry.class_count is not None and len(conj_classes(G)) != entry.class_count:
        return False
    return entry.fingerprint is None or _fingerprint_matches(G, entry.fingerprint)


# --- sphere-3 table ---------------------------------------------------------

def _fingerprint_matches(H: GroupHandle, fp: Optional[Fingerprint]) -> bool:
    if fp is None or fp.order != H.order:
        return False
    counts = {str(k): v for k, v in element_order_counts(H).items()}
    return len(conj_classes(H)) == fp.class_count and counts == fp.element_orders


def _sphere3_entry_fires(H: GroupHandle, entry: Sphere3Entry) -> bool:
    if entry.kind == "simple_allowlist":
        return is_nonabelian_simple(H) and H.order not in entry.orders
    if entry.kind == "quasisimple_allowlist":
        return (center(H).order == entry.center_order and is_quasisimple(H)
                and H.order not in entry.orders)
    if entry.kind == "fingerprint_exclusion":
        return _fingerprint_matches(H, entry.fingerprint)
    return False


def _table3_rule(facts: _GroupFacts) -> RuleFinding:
    G = facts.G
    subjects = [("group", G)]
    P = perfect_core(G)
    if 1 < P.order < G.order:
        subjects.append(("perfect core", P))
    matches = []
    for where, H in subjects:
        for entry in facts.table.sphere3_verdicts:
            if _sphere3_entry_fires(H, entry):
                matches.append({"id": entry.id, "applied_to": where, "order": H.order,
                                "description": entry.description, "provenance": entry.provenance})
    return _finding("R-TABLE3", "violation" if matches else "pass", matches=matches)


# --- pipeline ---------------------------------------------------------------

RULES_SPHERE4: Dict[str, Callable[[_GroupFacts], RuleFinding]] = {
    "R-RANK": lambda facts: _rank_rule(facts, "R-RANK", 4),
    "R-SECT": _sect_rule,
    "R-META": lambda facts: _meta_rule(facts, "R-META", 4),
    "R-BOREL": _borel_rule,
    "R-CENTRAL": _central_rule,
    "R-TABLE": _containment_rule,
}

RULES_SPHERE3: Dict[str, Callable[[_GroupFacts], RuleFinding]] = {
    "R-RANK3": lambda facts: _rank_rule(facts, "R-RANK3", 3),
    "R-META3": lambda facts: _meta_rule(facts, "R-META3", 3),
    "R-TABLE3": _table3_rule,
}


def _run(facts: _GroupFacts, sphere_dim: int) -> Verdict:
    rules = RULES_SPHERE4 if sphere_dim == 4 else RULES_SPHERE3
    trace = []
    for rule_id, rule in rules.items():
        if rule_id in facts.config.disabled_rules:
            trace.append(_finding(rule_id, "skipped", reason="disabled"))
            continue
        finding = rule(facts)
        if finding.outcome == "violation":
            logger.debug(f"{facts.G.name}: {rule_id} fired at dimension {sphere_dim}")
        trace.append(finding)
    fired = [f.rule for f in trace if f.outcome == "violation"]
    status = "excluded" if fired else "not_excluded"
    summary = f"excluded by {', '.join(fired)}" if fired else NOT_EXCLUDED_SUMMARY
    return Verdict(group=facts.G.name or "group", sphere_dim=sphere_dim, order=facts.G.order,
                   status=status, summary=summary, trace=trace)


def _prepare(config: Optional[RunConfig], table: Optional[AxiomTable]) -> Tuple[RunConfig, AxiomTable]:
    config = config or RunConfig()
    return config, table or load_axiom_table(config.axioms_path)


def check_sphere4(G: GroupHandle, config: Optional[RunConfig] = None,
                  table: Optional[AxiomTable] = None) -> Verdict:
    """Run every enabled homology 4-sphere rule against ``G``.

    Args:
        G: the group
        config: caps, rule toggles and descent axioms
        table: the curated axiom table (loaded from the configured path by default)

    Returns:
        Verdict: "excluded" exactly when some rule reports a violation
    """
    config, table = _prepare(config, table)
    verdict = _run(_GroupFacts(G, config, table), 4)
    logger.info(f"{'🚫' if verdict.status == 'excluded' else '✅'} {verdict.group} on S^4: {verdict.summary}")
    return verdict


def check_sphere3(G: GroupHandle, config: Optional[RunConfig] = None,
                  table: Optional[AxiomTable] = None) -> Verdict:
    """Run the homology 3-sphere rules against ``G``."""
    config, table = _prepare(config, table)
    verdict = _run(_GroupFacts(G, config, table), 3)
    logger.info(f"{'🚫' if verdict.status == 'excluded' else '✅'} {verdict.group} on S^3: {verdict.summary}")
    return verdict


def check(G: GroupHandle, sphere_dim: int, config: Optional[RunConfig] = None,
          table: Optional[AxiomTable] = None) -> Verdict:
    return (check_sphere4 if sphere_dim == 4 else check_sphere3)(G, config, table)


# --- survey -----------------------------------------------------------------

def _survey_row(entry: ManifestEntry, sphere_dim: int, config: RunConfig, table: AxiomTable) -> SurveyRow:
    try:
        G = build(entry.spec, order_cap=config.order_cap, degree_cap=config.degree_cap)
        verdict = check(G, sphere_dim, config, table)
    except SphereGateError as e:
        logger.warning(f"⚠️ Survey row {entry.name} failed: {e}")
        return SurveyRow(label=entry.name, spec=entry.spec, status="error", error_message=str(e))
    return SurveyRow(label=entry.name, spec=entry.spec, order=G.order, simple=is_nonabelian_simple(G),
                     status=verdict.status, violations=verdict.violations, verdict=verdict)


def survey(manifest: Union[Manifest, Sequence[Union[str, ManifestEntry]]], sphere_dim: int = 4,
           config: Optional[RunConfig] = None, table: Optional[AxiomTable] = None) -> SurveyReport:
    """One verdict row per manifest entry, in manifest order.

    Rows are evaluated by ``config.threads`` workers; a failing row is
    recorded with status "error" and the survey continues.
    """
    if not isinstance(manifest, Manifest):
        entries = [e if isinstance(e, ManifestEntry) else ManifestEntry(spec=e) for e in manifest]
        manifest = Manifest(groups=entries)
    config, table = _prepare(config, table)
    logger.info(f"📊 Surveying {len(manifest.groups)} groups from {manifest.name} on S^{sphere_dim} "
                f"with {config.threads} worker(s)")
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        rows = list(pool.map(lambda entry: _survey_row(entry, sphere_dim, config, table), manifest.groups))
    survivors = [row.label for row in rows if row.status == "not_excluded"]
    simple_survivors = [row.label for row in rows if row.status == "not_excluded" and row.simple]
    errors = [row.label for row in rows if row.status == "error"]
    summary = f"{len(survivors)} of {len(rows)} groups {NOT_EXCLUDED_SUMMARY}"
    if errors:
        summary += f"; {len(errors)} row(s) failed"
    logger.info(f"📊 {manifest.name}: {summary}")
    return SurveyReport(manifest=manifest.name, sphere_dim=sphere_dim, rows=rows, survivors=survivors,
                        simple_survivors=simple_survivors, errors=errors, summary=summary)
