"""
Report, manifest and axiom-table schemas for spheregate.

Every report carries ``"schema": "spheregate/1"`` and is emitted through
``to_json()`` so reruns are byte-identical.
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator, model_validator

from .config import (DEFAULT_DEGREE_CAP, DEFAULT_ORDER_CAP, DEFAULT_THREADS, DEFAULT_TWO_GROUP_CAP,
                     RULE_IDS_SPHERE3, RULE_IDS_SPHERE4, SCHEMA_TAG)

Outcome = Literal["violation", "pass", "skipped", "not_applicable"]
VerdictStatus = Literal["excluded", "not_excluded"]

NOT_EXCLUDED_SUMMARY = "not excluded by implemented obstructions"


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_tag: str = Field(default=SCHEMA_TAG, alias="schema")

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True)


# --- verdicts ---------------------------------------------------------------

class RuleFinding(BaseModel):
    rule: str
    citation: str
    outcome: Outcome
    witness: Dict[str, Any] = Field(default_factory=dict)


class Verdict(Report):
    group: str
    sphere_dim: Literal[3, 4]
    order: int
    status: VerdictStatus
    summary: str
    trace: List[RuleFinding]

    @model_validator(mode="after")
    def _status_matches_trace(self):
        fired = any(f.outcome == "violation" for f in self.trace)
        if fired != (self.status == "excluded"):
            raise ValueError("status must be 'excluded' exactly when some finding is a violation")
        return self

    @property
    def violations(self) -> List[str]:
        return [f.rule for f in self.trace if f.outcome == "violation"]


class SurveyRow(BaseModel):
    label: str
    spec: str
    order: Optional[int] = None
    simple: Optional[bool] = None
    status: Literal["excluded", "not_excluded", "error"]
    violations: List[str] = Field(default_factory=list)
    error_message: Optional[str] = None
    verdict: Optional[Verdict] = None


class SurveyReport(Report):
    manifest: str
    sphere_dim: Literal[3, 4]
    rows: List[SurveyRow]
    survivors: List[str]
    simple_survivors: List[str]
    errors: List[str]
    summary: str


# --- analysis ---------------------------------------------------------------

class MetacyclicRecord(BaseModel):
    p: int
    q: int
    t: int
    a: str
    b: str
    b_order: int
    admissible_dim3: bool
    admissible_dim4: bool


class StructureRecord(BaseModel):
    order: int
    solvable: bool
    center_order: int
    fitting_order: int
    component_orders: List[int]
    e_subgroup_order: int
    class_count: int
    element_orders: Dict[str, int]


class AnalyzeReport(Report):
    group: str
    order: int
    degree: int
    class_count: int
    solvable: bool
    simple: bool
    center_order: int
    element_orders: Dict[str, int]
    ea_ranks: Dict[str, int]
    sectional_2_rank: Optional[int] = None
    sectional_2_rank_note: Optional[str] = None
    metacyclic: List[MetacyclicRecord]
    structure: StructureRecord


class DimFnReport(Report):
    p: int
    rank: int
    sphere_dim: Literal[3, 4]
    descent_axioms: bool
    uniform_color: bool
    top_cyclic_values: List[int]
    lattice: List[str]
    solution_count: int
    solutions: List[Dict[str, int]]
    profiles: List[Dict[str, int]]
    descent_free_counts: Optional[Dict[str, int]] = None


class ClassifyReport(Report):
    group: str
    order: int
    case: Literal["A", "B", "C", "OutsideList"]
    witness: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)


class TableReport(Report):
    source: str
    table: "AxiomTable"


# --- manifests and run configuration ----------------------------------------

class ManifestEntry(BaseModel):
    spec: str
    label: Optional[str] = None

    @property
    def name(self) -> str:
        return self.label or self.spec


class ManifestConfig(BaseModel):
    order_cap: Optional[PositiveInt] = None
    degree_cap: Optional[PositiveInt] = None
    two_group_cap: Optional[PositiveInt] = None
    sphere_dim: Optional[Literal[3, 4]] = None
    disabled_rules: List[str] = Field(default_factory=list)
    descent_axioms: Optional[bool] = None


class Manifest(BaseModel):
    name: str = "manifest"
    groups: List[ManifestEntry]
    config: ManifestConfig = Field(default_factory=ManifestConfig)

    @model_validator(mode="after")
    def _labels_unique(self):
        names = [entry.name for entry in self.groups]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate manifest labels: {duplicates}")
        return self


class RunConfig(BaseModel):
    order_cap: PositiveInt = DEFAULT_ORDER_CAP
    degree_cap: PositiveInt = DEFAULT_DEGREE_CAP
    two_group_cap: PositiveInt = DEFAULT_TWO_GROUP_CAP
    threads: PositiveInt = DEFAULT_THREADS
    output_format: Literal["json", "csv", "text"] = "json"
    sphere_dim: Literal[3, 4] = 4
    disabled_rules: List[str] = Field(default_factory=list)
    descent_axioms: bool = True
    axioms_path: Optional[str] = None

    @field_validator("disabled_rules")
    @classmethod
    def _known_rules(cls, value: List[str]) -> List[str]:
        known = set(RULE_IDS_SPHERE4) | set(RULE_IDS_SPHERE3)
        unknown = sorted(set(value) - known)
        if unknown:
            raise ValueError(f"unknown rule ids: {unknown}")
        return sorted(set(value))

    @model_validator(mode="after")
    def _some_rule_enabled(self):
        if not self.enabled_rules():
            raise ValueError(f"every rule for sphere dimension {self.sphere_dim} is disabled")
        return self

    def enabled_rules(self, sphere_dim: Optional[int] = None) -> List[str]:
        ids = RULE_IDS_SPHERE4 if (sphere_dim or self.sphere_dim) == 4 else RULE_IDS_SPHERE3
        return [r for r in ids if r not in self.disabled_rules]

    def merged_with(self, manifest: ManifestConfig, explicit: Dict[str, Any]) -> "RunConfig":
        """Layer a manifest config block under explicitly given CLI values."""
        data = self.model_dump()
        for key, value in manifest.model_dump().items():
            if key in explicit:
                continue
            if key == "disabled_rules":
                data[key] = sorted(set(data[key]) | set(value))
            elif value is not None:
                data[key] = value
        data.update(explicit)
        return RunConfig(**data)


# --- axiom table ------------------------------------------------------------

class _Provenanced(BaseModel):
    provenance: str
    machine_verified: bool = True
    note: Optional[str] = None

    @field_validator("provenance")
    @classmethod
    def _nonempty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("every table entry needs a provenance string")
        return value


class Sphere2Entry(_Provenanced):
    name: str
    description: str


class Fingerprint(BaseModel):
    order: int
    class_count: int
    element_orders: Dict[str, int]


class Sphere3Entry(_Provenanced):
    id: str
    kind: Literal["simple_allowlist", "quasisimple_allowlist", "fingerprint_exclusion", "rank_fact",
                  "informational"]
    description: str
    orders: List[int] = Field(default_factory=list)
    center_order: Optional[int] = None
    fingerprint: Optional[Fingerprint] = None


class ContainmentEntry(_Provenanced):
    """A curated containment, matched on order and simplicity plus whichever invariants are given."""

    group: str
    order: int
    simple: bool = True
    class_count: Optional[int] = None
    fingerprint: Optional[Fingerprint] = None
    contains: str
    obstruction: str


class NoteEntry(_Provenanced):
    topic: str
    text: str


class AxiomTable(BaseModel):
    version: str = SCHEMA_TAG
    sphere2_groups: List[Sphere2Entry]
    sphere3_verdicts: List[Sphere3Entry]
    containments: List[ContainmentEntry]
    notes: List[NoteEntry] = Field(default_factory=list)


TableReport.model_rebuild()

REPORT_MODELS = {
    "verdict": Verdict,
    "survey": SurveyReport,
    "analyze": AnalyzeReport,
    "dimfn": DimFnReport,
    "classify": ClassifyReport,
    "table": TableReport,
    "manifest": Manifest,
    "axioms": AxiomTable,
}
