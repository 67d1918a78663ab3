import json

import pytest
from pydantic import ValidationError

from spheregate.constructors import build
from spheregate.errors import AxiomTableError, ManifestError
from spheregate.permgroup import center, normalizer, sylow
from spheregate.rules import (CITATIONS, acts_on_two_sphere, check, check_sphere3, check_sphere4,
                              cyclic_normal_kernels, load_axiom_table, load_manifest, survey)
from spheregate.schemas import NOT_EXCLUDED_SUMMARY, Fingerprint, RunConfig

from .conftest import sym


def finding(verdict, rule):
    return next(f for f in verdict.trace if f.rule == rule)


def assert_meta_failures_are_real(verdict, rule, sphere_dim):
    """Re-derive every failing multiplier with plain modular arithmetic."""
    for record in finding(verdict, rule).witness["failing"]:
        p, q, t = record["p"], record["q"], record["t"]
        assert pow(t, q, p) == 1
        if sphere_dim == 4:
            assert (t * t) % p not in (1, p - 1)
            assert record["t_squared_mod_p"] == (t * t) % p
        else:
            assert t % p not in (1, p - 1)


def test_trace_order_and_citations(table):
    verdict = check_sphere4(build("Alt(5)"), table=table)
    assert [f.rule for f in verdict.trace] == ["R-RANK", "R-SECT", "R-META", "R-BOREL", "R-CENTRAL", "R-TABLE"]
    assert all(f.citation == CITATIONS[f.rule] for f in verdict.trace)
    verdict = check_sphere3(build("Alt(5)"), table=table)
    assert [f.rule for f in verdict.trace] == ["R-RANK3", "R-META3", "R-TABLE3"]


@pytest.mark.parametrize("text", ["Alt(5)", "Alt(6)", "PSL2(4)", "SL2(5)"])
def test_not_excluded_on_sphere4(table, text):
    verdict = check_sphere4(build(text), table=table)
    assert verdict.status == "not_excluded"
    assert verdict.summary == NOT_EXCLUDED_SUMMARY
    assert verdict.violations == []


def test_psl2_7_fails_metacyclic_rule(table):
    verdict = check_sphere4(build("PSL2(7)"), table=table)
    assert verdict.status == "excluded"
    assert "R-META" in verdict.violations
    failing = finding(verdict, "R-META").witness["failing"]
    assert failing and all(record["t_squared_mod_p"] == 4 for record in failing)
    assert_meta_failures_are_real(verdict, "R-META", 4)


@pytest.mark.parametrize("text,p,equation", [
    ("PSL2(8)", 2, "4 + 6r = 7 n(H)"),
    ("PSL2(16)", 2, "4 + 14r = 15 n(H)"),
    ("PSL2(25)", 5, "4 + 5r = 6 n(H)"),
])
def test_borel_exclusions(table, text, p, equation):
    verdict = check_sphere4(build(text), table=table)
    assert verdict.status == "excluded"
    assert "R-BOREL" in verdict.violations
    records = [r for r in finding(verdict, "R-BOREL").witness["lattices"] if r["p"] == p]
    assert records[0]["equation"] == equation
    assert records[0]["uniform_solutions"] == []
    assert records[0]["solutions"] == 0


def test_rank_four_certificate_is_recorded(table):
    verdict = check_sphere4(build("EA(2,4)"), table=table)
    record = finding(verdict, "R-BOREL").witness["lattices"][0]
    assert record["rank"] == 4
    assert record["solutions"] > 0
    assert all(len(colors) == 5 for colors in record["zero_value_colors"])


def test_borel_checks_every_class_of_maximal_subgroups(table):
    G = build("Sym(4)")
    records = [r for r in finding(check_sphere4(G, table=table), "R-BOREL").witness["lattices"] if r["p"] == 2]
    assert [r["rank"] for r in records] == [2, 2]
    assert len({tuple(r["generators"]) for r in records}) == 2
    assert all(r["solutions"] > 0 for r in records)


def test_rank_rule(table):
    verdict = check_sphere4(build("PSL2(27)"), table=table)
    assert "R-RANK" in verdict.violations
    rank = finding(verdict, "R-RANK").witness
    assert rank["ranks"]["3"] == 3
    assert rank["failing"][0]["limit"] == 2


def test_central_involution_sphere2_branch(table):
    G = build("SL2(5)")
    z = [g for g in center(G).elements if g != G.identity][0]
    assert [K.order for K in cyclic_normal_kernels(G, z)] == [2]
    record = finding(check_sphere4(G, table=table), "R-CENTRAL").witness["involutions"][0]
    assert record["sphere2"]["family"] == "icosahedral"
    assert record["sphere2"]["quotient_order"] == 60


@pytest.mark.parametrize("text", ["SL2(7)", "SL2(9)"])
def test_central_involution_exclusions(table, text):
    verdict = check_sphere4(build(text), table=table)
    assert "R-CENTRAL" in verdict.violations
    record = finding(verdict, "R-CENTRAL").witness["involutions"][0]
    assert record["sphere2"] is None and record["sphere0"] is None


def test_central_involution_not_applicable(table):
    assert finding(check_sphere4(build("Alt(6)"), table=table), "R-CENTRAL").outcome == "not_applicable"


@pytest.mark.parametrize("text,expected", [
    ("Alt(5)", "icosahedral"),
    ("Sym(4)", "polyhedral"),
    ("Perms[(0,1,2,3);(0,2)]", "cyclic-dihedral"),
    ("DirProd(Alt(5),Perms[(0,1)])", "icosahedral-times-two"),
    ("Alt(6)", None),
    ("Sym(5)", None),
])
def test_two_sphere_predicate(table, text, expected):
    assert acts_on_two_sphere(build(text), table) == expected


def test_two_sphere_predicate_respects_the_table(table):
    only_icosahedral = table.model_copy(update={
        "sphere2_groups": [e for e in table.sphere2_groups if e.name == "icosahedral"]})
    assert acts_on_two_sphere(sym(4), only_icosahedral) is None
    assert acts_on_two_sphere(build("Alt(5)"), only_icosahedral) == "icosahedral"


@pytest.mark.parametrize("text,rules", [
    ("Alt(7)", {"R-META", "R-TABLE"}),
    ("PSL3(3)", {"R-META", "R-TABLE"}),
    ("SL2(7)", {"R-META", "R-CENTRAL"}),
    ("PGL2(9)", {"R-BOREL"}),
])
def test_desk_exclusions(table, text, rules):
    verdict = check_sphere4(build(text), table=table)
    assert rules <= set(verdict.violations)
    if "R-META" in rules:
        assert_meta_failures_are_real(verdict, "R-META", 4)


def test_containment_records_provenance(table):
    record = finding(check_sphere4(build("Alt(7)"), table=table), "R-TABLE").witness["matches"][0]
    assert record["group"] == "A7"
    assert record["machine_verified"] is True
    assert record["provenance"]


@pytest.mark.parametrize("text", ["PSL2(7)", "SL2(7)", "Alt(7)"])
def test_exclusion_passes_up_from_a_subgroup(table, text):
    G = build(text)
    H = normalizer(G, sylow(G, 7))
    assert H.order % 21 == 0
    assert check(H, 4, table=table).status == "excluded"
    assert check(G, 4, table=table).status == "excluded"


def test_containments_check_class_counts(table):
    assert finding(check_sphere4(build("PSL3(3)"), table=table), "R-TABLE").witness["matches"][0]["group"] == "L3(3)"
    a7 = next(e for e in table.containments if e.group == "A7")
    impostor = table.model_copy(update={"containments": [a7.model_copy(update={"class_count": 10})]})
    assert finding(check_sphere4(build("Alt(7)"), table=impostor), "R-TABLE").outcome == "pass"
    fingerprinted = table.model_copy(update={"containments": [a7.model_copy(update={"fingerprint": Fingerprint(
        order=2520, class_count=9, element_orders={"1": 1, "2": 105, "3": 350, "4": 630, "5": 504, "6": 210,
                                                   "7": 720})})]})
    assert finding(check_sphere4(build("Alt(7)"), table=fingerprinted), "R-TABLE").outcome == "violation"


@pytest.mark.parametrize("text,status,rule", [
    ("Alt(5)", "not_excluded", None),
    ("PSL2(7)", "excluded", "R-META3"),
    ("Alt(6)", "excluded", "R-TABLE3"),
    ("SL2(7)", "excluded", "R-META3"),
    ("SL2(5)", "not_excluded", None),
])
def test_sphere3(table, text, status, rule):
    verdict = check_sphere3(build(text), table=table)
    assert verdict.status == status
    if rule:
        assert rule in verdict.violations
    if rule == "R-META3":
        assert_meta_failures_are_real(verdict, "R-META3", 3)


def test_a6_sphere3_table_entries(table):
    matches = finding(check_sphere3(build("Alt(6)"), table=table), "R-TABLE3").witness["matches"]
    assert {m["id"] for m in matches} == {"simple-only-a5", "no-a6"}


def test_disabled_rule_is_reported_as_skipped(table):
    config = RunConfig(disabled_rules=["R-META"])
    verdict = check_sphere4(build("PSL2(7)"), config, table)
    meta = finding(verdict, "R-META")
    assert meta.outcome == "skipped"
    assert meta.witness == {"reason": "disabled"}
    assert verdict.status == "not_excluded"


def test_sectional_rank_cap_skips_the_rule(table):
    verdict = check_sphere4(build("EA(2,4)"), RunConfig(two_group_cap=8), table)
    assert finding(verdict, "R-SECT").outcome == "skipped"


def test_config_validation():
    with pytest.raises(ValidationError):
        RunConfig(disabled_rules=["R-BOGUS"])
    with pytest.raises(ValidationError):
        RunConfig(disabled_rules=["R-RANK3", "R-META3", "R-TABLE3"], sphere_dim=3)


def test_verdicts_are_deterministic(table):
    G = build("PSL2(8)")
    assert check(G, 4, table=table).to_json() == check(G, 4, table=table).to_json()


def test_survey_keeps_going_after_a_bad_row(table):
    report = survey(["Alt(5)", "PSL2(6)", "PSL2(7)"], table=table)
    assert [row.status for row in report.rows] == ["not_excluded", "error", "excluded"]
    assert report.errors == ["PSL2(6)"]
    assert report.survivors == ["Alt(5)"]
    assert report.simple_survivors == ["Alt(5)"]
    assert "prime power" in report.rows[1].error_message


def test_survey_cap_rows_are_errors(table):
    report = survey(["Alt(6)", "Alt(5)"], config=RunConfig(order_cap=100), table=table)
    assert [row.status for row in report.rows] == ["error", "not_excluded"]


def test_survey_threads_do_not_change_the_report(table):
    specs = ["Alt(5)", "PSL2(7)", "PSL2(8)", "SL2(5)", "Alt(6)"]
    one = survey(specs, config=RunConfig(threads=1), table=table)
    four = survey(specs, config=RunConfig(threads=4), table=table)
    assert one.to_json() == four.to_json()


def test_bundled_axiom_table(table):
    assert {e.name for e in table.sphere2_groups} == {"cyclic-dihedral", "polyhedral", "icosahedral",
                                                      "icosahedral-times-two"}
    assert all(e.provenance for e in table.containments)
    assert not next(e for e in table.containments if e.group == "M11").machine_verified


def test_axiom_table_errors(tmp_path):
    with pytest.raises(AxiomTableError):
        load_axiom_table(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(AxiomTableError):
        load_axiom_table(broken)
    unsourced = tmp_path / "unsourced.json"
    unsourced.write_text(json.dumps({
        "sphere2_groups": [{"name": "icosahedral", "description": "A5", "provenance": " "}],
        "sphere3_verdicts": [],
        "containments": [],
    }), encoding="utf-8")
    with pytest.raises(AxiomTableError):
        load_axiom_table(unsourced)


@pytest.mark.parametrize("name,count", [("gorenstein_desk", 15), ("witnesses", 7), ("psl2_scan", 15)])
def test_bundled_manifests(name, count):
    manifest = load_manifest(name)
    assert manifest.name == name
    assert len(manifest.groups) == count


def test_manifest_errors(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "missing.json")
    duplicate = tmp_path / "duplicate.json"
    duplicate.write_text(json.dumps({"groups": [{"spec": "Alt(5)", "label": "x"}, {"spec": "Alt(6)", "label": "x"}]}),
                         encoding="utf-8")
    with pytest.raises(ManifestError):
        load_manifest(duplicate)


def test_unparseable_manifest_entry_becomes_an_error_row(tmp_path, table):
    path = tmp_path / "bad_spec.json"
    path.write_text(json.dumps({"groups": [{"spec": "PSL2(6)"}, {"spec": "Alt(5)"}]}), encoding="utf-8")
    manifest = load_manifest(path)
    report = survey(manifest, table=table)
    assert [row.status for row in report.rows] == ["error", "not_excluded"]
    assert "prime power" in report.rows[0].error_message
