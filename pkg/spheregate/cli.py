"""
Command-line interface for spheregate.

Exit codes: 0 on success whatever the verdict, 2 for parse, parameter or
usage errors, 3 when a cap is exceeded, 1 for I/O or configuration
failures (missing manifest, invalid axiom table).
"""

import csv
import io
import json
import logging
from functools import wraps
from typing import Any, Dict, Optional

import click
from pydantic import ValidationError
from sympy import divisors, isprime, primefactors

from .config import axioms_path
from .constructors import build
from .errors import AxiomTableError, CapExceeded, ManifestError, NonPrime, SphereGateError
from .fixdim import CspOptions, descent_free_rank_scan, enumerate_dimfns, involution_profile, lattice_abstract
from .permgroup import conj_classes, element_order_counts, format_perm, is_nonabelian_simple, is_solvable, center
from .rules import check, load_axiom_table, load_manifest, survey
from .schemas import (REPORT_MODELS, AnalyzeReport, ClassifyReport, DimFnReport, MetacyclicRecord, RunConfig,
                      SurveyReport, TableReport, Verdict)
from .structure import analyze_structure, classify_structure
from .subgroups import find_metacyclic, max_ea_rank, multiplier_admissible, sectional_2_rank

logger = logging.getLogger(__name__)

EXIT_IO = 1
EXIT_USAGE = 2
EXIT_CAP = 3

SURVEY_COLUMNS = ["label", "spec", "order", "simple", "status", "violations", "error_message"]


def _fail(code: int, message: str) -> None:
    logger.error(f"❌ {message}")
    click.echo(json.dumps({"status": "error", "error_message": message}), err=True)
    raise SystemExit(code)


def guarded(command):
    """Map package errors onto the exit-code policy."""

    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except CapExceeded as e:
            _fail(EXIT_CAP, str(e))
        except (ManifestError, AxiomTableError, OSError) as e:
            _fail(EXIT_IO, str(e))
        except SphereGateError as e:
            _fail(EXIT_USAGE, str(e))
        except ValidationError as e:
            _fail(EXIT_USAGE, f"invalid configuration: {e}")

    return wrapper


def run_options(command):
    options = [
        click.option("--order-cap", type=click.IntRange(min=1), default=None, help="Largest group order to build"),
        click.option("--degree-cap", type=click.IntRange(min=1), default=None, help="Largest permutation degree"),
        click.option("--two-group-cap", type=click.IntRange(min=1), default=None,
                     help="Largest Sylow 2-subgroup for the sectional-rank search"),
        click.option("--threads", type=click.IntRange(min=1), default=None, help="Survey worker count"),
        click.option("--format", "output_format", type=click.Choice(["json", "csv", "text"]), default=None,
                     help="Output format"),
        click.option("--no-rule", "no_rule", multiple=True, help="Disable a rule by id (repeatable)"),
        click.option("--no-descent-axioms", is_flag=True, default=False, help="Drop the rank descent axioms"),
        click.option("--axioms", "axioms", type=click.Path(), default=None, help="Axiom table path"),
        click.option("--out", "out", type=click.Path(), default=None, help="Write the report to a file"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _explicit(params: Dict[str, Any]) -> Dict[str, Any]:
    explicit: Dict[str, Any] = {}
    for key in ("order_cap", "degree_cap", "two_group_cap", "threads", "output_format"):
        if params.get(key) is not None:
            explicit[key] = params[key]
    if params.get("no_rule"):
        explicit["disabled_rules"] = list(params["no_rule"])
    if params.get("no_descent_axioms"):
        explicit["descent_axioms"] = False
    if params.get("axioms"):
        explicit["axioms_path"] = params["axioms"]
    if params.get("sphere_dim") is not None:
        explicit["sphere_dim"] = params["sphere_dim"]
    return explicit


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")
        logger.info(f"✅ Report written to {out}")
    else:
        click.echo(text)


def _require_json_or_text(config: RunConfig, command: str) -> None:
    if config.output_format == "csv":
        raise click.UsageError(f"csv output is only available for survey, not {command}")


# --- rendering --------------------------------------------------------------

def render_verdict_text(verdict: Verdict) -> str:
    lines = [f"{verdict.group} (order {verdict.order}) on S^{verdict.sphere_dim}: {verdict.summary}"]
    for finding in verdict.trace:
        lines.append(f"  {finding.rule:<10} {finding.outcome}")
    return "\n".join(lines)


def render_survey_csv(report: SurveyReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SURVEY_COLUMNS)
    for row in report.rows:
        writer.writerow([row.label, row.spec, "" if row.order is None else row.order,
                         "" if row.simple is None else str(row.simple).lower(), row.status,
                         ";".join(row.violations), row.error_message or ""])
    return buffer.getvalue().rstrip("\n")


def render_survey_text(report: SurveyReport) -> str:
    lines = [f"{report.manifest} on S^{report.sphere_dim}: {report.summary}"]
    for row in report.rows:
        detail = ", ".join(row.violations) if row.violations else (row.error_message or "")
        lines.append(f"  {row.label:<24} {row.status:<13} {detail}".rstrip())
    lines.append(f"  survivors: {', '.join(report.survivors) or '-'}")
    return "\n".join(lines)


# --- commands ---------------------------------------------------------------

@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging")
@click.option("-q", "--quiet", is_flag=True, help="Warnings and errors only")
def cli(verbose: bool, quiet: bool):
    """Decide which finite groups are excluded from acting on homology 3- and 4-spheres."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif quiet:
        logging.getLogger().setLevel(logging.WARNING)


def _analyze(spec: str, config: RunConfig) -> AnalyzeReport:
    G = build(spec, order_cap=config.order_cap, degree_cap=config.degree_cap)
    primes = primefactors(G.order)
    ranks = {str(p): max_ea_rank(G, p)[0] for p in primes}
    sect: Optional[int] = None
    note: Optional[str] = None
    try:
        sect = sectional_2_rank(G, config.two_group_cap)
    except CapExceeded as e:
        note = str(e)
    metacyclic = []
    for p in primes:
        if p == 2:
            continue
        for q in divisors(p - 1):
            if q < 2 or G.order % q:
                continue
            for w in find_metacyclic(G, p, q):
                metacyclic.append(MetacyclicRecord(p=w.p, q=w.q, t=w.t, a=format_perm(w.a), b=format_perm(w.b),
                                                   b_order=w.b_order,
                                                   admissible_dim3=multiplier_admissible(w.t, w.p, 3),
                                                   admissible_dim4=multiplier_admissible(w.t, w.p, 4)))
    return AnalyzeReport(
        group=G.name or spec,
        order=G.order,
        degree=G.degree,
        class_count=len(conj_classes(G)),
        solvable=is_solvable(G),
        simple=is_nonabelian_simple(G),
        center_order=center(G).order,
        element_orders={str(k): v for k, v in element_order_counts(G).items()},
        ea_ranks=ranks,
        sectional_2_rank=sect,
        sectional_2_rank_note=note,
        metacyclic=metacyclic,
        structure=analyze_structure(G).to_record(),
    )


@cli.command()
@click.argument("spec")
@run_options
@guarded
def analyze(spec: str, **params):
    """Structure and subgroup report for a group spec."""
    config = RunConfig(**_explicit(params))
    _require_json_or_text(config, "analyze")
    report = _analyze(spec, config)
    if config.output_format == "text":
        text = "\n".join([
            f"{report.group}: order {report.order}, degree {report.degree}, {report.class_count} classes",
            f"  solvable={report.solvable} simple={report.simple} center={report.center_order}",
            f"  fitting={report.structure.fitting_order} components={report.structure.component_orders}",
            f"  ea_ranks={report.ea_ranks} sectional_2_rank={report.sectional_2_rank}",
        ] + [f"  H({m.p}:{m.q}) t={m.t} dim3={m.admissible_dim3} dim4={m.admissible_dim4}"
             for m in report.metacyclic])
    else:
        text = report.to_json()
    _emit(text, params.get("out"))


@cli.command(name="check")
@click.argument("spec")
@click.option("--sphere-dim", type=click.Choice(["3", "4"]), default="4", help="Homology sphere dimension")
@run_options
@guarded
def check_command(spec: str, sphere_dim: str, **params):
    """Verdict and rule trace for one group."""
    params["sphere_dim"] = int(sphere_dim)
    config = RunConfig(**_explicit(params))
    _require_json_or_text(config, "check")
    table = load_axiom_table(config.axioms_path)
    G = build(spec, order_cap=config.order_cap, degree_cap=config.degree_cap)
    verdict = check(G, config.sphere_dim, config, table)
    _emit(render_verdict_text(verdict) if config.output_format == "text" else verdict.to_json(), params.get("out"))


@cli.command(name="survey")
@click.argument("manifest")
@click.option("--sphere-dim", type=click.Choice(["3", "4"]), default=None, help="Homology sphere dimension")
@run_options
@guarded
def survey_command(manifest: str, sphere_dim: Optional[str], **params):
    """Verdict table over a manifest (a path, or the name of a bundled manifest)."""
    params["sphere_dim"] = int(sphere_dim) if sphere_dim else None
    loaded = load_manifest(manifest)
    config = RunConfig().merged_with(loaded.config, _explicit(params))
    table = load_axiom_table(config.axioms_path)
    report = survey(loaded, config.sphere_dim, config, table)
    if config.output_format == "csv":
        text = render_survey_csv(report)
    elif config.output_format == "text":
        text = render_survey_text(report)
    else:
        text = report.to_json()
    _emit(text, params.get("out"))


@cli.command()
@click.option("--p", "p", type=int, required=True, help="Prime")
@click.option("--rank", type=click.IntRange(min=1, max=5), required=True, help="Rank of (Z_p)^rank")
@click.option("--sphere-dim", type=click.Choice(["3", "4"]), default="4", help="Homology sphere dimension")
@click.option("--uniform-color", is_flag=True, help="One colour per subgroup dimension")
@click.option("--no-descent-axioms", is_flag=True, help="Drop the rank descent axioms and scan ranks 1..rank")
@click.option("--out", type=click.Path(), default=None, help="Write the report to a file")
@guarded
def dimfn(p: int, rank: int, sphere_dim: str, uniform_color: bool, no_descent_axioms: bool, out: Optional[str]):
    """Every admissible fixed-point dimension function on (Z_p)^rank."""
    if not isprime(p):
        raise NonPrime(f"{p} is not prime")
    m = int(sphere_dim)
    L = lattice_abstract(p, rank)
    if uniform_color:
        L.colors = list(L.dims)
    opts = CspOptions(use_descent_axioms=not no_descent_axioms)
    solutions = enumerate_dimfns(L, m, opts)
    report = DimFnReport(
        p=p,
        rank=rank,
        sphere_dim=m,
        descent_axioms=not no_descent_axioms,
        uniform_color=uniform_color,
        top_cyclic_values=list(opts.cyclic_values(m)),
        lattice=[L.label(i) for i in range(len(L))],
        solution_count=len(solutions),
        solutions=[f.to_json() for f in solutions],
        profiles=[{str(k): v for k, v in profile.items()} for profile in involution_profile(solutions)],
        descent_free_counts=({str(k): v for k, v in descent_free_rank_scan(p, rank, m).items()}
                             if no_descent_axioms else None),
    )
    _emit(report.to_json(), out)


@cli.command()
@click.argument("spec")
@run_options
@guarded
def classify(spec: str, **params):
    """Place a nonsolvable group in case A, B or C, or outside the list."""
    config = RunConfig(**_explicit(params))
    G = build(spec, order_cap=config.order_cap, degree_cap=config.degree_cap)
    case = classify_structure(G)
    report = ClassifyReport(group=G.name or spec, order=G.order, case=case.tag, witness=case.witness,
                            notes=case.notes)
    _emit(report.to_json(), params.get("out"))


@cli.command()
@click.option("--axioms", type=click.Path(), default=None, help="Axiom table path")
@click.option("--format", "output_format", type=click.Choice(["json", "text"]), default="json")
@guarded
def table(axioms: Optional[str], output_format: str):
    """List the curated axiom table with provenance."""
    source = axioms_path(axioms)
    loaded = load_axiom_table(source)
    if output_format == "text":
        lines = []
        for entry in loaded.sphere2_groups:
            lines.append(f"S2   {entry.name:<24} {entry.provenance}")
        for entry in loaded.sphere3_verdicts:
            lines.append(f"S3   {entry.id:<24} {entry.provenance}")
        for entry in loaded.containments:
            flag = "" if entry.machine_verified else " [not machine-verified]"
            lines.append(f"CONT {entry.group:<24} {entry.provenance}{flag}")
        for entry in loaded.notes:
            lines.append(f"NOTE {entry.topic:<24} {entry.text}")
        click.echo("\n".join(lines))
        return
    click.echo(TableReport(source=str(source), table=loaded).to_json())


@cli.command()
def schema():
    """Print the JSON Schema of every report model."""
    schemas = {name: model.model_json_schema(by_alias=True) for name, model in sorted(REPORT_MODELS.items())}
    click.echo(json.dumps(schemas, indent=2, sort_keys=True))


def main() -> None:
    cli()
