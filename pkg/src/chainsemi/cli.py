"""The ``chainsemi`` command line

Every command builds a pydantic report and hands it to `emit`, which
writes it to stdout (or ``--output``) as JSON, CSV or text. Progress and
diagnostics go to stderr through logging, so the data stream can be piped.

Exit codes: 0 when everything requested passed, 1 when a check or
comparison failed (the failing report is still written), and 2 for bad
usage or bad input.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from pydantic import BaseModel
from pydantic_core import to_jsonable_python

from . import closure as closure_engine
from . import enumeration, families, maximal, suite
from .exceptions import ChainsemiError, DomainError, ParameterError
from .factorize import factorize_iord, factorize_pord, observations
from .families import FamilyLabel, Side
from .reports import (
    ClassifyReport,
    ClosureReport,
    CountReport,
    ElementListReport,
    Envelope,
    FamilyReport,
    Quantity,
    SuiteReport,
)
from .settings import ChainsemiSettings, get_settings
from .transforms import (
    ChainMap,
    SemigroupClass,
    classify,
    fix_and_kernel,
    member_of,
    opd,
    ord_degree,
)
from .validation import validate_report

logger = logging.getLogger(__name__)

SAMPLE_SIZE = 10

_handler: Optional[logging.Handler] = None


def configure_logging(verbosity: int) -> None:
    """Send package logs to stderr at a level set by -v / -q."""
    global _handler
    package_logger = logging.getLogger("chainsemi")
    if _handler is not None:
        package_logger.removeHandler(_handler)
    level = {
        -2: logging.CRITICAL,
        -1: logging.ERROR,
        0: logging.WARNING,
        1: logging.INFO,
    }.get(max(-2, min(verbosity, 2)), logging.DEBUG)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setLevel(level)
    _handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(_handler)
    package_logger.setLevel(level)


class Options(BaseModel):
    """What the group options leave behind for the subcommands."""

    settings: ChainsemiSettings
    format: str
    output: Optional[str] = None


def _flatten(item: Any) -> Dict[str, Any]:
    data = to_jsonable_python(item)
    return {
        key: json.dumps(value) if isinstance(value, (dict, list)) else value
        for key, value in data.items()
    }


def _rows(result: Any) -> List[Dict[str, Any]]:
    if isinstance(result, list):
        return [_flatten(item) for item in result]
    if isinstance(result, SuiteReport):
        return [_flatten(c.model_copy(update={"log": []})) for c in result.checks]
    return [_flatten(result)]


def render(command: str, result: Any, fmt: str) -> str:
    if fmt == "json":
        document = Envelope(command=command, result=result).to_json_dict()
        validate_report(document)
        return json.dumps(document, indent=2)
    rows = _rows(result)
    if fmt == "csv":
        buffer = io.StringIO()
        fields = list(rows[0]) if rows else []
        writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buffer.getvalue().rstrip("\n")
    return "\n\n".join(
        "\n".join(f"{key}: {value}" for key, value in row.items()) for row in rows
    )


def emit(options: Options, command: str, result: Any) -> None:
    text = render(command, result, options.format)
    if options.output:
        Path(options.output).write_text(text + "\n")
    else:
        click.echo(text)


class ChainsemiGroup(click.Group):
    """Turn package errors raised by bad input into usage errors (exit 2)."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except ChainsemiError as e:
            raise click.UsageError(f"{type(e).__name__}: {e}", ctx) from e


@click.group(cls=ChainsemiGroup)
@click.option("--workers", type=click.IntRange(min=1), help="Worker threads")
@click.option("--cap", type=click.IntRange(min=1), help="Largest n to enumerate")
@click.option("-v", "--verbose", count=True, help="More logging on stderr")
@click.option("-q", "--quiet", count=True, help="Less logging on stderr")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv", "text"]),
    default="json",
    show_default=True,
)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write here")
@click.pass_context
def main(
    ctx: click.Context,
    workers: Optional[int],
    cap: Optional[int],
    verbose: int,
    quiet: int,
    fmt: str,
    output: Optional[str],
) -> None:
    """Order-decreasing oriented partial transformation semigroups."""
    configure_logging(verbose - quiet)
    ctx.obj = Options(
        settings=get_settings(workers=workers, cap=cap), format=fmt, output=output
    )


def _parse_map(text: str) -> ChainMap:
    return ChainMap.parse(text)


@main.command("classify")
@click.option("--map", "text", required=True, help="e.g. n=4:[1,0,3,2]")
@click.pass_obj
def classify_command(options: Options, text: str) -> None:
    """Class flags, fixed points and kernel of one map."""
    a = _parse_map(text)
    profile = classify(a)
    fix, kernel = fix_and_kernel(a)
    report = ClassifyReport(
        map=a,
        **profile.model_dump(),
        fix=sorted(fix),
        kernel=[list(block) for block in kernel],
        classes=[label.value for label in SemigroupClass if profile.member_of(label)],
        opd=opd(a) if a.rank and member_of(a, SemigroupClass.POPD) else None,
        ord=ord_degree(a) if member_of(a, SemigroupClass.PORD_STAR) else None,
    )
    emit(options, "classify", report)


@main.command("family")
@click.option(
    "--label", type=click.Choice([f.value for f in FamilyLabel]), required=True
)
@click.option("--n", type=int, required=True)
@click.option("--r", type=int)
@click.option("--k", type=int)
@click.pass_obj
def family_command(
    options: Options, label: str, n: int, r: Optional[int], k: Optional[int]
) -> None:
    """Members of a generator family, with the closed-form size."""
    built = families.family(n, r, FamilyLabel(label), k, options.settings)
    emit(
        options,
        "family",
        FamilyReport(
            label=label,
            n=n,
            r=r,
            k=k,
            count=len(built),
            formula_count=built.formula_count,
            elements=built.elements,
        ),
    )


def _finish(passed: bool) -> None:
    if not passed:
        sys.exit(1)


@main.command("count")
@click.option(
    "--quantity", type=click.Choice([q.value for q in Quantity]), required=True
)
@click.option("--n", type=int, required=True)
@click.option("--r", type=int)
@click.option(
    "--label",
    type=click.Choice([c.value for c in SemigroupClass]),
    default=SemigroupClass.PD.value,
    show_default=True,
    help="Class for class-size",
)
@click.option(
    "--side",
    type=click.Choice([s.value for s in Side]),
    default="pord",
    show_default=True,
)
@click.pass_obj
def count_command(
    options: Options,
    quantity: str,
    n: int,
    r: Optional[int],
    label: str,
    side: str,
) -> None:
    """Compare an enumerated count with its closed form."""
    settings = options.settings
    kind = Quantity(quantity)
    if kind == Quantity.IDEMPOTENTS:
        if r is None:
            raise ParameterError("--r is required for idempotents")
        report = enumeration.count_idempotents(n, r, settings)
    elif kind == Quantity.RN:
        report = enumeration.max_reversing_image(n, settings)
    elif kind == Quantity.HNR:
        if r is None:
            raise ParameterError("--r is required for Hnr")
        built = len(families.family(n, r, FamilyLabel.H_NR, settings=settings))
        report = CountReport.compare(
            built, families.h_count(n, r), n=n, r=r, quantity=kind, label="H_n^r"
        )
    elif kind == Quantity.CLASS_SIZE:
        report = enumeration.count_class_size(n, SemigroupClass(label), r, settings)
    elif r is None or r == n:
        report = maximal.whole_monoid_rank_check(n, Side(side), settings)
    else:
        report = maximal.necessity_rank_check(n, r, Side(side), settings)
    emit(options, "count", report)
    _finish(report.match)


@main.command("hn-table")
@click.option("--n-max", type=int, default=30, show_default=True)
@click.pass_obj
def hn_table_command(options: Options, n_max: int) -> None:
    """|H_n^r| for every small-r pair up to n-max."""
    emit(options, "hn-table", enumeration.count_H_table(n_max))


def read_generators(spec: str) -> List[ChainMap]:
    """Generators from a file of maps, one per line, or a family spec.

    A family spec is ``LABEL:n[:r[:k]]``, e.g. ``CLAIMED_PORD:5:4``.
    """
    path = Path(spec)
    if path.is_file():
        lines = path.read_text().splitlines()
        return [
            ChainMap.parse(line)
            for line in lines
            if line.strip() and not line.lstrip().startswith("#")
        ]
    label, *numbers = spec.split(":")
    try:
        values = [int(v) for v in numbers]
        family_label = FamilyLabel(label)
    except ValueError as e:
        raise ParameterError(
            f"'{spec}' is neither a file nor a family spec LABEL:n[:r[:k]]"
        ) from e
    if not 1 <= len(values) <= 3:
        raise ParameterError(f"'{spec}' should be LABEL:n[:r[:k]]")
    values += [None] * (3 - len(values))  # type: ignore[list-item]
    n, r, k = values
    return families.family(n, r, family_label, k).elements


@main.command("closure")
@click.option("--gens", required=True, help="File of maps, or LABEL:n[:r[:k]]")
@click.option("--target", help="Class spec CLASS:n[:r], e.g. PORD:5:4")
@click.pass_obj
def closure_command(options: Options, gens: str, target: Optional[str]) -> None:
    """The subsemigroup generated by a set of maps."""
    generators = read_generators(gens)
    if not generators:
        raise DomainError("No generators given")
    result = closure_engine.closure(generators, settings=options.settings)
    generated = None
    if target is not None:
        spec = closure_engine.ClassSpec.parse(target)
        if spec.n != result.n:
            raise ParameterError(
                f"Target {spec} is on n={spec.n}, generators on {result.n}"
            )
        generated = result == spec.semigroup(options.settings)
    report = ClosureReport(
        n=result.n,
        size=len(result),
        generator_count=len(result.generator_codes),
        target=target,
        generated_target=generated,
        sample=result.elements[:SAMPLE_SIZE],
    )
    emit(options, "closure", report)
    _finish(generated is not False)


@main.command("undecomposables")
@click.option(
    "--class",
    "label",
    type=click.Choice([c.value for c in SemigroupClass]),
    required=True,
)
@click.option("--n", type=int, required=True)
@click.option("--r", type=int)
@click.pass_obj
def undecomposables_command(
    options: Options, label: str, n: int, r: Optional[int]
) -> None:
    """The undecomposable elements of an enumerated class."""
    spec = closure_engine.ClassSpec(label=SemigroupClass(label), n=n, r=r)
    semigroup = spec.semigroup(options.settings)
    found = closure_engine.undecomposables(semigroup, options.settings)
    emit(
        options,
        "undecomposables",
        ElementListReport(
            description=f"undecomposables of {spec}", count=len(found), elements=found
        ),
    )


def _parse_params(text: str) -> tuple:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError as e:
        raise ParameterError(f"--verify expects p,q[,s], got '{text}'") from e
    if len(values) not in (2, 3):
        raise ParameterError(f"--verify expects p,q[,s], got '{text}'")
    return values


def _params(d: maximal.MaximalDescriptor) -> tuple:
    variant = d.variant
    if isinstance(variant, maximal.AdjoinIdentity):
        variant = variant.inner
    names = ("p", "q", "s")
    return tuple(getattr(variant, name) for name in names if hasattr(variant, name))


@main.command("maximal")
@click.option("--side", type=click.Choice([s.value for s in Side]), required=True)
@click.option("--n", type=int, required=True)
@click.option("--r", type=int, required=True, help="Use r = n for the whole monoid")
@click.option("--list", "list_only", is_flag=True, help="List descriptors only")
@click.option(
    "--verify-all", "verify_every", is_flag=True, help="Verify every descriptor"
)
@click.option("--verify", "params", help="Verify descriptors with parameters p,q[,s]")
@click.pass_obj
def maximal_command(
    options: Options,
    side: str,
    n: int,
    r: int,
    list_only: bool,
    verify_every: bool,
    params: Optional[str],
) -> None:
    """Claimed maximal subsemigroups, listed or verified."""
    ambient = maximal.Ambient(side=Side(side), n=n, r=r)
    descriptors = maximal.list_descriptors(ambient)
    if list_only or not (verify_every or params):
        emit(
            options,
            "maximal",
            {
                "ambient": str(ambient),
                "count": len(descriptors),
                "descriptors": [
                    {"name": d.name(), "descriptor": d} for d in descriptors
                ],
            },
        )
        return
    if params is not None:
        wanted = _parse_params(params)
        descriptors = [d for d in descriptors if _params(d) == wanted]
        if not descriptors:
            raise ParameterError(f"No descriptor of {ambient} has parameters {wanted}")
    reports = [maximal.verify_maximal(d, options.settings) for d in descriptors]
    emit(options, "maximal", reports)
    _finish(all(report.passed for report in reports))


@main.command("factorize")
@click.option("--map", "text", required=True, help="e.g. n=7:[0,0,3,0,5,0,4]")
@click.option("--r", type=int, required=True)
@click.option(
    "--side",
    type=click.Choice([s.value for s in Side]),
    default="pord",
    show_default=True,
)
@click.pass_obj
def factorize_command(options: Options, text: str, r: int, side: str) -> None:
    """Split a map of PORD(n,r)* or IORD(n,r)* as beta gamma delta."""
    a = _parse_map(text)
    f = factorize_pord(a, r) if Side(side) == Side.PORD else factorize_iord(a, r)
    emit(options, "factorize", {"factorization": f, "observations": observations(f)})


@main.command("verify-all")
@click.option("--n", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--fail-check", hidden=True, help="Force the named check to fail")
@click.pass_obj
def verify_all_command(options: Options, n: int, fail_check: Optional[str]) -> None:
    """Run every verification check at scale n."""
    report = suite.run_suite(n, fail_check, options.settings)
    emit(options, "verify-all", report)
    _finish(report.passed)
