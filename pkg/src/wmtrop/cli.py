"""Command-line surface: JSON in, deterministic JSON/text/DOT out.

Every command reads one JSON document (inline via --json or from a file
via --input), runs the corresponding computation, and prints a report

    {"schema_version": 1, "command": ..., "status": ..., "payload": ...,
     "diagnostics": [...]}

with keys sorted and no timestamps, so identical inputs give identical
bytes.  Exit code 0 means the check passed, 1 means it ran and failed,
2 means the input was malformed or the computation was inapplicable.

Rationals travel as decimal-free strings "a/b" (or "a"); matrices are
row-major arrays of arrays.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import monodromy as mono
from . import tropbundle as tb
from . import troplattice as tl
from .ratlin import DimensionMismatch, Matrix, Subspace

SCHEMA_VERSION = 1

COMMANDS = (
    "wmc-check",
    "monodromy-filtration",
    "weight-filtration",
    "trop-model",
    "trop-tower",
    "bundle-extend",
    "bundle-minlevel",
    "bundle-construct-f",
    "bundle-verify-f",
    "bundle-ample",
    "batch",
)


class SchemaError(ValueError):
    """Input does not match the command schema; names the offending field."""

    def __init__(self, fieldname: str, message: str):
        self.fieldname = fieldname
        super().__init__(f"field '{fieldname}': {message}")


# ---------------------------------------------------------------------------
# rationals and core types <-> JSON


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(value: Any, fieldname: str = "value") -> Fraction:
    if isinstance(value, bool):
        raise SchemaError(fieldname, "expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.match(text):
            raise SchemaError(fieldname, f"malformed rational {value!r} (want 'a' or 'a/b')")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise SchemaError(fieldname, f"malformed rational {value!r}") from None
    raise SchemaError(fieldname, f"expected int or 'a/b' string, got {type(value).__name__}")


def format_rational(x: Fraction) -> str:
    return str(x)


def parse_matrix(value: Any, fieldname: str = "matrix") -> Matrix:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise SchemaError(fieldname, "expected an array of arrays")
    if value and any(len(r) != len(value[0]) for r in value):
        raise SchemaError(fieldname, "ragged matrix")
    rows = [
        [parse_rational(x, f"{fieldname}[{i}][{j}]") for j, x in enumerate(r)]
        for i, r in enumerate(value)
    ]
    if not rows:
        raise SchemaError(fieldname, "matrix must have at least one row")
    return Matrix(rows)


def serialize_matrix(m: Matrix) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in m.row_tuples]


def parse_lattice(value: Any, fieldname: str = "lattice") -> tl.TropicalLattice:
    if not isinstance(value, dict):
        raise SchemaError(fieldname, "expected an object with 'rank' and 'generators'")
    rank = value.get("rank")
    if not isinstance(rank, int) or rank < 1:
        raise SchemaError(f"{fieldname}.rank", "expected a positive integer")
    gens = parse_matrix(value.get("generators"), f"{fieldname}.generators")
    if gens.rows != rank or gens.cols != rank:
        raise SchemaError(f"{fieldname}.generators", f"expected a {rank}x{rank} matrix")
    try:
        return tl.TropicalLattice(gens)
    except ValueError as err:
        raise SchemaError(f"{fieldname}.generators", str(err)) from None


def serialize_lattice(lat: tl.TropicalLattice) -> dict:
    return {"rank": lat.rank, "generators": serialize_matrix(lat.generators)}


def parse_bundle(value: Any, fieldname: str = "bundle") -> tb.BundleData:
    if not isinstance(value, dict):
        raise SchemaError(fieldname, "expected an object")
    lat = parse_lattice(value.get("lattice"), f"{fieldname}.lattice")
    sigma = parse_matrix(value.get("sigma"), f"{fieldname}.sigma")
    chi = value.get("chi")
    if not isinstance(chi, list):
        raise SchemaError(f"{fieldname}.chi", "expected an array of rationals")
    chi_vals = [parse_rational(x, f"{fieldname}.chi[{i}]") for i, x in enumerate(chi)]
    flag = value.get("abelian_part_ample", True)
    if not isinstance(flag, bool):
        raise SchemaError(f"{fieldname}.abelian_part_ample", "expected a boolean")
    try:
        return tb.BundleData(lat, sigma, chi_vals, flag)
    except ValueError as err:
        raise SchemaError(fieldname, str(err)) from None


def serialize_bundle(b: tb.BundleData) -> dict:
    return {
        "lattice": serialize_lattice(b.lattice),
        "sigma": serialize_matrix(b.sigma),
        "chi": [format_rational(v) for v in b.chi_vals],
        "abelian_part_ample": b.abelian_part_ample,
    }


def parse_section(value: Any, fieldname: str = "section") -> tb.TropicalSection:
    if not isinstance(value, dict):
        raise SchemaError(fieldname, "expected an object")
    slopes = value.get("slopes")
    if not isinstance(slopes, list) or not all(
        isinstance(s, int) and not isinstance(s, bool) for s in slopes
    ):
        raise SchemaError(f"{fieldname}.slopes", "expected an array of integers")
    inc = value.get("slope_increment", 0)
    if not isinstance(inc, int) or isinstance(inc, bool):
        raise SchemaError(f"{fieldname}.slope_increment", "expected an integer")
    try:
        return tb.TropicalSection(
            alpha=parse_rational(value.get("alpha"), f"{fieldname}.alpha"),
            slopes=tuple(slopes),
            base_value=parse_rational(value.get("base_value", 0), f"{fieldname}.base_value"),
            slope_increment=inc,
            value_increment=parse_rational(
                value.get("value_increment", 0), f"{fieldname}.value_increment"
            ),
        )
    except ValueError as err:
        raise SchemaError(fieldname, str(err)) from None


def serialize_section(s: tb.TropicalSection) -> dict:
    return {
        "alpha": format_rational(s.alpha),
        "slopes": list(s.slopes),
        "base_value": format_rational(s.base_value),
        "slope_increment": s.slope_increment,
        "value_increment": format_rational(s.value_increment),
    }


def serialize_subspace(s: Subspace) -> dict:
    return {"dim": s.dim, "basis": serialize_matrix(s.basis) if s.dim else []}


def serialize_filtration(f: mono.Filtration) -> dict:
    return {
        "ambient_dim": f.ambient_dim,
        "lo": f.lo,
        "hi": f.hi,
        "pieces": {str(j): serialize_subspace(f.at(j)) for j in range(f.lo, f.hi + 1)},
    }


def serialize_dual_graph(g: tl.DualGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [[a, b, m] for a, b, m in g.edges],
    }


# ---------------------------------------------------------------------------
# jobs and reports


@dataclass(frozen=True)
class JobSpec:
    command: str
    payload: dict
    fmt: str = "json"
    tol: Fraction = mono.DEFAULT_TOL


@dataclass(frozen=True)
class Report:
    command: str
    status: str  # pass | fail | error
    payload: dict = field(default_factory=dict)
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "status": self.status,
            "payload": self.payload,
            "diagnostics": list(self.diagnostics),
        }

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "error": 2}[self.status]


def _get(payload: dict, key: str):
    if key not in payload:
        raise SchemaError(key, "missing required field")
    return payload[key]


def _get_int(payload: dict, key: str, minimum: int | None = None, default=None) -> int:
    if key not in payload:
        if default is not None:
            return default
        raise SchemaError(key, "missing required field")
    v = payload[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(key, "expected an integer")
    if minimum is not None and v < minimum:
        raise SchemaError(key, f"expected an integer >= {minimum}")
    return v


# ---------------------------------------------------------------------------
# command handlers


def _cmd_monodromy_filtration(payload: dict, tol: Fraction) -> Report:
    n_mat = parse_matrix(_get(payload, "n"), "n")
    try:
        op = mono.NilpotentOperator(n_mat)
    except mono.NotNilpotentError as err:
        return Report("monodromy-filtration", "error", diagnostics=(str(err),))
    fil = mono.monodromy_filtration(op)
    return Report(
        "monodromy-filtration",
        "pass",
        payload={
            "nilpotency_index": op.nilpotency_index,
            "jumps": fil.jump_indices(),
            "filtration": serialize_filtration(fil),
        },
    )


def _cmd_weight_filtration(payload: dict, tol: Fraction) -> Report:
    phi = parse_matrix(_get(payload, "phi"), "phi")
    q = _get_int(payload, "q", minimum=2)
    try:
        frob = mono.FrobeniusData(phi, q)
    except ValueError as err:
        return Report("weight-filtration", "error", diagnostics=(str(err),))
    try:
        decomp = mono.weight_decomposition(frob, tol)
    except mono.NotPureError as err:
        return Report("weight-filtration", "error", diagnostics=(str(err),))
    fil = mono.weight_filtration(decomp)
    return Report(
        "weight-filtration",
        "pass",
        payload={
            "weights": {str(j): serialize_subspace(s) for j, s in sorted(decomp.components.items())},
            "filtration": serialize_filtration(fil),
        },
    )


def _cmd_wmc_check(payload: dict, tol: Fraction) -> Report:
    n_mat = parse_matrix(_get(payload, "n"), "n")
    phi = parse_matrix(_get(payload, "phi"), "phi")
    q = _get_int(payload, "q", minimum=2)
    i = _get_int(payload, "i")
    try:
        op = mono.NilpotentOperator(n_mat)
        frob = mono.FrobeniusData(phi, q)
        report = mono.check_wmc(op, frob, i, tol)
    except (mono.NotNilpotentError, ValueError, DimensionMismatch) as err:
        return Report("wmc-check", "error", diagnostics=(str(err),))
    diags = tuple(json.dumps(v, sort_keys=True) for v in report.violations)
    return Report(
        "wmc-check",
        "pass" if report.passed else "fail",
        payload={
            "commutation_ok": report.commutation_ok,
            "filtrations_equal": report.filtrations_equal,
            "graded_weights": {
                str(j): [[w, m] for w, m in pairs]
                for j, pairs in sorted(report.graded_weights.items())
            },
            "violations": report.violations,
        },
        diagnostics=diags,
    )


def _parse_quotient_model(payload: dict) -> tl.QuotientModel:
    lat = parse_lattice(_get(payload, "lattice"), "lattice")
    alpha = tl.CellWidth(parse_rational(_get(payload, "alpha"), "alpha"))
    p = _get_int(payload, "p", minimum=2, default=2)
    level = _get_int(payload, "level", minimum=0, default=0)
    try:
        return tl.QuotientModel(lat, alpha, p, level)
    except ValueError as err:
        raise SchemaError("alpha", str(err)) from None


def _cmd_trop_model(payload: dict, tol: Fraction) -> Report:
    model = _parse_quotient_model(payload)
    count = tl.quotient_components(model)
    desc = tl.descriptor(model)
    out: dict[str, Any] = {
        "components": count,
        "descriptor": desc.canonical_string(),
    }
    diags: tuple[str, ...] = ()
    if model.lattice.rank == 1:
        out["dual_graph"] = serialize_dual_graph(tl.dual_graph(model))
    else:
        diags = ("dual graph omitted: only rank-1 special fibers are drawn",)
    return Report("trop-model", "pass", payload=out, diagnostics=diags)


def _cmd_trop_tower(payload: dict, tol: Fraction) -> Report:
    model = _parse_quotient_model(payload)
    op = _get(payload, "op")
    cell = _get_int(payload, "cell", minimum=0)
    try:
        if op == "project":
            projected = tl.tower_project(cell, model)
            out = {
                "op": "project",
                "cell": cell,
                "level_from": model.level + 1,
                "level_to": model.level,
                "projected": projected,
            }
        elif op == "preimages":
            steps = _get_int(payload, "steps", minimum=0, default=1)
            pre = tl.tower_preimages(cell, model, steps)
            out = {
                "op": "preimages",
                "cell": cell,
                "level_from": model.level,
                "level_to": model.level + steps,
                "preimages": pre,
            }
        else:
            raise SchemaError("op", "expected 'project' or 'preimages'")
    except (tl.UnsupportedRankError, tl.InvalidResidueError) as err:
        return Report("trop-tower", "error", diagnostics=(str(err),))
    return Report("trop-tower", "pass", payload=out)


def _cmd_bundle_ample(payload: dict, tol: Fraction) -> Report:
    b = parse_bundle(_get(payload, "bundle"), "bundle")
    s = tb.form_matrix(b)
    minors = [format_rational(s.leading_minor(k).det()) for k in range(1, b.rank + 1)]
    ample = tb.ample_check(b)
    return Report(
        "bundle-ample",
        "pass" if ample else "fail",
        payload={"ample": ample, "form": serialize_matrix(s), "leading_minors": minors},
        diagnostics=() if ample else ("induced form is not positive definite",),
    )


def _cmd_bundle_extend(payload: dict, tol: Fraction) -> Report:
    b = parse_bundle(_get(payload, "bundle"), "bundle")
    alpha = tl.CellWidth(parse_rational(_get(payload, "alpha"), "alpha"))
    try:
        ok = tb.extends_to(b, alpha)
    except tb.ModelUndefinedError as err:
        return Report("bundle-extend", "error", diagnostics=(str(err),))
    diags: tuple[str, ...] = ()
    if not ok and "p" in payload:
        p = _get_int(payload, "p", minimum=2)
        try:
            level = tb.minimal_level(b, alpha, p)
            diags = (f"minimal level {level}",)
        except tb.NoPLevelError as err:
            diags = (str(err),)
    return Report(
        "bundle-extend",
        "pass" if ok else "fail",
        payload={"extends": ok, "alpha": format_rational(alpha.alpha)},
        diagnostics=diags,
    )


def _cmd_bundle_minlevel(payload: dict, tol: Fraction) -> Report:
    b = parse_bundle(_get(payload, "bundle"), "bundle")
    alpha = tl.CellWidth(parse_rational(_get(payload, "alpha"), "alpha"))
    p = _get_int(payload, "p", minimum=2)
    try:
        level = tb.minimal_level(b, alpha, p)
    except tb.ModelUndefinedError as err:
        return Report("bundle-minlevel", "error", diagnostics=(str(err),))
    except tb.NoPLevelError as err:
        return Report(
            "bundle-minlevel",
            "fail",
            payload={"offending_primes": list(err.offending_primes)},
            diagnostics=(str(err),),
        )
    return Report(
        "bundle-minlevel",
        "pass",
        payload={"level": level, "width": format_rational(alpha.alpha / p**level)},
    )


def _cmd_bundle_construct_f(payload: dict, tol: Fraction) -> Report:
    b = parse_bundle(_get(payload, "bundle"), "bundle")
    alpha = tl.CellWidth(parse_rational(_get(payload, "alpha"), "alpha"))
    try:
        section = tb.construct_f(b, alpha)
    except (tb.ModelUndefinedError, ValueError) as err:
        return Report("bundle-construct-f", "error", diagnostics=(str(err),))
    return Report("bundle-construct-f", "pass", payload={"section": serialize_section(section)})


def _cmd_bundle_verify_f(payload: dict, tol: Fraction) -> Report:
    b = parse_bundle(_get(payload, "bundle"), "bundle")
    section = parse_section(_get(payload, "section"), "section")
    try:
        report = tb.verify_section(b, section)
    except ValueError as err:
        return Report("bundle-verify-f", "error", diagnostics=(str(err),))
    faces = [
        {
            "position": format_rational(f.position),
            "left_slope": f.left_slope,
            "right_slope": f.right_slope,
            "slope_difference": f.slope_difference,
            "value": format_rational(f.left_value),
            "continuous": f.continuous,
        }
        for f in report.faces
    ]
    return Report(
        "bundle-verify-f",
        "pass" if report.ok else "fail",
        payload={"ok": report.ok, "faces": faces},
        diagnostics=report.failures,
    )


def _cmd_batch(payload: dict, tol: Fraction) -> Report:
    jobs = _get(payload, "jobs")
    if not isinstance(jobs, list):
        raise SchemaError("jobs", "expected an array of job objects")
    reports = []
    worst = "pass"
    rank = {"pass": 0, "fail": 1, "error": 2}
    for idx, entry in enumerate(jobs):
        if not isinstance(entry, dict) or "command" not in entry:
            raise SchemaError(f"jobs[{idx}]", "expected an object with 'command' and 'input'")
        sub_tol = tol
        if "tol" in entry:
            sub_tol = parse_rational(entry["tol"], f"jobs[{idx}].tol")
        sub = run(JobSpec(entry["command"], entry.get("input", {}), tol=sub_tol))
        reports.append(sub.to_dict())
        if rank[sub.status] > rank[worst]:
            worst = sub.status
    return Report("batch", worst, payload={"reports": reports})


_HANDLERS: dict[str, Callable[[dict, Fraction], Report]] = {
    "wmc-check": _cmd_wmc_check,
    "monodromy-filtration": _cmd_monodromy_filtration,
    "weight-filtration": _cmd_weight_filtration,
    "trop-model": _cmd_trop_model,
    "trop-tower": _cmd_trop_tower,
    "bundle-extend": _cmd_bundle_extend,
    "bundle-minlevel": _cmd_bundle_minlevel,
    "bundle-construct-f": _cmd_bundle_construct_f,
    "bundle-verify-f": _cmd_bundle_verify_f,
    "bundle-ample": _cmd_bundle_ample,
    "batch": _cmd_batch,
}


def run(job: JobSpec) -> Report:
    """Dispatch a job to its handler; schema problems become error reports."""
    if job.command not in _HANDLERS:
        return Report(job.command, "error", diagnostics=(f"unknown command '{job.command}'",))
    if not isinstance(job.payload, dict):
        return Report(job.command, "error", diagnostics=("field 'input': expected an object",))
    version = job.payload.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        return Report(
            job.command,
            "error",
            diagnostics=(f"field 'schema_version': unsupported version {version!r}",),
        )
    try:
        return _HANDLERS[job.command](job.payload, job.tol)
    except SchemaError as err:
        return Report(job.command, "error", diagnostics=(str(err),))
    except DimensionMismatch as err:
        return Report(job.command, "error", diagnostics=(str(err),))


# ---------------------------------------------------------------------------
# rendering


def render_json(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def render_text(report: Report) -> str:
    lines = [f"{report.command}: {report.status}"]
    for key in sorted(report.payload):
        lines.append(f"  {key}: {json.dumps(report.payload[key], sort_keys=True)}")
    for d in report.diagnostics:
        lines.append(f"  ! {d}")
    return "\n".join(lines) + "\n"


def render_dot(report: Report) -> str | None:
    graph = report.payload.get("dual_graph")
    if graph is None:
        return None
    lines = ["graph special_fiber {"]
    for v in graph["vertices"]:
        lines.append(f'  v{v} [label="P1 {v}"];')
    for a, b, mult in graph["edges"]:
        for _ in range(mult):
            lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str) -> tuple[str, Report]:
    if fmt == "json":
        return render_json(report), report
    if fmt == "text":
        return render_text(report), report
    if fmt == "dot":
        dot = render_dot(report)
        if dot is None:
            err = Report(
                report.command,
                "error",
                diagnostics=("dot output is only available for commands returning a dual graph",),
            )
            return render_json(err), err
        return dot, report
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wmtrop",
        description="Exact weight/monodromy filtration checks and tropical models",
    )
    parser.add_argument("command", choices=COMMANDS)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="path to a JSON input file")
    source.add_argument("--json", dest="inline", help="inline JSON input")
    parser.add_argument(
        "--format", choices=("json", "dot", "text"), default="json", help="output format"
    )
    parser.add_argument(
        "--tol",
        default=None,
        help="tolerance for root-modulus checks, as a rational string (default 1/10^20)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.inline is not None:
        raw = args.inline
    else:
        try:
            with open(args.input, "r", encoding="utf-8") as handle:
                raw = handle.read()
        except OSError as err:
            report = Report(args.command, "error", diagnostics=(f"cannot read input: {err}",))
            sys.stdout.write(render_json(report))
            return report.exit_code
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as err:
        report = Report(args.command, "error", diagnostics=(f"invalid JSON: {err}",))
        sys.stdout.write(render_json(report))
        return report.exit_code
    tol = mono.DEFAULT_TOL
    if args.tol is not None:
        try:
            tol = parse_rational(args.tol, "tol")
            if tol <= 0:
                raise SchemaError("tol", "tolerance must be positive")
        except SchemaError as err:
            report = Report(args.command, "error", diagnostics=(str(err),))
            sys.stdout.write(render_json(report))
            return report.exit_code
    report = run(JobSpec(args.command, payload, fmt=args.format, tol=tol))
    text, report = render(report, args.format)
    sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
