"""Command-line interface: ``frobsub <command> [--format human|json|tsv]``.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 on usage or input errors.  Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction

import click

from . import coxeter, gwcounts
from .errors import FrobsubError, InputError, NotQuasihomogeneousError, UnsupportedCodimensionError
from .exactcore import PuiseuxPolynomial, format_scalar
from .frobenius import FrobeniusSpec, MetricMatrix, StructureTensor, euler_check, wdvv_check
from .submanifold import SubmanifoldMap, analyze, gauss_codazzi_check, second_fundamental_form
from .verdict import Verdict

FORMATS = ("human", "json", "tsv")
ELIDE_TERMS = 10
_SAFE_INT = 2**53


class UsageError(InputError):
    pass


# ---------------------------------------------------------------------------
# serialization


def jsonable(value):
    """Exact values become strings; containers keep their order."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= _SAFE_INT else value
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, PuiseuxPolynomial):
        return str(value)
    if isinstance(value, StructureTensor):
        return jsonable(dict(sorted(value.nonzero().items())))
    if isinstance(value, MetricMatrix):
        return jsonable(value.to_json())
    if isinstance(value, Verdict):
        return {"name": value.name, "ok": value.ok, "details": jsonable(value.details)}
    if isinstance(value, dict):
        return {_key(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(x + 1) if isinstance(x, int) else str(x) for x in k)
    return str(k)


def _elide(v):
    """Human output only: cut long polynomials down to their first terms."""
    if isinstance(v, PuiseuxPolynomial) and len(v.terms) > ELIDE_TERMS:
        shown = PuiseuxPolynomial(v.variables, dict(sorted(v.terms.items())[:ELIDE_TERMS]))
        return f"{shown} + ... ({len(v.terms) - ELIDE_TERMS} more terms)"
    if isinstance(v, Verdict):
        return {"name": v.name, "ok": v.ok, "details": _elide(v.details)}
    if isinstance(v, dict):
        return {k: _elide(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_elide(x) for x in v]
    return v


def _human_value(v) -> str:
    v = jsonable(_elide(v))
    return json.dumps(v) if isinstance(v, (dict, list)) else str(v)


def emit(report: dict, fmt: str) -> str:
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    if fmt == "json":
        return json.dumps(jsonable(report), indent=2) + "\n"
    table = report.get("table")
    if fmt == "tsv":
        if table is None:
            raise UsageError(f"command {report.get('command')!r} has no tabular output; use --format human or json")
        lines = ["\t".join(table["columns"])]
        lines += ["\t".join(str(jsonable(c)) for c in row) for row in table["rows"]]
        return "\n".join(lines) + "\n"
    lines = []
    for k, v in report.items():
        if k == "table":
            continue
        lines.append(f"{k}: {_human_value(v)}")
    if table is not None:
        cells = [table["columns"]] + [[str(jsonable(c)) for c in row] for row in table["rows"]]
        widths = [max(len(r[i]) for r in cells) for i in range(len(table["columns"]))]
        for row in cells:
            lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def _finish(ctx: click.Context, report: dict) -> None:
    fmt = ctx.obj["format"]
    try:
        out = emit(report, fmt)
    except UsageError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(2)
    click.echo(out, nl=False)
    ctx.exit(0 if report.get("ok", True) else 1)


# ---------------------------------------------------------------------------
# input helpers


def _load_spec(name_or_path: str) -> FrobeniusSpec:
    if os.path.isfile(name_or_path):
        try:
            with open(name_or_path) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read spec {name_or_path}: {exc}") from exc
        return FrobeniusSpec.from_json(data)
    return coxeter.get_entry(name_or_path).spec


def _load_map(path: str) -> SubmanifoldMap:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read map {path}: {exc}") from exc
    return SubmanifoldMap.from_json(data)


class _Group(click.Group):
    """Maps library exceptions onto the exit-code contract."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except FrobsubError as exc:
            click.echo(f"check failed: {exc}", err=True)
            sys.exit(1)


# ---------------------------------------------------------------------------
# commands


@click.group(cls=_Group)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="human", show_default=True)
@click.pass_context
def main(ctx: click.Context, fmt: str) -> None:
    """Exact checks for Frobenius manifolds, their submanifolds and Gromov-Witten tables."""
    ctx.ensure_object(dict)
    ctx.obj["format"] = fmt


@main.group()
def catalog() -> None:
    """Coxeter prepotential catalog."""


@catalog.command("list")
@click.pass_context
def catalog_list(ctx):
    rows = [[e.name, " ".join(map(str, e.exponents)), e.h, e.m] for e in coxeter.load_catalog().values()]
    _finish(ctx, {"command": "catalog list", "ok": True, "table": {"columns": ["name", "exponents", "h", "dim"], "rows": rows}})


@main.group()
def check() -> None:
    """WDVV and quasihomogeneity checks on a catalog entry or spec file."""


@check.command("wdvv")
@click.argument("name")
@click.pass_context
def check_wdvv(ctx, name):
    spec = _load_spec(name)
    v = wdvv_check(spec)
    _finish(ctx, {"command": "check wdvv", "spec": spec.name, "ok": v.ok, "details": v.details})


@check.command("euler")
@click.argument("name")
@click.pass_context
def check_euler(ctx, name):
    spec = _load_spec(name)
    report = {"command": "check euler", "spec": spec.name}
    try:
        dF = euler_check(spec)
    except NotQuasihomogeneousError as exc:
        report.update(ok=False, error=str(exc), offending=[str(m) for m in exc.offending])
    else:
        report.update(ok=True, d_F=dF, weights=[d for d, _ in spec.euler], q=spec.q_exponents())
    _finish(ctx, report)


@main.group()
def submanifold() -> None:
    """Induced structures on embedded submanifolds."""


@submanifold.command("analyze")
@click.option("--spec", "spec_arg", required=True, help="catalog name or spec JSON file")
@click.option("--map", "map_path", required=True, type=click.Path(), help="submanifold map JSON file")
@click.pass_context
def submanifold_analyze(ctx, spec_arg, map_path):
    """Induced metric, product, Euler field and second fundamental form on a map."""
    spec = _load_spec(spec_arg)
    smap = _load_map(map_path)
    info = analyze(smap, spec)
    residuals = {k: v for k, v in info.tangency_residuals.items() if any(v)}
    report = {
        "command": "submanifold analyze",
        "spec": spec.name,
        "eta_N": info.eta_N,
        "c_N": info.c_N,
        "natural": info.natural,
        "tangency_residuals": residuals,
        "E_N": info.E_N,
        "euler_tangent": info.euler_tangent,
    }
    ok = True
    try:
        gc = gauss_codazzi_check(second_fundamental_form(smap, spec), info.eta_N)
    except UnsupportedCodimensionError as exc:
        report["gauss_codazzi"] = f"not applicable: {exc}"
    else:
        report["gauss_codazzi"] = gc
        ok = gc.ok
    report["ok"] = ok
    _finish(ctx, report)


@main.command("natural-roots")
@click.argument("group")
@click.option("--verify-points", is_flag=True, help="evaluate the conditions at the tabulated natural points")
@click.pass_context
def natural_roots(ctx, group, verify_points):
    """Naturality conditions on the I2(h) family inside GROUP, and their roots."""
    entry = coxeter.get_entry(group)
    if entry.m < 3:
        raise InputError(f"{group} has dimension {entry.m}; the two-dimensional family needs dimension >= 3")
    conds = coxeter.naturality_conditions(entry)
    report = {"command": "natural-roots", "group": entry.name, "symbols": list(entry.k_symbols()),
              "conditions": [str(c) for c in conds]}
    ok = True
    if entry.name in coxeter.PRINTED_CONDITIONS:
        match = coxeter.compare_conditions(conds, coxeter.printed_conditions(entry))
        report["matches_tabulated"] = match
        ok &= match
    if verify_points:
        pts = coxeter.PRINTED_POINTS.get(entry.name)
        if pts is None:
            raise InputError(f"no tabulated natural points for {group}")
        rows = coxeter.verify_natural_points(entry, pts, conds)
        ok &= all(r["zero"] for r in rows)
        report["table"] = {
            "columns": [*entry.k_symbols(), "zero"],
            "rows": [[*r["point"], r["zero"]] for r in rows],
        }
    report["ok"] = ok
    _finish(ctx, report)


@main.group()
def gw() -> None:
    """Genus-zero Gromov-Witten tables."""


@gw.command("cp2")
@click.option("--max-n", type=click.IntRange(min=1), required=True)
@click.option("--check-ode", is_flag=True, help="check the phi-ODE and solve it independently")
@click.option("--ode-form", type=click.Choice(gwcounts.ODE_FORMS), default="wdvv", show_default=True)
@click.option("--radius-probe", is_flag=True, help="ratio-test estimate of x0 and the obstruction residual")
@click.pass_context
def gw_cp2(ctx, max_n, check_ode, ode_form, radius_probe):
    """Rational plane curve counts N_1..N_MAX_N."""
    table = gwcounts.cp2_counts(max_n)
    report = {"command": "gw cp2", "max_n": max_n}
    ok = True
    if check_ode:
        v = gwcounts.cp2_phi_ode_check(table, ode_form)
        solved = gwcounts.cp2_counts_from_ode(max_n)
        report["ode"] = v
        report["ode_solution_matches_recursion"] = solved == table
        ok &= v.ok and solved == table
    if radius_probe:
        p = gwcounts.cp2_radius_probe(max_n)
        report["radius_probe"] = {"x0": p.x0, "residual": p.residual, "phi": list(p.phi),
                                  "induced_coefficient": p.induced_coefficient}
    report["ok"] = ok
    report["table"] = {"columns": ["n", "N_n"], "rows": [[n, str(table[n])] for n in range(1, max_n + 1)]}
    _finish(ctx, report)


@gw.command("p1p1")
@click.option("--max-n", type=click.IntRange(min=1), required=True)
@click.option("--cross-check", is_flag=True, help="check all four bidegree recursions")
@click.option("--contract", "do_contract", is_flag=True, help="row sums N_n = sum_r N_{n-r,r}")
@click.option("--report-contracted-recursion", is_flag=True, help="evaluate the contracted recursion (informational)")
@click.pass_context
def gw_p1p1(ctx, max_n, cross_check, do_contract, report_contracted_recursion):
    """Bidegree counts on P1 x P1 with a + b <= MAX_N."""
    table = gwcounts.p1p1_counts(max_n)
    report = {"command": "gw p1p1", "max_n": max_n}
    ok = True
    if cross_check:
        v = gwcounts.p1p1_cross_check(table)
        report["cross_check"] = v
        ok &= v.ok
    contracted = gwcounts.contract(table)
    if do_contract:
        cmp = gwcounts.compare_table2(contracted)
        report["table2"] = {"match": cmp.ok, "mismatches": [r for r in cmp.details["rows"] if not r["match"]]}
        ok &= cmp.ok
    if report_contracted_recursion:
        report["contracted_recursion"] = gwcounts.contracted_recursion_report(contracted)
    report["ok"] = ok
    if do_contract:
        rows = [[n, str(contracted[n])] for n in range(1, max_n + 1)]
        report["table"] = {"columns": ["n", "N_n"], "rows": rows}
    else:
        rows = [[a, b, str(v)] for (a, b), v in sorted(table.values.items(), key=lambda kv: (sum(kv[0]), kv[0]))]
        report["table"] = {"columns": ["a", "b", "N_ab"], "rows": rows}
    _finish(ctx, report)


@main.command("nested-chain")
@click.pass_context
def nested_chain(ctx):
    """Natural I2(h) planes in B3 and H3, and the unity line inside them."""
    v = coxeter.nested_chain_check()
    _finish(ctx, {"command": "nested-chain", "ok": v.ok, "details": v.details})


if __name__ == "__main__":  # pragma: no cover
    main()
