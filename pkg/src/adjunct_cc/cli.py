"""Command-line surface.

Exit codes: 0 success (and, for run-diff, traces equal), 1 parse/type errors
or a trace divergence, 2 an internal invariant violation. Human summaries go
to stderr, machine-readable reports to the paths given. ANSI color on stderr
is disabled when ADJUNCT_CC_COLOR is set to `0`, `no`, or `never`, or when
stderr is not a terminal.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import __version__
from .cast import parse, print_source
from .depend import analyze
from .effects import EffectDatabase, EffectFileError, builtin_database, load
from .errors import CompileError, TrapError
from .interp import first_divergence, run, trace_equal
from .lil import rewrite_all_lil
from .proggen import ENTRY as GEN_ENTRY, generate_program
from .transform import InternalInvariantError, transform

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2


def _color_enabled() -> bool:
    flag = os.environ.get("ADJUNCT_CC_COLOR", "").lower()
    if flag in ("0", "no", "never", "off"):
        return False
    if flag in ("1", "yes", "always", "on"):
        return True
    return sys.stderr.isatty()


def _say(message: str, color: str | None = None) -> None:
    if color and _color_enabled():
        message = f"\033[{color}m{message}\033[0m"
    print(message, file=sys.stderr)


def _load_effects(path: str | None) -> EffectDatabase:
    if path is None:
        return builtin_database()
    return load(path)


def _read_source(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read(), path)


@click.group()
@click.version_option(version=__version__, prog_name="adjunct-cc")
def main() -> None:
    """Pointer disaggregation toolkit for a C subset."""


@main.command("transform")
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False),
              help="Output path (single input only); default <input>.adjunct.c")
@click.option("--effects", "effects_path", type=click.Path(exists=True),
              help="Effect whitelist JSON, layered over the built-ins")
@click.option("--enable-lil", is_flag=True,
              help="Run the list-of-lists restructuring first")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              help="Write a JSON report")
def cmd_transform(inputs, out, effects_path, enable_lil, report_path) -> int:
    """Disaggregate decidable pointers; write rewritten sources."""
    if out and len(inputs) > 1:
        raise click.UsageError("--out requires exactly one input")
    try:
        db = _load_effects(effects_path)
    except EffectFileError as exc:
        _say(str(exc), "31")
        sys.exit(EXIT_INPUT)
    report = {"tool": "adjunct-cc", "files": []}
    code = EXIT_OK
    for path in sorted(inputs):
        try:
            tu = _read_source(path)
        except CompileError as exc:
            _say(exc.format(), "31")
            code = max(code, EXIT_INPUT)
            continue
        lil_matches = []
        try:
            if enable_lil:
                tu, lil_matches = rewrite_all_lil(tu)
            tu, plan, diag = transform(tu, db)
        except InternalInvariantError as exc:
            _say(f"{path}: internal: {exc}", "31")
            sys.exit(EXIT_INTERNAL)
        out_path = out or f"{path.removesuffix('.c')}.adjunct.c"
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(print_source(tu))
        report["files"].append({
            "path": path,
            "output": out_path,
            "rewritten_sites": diag.rewritten_sites,
            "backed_off": [{
                "function": b.function,
                "variable": b.variable,
                "verdict": b.verdict,
                "site": str(b.span),
            } for b in diag.backed_off],
            "adjuncts": plan.mapping,
            "lil_matches": [m.describe() for m in lil_matches],
        })
        sites = sum(diag.rewritten_sites.values())
        _say(f"{path}: {sites} sites rewritten, "
             f"{len(diag.backed_off)} pointers backed off -> {out_path}",
             "32" if not diag.backed_off else "33")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    sys.exit(code)


@main.command("analyze")
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--effects", "effects_path", type=click.Path(exists=True))
@click.option("--pre-transform", is_flag=True,
              help="Run the pointer disaggregation before analyzing")
@click.option("--enable-lil", is_flag=True,
              help="Run the list-of-lists restructuring first")
@click.option("--report", "report_path", type=click.Path(dir_okay=False))
@click.option("--figure", "figure_path", type=click.Path(dir_okay=False),
              help="Render a verdict summary figure (PNG)")
def cmd_analyze(inputs, effects_path, pre_transform, enable_lil,
                report_path, figure_path) -> int:
    """Per-loop parallel/serial/unknown verdicts with evidence."""
    try:
        db = _load_effects(effects_path)
    except EffectFileError as exc:
        _say(str(exc), "31")
        sys.exit(EXIT_INPUT)
    report = {"tool": "adjunct-cc", "files": []}
    code = EXIT_OK
    for path in sorted(inputs):
        try:
            tu = _read_source(path)
        except CompileError as exc:
            _say(exc.format(), "31")
            code = max(code, EXIT_INPUT)
            continue
        try:
            if enable_lil:
                tu, _ = rewrite_all_lil(tu)
            if pre_transform:
                tu, _, _ = transform(tu, db)
        except InternalInvariantError as exc:
            _say(f"{path}: internal: {exc}", "31")
            sys.exit(EXIT_INTERNAL)
        result = analyze(tu, db)
        report["files"].append({
            "path": path,
            "pre_transform": bool(pre_transform),
            "loops": [{
                "function": lv.function,
                "line": lv.span.line,
                "column": lv.span.column,
                "verdict": lv.verdict,
                "evidence": lv.evidence,
            } for lv in result.loops],
        })
        for lv in result.loops:
            color = {"parallel": "32", "serial": "31", "unknown": "33"}[lv.verdict]
            _say(f"{path}:{lv.span.line} [{lv.function}] {lv.verdict}", color)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    if figure_path:
        from .report import render_analyze_figure
        render_analyze_figure(report, figure_path)
    sys.exit(code)


@main.command("scan")
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@click.option("--json", "json_path", type=click.Path(dir_okay=False),
              help="Write the applicability report as JSON")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False),
              help="Write the applicability table as CSV")
@click.option("--figure", "figure_path", type=click.Path(dir_okay=False),
              help="Render a per-file bar chart (PNG)")
def cmd_scan(paths, json_path, csv_path, figure_path) -> int:
    """Applicability statistics: candidates, constraining uses, exemptions."""
    from .scan import scan
    report = scan(list(paths))
    obj = {"tool": "adjunct-cc", **report.to_obj()}
    t = report.total
    _say(f"{len(report.files)} files, {t.loc} LoC: "
         f"{t.applicable} applicable, {t.non_applicable} non-applicable, "
         f"{sum(t.exemptions.values())} exempt")
    for f in report.files:
        if f.parse_failed:
            _say(f"{f.path}: flagged ({f.error})", "33")
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
    if csv_path:
        from .report import write_scan_csv
        write_scan_csv(obj, csv_path)
    if figure_path:
        from .report import render_scan_figure
        render_scan_figure(obj, figure_path)
    sys.exit(EXIT_OK)


@main.command("run-diff")
@click.argument("sources", nargs=-1,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--entry", default="main", show_default=True,
              help="Entry function (must take only scalar parameters)")
@click.option("--inputs", "inputs_csv", default="",
              help="Comma-separated scalar arguments")
@click.option("--mode", type=click.Choice(["strict", "value-level"]),
              default="strict", show_default=True)
@click.option("--fuel", default=1_000_000, show_default=True,
              help="Statement budget per run")
@click.option("--seed", type=int, default=None,
              help="Generate the program pair from this seed instead of files")
@click.option("--size", type=int, default=12, show_default=True,
              help="Statement budget for the generated program")
def cmd_run_diff(sources, entry, inputs_csv, mode, fuel, seed, size) -> int:
    """Interpret two sources and compare their memory traces.

    With --seed, generates a random program, disaggregates it, and compares
    the pair instead of reading files.
    """
    inputs = []
    for tok in inputs_csv.split(","):
        tok = tok.strip()
        if not tok:
            continue
        inputs.append(float(tok) if "." in tok else int(tok))
    if seed is not None:
        if sources:
            raise click.UsageError("--seed replaces the source arguments")
        tu_a = generate_program(seed, size)
        tu_b, _, _ = transform(tu_a)
        entry = GEN_ENTRY
        inputs = []
        names = [f"<generated seed={seed}>", "<transformed>"]
    else:
        if len(sources) != 2:
            raise click.UsageError("run-diff needs two sources (or --seed)")
        try:
            tu_a = _read_source(sources[0])
            tu_b = _read_source(sources[1])
        except CompileError as exc:
            _say(exc.format(), "31")
            sys.exit(EXIT_INPUT)
        names = list(sources)
    try:
        trace_a, _ = run(tu_a, entry, inputs, fuel=fuel)
    except TrapError as exc:
        _say(f"{names[0]}: {exc}", "31")
        sys.exit(EXIT_INPUT)
    try:
        trace_b, _ = run(tu_b, entry, inputs, fuel=fuel)
    except TrapError as exc:
        _say(f"{names[1]}: {exc}", "31")
        sys.exit(EXIT_INPUT)
    if trace_equal(trace_a, trace_b, mode):
        _say(f"traces equal ({mode}, {len(trace_a.events)} vs "
             f"{len(trace_b.events)} events)", "32")
        sys.exit(EXIT_OK)
    div = first_divergence(trace_a, trace_b)
    if div is not None:
        i, ea, eb = div
        _say(f"first divergence at event {i}:", "31")
        _say(f"  {names[0]}: {ea if ea is not None else '<trace ended>'}")
        _say(f"  {names[1]}: {eb if eb is not None else '<trace ended>'}")
    else:
        _say("value-level comparison failed (scalar sequences or final "
             "reachable state differ)", "31")
    sys.exit(EXIT_INPUT)


if __name__ == "__main__":
    main()
