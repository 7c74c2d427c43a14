"""Command-line front end.

``cpdltab solve problem.cpdl`` prints ``SAT`` or ``UNSAT`` on stdout
(statistics go to stderr) and exits with 0 for SAT, 1 for UNSAT, 2 for
input errors, 3 when the node budget runs out.

``cpdltab report`` solves a batch of problems and writes a CSV summary
plus overview figures.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import click

from .automata import AutomatonError
from .export import export_dot, export_trace_dot, format_model_graph
from .parsing import ParseError, parse_problem
from .semantics import ExtractionError, bounded_sat, extract_model, verify_extraction
from .solver import SEARCHES, STRATEGIES, solve
from .tableau import DEFAULT_NODE_BUDGET, ResourceLimitError

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_LIMIT = 3

MAX_ORACLE_BOUND = 4


@click.group()
def main() -> None:
    """Satisfiability of converse-PDL with automaton inclusion axioms."""


@main.command("solve")
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--strategy", type=click.Choice(STRATEGIES), default="onthefly",
              show_default=True, help="Consistency checking strategy.")
@click.option("--search", type=click.Choice(SEARCHES), default="dfs",
              show_default=True, help="Expansion order.")
@click.option("--dump-graph", type=click.Path(path_type=Path), default=None,
              help="Write the final graph as DOT.")
@click.option("--dump-trace-graph", type=click.Path(path_type=Path), default=None,
              help="Write the final trace graph as DOT.")
@click.option("--extract-model", "extract_path", type=click.Path(path_type=Path),
              default=None, help="On SAT, write an extracted model here.")
@click.option("--check-model", is_flag=True,
              help="On SAT, extract a model and verify it semantically.")
@click.option("--oracle-bound", type=int, default=None,
              help="Cross-check the verdict against exhaustive model search "
                   "up to this many states.")
@click.option("--unsafe-oracle-bound", is_flag=True,
              help="Allow oracle bounds above the sanity limit of "
                   f"{MAX_ORACLE_BOUND}.")
@click.option("--node-budget", type=int, default=DEFAULT_NODE_BUDGET,
              show_default=True, help="Abort after this many created nodes.")
@click.option("--trace-log", is_flag=True, help="Verbose per-run diagnostics.")
def solve_command(path, strategy, search, dump_graph, dump_trace_graph,
                  extract_path, check_model, oracle_bound, unsafe_oracle_bound,
                  node_budget, trace_log) -> None:
    """Decide satisfiability of the problem in PATH."""
    if oracle_bound is not None and oracle_bound > MAX_ORACLE_BOUND and not unsafe_oracle_bound:
        raise click.UsageError(
            f"--oracle-bound above {MAX_ORACLE_BOUND} needs --unsafe-oracle-bound"
        )
    try:
        problem = parse_problem(path.read_text())
    except (ParseError, AutomatonError, UnicodeDecodeError) as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    for warning in problem.warnings:
        click.echo(f"warning: {warning}", err=True)

    start = time.perf_counter()
    try:
        result = solve(problem.logic, problem.goal, problem.assumptions,
                       strategy=strategy, search=search, node_budget=node_budget)
    except ResourceLimitError as exc:
        click.echo(f"resource limit: {exc}", err=True)
        sys.exit(EXIT_RESOURCE_LIMIT)
    elapsed = time.perf_counter() - start

    click.echo("SAT" if result.satisfiable else "UNSAT")
    click.echo(result.stats.summary(), err=True)
    click.echo(f"solve time:         {elapsed:.3f}s", err=True)
    if trace_log:
        for uid, f in result.stats.incomplete_events:
            click.echo(f"incomplete state {uid} demanded {f}", err=True)

    if dump_graph:
        Path(dump_graph).write_text(export_dot(result.tableau))
    if dump_trace_graph:
        Path(dump_trace_graph).write_text(export_trace_dot(result.tableau))

    failures = []
    if result.satisfiable and (extract_path or check_model):
        try:
            mg = extract_model(result.tableau)
        except ExtractionError as exc:
            failures.append(f"model extraction failed: {exc}")
            mg = None
        if mg is not None:
            if extract_path:
                Path(extract_path).write_text(format_model_graph(mg))
            if check_model:
                problems = verify_extraction(
                    mg, problem.goal, problem.assumptions, problem.logic
                )
                if problems:
                    failures.extend(problems)
                else:
                    click.echo("model check: OK", err=True)

    if oracle_bound is not None:
        model = bounded_sat(problem.goal, problem.assumptions, problem.logic,
                            max_states=oracle_bound)
        if model is not None and not result.satisfiable:
            failures.append(
                f"oracle found a {model.num_states}-state model but the solver "
                "answered UNSAT"
            )
        else:
            click.echo(f"oracle check (n<={oracle_bound}): OK", err=True)

    if failures:
        for msg in failures:
            click.echo(f"error: {msg}", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    sys.exit(EXIT_SAT if result.satisfiable else EXIT_UNSAT)


@main.command("report")
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("-o", "--outdir", type=click.Path(path_type=Path), required=True,
              help="Directory for report.csv and the figures.")
@click.option("--strategy", type=click.Choice(STRATEGIES + ("both",)),
              default="onthefly", show_default=True)
def report_command(inputs, outdir, strategy) -> None:
    """Solve a batch of .cpdl files and write a CSV plus figures."""
    from .report import run_report

    paths: list[Path] = []
    for item in inputs:
        if item.is_dir():
            paths.extend(sorted(item.glob("*.cpdl")))
        else:
            paths.append(item)
    if not paths:
        click.echo("error: no .cpdl files found", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    written = run_report(paths, Path(outdir), strategy=strategy)
    for p in written:
        click.echo(str(p))


if __name__ == "__main__":
    main()
