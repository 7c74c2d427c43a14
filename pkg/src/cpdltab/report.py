"""Batch reporting: solve a set of problems, write a CSV summary and
matplotlib overview figures next to it."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

from .parsing import parse_problem
from .solver import solve
from .tableau import ResourceLimitError

CSV_FIELDS = [
    "file", "strategy", "verdict", "time_s", "nodes_created", "nodes_deleted",
    "states_formed", "conv_firings", "incomplete_states", "prune_rounds",
]


@dataclass
class ReportRow:
    file: str
    strategy: str
    verdict: str
    time_s: float
    nodes_created: int
    nodes_deleted: int
    states_formed: int
    conv_firings: int
    incomplete_states: int
    prune_rounds: int


def _solve_one(path: Path, strategy: str) -> ReportRow:
    problem = parse_problem(path.read_text())
    start = time.perf_counter()
    try:
        result = solve(problem.logic, problem.goal, problem.assumptions,
                       strategy=strategy)
        verdict = "SAT" if result.satisfiable else "UNSAT"
        stats = result.stats
    except ResourceLimitError:
        verdict = "LIMIT"
        stats = None
    elapsed = time.perf_counter() - start
    return ReportRow(
        file=path.name,
        strategy=strategy,
        verdict=verdict,
        time_s=round(elapsed, 6),
        nodes_created=stats.nodes_created if stats else 0,
        nodes_deleted=stats.nodes_deleted if stats else 0,
        states_formed=stats.states_formed if stats else 0,
        conv_firings=stats.conv_applications if stats else 0,
        incomplete_states=len(stats.incomplete_events) if stats else 0,
        prune_rounds=stats.prune_iterations if stats else 0,
    )


def run_report(paths: list[Path], outdir: Path, strategy: str = "onthefly") -> list[Path]:
    """Solve every problem, write ``report.csv`` and the figures; returns
    the list of written files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    strategies = ["batch", "onthefly"] if strategy == "both" else [strategy]
    rows = [_solve_one(path, s) for path in paths for s in strategies]

    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = outdir / "report.csv"
    with csv_path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.__dict__)
    written.append(csv_path)

    by_strategy = {s: [r for r in rows if r.strategy == s] for s in strategies}

    fig, ax = plt.subplots(figsize=(max(6, len(paths) * 0.5), 4))
    width = 0.8 / len(strategies)
    for i, s in enumerate(strategies):
        xs = [j + i * width for j in range(len(by_strategy[s]))]
        ax.bar(xs, [r.nodes_created for r in by_strategy[s]], width=width, label=s)
    ax.set_xticks(range(len(paths)))
    ax.set_xticklabels([p.name for p in paths], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("nodes created")
    ax.set_title("graph size per problem")
    ax.legend()
    fig.tight_layout()
    nodes_path = outdir / "nodes.png"
    fig.savefig(nodes_path, dpi=120)
    plt.close(fig)
    written.append(nodes_path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for s in strategies:
        times = sorted(r.time_s for r in by_strategy[s])
        ax.plot(times, range(1, len(times) + 1), drawstyle="steps-post", label=s)
    ax.set_xlabel("solve time (s)")
    ax.set_ylabel("problems solved")
    ax.set_title("runtime distribution")
    ax.legend()
    fig.tight_layout()
    times_path = outdir / "times.png"
    fig.savefig(times_path, dpi=120)
    plt.close(fig)
    written.append(times_path)

    return written
