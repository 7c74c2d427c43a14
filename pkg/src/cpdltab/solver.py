"""High-level solve entry points tying the engine and the two strategies
together."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .automata import LogicSpec
from .consistency import OnTheFlyChecker, solve_batch, solve_onthefly
from .syntax import Formula
from .tableau import DEFAULT_NODE_BUDGET, Stats, Tableau

STRATEGIES = ("batch", "onthefly")
SEARCHES = ("dfs", "bfs")


@dataclass
class SolveResult:
    satisfiable: bool
    tableau: Tableau
    strategy: str

    @property
    def stats(self) -> Stats:
        return self.tableau.stats


def solve(
    logic: LogicSpec,
    goal: Iterable[Formula],
    assumptions: Iterable[Formula] = (),
    strategy: str = "onthefly",
    search: str = "dfs",
    node_budget: int = DEFAULT_NODE_BUDGET,
    sen_exact: bool = False,
) -> SolveResult:
    """Decide satisfiability of ``goal`` under global ``assumptions``.

    ``batch`` fully expands the graph and then prunes unrealizable
    eventualities; ``onthefly`` (the default) prunes during construction
    and stops as soon as the root dies.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    tab = Tableau(logic, goal, assumptions, search=search, node_budget=node_budget)
    if strategy == "batch":
        tab.build()
        sat = solve_batch(tab)
    else:
        sat = solve_onthefly(tab, OnTheFlyChecker(exact_sets=sen_exact))
    return SolveResult(sat, tab, strategy)
