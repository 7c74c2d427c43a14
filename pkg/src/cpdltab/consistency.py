"""Global consistency: markings, trace graphs, and the two solve strategies.

A marking is the subgraph induced by nodes whose status is neither unsat
nor incomplete.  Every existential automaton-modal formula occurring in a
marked label must be realizable: the trace graph tracks such formulas
through rule applications, and a formula is realizable exactly when its
trace-graph node can reach an *end node* (a pair whose formula is back in
the base language).

Two strategies produce the verdict:

* batch: build the full graph, then repeatedly prune unproductive
  eventualities and re-propagate until the root dies or nothing is left
  to prune;
* on-the-fly: interleave construction with an under-approximation of
  productivity in which unexpanded and satisfiable nodes count as
  potential anchors, pruning as soon as a formula provably loses every
  anchor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .syntax import ADIA, Formula, is_eventuality, is_simple_dia
from .tableau import Node, Status, Tableau

TraceNode = tuple[int, Formula]  # (graph node uid, formula in its label)


class MarkingError(RuntimeError):
    """The induced subgraph violated a marking clause (an engine bug)."""


def marked_nodes(tab: Tableau) -> set[int]:
    """Uids of the current marking (root induced subgraph sans unsat/incomplete)."""
    return {
        uid
        for uid, node in tab.nodes.items()
        if node.status not in (Status.UNSAT, Status.INCOMPLETE)
    }


def induced_marking(tab: Tableau) -> set[int]:
    """The marking, with its defining clauses verified."""
    marking = marked_nodes(tab)
    problems = check_marking(tab, marking)
    if problems:
        raise MarkingError("; ".join(problems))
    return marking


def check_marking(tab: Tableau, marking: set[int]) -> list[str]:
    """The four marking clauses; violations indicate an engine bug."""
    problems = []
    if tab.root_uid not in marking:
        problems.append("marking does not contain the root")
    for uid in marking:
        node = tab.nodes[uid]
        kept = [u for u in node.succs if u in marking]
        if node.is_state():
            if len(kept) != len(node.succs):
                problems.append(f"and-node {uid} lost a successor edge")
        elif node.succs and not kept:
            problems.append(f"or-node {uid} has no marked successor")
    return problems


def trace_successors(
    tab: Tableau, v: Node, phi: Formula, marking: set[int]
) -> list[tuple[Node, Formula]]:
    """Trace-graph edges leaving ``(v, phi)`` inside ``marking``."""
    if v.uid not in marking or v.expanded_by is None:
        return []
    out: list[tuple[Node, Formula]] = []
    if v.is_state():
        # transitions: the formula must be this successor's coming edge label
        if is_simple_dia(phi) and phi.args[1].kind == ADIA:
            for uid in v.succs:
                if uid in marking:
                    w = tab.nodes[uid]
                    if w.ce_label is phi:
                        out.append((w, phi.args[1]))
        return out
    if v.principal is phi:
        for uid, cont in v.trace_branches or ():
            if uid in marking:
                out.append((tab.nodes[uid], cont))
    else:
        # static rule on another principal: the formula is carried along
        for uid in v.succs:
            if uid in marking:
                w = tab.nodes[uid]
                if phi in w.label:
                    out.append((w, phi))
    return out


@dataclass
class TraceGraph:
    sources: set[TraceNode] = field(default_factory=set)  # eventuality-shaped
    ends: set[TraceNode] = field(default_factory=set)  # base-language formulas
    edges: dict[TraceNode, list[TraceNode]] = field(default_factory=dict)
    rev: dict[TraceNode, list[TraceNode]] = field(default_factory=dict)

    def all_nodes(self) -> set[TraceNode]:
        return self.sources | self.ends


def build_trace_graph(
    tab: Tableau, marking: set[int], frontier_sources: bool = True
) -> TraceGraph:
    """Materialize the trace graph of the marking.

    Only eventuality-shaped label members get source nodes; end nodes are
    materialized as edge targets.  With ``frontier_sources`` false, nodes
    of unexpanded graph nodes are dropped (the batch algorithm runs on
    fully expanded graphs where none exist).
    """
    tg = TraceGraph()
    for uid in sorted(marking):
        node = tab.nodes[uid]
        for f in node.label:
            if is_eventuality(f):
                tg.sources.add((uid, f))
    for uid, f in sorted(tg.sources, key=lambda t: (t[0], t[1].uid)):
        node = tab.nodes[uid]
        targets = []
        for w, psi in trace_successors(tab, node, f, marking):
            t = (w.uid, psi)
            targets.append(t)
            if psi.is_base:
                tg.ends.add(t)
            tg.rev.setdefault(t, []).append((uid, f))
        tg.edges[(uid, f)] = targets
    return tg


def productive_nodes(tg: TraceGraph) -> set[TraceNode]:
    """Backward closure of the end nodes (a node is productive when some
    trace path from it reaches an end node)."""
    prod = set(tg.ends)
    stack = list(tg.ends)
    while stack:
        t = stack.pop()
        for s in tg.rev.get(t, ()):
            if s not in prod:
                prod.add(s)
                stack.append(s)
    return prod


def has_eventualities(tab: Tableau, marking: set[int]) -> bool:
    return any(
        is_eventuality(f) for uid in marking for f in tab.nodes[uid].label
    )


def solve_batch(tab: Tableau) -> bool:
    """Decide satisfiability on a fully built graph.

    Loops: induce the marking, find label formulas ``<A,q>f`` whose trace
    node is unproductive, kill their carriers, re-propagate.  Each round
    kills at least one node, so this terminates.  Problems without
    existential automaton modalities never enter the pruning path at all.
    """
    while tab.root.status is not Status.UNSAT:
        marking = induced_marking(tab)
        if not has_eventualities(tab, marking):
            return True
        tg = build_trace_graph(tab, marking)
        prod = productive_nodes(tg)
        bad = sorted(
            (
                (uid, f)
                for uid in marking
                for f in tab.nodes[uid].label
                if f.kind == ADIA and (uid, f) not in prod
            ),
            key=lambda t: (t[0], t[1].uid),
        )
        if not bad:
            return True
        tab.stats.prune_iterations += 1
        for uid, _f in bad:
            node = tab.nodes.get(uid)
            if node is not None and node.status not in (Status.UNSAT, Status.INCOMPLETE):
                tab.set_unsat(node)
    return False


# ---------------------------------------------------------------------------
# on-the-fly strategy


class OnTheFlyChecker:
    """Incremental global-consistency pruning driven by construction events.

    After each expansion step the checker recomputes which trace nodes can
    still reach an *anchor* -- an end node, or any node pair whose graph
    node is unexpanded or already satisfiable (those might still become
    productive).  A pair with no reachable anchor never becomes productive,
    so its graph node is unsatisfiable right away.

    The recomputation is a whole-graph reverse reachability pass rather
    than per-edge set maintenance: anchor sets shrink along cycles when
    nodes die, which pointwise updates cannot track soundly.
    """

    MAX_INTERVAL = 512

    def __init__(self, exact_sets: bool = False):
        self.exact_sets = exact_sets
        self.sweeps = 0
        self._interval = 1
        self._since_sweep = 0

    def maybe_sweep(self, tab: Tableau) -> None:
        """Sweep periodically; a full pass over the trace graph after every
        single expansion is quadratic, so the interval backs off while
        sweeps find nothing and snaps back once one prunes."""
        self._since_sweep += 1
        if self._since_sweep < self._interval:
            return
        self._since_sweep = 0
        before = tab.stats.prune_iterations
        self.sweep(tab)
        if tab.stats.prune_iterations > before:
            self._interval = 1
        else:
            self._interval = min(self._interval * 2, self.MAX_INTERVAL)

    def sweep(self, tab: Tableau) -> None:
        if not getattr(tab, "has_eventualities", False):
            return
        while True:
            marking = marked_nodes(tab)
            tg = build_trace_graph(tab, marking)
            if not tg.sources:
                return
            anchors = set(tg.ends)
            for uid, f in tg.sources:
                if tab.nodes[uid].status in (Status.UNEXPANDED, Status.SAT):
                    anchors.add((uid, f))
            reachable = set(anchors)
            stack = list(anchors)
            while stack:
                t = stack.pop()
                for s in tg.rev.get(t, ()):
                    if s not in reachable and s not in anchors:
                        reachable.add(s)
                        stack.append(s)
            if self.exact_sets:
                sets = semi_end_sets(tab, marking=marking)
                empties_by_sets = {t for t, s in sets.items() if not s and t in tg.sources}
                empties_by_reach = {
                    t for t in tg.sources if t not in reachable
                }
                assert empties_by_sets == empties_by_reach, (
                    "incremental emptiness disagrees with the fixpoint definition"
                )
            empties = sorted(
                (t for t in tg.sources if t not in reachable),
                key=lambda t: (t[0], t[1].uid),
            )
            self.sweeps += 1
            if not empties:
                return
            tab.stats.prune_iterations += 1
            for uid, _f in empties:
                node = tab.nodes.get(uid)
                if node is not None and node.status not in (
                    Status.UNSAT,
                    Status.INCOMPLETE,
                ):
                    tab.set_unsat(node)


def semi_end_sets(
    tab: Tableau, marking: Optional[set[int]] = None
) -> dict[TraceNode, frozenset[TraceNode]]:
    """The least-fixpoint anchor sets, computed from scratch.

    Reference implementation of the incremental checker's under-
    approximation; used by tests and by the checker's verification mode.
    """
    if marking is None:
        marking = marked_nodes(tab)
    tg = build_trace_graph(tab, marking)
    nodes = set(tg.sources) | set(tg.ends)
    anchored: dict[TraceNode, set[TraceNode]] = {t: set() for t in nodes}
    for t in nodes:
        uid, f = t
        if t in tg.ends or tab.nodes[uid].status in (Status.UNEXPANDED, Status.SAT):
            anchored[t].add(t)
    changed = True
    while changed:
        changed = False
        for t in tg.sources:
            uid, f = t
            if t in tg.ends or tab.nodes[uid].status in (Status.UNEXPANDED, Status.SAT):
                continue
            merged: set[TraceNode] = set()
            for s in tg.edges.get(t, ()):
                if s != t:
                    merged |= anchored.get(s, set())
            merged.discard(t)
            if merged - anchored[t]:
                anchored[t] |= merged
                changed = True
    return {t: frozenset(s) for t, s in anchored.items()}


def solve_onthefly(
    tab: Tableau, checker: Optional[OnTheFlyChecker] = None
) -> bool:
    """Interleave construction with global-consistency pruning.

    Stops as soon as the root is unsatisfiable; otherwise the graph is
    fully expanded (so model extraction always has a complete graph) and
    the final sweep settles the remaining eventualities.
    """
    checker = checker or OnTheFlyChecker()
    checker.sweep(tab)
    while tab.root.status is not Status.UNSAT:
        if not tab.step():
            break
        checker.maybe_sweep(tab)
    checker.sweep(tab)
    return tab.root.status is not Status.UNSAT
