"""The and-or graph engine.

States (and-nodes) are expanded by the transitional rule and cached
globally by their (label, reduced, disallowed) triple; non-states
(or-nodes) are expanded by static rules and cached within the local graph
rooted at their after-transition predecessor.  Converse demands are solved
eagerly: a state lacking a formula required from below is tombstoned
``INCOMPLETE`` and its forming predecessor is re-expanded into an
"add it" branch and a "disallow it" branch.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .automata import LogicSpec
from .syntax import (
    ABOX,
    ADIA,
    AND,
    ATOM,
    BOX,
    DIA,
    OR,
    SBOX,
    TEST,
    Context,
    Formula,
    cls,
    format_formula,
    format_set,
    is_simple_dia,
    negate_ncnf,
    sort_formulas,
)

DEFAULT_NODE_BUDGET = int(os.environ.get("CPDLTAB_NODE_BUDGET", 1 << 22))


class ResourceLimitError(RuntimeError):
    """Raised when the configured node budget is exhausted."""


class NodeType(Enum):
    STATE = "state"
    NONSTATE = "nonstate"


class Status(Enum):
    UNEXPANDED = "unexpanded"
    EXPANDED = "expanded"
    INCOMPLETE = "incomplete"
    UNSAT = "unsat"
    SAT = "sat"


FINAL_STATUSES = (Status.INCOMPLETE, Status.UNSAT, Status.SAT)


class RuleTag(Enum):
    AND = "and"
    OR = "or"
    AUT_BOX = "aut-box"
    AUT_DMD = "aut-dmd"
    BOX = "box"
    DMD = "dmd"
    BOX_FINAL = "box-final"
    DMD_FINAL = "dmd-final"
    BOX_TEST = "box-test"
    DMD_TEST = "dmd-test"
    TRANS = "trans"
    FORMING_STATE = "forming-state"
    CONV = "conv"


# unary static rules outrank branching static rules; forming a state comes
# after all of them, transitions after that, converse re-expansion last
PRIORITY = {
    RuleTag.AND: 5,
    RuleTag.AUT_BOX: 5,
    RuleTag.BOX: 5,
    RuleTag.BOX_FINAL: 5,
    RuleTag.DMD_TEST: 5,
    RuleTag.OR: 4,
    RuleTag.AUT_DMD: 4,
    RuleTag.DMD: 4,
    RuleTag.DMD_FINAL: 4,
    RuleTag.BOX_TEST: 4,
    RuleTag.FORMING_STATE: 3,
    RuleTag.TRANS: 2,
    RuleTag.CONV: 1,
}

# static rules whose principal goes to the successor's reduced set, and is
# blocked from being principal again once there
BLOCKABLE = frozenset(
    {
        RuleTag.AND,
        RuleTag.OR,
        RuleTag.AUT_BOX,
        RuleTag.AUT_DMD,
        RuleTag.BOX,
        RuleTag.BOX_FINAL,
        RuleTag.BOX_TEST,
    }
)


@dataclass
class Rule:
    tag: RuleTag
    principal: Optional[Formula] = None

    @property
    def priority(self) -> int:
        return PRIORITY[self.tag]


FormulaSet = frozenset


class Node:
    __slots__ = (
        "uid",
        "type",
        "status",
        "label",
        "rformulas",
        "dformulas",
        "state_pred",
        "ce_label",
        "after_trans_pred",
        "formula_sc",
        "expanded_by",
        "principal",
        "trace_branches",
        "succs",
        "preds",
        "alive",
    )

    def __init__(self, uid: int, type_: NodeType, label, rformulas, dformulas):
        self.uid = uid
        self.type = type_
        self.status = Status.UNEXPANDED
        self.label: FormulaSet = label
        self.rformulas: FormulaSet = rformulas
        self.dformulas: FormulaSet = dformulas
        self.state_pred: Optional[int] = None
        self.ce_label: Optional[Formula] = None
        self.after_trans_pred: Optional[int] = None
        self.formula_sc: Optional[Formula] = None
        self.expanded_by: Optional[RuleTag] = None
        self.principal: Optional[Formula] = None
        # (successor uid, continued trace formula) pairs for expansions
        # whose principal is an eventuality; None otherwise
        self.trace_branches: Optional[tuple[tuple[int, Formula], ...]] = None
        self.succs: list[int] = []
        self.preds: list[int] = []
        self.alive = True

    def aformulas(self) -> FormulaSet:
        return self.label | self.rformulas

    def full_label(self) -> FormulaSet:
        return self.aformulas() | frozenset(negate_ncnf(f) for f in self.dformulas)

    def cache_key(self):
        return (self.label, self.rformulas, self.dformulas)

    def is_state(self) -> bool:
        return self.type is NodeType.STATE

    def __repr__(self) -> str:
        return f"Node({self.uid}, {self.type.value}, {self.status.value}, {format_set(self.label)})"


@dataclass
class Stats:
    nodes_created: int = 0
    nodes_deleted: int = 0
    states_formed: int = 0
    state_cache_hits: int = 0
    local_cache_hits: int = 0
    rule_applications: int = 0
    conv_applications: int = 0
    incomplete_events: list = field(default_factory=list)  # (state uid, formula)
    prune_iterations: int = 0
    # (cache key, formula) -> converse re-expansion count, monitoring only
    conv_counts: dict = field(default_factory=dict)

    def summary(self) -> str:
        lines = [
            f"nodes created:      {self.nodes_created}",
            f"nodes deleted:      {self.nodes_deleted}",
            f"states formed:      {self.states_formed}",
            f"state cache hits:   {self.state_cache_hits}",
            f"local cache hits:   {self.local_cache_hits}",
            f"rule applications:  {self.rule_applications}",
            f"conv firings:       {self.conv_applications}",
            f"incomplete states:  {len(self.incomplete_events)}",
            f"trace prune rounds: {self.prune_iterations}",
        ]
        return "\n".join(lines)


class Tableau:
    """A rooted and-or graph under construction for one (goal, assumptions)
    problem, together with the procedures that expand it."""

    def __init__(
        self,
        logic: LogicSpec,
        goal: Iterable[Formula],
        assumptions: Iterable[Formula] = (),
        search: str = "dfs",
        node_budget: int = DEFAULT_NODE_BUDGET,
    ):
        if search not in ("dfs", "bfs"):
            raise ValueError(f"unknown search strategy {search!r}")
        self.ctx: Context = logic.ctx
        self.logic = logic
        self.goal = frozenset(goal)
        self.assumptions = frozenset(assumptions)
        self.search = search
        self.node_budget = node_budget
        self.nodes: dict[int, Node] = {}
        self._next_uid = 1
        self._state_cache: dict[tuple, int] = {}
        # (local-graph root uid, cache key) -> node uid
        self._local_cache: dict[tuple, int] = {}
        self._frontier: list[int] = []
        self._pending_incomplete: list[int] = []
        self.stats = Stats()
        self.monotonicity_log: list[str] = []
        self.has_eventualities = False
        self.root_uid = self._init_root()

    # -- basic access ----------------------------------------------------

    def node(self, uid: int) -> Node:
        return self.nodes[uid]

    @property
    def root(self) -> Node:
        return self.nodes[self.root_uid]

    def live_nodes(self) -> list[Node]:
        return [self.nodes[uid] for uid in sorted(self.nodes)]

    def _init_root(self) -> int:
        root = self.new_succ(
            None, NodeType.NONSTATE, None, self.goal | self.assumptions,
            frozenset(), frozenset(),
        )
        if self.t_unsat(root):
            self._set_status(root, Status.UNSAT)
        elif self.t_sat(root):
            self._set_status(root, Status.SAT)
        return root.uid

    # -- node and edge management -----------------------------------------

    def new_succ(
        self,
        parent: Optional[Node],
        type_: NodeType,
        ce_label: Optional[Formula],
        label: FormulaSet,
        rformulas: FormulaSet,
        dformulas: FormulaSet,
    ) -> Node:
        if self.stats.nodes_created >= self.node_budget:
            raise ResourceLimitError(f"node budget of {self.node_budget} exhausted")
        node = Node(self._next_uid, type_, label, rformulas, dformulas)
        self._next_uid += 1
        self.stats.nodes_created += 1
        self.nodes[node.uid] = node
        if not self.has_eventualities and any(f.kind == ADIA for f in label):
            self.has_eventualities = True
        if parent is not None:
            self._add_edge(parent, node)
        if type_ is NodeType.NONSTATE:
            if parent is None or parent.is_state():
                node.state_pred = parent.uid if parent is not None else None
                node.after_trans_pred = node.uid
                node.ce_label = ce_label
            else:
                node.state_pred = parent.state_pred
                node.after_trans_pred = parent.after_trans_pred
            self._local_cache[(node.after_trans_pred, node.cache_key())] = node.uid
        else:
            self.stats.states_formed += 1
            self._state_cache[node.cache_key()] = node.uid
        self._frontier.append(node.uid)
        return node

    def _add_edge(self, u: Node, w: Node) -> None:
        if w.uid not in u.succs:
            u.succs.append(w.uid)
            w.preds.append(u.uid)

    def _remove_edge(self, u: Node, w: Node) -> None:
        u.succs.remove(w.uid)
        w.preds.remove(u.uid)

    def find_proxy(
        self,
        type_: NodeType,
        root: Optional[Node],
        label: FormulaSet,
        rformulas: FormulaSet,
        dformulas: FormulaSet,
    ) -> Optional[Node]:
        key = (label, rformulas, dformulas)
        if type_ is NodeType.STATE:
            uid = self._state_cache.get(key)
        else:
            assert root is not None
            uid = self._local_cache.get((root.uid, key))
        return self.nodes.get(uid) if uid is not None else None

    def con_to_succ(
        self,
        v: Node,
        type_: NodeType,
        ce_label: Optional[Formula],
        label: FormulaSet,
        rformulas: FormulaSet,
        dformulas: FormulaSet,
    ) -> Node:
        root = None if type_ is NodeType.STATE else self.nodes[v.after_trans_pred]
        proxy = self.find_proxy(type_, root, label, rformulas, dformulas)
        if proxy is not None:
            if type_ is NodeType.STATE:
                self.stats.state_cache_hits += 1
            else:
                self.stats.local_cache_hits += 1
            self._add_edge(v, proxy)
            return proxy
        return self.new_succ(v, type_, ce_label, label, rformulas, dformulas)

    # -- terminal tests ----------------------------------------------------

    def t_unsat(self, v: Node) -> bool:
        label = v.label
        if self.ctx.bot in label:
            return True
        return any(negate_ncnf(f) in label for f in label)

    def t_sat(self, v: Node) -> bool:
        return self.choose_rule(v) is None

    # -- rule selection -----------------------------------------------------

    def choose_rule(self, v: Node) -> Optional[Rule]:
        """Highest-priority applicable rule other than converse re-expansion;
        ties go to the oldest principal (lowest intern id)."""
        if v.is_state():
            if any(is_simple_dia(f) for f in v.label):
                return Rule(RuleTag.TRANS)
            return None
        best: Optional[Rule] = None
        best_prio = 0
        transition_material = False
        for f in sort_formulas(v.label):
            kind = f.kind
            tag: Optional[RuleTag] = None
            if kind == AND:
                tag = RuleTag.AND
            elif kind == OR:
                tag = RuleTag.OR
            elif kind == BOX:
                tag = RuleTag.AUT_BOX
            elif kind == ABOX:
                aut, q = f.args[0], f.args[1]
                tag = RuleTag.BOX_FINAL if q in aut.final else RuleTag.BOX
            elif kind == ADIA:
                aut, q = f.args[0], f.args[1]
                tag = RuleTag.DMD_FINAL if q in aut.final else RuleTag.DMD
            elif kind == SBOX:
                if f.args[0].kind == TEST:
                    tag = RuleTag.BOX_TEST
                else:
                    transition_material = True
            elif kind == DIA:
                prog = f.args[0]
                if prog.kind == TEST:
                    tag = RuleTag.DMD_TEST
                elif prog.kind == ATOM:
                    transition_material = True
                else:
                    tag = RuleTag.AUT_DMD
            if tag is None:
                continue
            if tag in BLOCKABLE and f in v.rformulas:
                continue
            prio = PRIORITY[tag]
            if prio > best_prio:
                best, best_prio = Rule(tag, f), prio
        if best is not None:
            return best
        if transition_material:
            return Rule(RuleTag.FORMING_STATE)
        return None

    # -- rule conclusions ----------------------------------------------------

    def _conclusions(self, rule: Rule, v: Node) -> list[tuple[FormulaSet, Optional[Formula]]]:
        """Label sets of the successors, with the continued trace formula
        when the principal is an eventuality."""
        ctx = self.ctx
        p = rule.principal
        rest = v.label - {p}
        tag = rule.tag
        if tag is RuleTag.AND:
            a, b = p.args
            return [(rest | {a, b}, None)]
        if tag is RuleTag.OR:
            a, b = p.args
            return [(rest | {a}, None), (rest | {b}, None)]
        if tag is RuleTag.AUT_BOX:
            prog, g = p.args
            aut = self.logic.closed_automaton(prog)
            added = {ctx.abox(aut, q, g) for q in aut.initial}
            return [(rest | added, None)]
        if tag is RuleTag.AUT_DMD:
            prog, g = p.args
            aut = self.logic.plain_automaton(prog)
            return [(rest | {ctx.adia(aut, q, g)}, None) for q in sorted(aut.initial)]
        if tag in (RuleTag.BOX, RuleTag.BOX_FINAL):
            aut, q, g = p.args
            added = {ctx.sbox(letter, ctx.abox(aut, q2, g)) for letter, q2 in aut.delta[q]}
            if tag is RuleTag.BOX_FINAL:
                added.add(g)
            return [(rest | added, None)]
        if tag in (RuleTag.DMD, RuleTag.DMD_FINAL):
            aut, q, g = p.args
            out = []
            for letter, q2 in aut.delta[q]:
                cont = ctx.dia(letter, ctx.adia(aut, q2, g))
                out.append((rest | {cont}, cont))
            if tag is RuleTag.DMD_FINAL:
                out.append((rest | {g}, g))
            return out
        if tag is RuleTag.BOX_TEST:
            letter, g = p.args
            test_formula = letter.args[0]
            return [(rest | {negate_ncnf(test_formula)}, None), (rest | {g}, None)]
        if tag is RuleTag.DMD_TEST:
            letter, g = p.args
            cont = g if g.kind == ADIA else None
            return [(rest | {letter.args[0], g}, cont)]
        raise AssertionError(tag)

    # -- rule application ------------------------------------------------------

    def apply(self, rule: Rule, v: Node) -> None:
        tag = rule.tag
        if tag is RuleTag.CONV:
            assert v.status is Status.EXPANDED
        else:
            assert v.status is Status.UNEXPANDED
        self.stats.rule_applications += 1

        if tag is RuleTag.FORMING_STATE:
            self.con_to_succ(v, NodeType.STATE, None, v.label, v.rformulas, v.dformulas)
            v.principal = None
            v.trace_branches = None
        elif tag is RuleTag.CONV:
            self._apply_conv(v)
        elif tag is RuleTag.TRANS:
            principals = [f for f in sort_formulas(v.label) if is_simple_dia(f)]
            rest = v.label - set(principals)
            branches = []
            for pf in principals:
                prog, g = pf.args
                carried = {h.args[1] for h in rest if h.kind == SBOX and h.args[0] is prog}
                succ = self.new_succ(
                    v, NodeType.NONSTATE, pf,
                    frozenset(carried) | {g} | self.assumptions,
                    frozenset(), frozenset(),
                )
                branches.append((succ.uid, pf))
            v.principal = None
            v.trace_branches = tuple(branches)
        else:
            if tag in (RuleTag.DMD, RuleTag.DMD_FINAL, RuleTag.DMD_TEST):
                reduced = v.rformulas
            else:
                reduced = v.rformulas | {rule.principal}
            branches = []
            for concl, cont in self._conclusions(rule, v):
                succ = self.con_to_succ(
                    v, NodeType.NONSTATE, None, concl, reduced, v.dformulas
                )
                if cont is not None:
                    branches.append((succ.uid, cont))
            v.principal = rule.principal
            v.trace_branches = tuple(branches) if branches else None

        v.expanded_by = tag
        if self._postprocess_successors(v):
            return  # a converse demand fired; v's fate is the cascade's
        if not v.alive:
            return
        self._set_status(v, Status.EXPANDED)
        self.update_status(v)
        if v.alive and v.status in FINAL_STATUSES:
            self.propagate_status(v)

    def _apply_conv(self, v: Node) -> None:
        succs = [self.nodes[u] for u in v.succs]
        assert len(succs) == 1 and succs[0].is_state(), "conv needs a freshly formed state"
        w = succs[0]
        phi = w.formula_sc
        assert phi is not None
        self._remove_edge(v, w)
        self.stats.conv_applications += 1
        key = (v.cache_key(), phi)
        self.stats.conv_counts[key] = self.stats.conv_counts.get(key, 0) + 1
        self.con_to_succ(
            v, NodeType.NONSTATE, None, v.label | {phi}, v.rformulas, v.dformulas
        )
        self.con_to_succ(
            v, NodeType.NONSTATE, None, v.label, v.rformulas, v.dformulas | {phi}
        )
        v.principal = None
        v.trace_branches = None

    def _postprocess_successors(self, v: Node) -> bool:
        """Clash/converse/leaf checks on fresh successors.

        Returns True when a converse demand turned a state incomplete; the
        remaining successors are then left untouched (they die with the
        incomplete state's local graph)."""
        for uid in list(v.succs):
            w = self.nodes.get(uid)
            if w is None or w.status in FINAL_STATUSES:
                continue
            if self.t_unsat(w):
                self._set_status(w, Status.UNSAT)
                continue
            if not w.is_state() and w.state_pred is not None:
                u0 = self.nodes[w.state_pred]
                u1 = self.nodes[w.after_trans_pred]
                demand = self._converse_demand(w, u1)
                if demand is not None:
                    if demand in u0.dformulas or u0.status in FINAL_STATUSES:
                        # a demand against a disallowing or already settled
                        # state kills this alternative; re-expanding a state
                        # whose verdict is final would unmake it
                        self._set_status(w, Status.UNSAT)
                    else:
                        self._set_status(u0, Status.INCOMPLETE)
                        u0.formula_sc = demand
                        self.stats.incomplete_events.append((u0.uid, demand))
                        self._pending_incomplete.append(u0.uid)
                        self.propagate_status(u0)
                        return True
            if w.status is not Status.UNSAT and self.t_sat(w):
                self._set_status(w, Status.SAT)
        return False

    def _converse_demand(self, w: Node, u1: Node) -> Optional[Formula]:
        """A formula the state predecessor must carry because some box over
        the conversed incoming letter sits in w's label, or None."""
        ce = u1.ce_label
        if ce is None:
            return None
        back = self.ctx.converse(ce.args[0])
        u0 = self.nodes[w.state_pred]
        available = u0.aformulas()
        for f in sort_formulas(w.label):
            if f.kind == SBOX and f.args[0] is back and f.args[1] not in available:
                return f.args[1]
        return None

    # -- status machinery ---------------------------------------------------

    def _set_status(self, v: Node, status: Status) -> None:
        old = v.status
        if old is status:
            return
        if old in FINAL_STATUSES:
            self.monotonicity_log.append(
                f"node {v.uid}: {old.value} -> {status.value}"
            )
        v.status = status

    def update_status(self, v: Node) -> None:
        if v.status is not Status.EXPANDED:
            return
        succ_statuses = [self.nodes[u].status for u in v.succs]
        if v.is_state():
            if succ_statuses and all(s is Status.SAT for s in succ_statuses):
                self._set_status(v, Status.SAT)
            elif any(s is Status.UNSAT for s in succ_statuses):
                self._set_status(v, Status.UNSAT)
        else:
            if any(s is Status.SAT for s in succ_statuses):
                self._set_status(v, Status.SAT)
            elif all(s is Status.UNSAT for s in succ_statuses):
                self._set_status(v, Status.UNSAT)
            elif any(s is Status.INCOMPLETE for s in succ_statuses):
                self.apply(Rule(RuleTag.CONV), v)

    def propagate_status(self, v: Node) -> None:
        assert v.status in FINAL_STATUSES
        worklist = [v.uid]
        while worklist:
            x = self.nodes.get(worklist.pop())
            if x is None:
                continue
            for uid in list(x.preds):
                u = self.nodes.get(uid)
                if u is None or u.status is not Status.EXPANDED:
                    continue
                self.update_status(u)
                if u.alive and u.status in FINAL_STATUSES:
                    worklist.append(u.uid)

    def set_unsat(self, v: Node) -> None:
        """External unsat verdict (global-consistency pruning)."""
        self._set_status(v, Status.UNSAT)
        self.propagate_status(v)

    # -- expansion loop -------------------------------------------------------

    def to_expand(self) -> Optional[Node]:
        while self._frontier:
            uid = self._frontier.pop() if self.search == "dfs" else self._frontier.pop(0)
            node = self.nodes.get(uid)
            if node is not None and node.status is Status.UNEXPANDED:
                return node
        return None

    def step(self) -> bool:
        """Expand one node; False when the frontier is exhausted."""
        v = self.to_expand()
        if v is None:
            return False
        rule = self.choose_rule(v)
        if rule is None:
            # leaves are normally caught at creation time; the root of a
            # trivial problem lands here
            self._set_status(v, Status.SAT if not self.t_unsat(v) else Status.UNSAT)
            return True
        self.apply(rule, v)
        self._delete_incomplete_local_graphs()
        return True

    def build(self, stop_on_root_unsat: bool = False) -> None:
        """Expansion loop; runs to a fully expanded graph by default."""
        while True:
            if stop_on_root_unsat and self.root.status is Status.UNSAT:
                return
            if not self.step():
                return

    def _delete_incomplete_local_graphs(self) -> None:
        while self._pending_incomplete:
            node = self.nodes.get(self._pending_incomplete.pop())
            if node is not None and node.status is Status.INCOMPLETE and node.succs:
                self._delete_local_graph(node)

    def _delete_local_graph(self, w: Node) -> None:
        doomed: set[int] = set()
        stack = list(w.succs)
        while stack:
            uid = stack.pop()
            if uid in doomed:
                continue
            x = self.nodes[uid]
            if x.is_state():
                continue
            doomed.add(uid)
            stack.extend(x.succs)
        # keep anything still referenced from outside the doomed region;
        # the caching discipline confines sharing to one local graph, so
        # this set should always come out empty
        keep: set[int] = set()
        changed = True
        while changed:
            changed = False
            for uid in doomed - keep:
                x = self.nodes[uid]
                externally_referenced = any(
                    p != w.uid and (p not in doomed or p in keep) for p in x.preds
                )
                if externally_referenced:
                    keep.add(uid)
                    changed = True
        doomed -= keep
        for uid in sorted(doomed):
            self._delete_node(self.nodes[uid])

    def _delete_node(self, x: Node) -> None:
        for uid in list(x.preds):
            p = self.nodes.get(uid)
            if p is not None:
                p.succs.remove(x.uid)
        for uid in list(x.succs):
            s = self.nodes.get(uid)
            if s is not None and uid != x.uid:
                s.preds.remove(x.uid)
        self._local_cache.pop((x.after_trans_pred, x.cache_key()), None)
        x.alive = False
        del self.nodes[x.uid]
        self.stats.nodes_deleted += 1


# ---------------------------------------------------------------------------
# structural invariants (test instrumentation)


def check_invariants(tab: Tableau) -> list[str]:
    """Structural health check; returns a list of violations (empty = ok)."""
    problems: list[str] = []
    universe = cls(tab.goal | tab.assumptions, tab.logic)
    # negations of disallowed formulas dualize box-side automaton modalities,
    # which the closure itself does not list
    universe_neg = universe | frozenset(negate_ncnf(f) for f in universe)

    for node in tab.live_nodes():
        for uid in node.succs:
            succ = tab.nodes.get(uid)
            if succ is None:
                problems.append(f"node {node.uid} has dangling successor {uid}")
                continue
            if node.is_state() and succ.is_state():
                problems.append(f"state {node.uid} directly connected to state {succ.uid}")
        for f in node.label | node.rformulas | node.dformulas:
            if f not in universe:
                problems.append(
                    f"node {node.uid} carries {format_formula(f)} outside the closure"
                )
        for f in node.dformulas:
            if negate_ncnf(f) not in universe_neg:
                problems.append(
                    f"node {node.uid} disallows {format_formula(f)} whose negation "
                    "is outside the closure"
                )
        for f in node.rformulas:
            if f.kind == ADIA or (f.kind == DIA and f.args[0].kind == TEST):
                problems.append(
                    f"node {node.uid} has eventuality/test diamond in reduced set: "
                    f"{format_formula(f)}"
                )
        if node.is_state():
            # blocked re-added formulas are exempt: they sit in the label
            # only because their reduction already happened on this path
            for f in node.label - node.rformulas:
                bad = (
                    f.kind in (AND, OR, BOX, ABOX, ADIA)
                    or (f.kind == SBOX and f.args[0].kind == TEST)
                    or (f.kind == DIA and f.args[0].kind != ATOM)
                )
                if bad:
                    problems.append(
                        f"state {node.uid} label contains unreduced {format_formula(f)}"
                    )

    # cache uniqueness
    seen_states: dict[tuple, int] = {}
    for node in tab.live_nodes():
        if node.is_state():
            key = node.cache_key()
            if key in seen_states:
                problems.append(f"states {seen_states[key]} and {node.uid} share contents")
            seen_states[key] = node.uid
    roots = {n.after_trans_pred for n in tab.live_nodes() if not n.is_state()}
    for root_uid in roots:
        if root_uid is None or root_uid not in tab.nodes:
            continue
        seen_local: dict[tuple, int] = {}
        stack = [root_uid]
        visited = set()
        while stack:
            uid = stack.pop()
            if uid in visited:
                continue
            visited.add(uid)
            x = tab.nodes[uid]
            if x.is_state():
                continue
            key = x.cache_key()
            if key in seen_local and seen_local[key] != uid:
                problems.append(
                    f"local graph of {root_uid}: nodes {seen_local[key]} and {uid} share contents"
                )
            seen_local[key] = uid
            stack.extend(x.succs)

    # no incomplete node reachable from the root
    stack = [tab.root_uid]
    visited = set()
    while stack:
        uid = stack.pop()
        if uid in visited or uid not in tab.nodes:
            continue
        visited.add(uid)
        x = tab.nodes[uid]
        if x.status is Status.INCOMPLETE:
            problems.append(f"incomplete node {uid} reachable from the root")
        stack.extend(x.succs)

    problems.extend(tab.monotonicity_log)
    return problems
