"""Kripke models: closure, evaluation, bounded search, model extraction.

Models interpret only the positive atomic programs; a conversed letter is
always read as the inverse relation.  ``close_model`` turns an arbitrary
model into one of the logic's models by saturating each letter's relation
with everything reachable through that letter's automaton.

``bounded_sat`` is the independent semantic oracle: exhaustive enumeration
of all models up to a state bound.  Relations are enumerated up to state
permutation; valuations are evaluated in bulk by packing one copy of the
model per candidate valuation into big-integer bit lanes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .automata import FiniteAutomaton, LogicSpec
from .consistency import marked_nodes, trace_successors
from .syntax import (
    ABOX,
    ADIA,
    AND,
    ATOM,
    BOT,
    BOX,
    CONV,
    DIA,
    IMPLIES,
    NOT,
    OR,
    PROP,
    SBOX,
    SEQ,
    STAR,
    TEST,
    TOP,
    UNION,
    Formula,
    Program,
    format_formula,
    is_simple_dia,
    sort_formulas,
)
from .tableau import Node, RuleTag, Status, Tableau


class ExtractionError(RuntimeError):
    """A required realization or saturation path could not be found; this
    can only happen through an engine bug, never through user input."""


@dataclass(frozen=True)
class KripkeModel:
    num_states: int
    valuation: Mapping[str, frozenset[int]]  # proposition name -> states
    relations: Mapping[str, frozenset[tuple[int, int]]]  # positive atom -> pairs

    def prop(self, name: str) -> frozenset[int]:
        return self.valuation.get(name, frozenset())

    def rel(self, name: str, conversed: bool = False) -> frozenset[tuple[int, int]]:
        pairs = self.relations.get(name, frozenset())
        if conversed:
            return frozenset((y, x) for x, y in pairs)
        return pairs


def _letter_rel(model: KripkeModel, letter: Program) -> frozenset[tuple[int, int]]:
    assert letter.kind == ATOM
    return model.rel(letter.args[0], letter.args[1])


# ---------------------------------------------------------------------------
# closure under the logic's inclusion axioms


def _automaton_pairs(
    aut: FiniteAutomaton,
    start_states: Iterable[int],
    num_states: int,
    rel_of: Mapping[Program, frozenset[tuple[int, int]]],
) -> set[tuple[int, int]]:
    """All (x, y) connected by a word of ``aut`` started in ``start_states``
    (test letters are not supported; logic automata never carry them)."""
    succs: dict[Program, dict[int, list[int]]] = {}
    for letter in aut.alphabet:
        table: dict[int, list[int]] = {}
        for a, b in rel_of[letter]:
            table.setdefault(a, []).append(b)
        succs[letter] = table
    out: set[tuple[int, int]] = set()
    starts = tuple(start_states)
    for x in range(num_states):
        seen = {(x, q) for q in starts}
        stack = list(seen)
        while stack:
            y, q = stack.pop()
            if q in aut.final:
                out.add((x, y))
            for letter, q2 in aut.delta[q]:
                for y2 in succs[letter].get(y, ()):
                    if (y2, q2) not in seen:
                        seen.add((y2, q2))
                        stack.append((y2, q2))
    return out


def close_model(model: KripkeModel, logic: LogicSpec) -> KripkeModel:
    """Least fixpoint closing every letter relation under its automaton."""
    if logic.is_identity:
        return model
    rels = {name: set(pairs) for name, pairs in model.relations.items()}
    for name in logic.atoms:
        rels.setdefault(name, set())
    changed = True
    while changed:
        changed = False
        current = {
            letter: frozenset(
                rels[letter.args[0]]
                if not letter.args[1]
                else ((y, x) for x, y in rels[letter.args[0]])
            )
            for letter in logic.letters
        }
        for letter in logic.letters:
            aut = logic.automaton(letter)
            pairs = _automaton_pairs(aut, aut.initial, model.num_states, current)
            name, conversed = letter.args
            base_pairs = {( (y, x) if conversed else (x, y) ) for x, y in pairs}
            if not base_pairs <= rels[name]:
                rels[name] |= base_pairs
                changed = True
    return KripkeModel(
        model.num_states,
        model.valuation,
        {name: frozenset(pairs) for name, pairs in rels.items()},
    )


# ---------------------------------------------------------------------------
# relational evaluator


def eval_formula(model: KripkeModel, f: Formula) -> frozenset[int]:
    """Denotation of ``f`` in an (already closed) model.

    Handles the extended operators as well, so tableau-internal formulas
    can be checked against models directly.
    """
    cache: dict[Formula, frozenset[int]] = {}
    pcache: dict[Program, frozenset[tuple[int, int]]] = {}
    all_states = frozenset(range(model.num_states))

    def den(g: Formula) -> frozenset[int]:
        hit = cache.get(g)
        if hit is not None:
            return hit
        kind = g.kind
        if kind == TOP:
            res = all_states
        elif kind == BOT:
            res = frozenset()
        elif kind == PROP:
            res = model.prop(g.args[0])
        elif kind == NOT:
            res = all_states - den(g.args[0])
        elif kind == IMPLIES:
            res = (all_states - den(g.args[0])) | den(g.args[1])
        elif kind == AND:
            res = den(g.args[0]) & den(g.args[1])
        elif kind == OR:
            res = den(g.args[0]) | den(g.args[1])
        elif kind == DIA:
            rel = prel(g.args[0])
            target = den(g.args[1])
            res = frozenset(x for x, y in rel if y in target)
        elif kind == BOX:
            rel = prel(g.args[0])
            target = den(g.args[1])
            res = all_states - frozenset(x for x, y in rel if y not in target)
        elif kind == SBOX:
            res = den(g.ctx.box(g.args[0], g.args[1]))
        elif kind in (ABOX, ADIA):
            aut, q, body = g.args
            rel = _aut_rel(aut, q)
            target = den(body)
            if kind == ADIA:
                res = frozenset(x for x, y in rel if y in target)
            else:
                res = all_states - frozenset(x for x, y in rel if y not in target)
        else:
            raise ValueError(f"cannot evaluate {g!r}")
        cache[g] = res
        return res

    def prel(p: Program) -> frozenset[tuple[int, int]]:
        hit = pcache.get(p)
        if hit is not None:
            return hit
        kind = p.kind
        if kind == ATOM:
            res = _letter_rel(model, p)
        elif kind == SEQ:
            res = prel(p.args[0])
            for part in p.args[1:]:
                nxt = prel(part)
                by_src: dict[int, set[int]] = {}
                for a, b in nxt:
                    by_src.setdefault(a, set()).add(b)
                res = frozenset(
                    (x, z) for x, y in res for z in by_src.get(y, ())
                )
        elif kind == UNION:
            acc: set[tuple[int, int]] = set()
            for part in p.args:
                acc |= prel(part)
            res = frozenset(acc)
        elif kind == STAR:
            res = _star(prel(p.args[0]), model.num_states)
        elif kind == CONV:
            res = frozenset((y, x) for x, y in prel(p.args[0]))
        elif kind == TEST:
            res = frozenset((x, x) for x in den(p.args[0]))
        else:
            raise ValueError(f"unknown program {p!r}")
        pcache[p] = res
        return res

    def _aut_rel(aut: FiniteAutomaton, q: int) -> frozenset[tuple[int, int]]:
        rel_of = {}
        for letter in aut.alphabet:
            if letter.kind == ATOM:
                rel_of[letter] = _letter_rel(model, letter)
            else:
                rel_of[letter] = frozenset((x, x) for x in den(letter.args[0]))
        return frozenset(
            _automaton_pairs(aut, (q,), model.num_states, rel_of)
        )

    return den(f)


def _star(rel: frozenset[tuple[int, int]], n: int) -> frozenset[tuple[int, int]]:
    succ: dict[int, set[int]] = {x: {x} for x in range(n)}
    for a, b in rel:
        succ[a].add(b)
    changed = True
    while changed:
        changed = False
        for x in range(n):
            new = set()
            for y in succ[x]:
                new |= succ[y]
            if not new <= succ[x]:
                succ[x] |= new
                changed = True
    return frozenset((x, y) for x, ys in succ.items() for y in ys)


def naive_check(model: KripkeModel, state: int, f: Formula) -> bool:
    """Pointwise truth by direct recursion on the defining clauses.

    Deliberately avoids the relational algebra above; serves as its
    independent cross-check.  Base language only.
    """
    kind = f.kind
    if kind == TOP:
        return True
    if kind == BOT:
        return False
    if kind == PROP:
        return state in model.prop(f.args[0])
    if kind == NOT:
        return not naive_check(model, state, f.args[0])
    if kind == IMPLIES:
        return not naive_check(model, state, f.args[0]) or naive_check(model, state, f.args[1])
    if kind == AND:
        return naive_check(model, state, f.args[0]) and naive_check(model, state, f.args[1])
    if kind == OR:
        return naive_check(model, state, f.args[0]) or naive_check(model, state, f.args[1])
    if kind == DIA:
        return any(naive_check(model, y, f.args[1]) for y in _naive_succs(model, state, f.args[0]))
    if kind == BOX:
        return all(naive_check(model, y, f.args[1]) for y in _naive_succs(model, state, f.args[0]))
    raise ValueError(f"naive evaluator handles the base language only: {f!r}")


def _naive_succs(model: KripkeModel, state: int, prog: Program) -> set[int]:
    kind = prog.kind
    if kind == ATOM:
        return {y for x, y in _letter_rel(model, prog) if x == state}
    if kind == SEQ:
        frontier = {state}
        for part in prog.args:
            frontier = {z for y in frontier for z in _naive_succs(model, y, part)}
        return frontier
    if kind == UNION:
        out: set[int] = set()
        for part in prog.args:
            out |= _naive_succs(model, state, part)
        return out
    if kind == STAR:
        seen = {state}
        stack = [state]
        while stack:
            y = stack.pop()
            for z in _naive_succs(model, y, prog.args[0]):
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        return seen
    if kind == CONV:
        return {
            y
            for y in range(model.num_states)
            if state in _naive_succs(model, y, prog.args[0])
        }
    if kind == TEST:
        return {state} if naive_check(model, state, prog.args[0]) else set()
    raise ValueError(f"unknown program {prog!r}")


# ---------------------------------------------------------------------------
# bounded model search


def _signature(formulas: Iterable[Formula]) -> tuple[list[str], list[str]]:
    props: set[str] = set()
    atoms: set[str] = set()

    def walk_f(f: Formula) -> None:
        if f.kind == PROP:
            props.add(f.args[0])
        for a in f.args:
            if isinstance(a, Formula):
                walk_f(a)
            elif isinstance(a, Program):
                walk_p(a)

    def walk_p(p: Program) -> None:
        if p.kind == ATOM:
            atoms.add(p.args[0])
        for a in p.args:
            if isinstance(a, Formula):
                walk_f(a)
            elif isinstance(a, Program):
                walk_p(a)

    for f in formulas:
        walk_f(f)
    return sorted(props), sorted(atoms)


_MAX_RELATION_COMBOS = 1 << 20
_canonical_cache: dict[tuple[int, int], list[tuple[int, ...]]] = {}


def _canonical_relation_combos(m: int, num_rels: int) -> list[tuple[int, ...]]:
    """Tuples of relation bitmaps (bit x*m+y = edge), minimal under
    simultaneous state permutation; every model is isomorphic to one
    whose relations appear here."""
    key = (m, num_rels)
    hit = _canonical_cache.get(key)
    if hit is not None:
        return hit
    if num_rels == 0:
        combos = [()]
        _canonical_cache[key] = combos
        return combos
    total_bits = m * m * num_rels
    if 1 << total_bits > _MAX_RELATION_COMBOS:
        raise ValueError(
            f"bounded search space too large ({num_rels} relations over {m} states)"
        )
    perms = list(itertools.permutations(range(m)))[1:]
    tables = []
    for perm in perms:
        table = [0] * (1 << (m * m))
        for mat in range(1 << (m * m)):
            new = 0
            bits = mat
            while bits:
                low = bits & -bits
                idx = low.bit_length() - 1
                bits ^= low
                x, y = divmod(idx, m)
                new |= 1 << (perm[x] * m + perm[y])
            table[mat] = new
        tables.append(table)
    combos = []
    for combo in itertools.product(range(1 << (m * m)), repeat=num_rels):
        if all(tuple(t[c] for c in combo) >= combo for t in tables):
            combos.append(combo)
    _canonical_cache[key] = combos
    return combos


_closure_cache: dict[tuple[int, int, tuple], tuple] = {}


def _close_combo(
    combo: tuple[int, ...], m: int, atoms: Sequence[str], logic: LogicSpec
) -> tuple[int, ...]:
    key = (logic.token, m, tuple(atoms), combo)
    hit = _closure_cache.get(key)
    if hit is not None:
        return hit
    relations = {
        name: frozenset(
            (x, y) for x in range(m) for y in range(m) if combo[i] >> (x * m + y) & 1
        )
        for i, name in enumerate(atoms)
    }
    extra = {name: frozenset() for name in logic.atoms if name not in relations}
    model = close_model(KripkeModel(m, {}, {**relations, **extra}), logic)
    closed = tuple(
        sum(1 << (x * m + y) for x, y in model.relations.get(name, frozenset()))
        for name in atoms
    )
    _closure_cache[key] = closed
    return closed


class _LaneEvaluator:
    """Evaluates one formula over every valuation at once.

    A denotation is one big integer: bit ``lane*m + s`` says whether state
    ``s`` satisfies the formula under valuation number ``lane``.  Lane
    ``L`` assigns proposition ``i`` the state set ``(L >> i*m) & (2^m-1)``.
    """

    def __init__(self, m: int, props: Sequence[str]):
        self.m = m
        self.props = list(props)
        self.lanes = 1 << (len(props) * m)
        if self.lanes * m > 2_000_000:
            raise ValueError("too many propositions for the bounded search")
        self.state_mask = (1 << m) - 1
        self.lane_low = sum(1 << (lane * m) for lane in range(self.lanes))
        self.full = (1 << (self.lanes * m)) - 1
        self.prop_den = {}
        for i, name in enumerate(self.props):
            acc = 0
            for lane in range(self.lanes):
                acc |= ((lane >> (i * m)) & self.state_mask) << (lane * m)
            self.prop_den[name] = acc

    def broadcast(self, states: int) -> int:
        return states * self.lane_low

    def collapse(self, den: int) -> int:
        """Nonempty-per-lane flags at each lane's bit 0."""
        acc = den
        for i in range(1, self.m):
            acc |= den >> i
        return acc & self.lane_low

    def full_lanes(self, den: int) -> int:
        acc = den
        for i in range(1, self.m):
            acc &= den >> i
        return acc & self.lane_low

    def set_relations(self, succ_masks: Mapping[str, Sequence[int]]) -> None:
        # per-letter successor masks; conversed letters use the inverse
        self.rows: dict[tuple[str, bool], list[int]] = {}
        for name, masks in succ_masks.items():
            inv = [0] * self.m
            for x in range(self.m):
                for y in range(self.m):
                    if masks[x] >> y & 1:
                        inv[y] |= 1 << x
            self.rows[(name, False)] = [self.broadcast(v) for v in masks]
            self.rows[(name, True)] = [self.broadcast(v) for v in inv]
        self._fcache: dict[Formula, int] = {}
        self._pcache: dict[Program, list[int]] = {}

    def den(self, f: Formula) -> int:
        hit = self._fcache.get(f)
        if hit is not None:
            return hit
        kind = f.kind
        if kind == TOP:
            res = self.full
        elif kind == BOT:
            res = 0
        elif kind == PROP:
            res = self.prop_den.get(f.args[0], 0)
        elif kind == NOT:
            res = self.full ^ self.den(f.args[0])
        elif kind == IMPLIES:
            res = (self.full ^ self.den(f.args[0])) | self.den(f.args[1])
        elif kind == AND:
            res = self.den(f.args[0]) & self.den(f.args[1])
        elif kind == OR:
            res = self.den(f.args[0]) | self.den(f.args[1])
        elif kind == DIA:
            res = self._dia(self.prog_rows(f.args[0]), self.den(f.args[1]))
        elif kind == BOX:
            inner = self.full ^ self.den(f.args[1])
            res = self.full ^ self._dia(self.prog_rows(f.args[0]), inner)
        else:
            raise ValueError(f"bounded search handles the base language only: {f!r}")
        self._fcache[f] = res
        return res

    def _dia(self, rows: Sequence[int], target: int) -> int:
        res = 0
        for x in range(self.m):
            hit = rows[x] & target
            if hit:
                res |= self.collapse(hit) << x
        return res

    def prog_rows(self, p: Program) -> list[int]:
        hit = self._pcache.get(p)
        if hit is not None:
            return hit
        kind = p.kind
        if kind == ATOM:
            rows = self.rows[(p.args[0], p.args[1])]
        elif kind == TEST:
            den = self.den(p.args[0])
            rows = [den & (self.lane_low << x) for x in range(self.m)]
        elif kind == SEQ:
            rows = self.prog_rows(p.args[0])
            for part in p.args[1:]:
                rows = self._compose(rows, self.prog_rows(part))
        elif kind == UNION:
            acc = [0] * self.m
            for part in p.args:
                prows = self.prog_rows(part)
                acc = [a | b for a, b in zip(acc, prows)]
            rows = acc
        elif kind == STAR:
            rows = [self.broadcast(1 << x) for x in range(self.m)]
            step = self.prog_rows(p.args[0])
            rows = [a | b for a, b in zip(rows, step)]
            while True:
                nxt = self._compose(rows, rows)
                nxt = [a | b for a, b in zip(nxt, rows)]
                if nxt == rows:
                    break
                rows = nxt
        elif kind == CONV:
            inner = self.prog_rows(p.args[0])
            rows = [0] * self.m
            for x in range(self.m):
                for y in range(self.m):
                    sel = (inner[x] >> y) & self.lane_low
                    if sel:
                        rows[y] |= sel << x
        else:
            raise ValueError(f"unknown program {p!r}")
        self._pcache[p] = rows
        return rows

    def _compose(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        out = [0] * self.m
        for x in range(self.m):
            ax = a[x]
            if not ax:
                continue
            for y in range(self.m):
                sel = (ax >> y) & self.lane_low
                if sel:
                    out[x] |= b[y] & (sel * self.state_mask)
        return out


def bounded_sat(
    goal: Iterable[Formula],
    assumptions: Iterable[Formula],
    logic: LogicSpec,
    max_states: int = 4,
) -> Optional[KripkeModel]:
    """First model (by state count, then relation/valuation bitmaps) with
    at most ``max_states`` states that validates the assumptions everywhere
    and satisfies the goal somewhere; None when no such model exists.

    The search signature is restricted to the symbols that actually occur
    in the problem.
    """
    goal = sort_formulas(goal)
    assumptions = sort_formulas(assumptions)
    props, atoms = _signature(goal + assumptions)
    for m in range(1, max_states + 1):
        ev = _LaneEvaluator(m, props)
        for combo in _canonical_relation_combos(m, len(atoms)):
            closed = (
                combo if logic.is_identity else _close_combo(combo, m, atoms, logic)
            )
            succ = {
                name: [
                    (closed[i] >> (x * m)) & ev.state_mask for x in range(m)
                ]
                for i, name in enumerate(atoms)
            }
            ev.set_relations(succ)
            ok = ev.full
            for g in assumptions:
                ok &= ev.den(g)
                if not ok:
                    break
            lanes_ok = ev.full_lanes(ok) if assumptions else ev.lane_low
            if not lanes_ok:
                continue
            xden = ev.full
            for g in goal:
                xden &= ev.den(g)
                if not xden:
                    break
            hits = lanes_ok & ev.collapse(xden)
            if not hits:
                continue
            lane = ((hits & -hits).bit_length() - 1) // m
            valuation = {
                name: frozenset(
                    s for s in range(m) if (lane >> (i * m + s)) & 1
                )
                for i, name in enumerate(props)
            }
            relations = {
                name: frozenset(
                    (x, y)
                    for x in range(m)
                    for y in range(m)
                    if combo[i] >> (x * m + y) & 1
                )
                for i, name in enumerate(atoms)
            }
            # close over the whole logic so letters outside the search
            # signature also carry their derived pairs
            return close_model(KripkeModel(m, valuation, relations), logic)
    return None


# ---------------------------------------------------------------------------
# model extraction from a successful tableau


@dataclass
class ModelGraph:
    """Worlds carrying formula sets, with letter-labelled edges."""

    worlds: list[frozenset[Formula]]
    edges: dict[Program, frozenset[tuple[int, int]]]  # simple program -> pairs
    root: int = 0

    def check_local_consistency(self) -> list[str]:
        problems = []
        for i, content in enumerate(self.worlds):
            for f in content:
                if f.kind == BOT:
                    problems.append(f"world {i} contains falsum")
                if f.kind == NOT and f.args[0] in content:
                    problems.append(
                        f"world {i} contains a clashing literal pair on "
                        f"{format_formula(f.args[0])}"
                    )
        return problems


def model_graph_to_kripke(mg: ModelGraph, logic: LogicSpec) -> KripkeModel:
    relations: dict[str, set[tuple[int, int]]] = {name: set() for name in logic.atoms}
    for letter, pairs in mg.edges.items():
        name, conversed = letter.args
        for x, y in pairs:
            relations[name].add((y, x) if conversed else (x, y))
    valuation: dict[str, set[int]] = {}
    for i, content in enumerate(mg.worlds):
        for f in content:
            if f.kind == PROP:
                valuation.setdefault(f.args[0], set()).add(i)
    return KripkeModel(
        len(mg.worlds),
        {k: frozenset(v) for k, v in valuation.items()},
        {k: frozenset(v) for k, v in relations.items()},
    )


class _Extractor:
    def __init__(self, tab: Tableau):
        self.tab = tab
        self.marking = marked_nodes(tab)
        self._realizations: dict[tuple[int, Formula], list[tuple[Node, Formula]]] = {}
        self.step_guard = 10 * (len(tab.nodes) + 10) * 50

    def _spend(self) -> None:
        self.step_guard -= 1
        if self.step_guard <= 0:
            raise ExtractionError("extraction did not terminate (engine bug)")

    def realization(self, node: Node, phi: Formula) -> list[tuple[Node, Formula]]:
        """Shortest trace path from (node, phi) to an end node."""
        key = (node.uid, phi)
        hit = self._realizations.get(key)
        if hit is not None:
            return hit
        start = (node.uid, phi)
        parents: dict[tuple[int, Formula], tuple[int, Formula] | None] = {start: None}
        queue = [start]
        found = None
        while queue:
            self._spend()
            cur = queue.pop(0)
            uid, f = cur
            if f.is_base:
                found = cur
                break
            succs = trace_successors(self.tab, self.tab.nodes[uid], f, self.marking)
            for w, psi in sorted(succs, key=lambda t: (t[0].uid, t[1].uid)):
                t = (w.uid, psi)
                if t not in parents:
                    parents[t] = cur
                    queue.append(t)
        if found is None:
            raise ExtractionError(
                f"no realization for {format_formula(phi)} at node {node.uid}"
            )
        path = []
        cur = found
        while cur is not None:
            path.append((self.tab.nodes[cur[0]], cur[1]))
            cur = parents[cur]
        path.reverse()
        self._realizations[key] = path
        return path

    def saturation_path(self, start: Node) -> list[Node]:
        """Follow marked successors from ``start`` down to a state (or to a
        satisfiable leaf, which happens when the label has no transition
        material at all)."""
        path = [start]
        v = start
        while not v.is_state():
            self._spend()
            marked_succs = [u for u in v.succs if u in self.marking]
            if not marked_succs:
                break  # satisfiable leaf
            if v.expanded_by in (RuleTag.DMD, RuleTag.DMD_FINAL):
                real = self.realization(v, v.principal)
                advanced = False
                for node, _f in real[1:]:
                    if node.is_state():
                        break
                    path.append(node)
                    v = node
                    advanced = True
                if not advanced:
                    raise ExtractionError(
                        f"realization from node {v.uid} makes no progress"
                    )
            else:
                v = self.tab.nodes[min(marked_succs)]
                path.append(v)
        return path

    def extract(self) -> ModelGraph:
        tab = self.tab
        root_path = self.saturation_path(tab.root)
        worlds: list[frozenset[Formula]] = []
        world_ids: dict[frozenset[Formula], int] = {}
        world_anchor: dict[int, Node] = {}
        edges: dict[Program, set[tuple[int, int]]] = {}

        def intern_world(content: frozenset[Formula], anchor: Node) -> tuple[int, bool]:
            wid = world_ids.get(content)
            if wid is not None:
                return wid, False
            wid = len(worlds)
            worlds.append(content)
            world_ids[content] = wid
            world_anchor[wid] = anchor
            return wid, True

        root_content = frozenset().union(
            *(n.label | n.rformulas for n in root_path)
        )
        root_id, _ = intern_world(root_content, root_path[-1])
        unresolved = [root_id]
        while unresolved:
            self._spend()
            w0 = unresolved.pop(0)
            anchor = world_anchor[w0]
            if not anchor.is_state():
                continue  # leaf-terminated world: no outgoing transitions
            for phi0 in sort_formulas(worlds[w0]):
                if not is_simple_dia(phi0):
                    continue
                u1 = self._transition_child(anchor, phi0)
                body = phi0.args[1]
                if body.kind == ADIA:
                    real = self.realization(u1, body)
                    chain = [node for node, _f in real]
                    chain.extend(self.saturation_path(chain[-1])[1:])
                else:
                    chain = self.saturation_path(u1)
                full = [anchor] + chain
                boundaries = [
                    i for i, node in enumerate(full) if i > 0 and node.is_state()
                ]
                if not boundaries or boundaries[-1] != len(full) - 1:
                    boundaries.append(len(full) - 1)  # leaf-terminated
                prev_world = w0
                seg_start = 0
                for j in boundaries:
                    segment = full[seg_start + 1 : j + 1]
                    entry = segment[0]
                    content = frozenset().union(
                        *(n.label | n.rformulas for n in segment)
                    )
                    wid, fresh = intern_world(content, full[j])
                    letter = entry.ce_label.args[0]
                    edges.setdefault(letter, set()).add((prev_world, wid))
                    if fresh:
                        unresolved.append(wid)
                    prev_world = wid
                    seg_start = j
        return ModelGraph(
            worlds,
            {letter: frozenset(pairs) for letter, pairs in edges.items()},
            root_id,
        )

    def _transition_child(self, state: Node, phi0: Formula) -> Node:
        for uid in state.succs:
            w = self.tab.nodes.get(uid)
            if w is not None and w.ce_label is phi0:
                if uid not in self.marking:
                    raise ExtractionError(
                        f"transition child {uid} of state {state.uid} is dead"
                    )
                return w
        raise ExtractionError(
            f"state {state.uid} lacks a transition for {format_formula(phi0)}"
        )


def extract_model(tab: Tableau) -> ModelGraph:
    """Build a model graph from a tableau whose root survived solving.

    Worlds fuse the nodes of saturation paths; existential automaton
    modalities are resolved along their (shortest) realizations in the
    final trace graph.
    """
    if tab.root.status is Status.UNSAT:
        raise ExtractionError("cannot extract a model from an unsatisfiable tableau")
    return _Extractor(tab).extract()


def verify_extraction(
    mg: ModelGraph,
    goal: Iterable[Formula],
    assumptions: Iterable[Formula],
    logic: LogicSpec,
) -> list[str]:
    """Check the extracted model graph semantically: read it as a Kripke
    model, close it, and evaluate goal and assumptions."""
    problems = mg.check_local_consistency()
    model = close_model(model_graph_to_kripke(mg, logic), logic)
    everything = frozenset(range(model.num_states))
    for f in sort_formulas(assumptions):
        if eval_formula(model, f) != everything:
            problems.append(f"assumption {format_formula(f)} fails somewhere")
    for f in sort_formulas(goal):
        if mg.root not in eval_formula(model, f):
            problems.append(f"goal {format_formula(f)} fails at the root world")
    return problems
