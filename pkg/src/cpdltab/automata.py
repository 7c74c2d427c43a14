"""Finite automata over program letters, and the logic specification.

Letters are interned :class:`~cpdltab.syntax.Program` nodes of kind
``atom`` or ``test``.  Automata are nondeterministic, may have several
initial states, and are immutable once built.

Two compilations exist for a program ``a``:

* :func:`compile_program` builds an automaton for the regular language of
  ``a`` itself, with tests kept as opaque letters;
* :func:`compile_closed` additionally replaces every atomic-program
  transition by a copy of that letter's logic automaton, so the language
  is closed under the logic's inclusion axioms.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .syntax import ATOM, CONV, SEQ, STAR, TEST, UNION, Context, Program, format_program


class AutomatonError(ValueError):
    pass


class FiniteAutomaton:
    """Immutable NFA.  States are ``0 .. num_states-1``."""

    __slots__ = ("name", "num_states", "initial", "final", "transitions", "delta", "alphabet")

    def __init__(
        self,
        num_states: int,
        initial: Iterable[int],
        transitions: Iterable[tuple[int, Program, int]],
        final: Iterable[int],
        name: str = "A",
    ):
        self.name = name
        self.num_states = num_states
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        trans = sorted(set(transitions), key=lambda t: (t[0], t[1].uid, t[2]))
        self.transitions = tuple(trans)
        delta: dict[int, list[tuple[Program, int]]] = {q: [] for q in range(num_states)}
        for q, letter, q2 in trans:
            if not (0 <= q < num_states and 0 <= q2 < num_states):
                raise AutomatonError(f"transition endpoint outside state range: {(q, letter, q2)}")
            delta[q].append((letter, q2))
        self.delta = {q: tuple(v) for q, v in delta.items()}
        self.alphabet = frozenset(letter for _, letter, _ in trans)
        if not self.initial <= set(range(num_states)) or not self.final <= set(range(num_states)):
            raise AutomatonError("initial/final states outside state range")

    def successors(self, q: int) -> tuple[tuple[Program, int], ...]:
        return self.delta[q]

    def __repr__(self) -> str:
        return (
            f"FiniteAutomaton({self.name}: {self.num_states} states, "
            f"I={sorted(self.initial)}, F={sorted(self.final)}, "
            f"{len(self.transitions)} transitions)"
        )


def accepts(aut: FiniteAutomaton, word: Sequence[Program]) -> bool:
    """Subset simulation: is there an accepting run on ``word``?"""
    current = set(aut.initial)
    for letter in word:
        current = {q2 for q in current for (lt, q2) in aut.delta[q] if lt is letter}
        if not current:
            return False
    return bool(current & aut.final)


def enumerate_words(aut: FiniteAutomaton, max_len: int) -> set[tuple[Program, ...]]:
    """All accepted words of length at most ``max_len``."""
    out: set[tuple[Program, ...]] = set()
    frontier: list[tuple[tuple[Program, ...], frozenset[int]]] = [((), aut.initial)]
    for _ in range(max_len + 1):
        next_frontier = []
        for word, states in frontier:
            if states & aut.final:
                out.add(word)
            if len(word) == max_len:
                continue
            by_letter: dict[Program, set[int]] = {}
            for q in states:
                for letter, q2 in aut.delta[q]:
                    by_letter.setdefault(letter, set()).add(q2)
            for letter, targets in by_letter.items():
                next_frontier.append((word + (letter,), frozenset(targets)))
        frontier = next_frontier
        if not frontier:
            break
    return out


def trim(aut: FiniteAutomaton) -> FiniteAutomaton:
    """Drop states not on any initial-to-final path; renumber survivors."""
    fwd: dict[int, set[int]] = {q: set() for q in range(aut.num_states)}
    bwd: dict[int, set[int]] = {q: set() for q in range(aut.num_states)}
    for q, _, q2 in aut.transitions:
        fwd[q].add(q2)
        bwd[q2].add(q)
    reach = _closure(aut.initial, fwd)
    coreach = _closure(aut.final, bwd)
    alive = sorted(reach & coreach)
    if len(alive) == aut.num_states:
        return aut
    remap = {old: new for new, old in enumerate(alive)}
    return FiniteAutomaton(
        len(alive),
        (remap[q] for q in aut.initial if q in remap),
        ((remap[q], lt, remap[q2]) for q, lt, q2 in aut.transitions if q in remap and q2 in remap),
        (remap[q] for q in aut.final if q in remap),
        name=aut.name,
    )


def _closure(seed: Iterable[int], edges: Mapping[int, set[int]]) -> set[int]:
    seen = set(seed)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for q2 in edges[q]:
            if q2 not in seen:
                seen.add(q2)
                stack.append(q2)
    return seen


# ---------------------------------------------------------------------------
# compilation

_EPS = None  # epsilon marker inside the construction


class _Nfa:
    """Mutable construction buffer with epsilon transitions."""

    def __init__(self) -> None:
        self.n = 0
        self.trans: list[tuple[int, Program | None, int]] = []

    def fresh(self) -> int:
        q = self.n
        self.n += 1
        return q

    def build(self, initial: Iterable[int], final: Iterable[int], name: str) -> FiniteAutomaton:
        eps: dict[int, set[int]] = {q: set() for q in range(self.n)}
        for q, letter, q2 in self.trans:
            if letter is _EPS:
                eps[q].add(q2)
        closures = {q: frozenset(_closure({q}, eps)) for q in range(self.n)}
        final_set = set(final)
        new_final = {q for q in range(self.n) if closures[q] & final_set}
        new_trans = []
        for q in range(self.n):
            for mid in closures[q]:
                for q0, letter, q2 in self.trans:
                    if q0 == mid and letter is not _EPS:
                        new_trans.append((q, letter, q2))
        return trim(FiniteAutomaton(self.n, initial, new_trans, new_final, name=name))


def _emit(nfa: _Nfa, prog: Program) -> tuple[set[int], set[int]]:
    """Emit a fragment for ``prog``; return (initial, final) state sets."""
    kind = prog.kind
    if kind in (ATOM, TEST):
        a, b = nfa.fresh(), nfa.fresh()
        nfa.trans.append((a, prog, b))
        return {a}, {b}
    if kind == SEQ:
        first_i, prev_f = _emit(nfa, prog.args[0])
        for part in prog.args[1:]:
            part_i, part_f = _emit(nfa, part)
            for f in prev_f:
                for i in part_i:
                    nfa.trans.append((f, _EPS, i))
            prev_f = part_f
        return first_i, prev_f
    if kind == UNION:
        init: set[int] = set()
        fin: set[int] = set()
        for part in prog.args:
            part_i, part_f = _emit(nfa, part)
            init |= part_i
            fin |= part_f
        return init, fin
    if kind == STAR:
        hub = nfa.fresh()
        part_i, part_f = _emit(nfa, prog.args[0])
        for i in part_i:
            nfa.trans.append((hub, _EPS, i))
        for f in part_f:
            nfa.trans.append((f, _EPS, hub))
        return {hub}, {hub}
    if kind == CONV:
        raise AutomatonError("converse must be pushed to atoms before compilation (NCNF)")
    raise AutomatonError(f"unknown program kind {kind}")


def compile_program(prog: Program) -> FiniteAutomaton:
    """Automaton for the regular language of ``prog`` (tests are letters)."""
    nfa = _Nfa()
    init, fin = _emit(nfa, prog)
    return nfa.build(init, fin, name=f"Aut({format_program(prog)})")


def compile_closed(prog: Program, logic: "LogicSpec") -> FiniteAutomaton:
    """Like :func:`compile_program`, then substitute every atomic-program
    transition by a fresh copy of that letter's logic automaton."""
    plain = compile_program(prog)
    nfa = _Nfa()
    base = [nfa.fresh() for _ in range(plain.num_states)]
    for q, letter, q2 in plain.transitions:
        if letter.kind == TEST:
            nfa.trans.append((base[q], letter, base[q2]))
            continue
        sub = logic.automaton(letter)
        copy = [nfa.fresh() for _ in range(sub.num_states)]
        for i in sub.initial:
            nfa.trans.append((base[q], _EPS, copy[i]))
        for f in sub.final:
            nfa.trans.append((copy[f], _EPS, base[q2]))
        for a, lt, b in sub.transitions:
            nfa.trans.append((copy[a], lt, copy[b]))
    return nfa.build(
        {base[q] for q in plain.initial},
        {base[q] for q in plain.final},
        name=f"aut({format_program(prog)})",
    )


def derive_converse(aut: FiniteAutomaton) -> FiniteAutomaton:
    """Reverse all transitions, converse each letter, swap initial and final.

    Accepts exactly the letterwise-conversed reversals of the input's words.
    Test letters are not allowed.
    """
    conv_trans = []
    for q, letter, q2 in aut.transitions:
        if letter.kind != ATOM:
            raise AutomatonError("cannot converse an automaton with test letters")
        conv_trans.append((q2, letter.ctx.atom(letter.args[0], not letter.args[1]), q))
    return FiniteAutomaton(
        aut.num_states, aut.final, conv_trans, aut.initial, name=aut.name + "^"
    )


def is_acyclic(aut: FiniteAutomaton) -> bool:
    color: dict[int, int] = {}

    def visit(q: int) -> bool:
        color[q] = 1
        for _, q2 in aut.delta[q]:
            c = color.get(q2, 0)
            if c == 1 or (c == 0 and not visit(q2)):
                return False
        color[q] = 2
        return True

    return all(visit(q) for q in range(aut.num_states) if color.get(q, 0) == 0)


def identity_automaton(letter: Program) -> FiniteAutomaton:
    """Accepts exactly the one-letter word ``letter``."""
    return FiniteAutomaton(
        2, {0}, [(0, letter, 1)], {1}, name=f"aut({format_program(letter)})"
    )


# ---------------------------------------------------------------------------
# logic specification

SYMMETRY_CHECK_LEN = 5

_logic_tokens = iter(range(1, 1 << 62))


class LogicSpec:
    """The alphabet with converse plus the letter-automaton mapping.

    ``automata`` maps atomic programs (either polarity) to their automata.
    Unlisted letters get the identity automaton; a missing converse
    polarity is derived automatically, which makes the required symmetry
    hold by construction.  Explicitly supplied pairs are only sanity
    checked by bounded word enumeration; mismatches are reported in
    ``warnings`` rather than rejected.
    """

    def __init__(
        self,
        ctx: Context,
        atoms: Sequence[str],
        automata: Mapping[Program, FiniteAutomaton] | None = None,
    ):
        self.ctx = ctx
        self.atoms = list(dict.fromkeys(atoms))
        self.token = next(_logic_tokens)  # stable cache key for bounded search
        self.warnings: list[str] = []
        self._map: dict[Program, FiniteAutomaton] = {}
        self._plain_cache: dict[Program, FiniteAutomaton] = {}
        self._closed_cache: dict[Program, FiniteAutomaton] = {}
        supplied = dict(automata or {})

        for name in self.atoms:
            pos = ctx.atom(name)
            neg = ctx.atom(name, conversed=True)
            pos_aut = supplied.pop(pos, None)
            neg_aut = supplied.pop(neg, None)
            if pos_aut is None and neg_aut is not None:
                pos_aut = derive_converse(neg_aut)
            if pos_aut is None:
                pos_aut = identity_automaton(pos)
            pos_aut = trim(pos_aut)
            explicit_pair = neg_aut is not None
            neg_aut = trim(neg_aut) if neg_aut is not None else derive_converse(pos_aut)
            self._validate(pos, pos_aut)
            self._validate(neg, neg_aut)
            if explicit_pair:
                self._check_symmetry(pos, pos_aut, neg_aut)
            self._map[pos] = pos_aut
            self._map[neg] = neg_aut
        if supplied:
            extra = ", ".join(format_program(p) for p in supplied)
            raise AutomatonError(f"automata given for undeclared atoms: {extra}")

        self.is_identity = all(
            is_acyclic(a) and enumerate_words(a, a.num_states) == {(sp,)}
            for sp, a in self._map.items()
        )

    def _validate(self, letter: Program, aut: FiniteAutomaton) -> None:
        declared = {self.ctx.atom(n, c) for n in self.atoms for c in (False, True)}
        for _, lt, _ in aut.transitions:
            if lt.kind != ATOM:
                raise AutomatonError(f"automaton for {letter} contains a test letter")
            if lt not in declared:
                raise AutomatonError(
                    f"automaton for {format_program(letter)} uses undeclared letter "
                    f"{format_program(lt)}"
                )
        if not accepts(aut, [letter]):
            raise AutomatonError(
                f"automaton for {format_program(letter)} must accept the word "
                f"{format_program(letter)} itself"
            )

    def _check_symmetry(self, pos: Program, pos_aut: FiniteAutomaton, neg_aut: FiniteAutomaton) -> None:
        expected = {
            tuple(w.ctx.atom(w.args[0], not w.args[1]) for w in reversed(word))
            for word in enumerate_words(pos_aut, SYMMETRY_CHECK_LEN)
        }
        got = enumerate_words(neg_aut, SYMMETRY_CHECK_LEN)
        if expected != got:
            self.warnings.append(
                f"automata for {format_program(pos)} look non-symmetric "
                f"(checked words up to length {SYMMETRY_CHECK_LEN})"
            )

    @property
    def letters(self) -> list[Program]:
        return [self.ctx.atom(n, c) for n in self.atoms for c in (False, True)]

    def automaton(self, letter: Program) -> FiniteAutomaton:
        if letter.kind != ATOM:
            raise AutomatonError(f"not an atomic program: {letter}")
        try:
            return self._map[letter]
        except KeyError:
            raise AutomatonError(f"undeclared atomic program {format_program(letter)}") from None

    def plain_automaton(self, prog: Program) -> FiniteAutomaton:
        """Per-session canonical automaton for the language of ``prog``."""
        aut = self._plain_cache.get(prog)
        if aut is None:
            aut = compile_program(prog)
            self._plain_cache[prog] = aut
        return aut

    def closed_automaton(self, prog: Program) -> FiniteAutomaton:
        """Per-session canonical inclusion-closed automaton for ``prog``."""
        if prog.kind == ATOM:
            return self.automaton(prog)
        aut = self._closed_cache.get(prog)
        if aut is None:
            aut = compile_closed(prog, self)
            self._closed_cache[prog] = aut
        return aut


def identity_logic(ctx: Context, atoms: Sequence[str]) -> LogicSpec:
    """Plain converse-PDL: every letter's automaton accepts only itself."""
    return LogicSpec(ctx, atoms)
