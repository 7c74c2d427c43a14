"""Abstract syntax of formulas and programs.

Formulas and programs are hash-consed: every shape is built through a
:class:`Context`, which guarantees that structurally equal terms are the
same Python object.  Set membership, clash detection and node-cache keys
all rely on this, so terms from different contexts must never be mixed.

The *base language* is what problem files may contain.  The solver
internally extends it with three auxiliary operators: ``sbox`` (a box
indexed by a single letter), and the automaton modalities ``abox`` /
``adia`` (a box/diamond whose program is an automaton started in a fixed
state).
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Iterator

if TYPE_CHECKING:
    from .automata import FiniteAutomaton, LogicSpec

# formula kinds
TOP = "top"
BOT = "bot"
PROP = "prop"
NOT = "not"
IMPLIES = "implies"
AND = "and"
OR = "or"
DIA = "dia"
BOX = "box"
SBOX = "sbox"  # letter-indexed box, extended language only
ABOX = "abox"  # [A,q]f, extended language only
ADIA = "adia"  # <A,q>f, extended language only

# program kinds
ATOM = "atom"
SEQ = "seq"
UNION = "union"
STAR = "star"
CONV = "conv"
TEST = "test"

_EXTENDED_KINDS = (SBOX, ABOX, ADIA)


class Formula:
    """An interned formula node.  Compare with ``is`` or ``==`` (identity)."""

    __slots__ = ("ctx", "kind", "args", "uid", "is_base")

    def __init__(self, ctx: Context, kind: str, args: tuple, uid: int, is_base: bool):
        self.ctx = ctx
        self.kind = kind
        self.args = args
        self.uid = uid
        self.is_base = is_base

    def __hash__(self) -> int:
        # uid-based hashing keeps set iteration order reproducible between runs
        return self.uid

    def __repr__(self) -> str:
        return f"Formula({format_formula(self)})"

    def __str__(self) -> str:
        return format_formula(self)


class Program:
    """An interned program node."""

    __slots__ = ("ctx", "kind", "args", "uid", "is_base")

    def __init__(self, ctx: Context, kind: str, args: tuple, uid: int, is_base: bool):
        self.ctx = ctx
        self.kind = kind
        self.args = args
        self.uid = uid
        self.is_base = is_base

    def __hash__(self) -> int:
        return self.uid

    def __repr__(self) -> str:
        return f"Program({format_program(self)})"

    def __str__(self) -> str:
        return format_program(self)


class Context:
    """Hash-consing table for one solver session.

    Not thread safe; a session is single-threaded.  Terms are immutable
    once created and may be read from anywhere.
    """

    def __init__(self) -> None:
        self._table: dict[tuple, Formula | Program] = {}
        self._next_uid = 0
        self._neg_cache: dict[Formula, Formula] = {}
        self.top = self._formula(TOP, ())
        self.bot = self._formula(BOT, ())

    def _formula(self, kind: str, args: tuple) -> Formula:
        key = ("f", kind) + tuple(
            a.uid if isinstance(a, (Formula, Program)) else _raw_key(a) for a in args
        )
        hit = self._table.get(key)
        if hit is not None:
            return hit  # type: ignore[return-value]
        base = kind not in _EXTENDED_KINDS and all(
            a.is_base for a in args if isinstance(a, (Formula, Program))
        )
        node = Formula(self, kind, args, self._next_uid, base)
        self._next_uid += 1
        self._table[key] = node
        return node

    def _program(self, kind: str, args: tuple) -> Program:
        key = ("p", kind) + tuple(
            a.uid if isinstance(a, (Formula, Program)) else a for a in args
        )
        hit = self._table.get(key)
        if hit is not None:
            return hit  # type: ignore[return-value]
        base = all(a.is_base for a in args if isinstance(a, (Formula, Program)))
        node = Program(self, kind, args, self._next_uid, base)
        self._next_uid += 1
        self._table[key] = node
        return node

    # -- formula constructors ------------------------------------------

    def prop(self, name: str) -> Formula:
        return self._formula(PROP, (name,))

    def not_(self, f: Formula) -> Formula:
        return self._formula(NOT, (f,))

    def implies(self, a: Formula, b: Formula) -> Formula:
        return self._formula(IMPLIES, (a, b))

    def and_(self, a: Formula, b: Formula) -> Formula:
        return self._formula(AND, (a, b))

    def or_(self, a: Formula, b: Formula) -> Formula:
        return self._formula(OR, (a, b))

    def dia(self, prog: Program, f: Formula) -> Formula:
        return self._formula(DIA, (prog, f))

    def box(self, prog: Program, f: Formula) -> Formula:
        return self._formula(BOX, (prog, f))

    def sbox(self, letter: Program, f: Formula) -> Formula:
        assert letter.kind in (ATOM, TEST)
        return self._formula(SBOX, (letter, f))

    def abox(self, aut: "FiniteAutomaton", state: int, f: Formula) -> Formula:
        return self._formula(ABOX, (aut, state, f))

    def adia(self, aut: "FiniteAutomaton", state: int, f: Formula) -> Formula:
        return self._formula(ADIA, (aut, state, f))

    # -- program constructors ------------------------------------------

    def atom(self, name: str, conversed: bool = False) -> Program:
        return self._program(ATOM, (name, conversed))

    def seq(self, parts: Iterable[Program]) -> Program:
        flat: list[Program] = []
        for p in parts:
            if p.kind == SEQ:
                flat.extend(p.args)
            else:
                flat.append(p)
        if len(flat) == 1:
            return flat[0]
        assert len(flat) >= 2
        return self._program(SEQ, tuple(flat))

    def union(self, parts: Iterable[Program]) -> Program:
        flat: list[Program] = []
        for p in parts:
            if p.kind == UNION:
                flat.extend(p.args)
            else:
                flat.append(p)
        if len(flat) == 1:
            return flat[0]
        assert len(flat) >= 2
        return self._program(UNION, tuple(flat))

    def star(self, p: Program) -> Program:
        return self._program(STAR, (p,))

    def converse(self, p: Program) -> Program:
        if p.kind == ATOM:
            return self.atom(p.args[0], not p.args[1])
        return self._program(CONV, (p,))

    def test(self, f: Formula) -> Program:
        return self._program(TEST, (f,))


def _raw_key(a: object) -> object:
    # automata participate in intern keys by identity
    return ("aut", id(a)) if not isinstance(a, (str, int, bool)) else a


# ---------------------------------------------------------------------------
# shape predicates


def is_simple(prog: Program) -> bool:
    return prog.kind == ATOM


def is_test(prog: Program) -> bool:
    return prog.kind == TEST


def is_simple_dia(f: Formula) -> bool:
    """``<s>f`` with a single letter program (the transition material)."""
    return f.kind == DIA and f.args[0].kind == ATOM


def is_simple_sbox(f: Formula) -> bool:
    return f.kind == SBOX and f.args[0].kind == ATOM


def is_eventuality(f: Formula) -> bool:
    """Trace-graph source shapes: ``<A,q>x`` or ``<w><A,q>x``."""
    if f.kind == ADIA:
        return True
    return f.kind == DIA and f.args[1].kind == ADIA


# ---------------------------------------------------------------------------
# normal form


def to_ncnf(f: Formula) -> Formula:
    """Rewrite a base-language formula into negation-and-converse normal form.

    Negation ends up only on propositions, implication disappears, and the
    converse constructor survives only on atomic programs (where it is
    folded into the atom's polarity flag).  Semantics is preserved on every
    Kripke model.
    """
    return _ncnf(f, positive=True)


def _ncnf(f: Formula, positive: bool) -> Formula:
    ctx = f.ctx
    kind = f.kind
    if kind == TOP:
        return ctx.top if positive else ctx.bot
    if kind == BOT:
        return ctx.bot if positive else ctx.top
    if kind == PROP:
        return f if positive else ctx.not_(f)
    if kind == NOT:
        return _ncnf(f.args[0], not positive)
    if kind == IMPLIES:
        a, b = f.args
        if positive:
            return ctx.or_(_ncnf(a, False), _ncnf(b, True))
        return ctx.and_(_ncnf(a, True), _ncnf(b, False))
    if kind == AND:
        a, b = f.args
        build = ctx.and_ if positive else ctx.or_
        return build(_ncnf(a, positive), _ncnf(b, positive))
    if kind == OR:
        a, b = f.args
        build = ctx.or_ if positive else ctx.and_
        return build(_ncnf(a, positive), _ncnf(b, positive))
    if kind == DIA:
        prog, g = f.args
        build = ctx.dia if positive else ctx.box
        return build(ncnf_program(prog), _ncnf(g, positive))
    if kind == BOX:
        prog, g = f.args
        build = ctx.box if positive else ctx.dia
        return build(ncnf_program(prog), _ncnf(g, positive))
    raise ValueError(f"not a base-language formula: {f!r}")


def ncnf_program(p: Program) -> Program:
    ctx = p.ctx
    kind = p.kind
    if kind == ATOM:
        return p
    if kind == SEQ:
        return ctx.seq(ncnf_program(q) for q in p.args)
    if kind == UNION:
        return ctx.union(ncnf_program(q) for q in p.args)
    if kind == STAR:
        return ctx.star(ncnf_program(p.args[0]))
    if kind == TEST:
        return ctx.test(_ncnf(p.args[0], True))
    if kind == CONV:
        return _conv_program(p.args[0])
    raise ValueError(f"unknown program kind {kind}")


def _conv_program(p: Program) -> Program:
    # dualities: (a;b)~ = b~;a~, (a+b)~ = a~+b~, (a*)~ = (a~)*, (f?)~ = f?
    ctx = p.ctx
    kind = p.kind
    if kind == ATOM:
        return ctx.atom(p.args[0], not p.args[1])
    if kind == SEQ:
        return ctx.seq(_conv_program(q) for q in reversed(p.args))
    if kind == UNION:
        return ctx.union(_conv_program(q) for q in p.args)
    if kind == STAR:
        return ctx.star(_conv_program(p.args[0]))
    if kind == TEST:
        return ctx.test(_ncnf(p.args[0], True))
    if kind == CONV:
        return ncnf_program(p.args[0])
    raise ValueError(f"unknown program kind {kind}")


def negate_ncnf(f: Formula) -> Formula:
    """NCNF of ``not f`` for ``f`` already in NCNF (extended ops included).

    On the base language this is an involution.  On the extended language
    the letter-indexed box maps to a plain diamond (``sbox`` has the same
    semantics as the corresponding box, so the round trip is semantically,
    not structurally, the identity).
    """
    cache = f.ctx._neg_cache
    hit = cache.get(f)
    if hit is None:
        hit = _negate(f)
        cache[f] = hit
    return hit


def _negate(f: Formula) -> Formula:
    ctx = f.ctx
    kind = f.kind
    if kind == TOP:
        return ctx.bot
    if kind == BOT:
        return ctx.top
    if kind == PROP:
        return ctx.not_(f)
    if kind == NOT:
        return f.args[0]
    if kind == AND:
        return ctx.or_(negate_ncnf(f.args[0]), negate_ncnf(f.args[1]))
    if kind == OR:
        return ctx.and_(negate_ncnf(f.args[0]), negate_ncnf(f.args[1]))
    if kind == DIA:
        return ctx.box(f.args[0], negate_ncnf(f.args[1]))
    if kind == BOX:
        return ctx.dia(f.args[0], negate_ncnf(f.args[1]))
    if kind == SBOX:
        return ctx.dia(f.args[0], negate_ncnf(f.args[1]))
    if kind == ABOX:
        return ctx.adia(f.args[0], f.args[1], negate_ncnf(f.args[2]))
    if kind == ADIA:
        return ctx.abox(f.args[0], f.args[1], negate_ncnf(f.args[2]))
    raise ValueError(f"cannot negate {f!r}")


# ---------------------------------------------------------------------------
# subformula closure


def _subformulas(f: Formula, acc: set[Formula]) -> None:
    if f in acc:
        return
    acc.add(f)
    for a in f.args:
        if isinstance(a, Formula):
            _subformulas(a, acc)
        elif isinstance(a, Program):
            _program_tests(a, acc)


def _program_tests(p: Program, acc: set[Formula]) -> None:
    for a in p.args:
        if isinstance(a, Formula):
            _subformulas(a, acc)
        elif isinstance(a, Program):
            _program_tests(a, acc)


def bsf(formulas: Iterable[Formula]) -> frozenset[Formula]:
    """Basic subformulas: every subformula (tests included) and its negation.

    Input must be base-language NCNF.
    """
    acc: set[Formula] = set()
    for f in formulas:
        _subformulas(f, acc)
    return frozenset(acc) | frozenset(negate_ncnf(f) for f in acc)


def cls(formulas: Iterable[Formula], logic: "LogicSpec") -> frozenset[Formula]:
    """The finite formula universe the tableau can touch for this input.

    Extends :func:`bsf` with every automaton-modal formula the box and
    diamond unfolding rules can produce, including the letter-indexed
    boxes/diamonds wrapping them.
    """
    basic = bsf(formulas)
    out = set(basic)
    for f in basic:
        if f.kind == BOX:
            prog, g = f.args
            aut = logic.closed_automaton(prog)
            for q in range(aut.num_states):
                inner = f.ctx.abox(aut, q, g)
                out.add(inner)
                for letter in aut.alphabet:
                    out.add(f.ctx.sbox(letter, inner))
        elif f.kind == DIA:
            prog, g = f.args
            if prog.kind in (ATOM, TEST):
                continue
            aut = logic.plain_automaton(prog)
            for q in range(aut.num_states):
                inner = f.ctx.adia(aut, q, g)
                out.add(inner)
                for letter in aut.alphabet:
                    out.add(f.ctx.dia(letter, inner))
    return frozenset(out)


# ---------------------------------------------------------------------------
# printing (ASCII, reparseable on the base language)

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4


def format_formula(f: Formula) -> str:
    return _fmt(f, 0)


def _fmt(f: Formula, prec: int) -> str:
    kind = f.kind
    if kind == TOP:
        return "true"
    if kind == BOT:
        return "false"
    if kind == PROP:
        return f.args[0]
    if kind == NOT:
        return "!" + _fmt(f.args[0], _PREC_UNARY)
    if kind == AND:
        s = _fmt(f.args[0], _PREC_AND) + " & " + _fmt(f.args[1], _PREC_AND + 1)
        return "(" + s + ")" if prec > _PREC_AND else s
    if kind == OR:
        s = _fmt(f.args[0], _PREC_OR) + " | " + _fmt(f.args[1], _PREC_OR + 1)
        return "(" + s + ")" if prec > _PREC_OR else s
    if kind == IMPLIES:
        s = _fmt(f.args[0], _PREC_IMPLIES + 1) + " -> " + _fmt(f.args[1], _PREC_IMPLIES)
        return "(" + s + ")" if prec > _PREC_IMPLIES else s
    if kind == DIA:
        return "<" + format_program(f.args[0]) + ">" + _fmt(f.args[1], _PREC_UNARY)
    if kind == BOX:
        return "[" + format_program(f.args[0]) + "]" + _fmt(f.args[1], _PREC_UNARY)
    if kind == SBOX:
        return "[=" + format_program(f.args[0]) + "]" + _fmt(f.args[1], _PREC_UNARY)
    if kind == ABOX:
        return f"[{f.args[0].name}:{f.args[1]}]" + _fmt(f.args[2], _PREC_UNARY)
    if kind == ADIA:
        return f"<{f.args[0].name}:{f.args[1]}>" + _fmt(f.args[2], _PREC_UNARY)
    raise ValueError(kind)


_PPREC_UNION = 1
_PPREC_SEQ = 2
_PPREC_POST = 3


def format_program(p: Program) -> str:
    return _pfmt(p, 0)


def _pfmt(p: Program, prec: int) -> str:
    kind = p.kind
    if kind == ATOM:
        return p.args[0] + ("^" if p.args[1] else "")
    if kind == SEQ:
        s = " ; ".join(_pfmt(q, _PPREC_SEQ + 1) for q in p.args)
        return "(" + s + ")" if prec > _PPREC_SEQ else s
    if kind == UNION:
        s = " + ".join(_pfmt(q, _PPREC_UNION + 1) for q in p.args)
        return "(" + s + ")" if prec > _PPREC_UNION else s
    if kind == STAR:
        return _pfmt(p.args[0], _PPREC_POST + 1) + "*"
    if kind == CONV:
        return _pfmt(p.args[0], _PPREC_POST + 1) + "^"
    if kind == TEST:
        inner = p.args[0]
        if inner.kind in (TOP, BOT, PROP):
            return _fmt(inner, _PREC_UNARY) + "?"
        return "(" + _fmt(inner, 0) + ")?"
    raise ValueError(kind)


def format_set(formulas: Iterable[Formula]) -> str:
    return "{" + ", ".join(format_formula(f) for f in sort_formulas(formulas)) + "}"


def sort_formulas(formulas: Iterable[Formula]) -> list[Formula]:
    return sorted(formulas, key=lambda f: f.uid)


def iter_sorted(formulas: Iterable[Formula]) -> Iterator[Formula]:
    return iter(sort_formulas(formulas))
