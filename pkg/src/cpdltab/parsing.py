"""Problem file parsing (``.cpdl``).

A problem consists of a ``logic`` block declaring the atomic programs and
(optionally) their automata, an optional ``assumptions`` block, and one or
more ``goal`` blocks::

    logic {
      atoms: s, r;
      automaton r { states: 0 1; initial: 0; final: 1;
                    trans: 0 -s^-> 0; 0 -s-> 1; 0 -r-> 1; }
      # or equivalently:  regex r = (s^)* (s + r);
    }
    assumptions { [s]p; }
    goal { <s>(p & [r]!p); }

Formula syntax: ``true``, ``false``, identifiers, ``!F``, ``F & G``,
``F | G``, ``F -> G``, ``<A>F``, ``[A]F``.  Programs: identifiers
(declared atoms), ``A^`` (converse), ``A ; B``, ``A + B``, ``A*``, and
tests ``F ?``.  ``#`` and ``//`` start line comments.  Formulas are
normalized to NCNF on load.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import AutomatonError, FiniteAutomaton, LogicSpec
from .syntax import Context, Formula, Program, ncnf_program, to_ncnf

KEYWORDS = {"true", "false", "logic", "assumptions", "goal", "atoms", "automaton",
            "regex", "states", "initial", "final", "trans"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # ident, number, punct, eof
    text: str
    line: int
    col: int


_PUNCT2 = ("->",)
_PUNCT1 = "{}();:,?!&|+*^<>[]-="


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#" or text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            tokens.append(Token("punct", "->", line, col))
            i += 2
            col += 2
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c in _PUNCT1:
            tokens.append(Token("punct", c, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass
class Problem:
    ctx: Context
    logic: LogicSpec
    goal: frozenset[Formula]
    assumptions: frozenset[Formula]
    warnings: list[str] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[Token], ctx: Context):
        self.tokens = tokens
        self.pos = 0
        self.ctx = ctx
        self.atoms: list[str] = []
        self.declared: set[str] = set()

    # -- token plumbing --------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    # -- formulas ----------------------------------------------------------

    def formula(self) -> Formula:
        left = self.formula_or()
        if self.eat("->"):
            return self.ctx.implies(left, self.formula())
        return left

    def formula_or(self) -> Formula:
        left = self.formula_and()
        while self.eat("|"):
            left = self.ctx.or_(left, self.formula_and())
        return left

    def formula_and(self) -> Formula:
        left = self.formula_unary()
        while self.eat("&"):
            left = self.ctx.and_(left, self.formula_unary())
        return left

    def formula_unary(self) -> Formula:
        tok = self.peek()
        if self.eat("!"):
            return self.ctx.not_(self.formula_unary())
        if self.eat("<"):
            prog = self.program()
            self.expect(">")
            return self.ctx.dia(prog, self.formula_unary())
        if self.eat("["):
            prog = self.program()
            self.expect("]")
            return self.ctx.box(prog, self.formula_unary())
        if self.eat("("):
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind == "ident":
            self.next()
            if tok.text == "true":
                return self.ctx.top
            if tok.text == "false":
                return self.ctx.bot
            if tok.text in KEYWORDS:
                raise self.error(f"keyword {tok.text!r} cannot be a proposition", tok)
            return self.ctx.prop(tok.text)
        raise self.error(f"expected a formula, found {tok.text or 'end of input'!r}", tok)

    # -- programs ------------------------------------------------------------

    def program(self) -> Program:
        parts = [self.program_seq()]
        while self.eat("+"):
            parts.append(self.program_seq())
        return self.ctx.union(parts) if len(parts) > 1 else parts[0]

    def program_seq(self) -> Program:
        parts = [self.program_postfix()]
        while self.eat(";"):
            parts.append(self.program_postfix())
        return self.ctx.seq(parts) if len(parts) > 1 else parts[0]

    def program_postfix(self) -> Program:
        p = self.program_primary()
        while True:
            if self.eat("*"):
                p = self.ctx.star(p)
            elif self.eat("^"):
                p = self.ctx.converse(p)
            else:
                return p

    def program_primary(self) -> Program:
        tok = self.peek()
        if tok.text in ("!", "<", "[", "true", "false"):
            f = self.formula_unary()
            self.expect("?")
            return self.ctx.test(f)
        if tok.text == "(":
            # a parenthesized program, unless the contents turn out to be a
            # test formula (detected by a failed program parse or by a
            # trailing question mark)
            snapshot = self.pos
            try:
                self.next()
                p = self.program()
                self.expect(")")
                if not self.at("?"):
                    return p
            except ParseError:
                pass
            self.pos = snapshot
            self.expect("(")
            f = self.formula()
            self.expect(")")
            self.expect("?")
            return self.ctx.test(f)
        if tok.kind == "ident":
            if self.peek(1).text == "?":
                self.next()
                self.next()
                if tok.text == "true":
                    return self.ctx.test(self.ctx.top)
                if tok.text == "false":
                    return self.ctx.test(self.ctx.bot)
                return self.ctx.test(self.ctx.prop(tok.text))
            self.next()
            if tok.text not in self.declared:
                raise self.error(f"undeclared atomic program {tok.text!r}", tok)
            return self.ctx.atom(tok.text)
        raise self.error(f"expected a program, found {tok.text or 'end of input'!r}", tok)

    # -- logic block ------------------------------------------------------------

    def atom_ref(self) -> Program:
        tok = self.next()
        if tok.kind != "ident":
            raise self.error("expected an atomic program name", tok)
        conversed = False
        while self.eat("^"):
            conversed = not conversed
        return self.ctx.atom(tok.text, conversed)

    def logic_block(self) -> dict[Program, FiniteAutomaton]:
        self.expect("{")
        automata: dict[Program, FiniteAutomaton] = {}
        while not self.at("}"):
            tok = self.next()
            if tok.text == "atoms":
                self.expect(":")
                while True:
                    name = self.next()
                    if name.kind != "ident":
                        raise self.error("expected an atom name", name)
                    if name.text not in self.declared:
                        self.atoms.append(name.text)
                        self.declared.add(name.text)
                    if not self.eat(","):
                        break
                self.expect(";")
            elif tok.text == "automaton":
                target = self.atom_ref()
                automata[target] = self.automaton_block(target)
            elif tok.text == "regex":
                target = self.atom_ref()
                self.expect("=")
                prog = ncnf_program(self.regex())
                self.expect(";")
                from .automata import compile_program

                aut = compile_program(prog)
                automata[target] = FiniteAutomaton(
                    aut.num_states, aut.initial, aut.transitions, aut.final,
                    name=f"aut({target})",
                )
            else:
                raise self.error(
                    "expected 'atoms', 'automaton' or 'regex' in logic block", tok
                )
        self.expect("}")
        return automata

    def automaton_block(self, target: Program) -> FiniteAutomaton:
        self.expect("{")
        ids: list[str] = []
        index: dict[str, int] = {}
        initial: list[str] = []
        final: list[str] = []
        trans: list[tuple[str, Program, str]] = []
        while not self.at("}"):
            tok = self.next()
            if tok.text == "states":
                self.expect(":")
                while self.peek().kind in ("ident", "number"):
                    sid = self.next().text
                    if sid not in index:
                        index[sid] = len(ids)
                        ids.append(sid)
                self.expect(";")
            elif tok.text in ("initial", "final"):
                self.expect(":")
                bucket = initial if tok.text == "initial" else final
                while self.peek().kind in ("ident", "number"):
                    bucket.append(self.next().text)
                self.expect(";")
            elif tok.text == "trans":
                self.expect(":")
                while self.peek().kind in ("ident", "number"):
                    src = self.next().text
                    self.expect("-")
                    letter = self.atom_ref()
                    self.expect("->")
                    dst = self.next()
                    if dst.kind not in ("ident", "number"):
                        raise self.error("expected a target state", dst)
                    trans.append((src, letter, dst.text))
                    self.expect(";")
            else:
                raise self.error(
                    "expected 'states', 'initial', 'final' or 'trans'", tok
                )
        self.expect("}")

        def resolve(sid: str, what: str) -> int:
            if sid not in index:
                raise self.error(f"{what} state {sid!r} not listed in 'states'")
            return index[sid]

        return FiniteAutomaton(
            len(ids),
            [resolve(s, "initial") for s in initial],
            [(resolve(a, "source"), lt, resolve(b, "target")) for a, lt, b in trans],
            [resolve(s, "final") for s in final],
            name=f"aut({target})",
        )

    def regex(self) -> Program:
        parts = [self.regex_concat()]
        while self.eat("+"):
            parts.append(self.regex_concat())
        return self.ctx.union(parts) if len(parts) > 1 else parts[0]

    def regex_concat(self) -> Program:
        parts = [self.regex_postfix()]
        while self.peek().kind == "ident" or self.at("("):
            parts.append(self.regex_postfix())
        return self.ctx.seq(parts) if len(parts) > 1 else parts[0]

    def regex_postfix(self) -> Program:
        if self.eat("("):
            p = self.regex()
            self.expect(")")
        else:
            tok = self.next()
            if tok.kind != "ident":
                raise self.error("expected an atom name in regex", tok)
            p = self.ctx.atom(tok.text)
        while True:
            if self.eat("*"):
                p = self.ctx.star(p)
            elif self.eat("^"):
                p = self.ctx.converse(p)
            else:
                return p

    # -- top level -----------------------------------------------------------------

    def problem(self) -> Problem:
        automata: dict[Program, FiniteAutomaton] = {}
        goal: set[Formula] = set()
        assumptions: set[Formula] = set()
        saw_logic = False
        while self.peek().kind != "eof":
            tok = self.next()
            if tok.text == "logic":
                if saw_logic:
                    raise self.error("duplicate logic block", tok)
                saw_logic = True
                automata.update(self.logic_block())
            elif tok.text in ("goal", "assumptions"):
                bucket = goal if tok.text == "goal" else assumptions
                self.expect("{")
                while not self.at("}"):
                    bucket.add(to_ncnf(self.formula()))
                    self.expect(";")
                self.expect("}")
            else:
                raise self.error(
                    "expected 'logic', 'assumptions' or 'goal'", tok
                )
        try:
            logic = LogicSpec(self.ctx, self.atoms, automata)
        except AutomatonError as exc:
            raise ParseError(str(exc), 1, 1) from exc
        return Problem(
            self.ctx, logic, frozenset(goal), frozenset(assumptions),
            warnings=list(logic.warnings),
        )


def parse_problem(text: str, ctx: Context | None = None) -> Problem:
    ctx = ctx or Context()
    return _Parser(tokenize(text), ctx).problem()


def parse_formula(text: str, ctx: Context, atoms: list[str] | None = None,
                  ncnf: bool = False) -> Formula:
    """Parse a standalone formula (test/tooling helper)."""
    parser = _Parser(tokenize(text), ctx)
    parser.declared = set(atoms or [])
    f = parser.formula()
    if parser.peek().kind != "eof":
        raise parser.error("trailing input after formula")
    return to_ncnf(f) if ncnf else f
