"""Independent reference computations used as test oracles.

These deliberately avoid the package's automaton machinery: program
languages are computed straight from the defining language equations, so
they can check the compiled automata from the outside.
"""

from __future__ import annotations

import random

from cpdltab.syntax import ATOM, CONV, SEQ, STAR, TEST, UNION, Context, Program

Word = tuple[Program, ...]


def language_upto(prog: Program, max_len: int) -> set[Word]:
    """All words of ``L(prog)`` with at most ``max_len`` letters, derived
    from the language equations by structural recursion."""
    kind = prog.kind
    if kind in (ATOM, TEST):
        return {(prog,)} if max_len >= 1 else set()
    if kind == SEQ:
        words: set[Word] = {()}
        for part in prog.args:
            step = language_upto(part, max_len)
            words = {
                w + v for w in words for v in step if len(w) + len(v) <= max_len
            }
        return words
    if kind == UNION:
        out: set[Word] = set()
        for part in prog.args:
            out |= language_upto(part, max_len)
        return out
    if kind == STAR:
        base = language_upto(prog.args[0], max_len)
        words: set[Word] = {()}
        frontier: set[Word] = {()}
        while frontier:
            nxt = set()
            for w in frontier:
                for v in base:
                    if v and len(w) + len(v) <= max_len:
                        u = w + v
                        if u not in words:
                            words.add(u)
                            nxt.add(u)
            frontier = nxt
        return words
    if kind == CONV:
        inner = language_upto(prog.args[0], max_len)
        return {conversed_reversal(w) for w in inner}
    raise ValueError(kind)


def conversed_reversal(word: Word) -> Word:
    out = []
    for letter in reversed(word):
        if letter.kind != ATOM:
            raise ValueError("tests cannot be conversed")
        out.append(letter.ctx.atom(letter.args[0], not letter.args[1]))
    return tuple(out)


def substituted_words(
    word: Word, letter_languages: dict[Program, set[Word]], max_len: int
) -> set[Word]:
    """Every word obtainable by replacing each atomic letter with a word of
    its language (tests stay put), capped at ``max_len``."""
    results: set[Word] = {()}
    for letter in word:
        if letter.kind == TEST:
            pieces = {(letter,)}
        else:
            pieces = letter_languages[letter]
        results = {
            w + v for w in results for v in pieces if len(w) + len(v) <= max_len
        }
    return results


# ---------------------------------------------------------------------------
# random generation (seeded by callers; deterministic across runs)


def random_program(rng: random.Random, ctx: Context, atoms: list[str],
                   depth: int, props: list[str]) -> Program:
    if depth <= 0 or rng.random() < 0.5:
        a = ctx.atom(rng.choice(atoms))
        return ctx.converse(a) if rng.random() < 0.3 else a
    kind = rng.choice(("seq", "union", "star", "test"))
    if kind == "seq":
        return ctx.seq([random_program(rng, ctx, atoms, depth - 1, props),
                        random_program(rng, ctx, atoms, depth - 1, props)])
    if kind == "union":
        return ctx.union([random_program(rng, ctx, atoms, depth - 1, props),
                          random_program(rng, ctx, atoms, depth - 1, props)])
    if kind == "star":
        return ctx.star(random_program(rng, ctx, atoms, depth - 1, props))
    return ctx.test(random_formula(rng, ctx, atoms, props, depth - 1))


def random_formula(rng: random.Random, ctx: Context, atoms: list[str],
                   props: list[str], depth: int):
    if depth <= 0:
        roll = rng.random()
        if roll < 0.05:
            return ctx.top
        if roll < 0.1:
            return ctx.bot
        f = ctx.prop(rng.choice(props))
        return ctx.not_(f) if rng.random() < 0.4 else f
    kind = rng.choice(("not", "and", "or", "implies", "dia", "box", "dia", "box"))
    if kind == "not":
        return ctx.not_(random_formula(rng, ctx, atoms, props, depth - 1))
    if kind == "and":
        return ctx.and_(random_formula(rng, ctx, atoms, props, depth - 1),
                        random_formula(rng, ctx, atoms, props, depth - 1))
    if kind == "or":
        return ctx.or_(random_formula(rng, ctx, atoms, props, depth - 1),
                       random_formula(rng, ctx, atoms, props, depth - 1))
    if kind == "implies":
        return ctx.implies(random_formula(rng, ctx, atoms, props, depth - 1),
                           random_formula(rng, ctx, atoms, props, depth - 1))
    prog = random_program(rng, ctx, atoms, 2, props)
    body = random_formula(rng, ctx, atoms, props, depth - 1)
    return ctx.dia(prog, body) if kind == "dia" else ctx.box(prog, body)


def random_ncnf(rng: random.Random, ctx: Context, atoms: list[str],
                props: list[str], depth: int):
    from cpdltab.syntax import to_ncnf

    return to_ncnf(random_formula(rng, ctx, atoms, props, depth))


def random_model(rng: random.Random, num_states: int, props: list[str],
                 atoms: list[str]):
    from cpdltab.semantics import KripkeModel

    states = range(num_states)
    valuation = {
        p: frozenset(s for s in states if rng.random() < 0.5) for p in props
    }
    relations = {
        a: frozenset(
            (x, y) for x in states for y in states if rng.random() < 0.35
        )
        for a in atoms
    }
    return KripkeModel(num_states, valuation, relations)
