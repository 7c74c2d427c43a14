from __future__ import annotations

import random

import pytest

from cpdltab import (
    AutomatonError,
    Context,
    FiniteAutomaton,
    LogicSpec,
    accepts,
    compile_closed,
    compile_program,
    derive_converse,
    enumerate_words,
    identity_logic,
)
from cpdltab.automata import identity_automaton, trim

from conftest import make_example_logic
from oracles import conversed_reversal, language_upto, random_program, substituted_words


def words_of(aut, n):
    return enumerate_words(aut, n)


def test_compile_single_letter(ctx):
    s = ctx.atom("s")
    aut = compile_program(s)
    assert words_of(aut, 3) == {(s,)}


def test_compile_test_then_star(ctx):
    p = ctx.prop("p")
    s = ctx.atom("s")
    prog = ctx.seq([ctx.test(p), ctx.star(s)])
    aut = compile_program(prog)
    assert words_of(aut, 4) == language_upto(prog, 4)


def test_compile_union_seq_star(ctx):
    s1, s2, s3 = ctx.atom("s1"), ctx.atom("s2"), ctx.atom("s3")
    prog = ctx.seq([ctx.union([s1, s2]), ctx.star(s3)])
    aut = compile_program(prog)
    assert accepts(aut, [s1])
    assert accepts(aut, [s2])
    assert accepts(aut, [s1, s3])
    assert accepts(aut, [s2, s3, s3])
    assert not accepts(aut, [])
    assert not accepts(aut, [s3])


@pytest.mark.parametrize("seed", range(25))
def test_compile_matches_language_equations(seed):
    ctx = Context()
    rng = random.Random(seed)
    prog = random_program(rng, ctx, ["s", "r"], 3, ["p", "q"])
    from cpdltab.syntax import ncnf_program

    prog = ncnf_program(prog)
    aut = compile_program(prog)
    assert words_of(aut, 4) == language_upto(prog, 4)


def test_compiled_automata_are_trim(ctx):
    # every state lies on an initial-to-final path, so the unfolding rules
    # never branch into dead automaton states
    s, r = ctx.atom("s"), ctx.atom("r")
    prog = ctx.union([ctx.seq([s, r]), ctx.star(s)])
    aut = compile_program(prog)
    fwd = {q: set() for q in range(aut.num_states)}
    bwd = {q: set() for q in range(aut.num_states)}
    for a, _, b in aut.transitions:
        fwd[a].add(b)
        bwd[b].add(a)

    def closure(seed, edges):
        seen = set(seed)
        stack = list(seen)
        while stack:
            x = stack.pop()
            for y in edges[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    assert closure(aut.initial, fwd) == set(range(aut.num_states))
    assert closure(aut.final, bwd) == set(range(aut.num_states))


def test_closed_compilation_identity_logic(ctx, idl):
    rng = random.Random(11)
    for _ in range(15):
        prog = random_program(rng, ctx, ["s", "r"], 3, ["p", "q"])
        from cpdltab.syntax import ncnf_program

        prog = ncnf_program(prog)
        plain = compile_program(prog)
        closed = compile_closed(prog, idl)
        assert words_of(plain, 4) == words_of(closed, 4)


def test_closed_compilation_example_logic(ctx, ex1_logic):
    s, sbar, r = ctx.atom("s"), ctx.atom("s", True), ctx.atom("r")
    aut = ex1_logic.closed_automaton(r)
    # words derivable from r: (s^)*(s + r)
    assert accepts(aut, [s])
    assert accepts(aut, [r])
    assert accepts(aut, [sbar, s])
    assert accepts(aut, [sbar, r])
    assert accepts(aut, [sbar, sbar, s])
    assert not accepts(aut, [])
    assert not accepts(aut, [sbar])
    assert not accepts(aut, [s, s])


def test_closed_compilation_substitution_oracle(ctx, ex1_logic):
    # bounded substitution: a word is accepted by the closed automaton iff
    # it arises from a plain-language word by replacing each letter with a
    # word its own automaton accepts
    from cpdltab.syntax import ncnf_program

    letter_langs = {
        letter: {
            w for w in enumerate_words(ex1_logic.automaton(letter), 4)
        }
        for letter in ex1_logic.letters
    }
    rng = random.Random(23)
    for _ in range(10):
        prog = ncnf_program(random_program(rng, ctx, ["s", "r"], 2, ["p", "q"]))
        closed = compile_closed(prog, ex1_logic)
        expected = set()
        for word in language_upto(prog, 4):
            expected |= substituted_words(word, letter_langs, 4)
        assert words_of(closed, 4) == expected


def test_derive_converse_single_letter(ctx):
    s = ctx.atom("s")
    sbar = ctx.atom("s", True)
    aut = identity_automaton(s)
    assert words_of(derive_converse(aut), 2) == {(sbar,)}


def test_derive_converse_word_oracle(ctx, ex1_logic):
    aut = ex1_logic.automaton(ctx.atom("r"))
    conv = derive_converse(aut)
    expected = {conversed_reversal(w) for w in words_of(aut, 3)}
    assert words_of(conv, 3) == expected


def test_derive_converse_involution(ctx, ex1_logic):
    aut = ex1_logic.automaton(ctx.atom("r"))
    twice = derive_converse(derive_converse(aut))
    assert words_of(twice, 4) == words_of(aut, 4)


def test_derive_converse_rejects_tests(ctx):
    p = ctx.prop("p")
    aut = identity_automaton(ctx.test(p))
    with pytest.raises(AutomatonError):
        derive_converse(aut)


def test_accepts_example_words(ctx, ex1_logic):
    aut = ex1_logic.automaton(ctx.atom("r"))
    s, sbar = ctx.atom("s"), ctx.atom("s", True)
    assert accepts(aut, [sbar, s])
    assert not accepts(aut, [])
    assert accepts(aut, [ctx.atom("r")])


def test_trim_drops_dead_states(ctx):
    s = ctx.atom("s")
    aut = FiniteAutomaton(3, {0}, [(0, s, 1), (2, s, 1)], {1})
    trimmed = trim(aut)
    assert trimmed.num_states == 2
    assert words_of(trimmed, 2) == words_of(aut, 2)


def test_logic_requires_letter_self_acceptance(ctx):
    s = ctx.atom("s")
    r = ctx.atom("r")
    bad = FiniteAutomaton(2, {0}, [(0, s, 1)], {1}, name="bad")  # misses r itself
    with pytest.raises(AutomatonError, match="must accept the word"):
        LogicSpec(ctx, ["s", "r"], {r: bad})


def test_logic_rejects_undeclared_letters(ctx):
    r = ctx.atom("r")
    t = ctx.atom("t")
    aut = FiniteAutomaton(2, {0}, [(0, r, 1), (0, t, 1)], {1})
    with pytest.raises(AutomatonError, match="undeclared letter"):
        LogicSpec(ctx, ["r"], {r: aut})


def test_logic_rejects_automata_for_unknown_atoms(ctx):
    t = ctx.atom("t")
    with pytest.raises(AutomatonError, match="undeclared atoms"):
        LogicSpec(ctx, ["s"], {t: identity_automaton(t)})


def test_logic_derives_missing_converse_polarity(ctx, ex1_logic):
    rbar = ctx.atom("r", True)
    s, sbar, r = ctx.atom("s"), ctx.atom("s", True), ctx.atom("r")
    aut = ex1_logic.automaton(rbar)
    # conversed reversal of (s^)*(s+r) is (s^ + r^) s*
    assert accepts(aut, [sbar])
    assert accepts(aut, [ctx.atom("r", True), s])
    assert not accepts(aut, [s])


def test_logic_warns_on_asymmetric_pair(ctx):
    s = ctx.atom("s")
    sbar = ctx.atom("s", True)
    # claim s^ derives only s^ while s also derives ss: not symmetric
    pos = FiniteAutomaton(3, {0}, [(0, s, 1), (0, s, 2), (2, s, 1)], {1})
    neg = identity_automaton(sbar)
    logic = LogicSpec(ctx, ["s"], {s: pos, sbar: neg})
    assert logic.warnings


def test_identity_detection(ctx):
    assert identity_logic(ctx, ["s", "r"]).is_identity
    assert not make_example_logic(ctx).is_identity


def test_letters_accept_themselves_by_construction(ctx, ex1_logic):
    for letter in ex1_logic.letters:
        assert accepts(ex1_logic.automaton(letter), [letter])
