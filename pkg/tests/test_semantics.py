from __future__ import annotations

import random

from cpdltab import (
    KripkeModel,
    bounded_sat,
    close_model,
    eval_formula,
    extract_model,
    naive_check,
    to_ncnf,
    verify_extraction,
)
from cpdltab.semantics import ModelGraph, model_graph_to_kripke

from conftest import solve_checked
from oracles import random_formula, random_model


def test_close_model_identity_logic_is_noop(ctx, idl):
    rng = random.Random(1)
    m = random_model(rng, 3, ["p"], ["s", "r"])
    assert close_model(m, idl) is m


def test_close_model_example_logic_hand_trace(ctx, ex1_logic):
    # states a=0, b=1, c=2 with s-edges b->a and b->c; words of aut(r) are
    # (s^)*(s+r), so every backwards-s chain followed by one forward s
    # becomes an r-edge
    m = KripkeModel(3, {}, {"s": frozenset({(1, 0), (1, 2)}), "r": frozenset()})
    closed = close_model(m, ex1_logic)
    assert closed.relations["r"] == frozenset(
        {(1, 0), (1, 2), (0, 0), (0, 2), (2, 0), (2, 2)}
    )
    assert closed.relations["s"] == m.relations["s"]


def test_close_model_idempotent_on_random_models(ctx, ex1_logic):
    rng = random.Random(2)
    for _ in range(100):
        m = random_model(rng, 3, ["p"], ["s", "r"])
        once = close_model(m, ex1_logic)
        twice = close_model(once, ex1_logic)
        assert once.relations == twice.relations


def test_closed_relations_invert_cleanly(ctx, ex1_logic):
    rng = random.Random(3)
    for _ in range(50):
        m = close_model(random_model(rng, 3, ["p"], ["s", "r"]), ex1_logic)
        for name in ("s", "r"):
            assert m.rel(name, conversed=True) == frozenset(
                (y, x) for x, y in m.rel(name)
            )


def test_eval_top_is_everything(ctx):
    m = KripkeModel(3, {}, {})
    assert eval_formula(m, ctx.top) == frozenset({0, 1, 2})


def test_eval_loop_star(ctx):
    p = ctx.prop("p")
    m = KripkeModel(1, {"p": frozenset({0})}, {"s": frozenset({(0, 0)})})
    f = ctx.dia(ctx.star(ctx.atom("s")), p)
    assert eval_formula(m, f) == frozenset({0})


def test_eval_example_logic_closed_model(ctx, ex1_logic):
    # in the closed hand-trace model, [r]!p holds at state 0 exactly when
    # !p holds at both of 0's r-successors (0 and 2)
    m = close_model(
        KripkeModel(
            3,
            {"p": frozenset({0})},
            {"s": frozenset({(1, 0), (1, 2)}), "r": frozenset()},
        ),
        ex1_logic,
    )
    f = ctx.box(ctx.atom("r"), ctx.not_(ctx.prop("p")))
    # r-successors of 0 are {0, 2}; p holds at 0, so the box fails at 0
    assert 0 not in eval_formula(m, f)
    # r-successors of 2 are {0, 2} as well
    assert 2 not in eval_formula(m, f)


def test_eval_agrees_with_naive_checker(ctx):
    rng = random.Random(17)
    for _ in range(300):
        f = random_formula(rng, ctx, ["s", "r"], ["p", "q"], 4)
        m = random_model(rng, 3, ["p", "q"], ["s", "r"])
        denotation = eval_formula(m, f)
        for state in range(3):
            assert (state in denotation) == naive_check(m, state, f)


def test_bounded_sat_smallest_witness(ctx, idl):
    p = ctx.prop("p")
    m = bounded_sat([ctx.dia(ctx.atom("s"), p)], [], idl, max_states=2)
    assert m is not None and m.num_states == 1
    assert m.relations["s"] == frozenset({(0, 0)})
    assert m.valuation["p"] == frozenset({0})


def test_bounded_sat_clash_has_no_model(ctx, idl):
    p = ctx.prop("p")
    clash = to_ncnf(ctx.and_(p, ctx.not_(p)))
    for n in (1, 2, 3):
        assert bounded_sat([clash], [], idl, max_states=n) is None


def test_bounded_sat_converse_validity(ctx, idl):
    # negation of p -> [s]<s^>p can have no model of any size
    p = ctx.prop("p")
    s = ctx.atom("s")
    f = to_ncnf(ctx.and_(p, ctx.dia(s, ctx.box(ctx.converse(s), ctx.not_(p)))))
    assert bounded_sat([f], [], idl, max_states=3) is None


def test_bounded_sat_respects_assumptions(ctx, idl):
    p = ctx.prop("p")
    m = bounded_sat([ctx.dia(ctx.atom("s"), ctx.top)], [ctx.not_(p)], idl, 2)
    assert m is not None
    assert eval_formula(m, ctx.not_(p)) == frozenset(range(m.num_states))


def test_bounded_sat_is_deterministic(ctx, idl):
    p, q = ctx.prop("p"), ctx.prop("q")
    f = to_ncnf(ctx.and_(ctx.dia(ctx.atom("s"), p), ctx.or_(q, ctx.not_(q))))
    first = bounded_sat([f], [], idl, 3)
    second = bounded_sat([f], [], idl, 3)
    assert first == second


def test_bounded_sat_example_logic_inclusion(ctx, ex1_logic):
    # [r]p & <s>!p is contradictory under the inclusion s <= r
    p = ctx.prop("p")
    f = to_ncnf(
        ctx.and_(ctx.box(ctx.atom("r"), p), ctx.dia(ctx.atom("s"), ctx.not_(p)))
    )
    assert bounded_sat([f], [], ex1_logic, 3) is None


def test_bounded_sat_finds_closed_models(ctx, ex1_logic):
    p = ctx.prop("p")
    f = to_ncnf(ctx.dia(ctx.atom("s"), p))
    m = bounded_sat([f], [], ex1_logic, 2)
    assert m is not None
    closed = close_model(m, ex1_logic)
    assert closed.relations == m.relations  # returned model is already closed


def test_extract_single_world(ctx, idl):
    p = ctx.prop("p")
    res = solve_checked(idl, [p])
    mg = extract_model(res.tableau)
    assert len(mg.worlds) == 1
    assert p in mg.worlds[0]
    assert not mg.edges


def test_extract_transition(ctx, idl):
    p = ctx.prop("p")
    goal = [ctx.dia(ctx.atom("s"), p)]
    res = solve_checked(idl, goal)
    mg = extract_model(res.tableau)
    assert len(mg.worlds) == 2
    assert mg.edges[ctx.atom("s")] == frozenset({(0, 1)})
    assert p in mg.worlds[1]
    assert not verify_extraction(mg, goal, [], idl)


def test_extract_model_checks_out_semantically(ctx, idl):
    p, q = ctx.prop("p"), ctx.prop("q")
    s = ctx.atom("s")
    goal = [to_ncnf(ctx.and_(ctx.dia(ctx.star(s), p), ctx.not_(p)))]
    assumptions = [to_ncnf(ctx.or_(q, ctx.not_(q)))]
    res = solve_checked(idl, goal, assumptions)
    mg = extract_model(res.tableau)
    assert not verify_extraction(mg, goal, assumptions, idl)


def test_model_graph_local_consistency_detector(ctx):
    p = ctx.prop("p")
    bad = ModelGraph([frozenset({p, ctx.not_(p)})], {})
    assert bad.check_local_consistency()
    good = ModelGraph([frozenset({p})], {})
    assert not good.check_local_consistency()


def test_model_graph_to_kripke_inverts_conversed_edges(ctx, idl):
    p = ctx.prop("p")
    mg = ModelGraph(
        [frozenset({p}), frozenset()],
        {ctx.atom("s", True): frozenset({(0, 1)})},
    )
    m = model_graph_to_kripke(mg, idl)
    assert m.relations["s"] == frozenset({(1, 0)})
