from unfolder import fixpoint, parse_expr
from unfolder.apps import goal_trace
from unfolder.machine import normalize
from unfolder.prim import eval_expr
from unfolder import DEFAULT
from unfolder.parser import parse_program
from unfolder.syntax import FApp, Lit, Var, subst
from unfolder.traces import (
    TraceStep,
    compose_position,
    cross_concat,
    rule_sequence,
)

from conftest import load


def test_compose_prefixes_every_step():
    assert compose_position((1,), [(TraceStep("A3", ()),)]) == \
        [(TraceStep("A3", (1,)),)]


def test_compose_with_empty_trace_list():
    assert compose_position((2,), []) == []


def test_compose_unrolls_both_clauses():
    got = compose_position((1,), [(TraceStep("F", ()), TraceStep("G", (2,)))])
    assert got == [(TraceStep("F", (1,)), TraceStep("G", (1, 2)))]


def test_cross_concat_identity_on_empty_sides():
    left = [(TraceStep("A", ()),)]
    assert cross_concat(left, [], cap=8) == left
    assert cross_concat([], left, cap=8) == left


def _trace_sequences(interp):
    return {rule_sequence(f.traces[0]) for f in interp.facts.values()}


def test_chain_trace_sequences_at_step_four():
    p = load("chain")
    seq, _ = fixpoint(p, 4)
    assert _trace_sequences(seq[4]) == {
        ("H",), ("J",), ("F2",), ("G", "H"), ("F", "G", "H"),
        ("Goal", "F", "G", "H"),
        ("Goal2", "F2", "F", "G", "H", "F", "G", "H"),
        ("Goal3", "J"),
    }


def test_bottom_rule_steps_are_recorded_but_hidden():
    p = load("chain")
    seq, _ = fixpoint(p, 1)
    goal3 = [f for f in seq[1].facts.values() if f.fn == "goal3"]
    assert len(goal3) == 1
    trace = goal3[0].traces[0]
    assert [(s.rule, s.pos, s.bot) for s in trace] == \
        [("Goal3", (), False), ("j", (1,), True)]
    assert rule_sequence(trace) == ("Goal3",)
    assert rule_sequence(trace, include_bots=True) == ("Goal3", "j")


def test_single_step_traces_mean_rule_shaped_facts():
    from unfolder.order import variants

    p = load("chain")
    seq, _ = fixpoint(p, 4)
    for f in seq[4].facts.values():
        steps = [s for s in f.traces[0] if not s.bot]
        rule = p.rule_by_label(f.origin_rule)
        instance = eval_expr(rule.body, p.signature, DEFAULT)
        rule_shaped = variants((f.body,) + f.patterns,
                               (instance,) + rule.patterns)
        assert rule_shaped == (len(steps) == 1), str(f)


def test_rev_fact_trace_matches_derivation():
    p = load("rev")
    seq, _ = fixpoint(p, 3)
    target = [f for f in seq[3].facts.values()
              if f.fn == "rev" and len(str(f)) > 40]
    two = [f for f in target
           if rule_sequence(f.traces[0]) ==
           ("R2", "R2", "R1", "A1", "A2", "A1")]
    assert two, sorted(str(f) for f in seq[3].facts.values())


def test_goal_traces_drop_the_wrapper_step():
    p = load("chain")
    seq, _ = fixpoint(p, 4)
    rows = goal_trace(p, parse_expr("goal2", p), seq[4])
    sequences = {rule_sequence(t) for fact, t in rows
                 if str(fact.body) == "Lit(20)"}
    assert ("Goal2", "F2", "F", "G", "H", "F", "G", "H") in sequences


def test_trace_replay_reaches_fact_body():
    # replaying a trace over the instantiated head reaches the fact's value
    p = load("chain")
    seq, _ = fixpoint(p, 4)
    for f in seq[4].facts.values():
        if any(s.bot for s in f.traces[0]):
            continue
        binding = {v.name: Lit(5) for pat in f.patterns for v in [pat]
                   if isinstance(pat, Var)}
        call = FApp(f.fn, tuple(subst(pat, binding) for pat in f.patterns))
        want = eval_expr(subst(f.body, binding), p.signature, DEFAULT)
        got = normalize(p, call, "lazy", 4000)
        assert got == want, f"{f}: {got} != {want}"


def test_multiple_traces_are_kept_up_to_cap():
    p = parse_program("""
A: a = K(b1,b2)
B1: b1 = 1
B2: b2 = 2
""")
    seq, _ = fixpoint(p, 3)
    fact = [f for f in seq[2].facts.values() if f.fn == "a"][0]
    seqs = {rule_sequence(t) for t in fact.traces}
    # both derivation orders are remembered
    assert ("A", "B1", "B2") in seqs
    assert ("A", "B2", "B1") in seqs


def test_traces_of_fact_and_expr_surface():
    from unfolder.apps import traces_of_expr, traces_of_fact

    p = load("chain")
    seq, _ = fixpoint(p, 4)
    goal_fact = [f for f in seq[4].facts.values() if f.fn == "goal"][0]
    assert traces_of_fact(seq[4], goal_fact) == list(goal_fact.traces)
    traces = traces_of_expr(p, parse_expr("goal", p), seq[4])
    assert ("Goal", "F", "G", "H") in {rule_sequence(t) for t in traces}
    import pytest
    from unfolder.engine import make_fact
    from unfolder.syntax import CApp

    with pytest.raises(KeyError):
        traces_of_fact(seq[4], make_fact("goal", (), (), CApp("Nope")))
