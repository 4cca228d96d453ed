"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL
line.  Expected listings are frozen from the worked derivations that the
unit suite repeats piecewise; timings are asserted where the criterion
states a budget.

Run with ``pytest tests/test_acceptance.py -s`` to see every verdict line.
"""

import itertools
import random
import sys
import time

from unfolder import (
    Config,
    DEFAULT,
    clean,
    expr_str,
    fixpoint,
    normalize,
    overlaps,
    parse_expr,
    satisfiable,
    ueval,
)
from unfolder.apps import (
    abstract_fixpoint,
    answer,
    build_edt,
    coverage,
    new_session,
    next_question,
)
from unfolder.engine import resolve_clean_mode
from unfolder.order import term_lt
from unfolder.traces import rule_sequence

from conftest import fact_strings, load

DEFER = Config(defer_comparisons=True)


def report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail and not ok:
        line += f" -- {detail}"
    print(line, file=sys.stderr)
    assert ok, detail


def test_criterion_1_add_reproduction():
    # Exact two-step listing for Peano addition. NOTE: the engine also
    # derives the frontier facts add(Suc(b),c)=Suc(Bot) etc., which record
    # what is still unknown at each step; see the decisions ledger for why
    # this criterion cannot hold together with criterion 3.
    t0 = time.monotonic()
    p = load("add")
    seq, _ = fixpoint(p, 2)
    i1, i2 = fact_strings(seq[1]), fact_strings(seq[2])
    elapsed = time.monotonic() - t0
    ok = (i1 == {"add(Zero,b) = b"}
          and i2 == {"add(Zero,b) = b", "add(Suc(Zero),b) = Suc(b)"}
          and elapsed < 1.0)
    report("criterion 1: two-step addition listing", ok,
           f"I1={sorted(i1)} I2={sorted(i2)} ({elapsed:.2f}s)")


def test_criterion_2_filter_reproduction():
    t0 = time.monotonic()
    p = load("filter")
    seq, _ = fixpoint(p, 2)
    got = fact_strings(seq[2])
    want = {
        "ite(True,b,c) = b",
        "ite(False,b,c) = c",
        "filter(b,Nil) = Nil",
        "filter(b,Cons(c,Nil)) | snd(match(True,b@[c])) = Cons(c,Nil)",
        "filter(b,Cons(c,Cons(d,e))) | snd(match(True,b@[c])) = Cons(c,Bot)",
        "filter(b,Cons(c,Nil)) | snd(match(False,b@[c])) = Nil",
        "filter(b,Cons(c,Cons(d,e))) | snd(match(False,b@[c])) = Bot",
    }
    elapsed = time.monotonic() - t0
    ok = got == want and elapsed < 1.0
    report("criterion 2: higher-order filter step two (7 facts)", ok,
           f"got={sorted(got)} ({elapsed:.2f}s)")


SENIORS_I3 = {
    "gen(b) = Cons(b,Cons(b+1,Cons(b+1+1,Bot)))",
    "ite(False,b,c) = c",
    "ite(True,b,c) = b",
    "main50 = Cons(Bot,Cons(Bot,Bot))",
    "main50 | snd(match(False,64>64)) = Cons(False,Cons(Bot,Bot))",
    "main50 | snd(match(False,64>64)),snd(match(False,65>64)) = "
    "Cons(False,Cons(False,Bot))",
    "main50 | snd(match(False,64>64)),snd(match(True,65>64)) = "
    "Cons(False,Cons(True,Bot))",
    "main50 | snd(match(False,65>64)) = Cons(Bot,Cons(False,Bot))",
    "main50 | snd(match(False,65>64)),snd(match(False,64>64)) = "
    "Cons(False,Cons(False,Bot))",
    "main50 | snd(match(False,65>64)),snd(match(True,64>64)) = "
    "Cons(True,Cons(False,Bot))",
    "main50 | snd(match(True,64>64)) = Cons(True,Cons(Bot,Bot))",
    "main50 | snd(match(True,64>64)),snd(match(False,65>64)) = "
    "Cons(True,Cons(False,Bot))",
    "main50 | snd(match(True,64>64)),snd(match(True,65>64)) = "
    "Cons(True,Cons(True,Bot))",
    "main50 | snd(match(True,65>64)) = Cons(Bot,Cons(True,Bot))",
    "main50 | snd(match(True,65>64)),snd(match(False,64>64)) = "
    "Cons(False,Cons(True,Bot))",
    "main50 | snd(match(True,65>64)),snd(match(True,64>64)) = "
    "Cons(True,Cons(True,Bot))",
    "map(b,Cons(c,Cons(d,Cons(e,f)))) = "
    "Cons(b@[c],Cons(b@[d],Cons(b@[e],Bot)))",
    "map(b,Cons(c,Cons(d,Nil))) = Cons(b@[c],Cons(b@[d],Nil))",
    "map(b,Cons(c,Nil)) = Cons(b@[c],Nil)",
    "map(b,Nil) = Nil",
    "senior(b) | snd(match(False,b>64)) = False",
    "senior(b) | snd(match(True,b>64)) = True",
}


def test_criterion_3_walkthrough_reproduction():
    t0 = time.monotonic()
    p = load("seniors")
    seq, _ = fixpoint(p, 2)
    i1 = fact_strings(seq[1])
    ok = i1 == {
        "ite(True,b,c) = b",
        "ite(False,b,c) = c",
        "gen(b) = Cons(b,Bot)",
        "map(b,Nil) = Nil",
        "map(b,Cons(c,d)) = Cons(b@[c],Bot)",
    }
    ok = ok and fact_strings(seq[1], bots=True) == \
        {"senior(b) = Bot", "main50 = Bot"}
    i2 = fact_strings(seq[2])
    ok = ok and len(i2) == 9
    ok = ok and "main50 = Cons(Bot,Bot)" in i2
    ok = ok and "senior(b) | snd(match(True,b>64)) = True" in i2
    ok = ok and "senior(b) | snd(match(False,b>64)) = False" in i2
    # listing fidelity mode reproduces the full third step
    seq3, _ = fixpoint(p, 3, DEFER)
    got3 = fact_strings(seq3[3])
    ok = ok and got3 == SENIORS_I3
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 5.0
    report("criterion 3: infinite-list walkthrough (steps 1-3)", ok,
           f"I3 diff={sorted(got3 ^ SENIORS_I3)} ({elapsed:.2f}s)")


def test_criterion_4_laziness():
    p = load("ones")
    seq, converged = fixpoint(p, 6)
    ok = "main = 1" in fact_strings(seq[2])
    ok = ok and not converged
    ones = []
    for interp in seq[1:]:
        (fact,) = [f for f in interp.facts.values() if f.fn == "ones"]
        ones.append(fact.body)
    for a, b in zip(ones, ones[1:]):
        ok = ok and term_lt(a, b)
    report("criterion 4: laziness on the infinite list", ok,
           f"ones bodies: {[expr_str(b) for b in ones]}")


def _random_goals(rng):
    """(program name, goal text, fixpoint bound) triples."""
    def peano(n):
        return "Zero" if n == 0 else f"Suc({peano(n - 1)})"

    def int_list(xs):
        out = "[]"
        for x in reversed(xs):
            out = f"{x}:({out})"
        return out

    goals = []
    for _ in range(60):
        m, n = rng.randrange(4), rng.randrange(4)
        goals.append(("add", f"add ({peano(m)}) ({peano(n)})", 7))
    for _ in range(40):
        m, n = rng.randrange(5), rng.randrange(4)
        goals.append(("addb", f"addb ({peano(m)}) ({peano(n)})", 8))
    for _ in range(40):
        xs = [rng.randrange(-5, 9) for _ in range(rng.randrange(4))]
        goals.append(("rev", f"rev ({int_list(xs)})", 6))
        ys = [rng.randrange(9) for _ in range(rng.randrange(3))]
        goals.append(("rev", f"append ({int_list(ys)}) ({int_list(xs)})", 6))
    for _ in range(30):
        a, b = rng.randrange(-9, 99), rng.randrange(-9, 99)
        goals.append(("chain", rng.choice(
            ["goal", "goal2", "goal3", f"f2({a},{b})", f"f({a})",
             f"g({a})", f"h({a})", "j(5)"]), 6))
    for _ in range(20):
        xs = [rng.randrange(-3, 5) for _ in range(rng.randrange(3))]
        goals.append(("filter_run", f"filter(pos, ({int_list(xs)}))", 5))
        goals.append(("filter_run", f"pos({rng.randrange(-4, 5)})", 3))
    goals += [("ones", "main", 3)] * 5
    for _ in range(10):
        goals.append(("appfirst", f"main {rng.randrange(50)}", 4))
    for _ in range(10):
        goals.append(("seniors", f"senior({rng.randrange(40, 90)})", 3))
    return goals


def test_criterion_5_equivalence_property():
    t0 = time.monotonic()
    rng = random.Random(20260811)
    goals = _random_goals(rng)
    assert len(goals) >= 200
    programs = {}
    sequences = {}
    checked = 0
    agreed = 0
    for name, text, bound in goals:
        if name not in programs:
            programs[name] = load(name)
            sequences[name] = fixpoint(programs[name], bound)[0]
        p = programs[name]
        goal = parse_expr(text, p)
        nf = normalize(p, goal, "lazy", 10_000)
        if nf is None:
            continue  # only terminating normalizations take part
        checked += 1
        member = False
        for interp in sequences[name][1:]:
            res = ueval(interp, goal, p.signature, Config(ueval_fuel=4000))
            vals = res.bot_free_values()
            if vals:
                member = nf in vals
                break
        agreed += member
    elapsed = time.monotonic() - t0
    ok = checked >= 200 and agreed == checked and elapsed < 60.0
    report("criterion 5: unfolding agrees with small-step execution "
           f"({agreed}/{checked} goals, {elapsed:.1f}s)", ok)


def test_criterion_6_no_overlaps_and_clean_idempotent():
    cases = [("add", 4, DEFAULT), ("ones", 5, DEFAULT),
             ("filter", 3, DEFAULT), ("seniors", 3, DEFAULT),
             ("seniors", 3, DEFER), ("chain", 5, DEFAULT),
             ("rev", 4, DEFAULT), ("addb", 4, DEFAULT),
             ("appfirst", 4, DEFAULT), ("filter_run", 3, DEFAULT),
             ("parity", 3, DEFAULT), ("demand", 3, DEFAULT)]
    interp_count = 0
    overlap_pairs = 0
    idempotent = True
    for name, steps, cfg in cases:
        p = load(name)
        seq, _ = fixpoint(p, steps, cfg)
        mode = resolve_clean_mode(p, cfg)
        for interp in seq:
            interp_count += 1
            facts = list(interp.facts.values())
            for f1, f2 in itertools.combinations(facts, 2):
                if f1.fn != f2.fn:
                    continue
                if overlaps(f1, f2, p.signature, cfg) is None:
                    continue
                both = tuple(f1.guard) + tuple(f2.guard)
                if satisfiable(both, p.signature, cfg) == "yes":
                    overlap_pairs += 1
            once, _ = clean(facts, p.signature, cfg, mode)
            twice, _ = clean(once.values(), p.signature, cfg, mode)
            idempotent = idempotent and set(once) == set(twice) \
                and set(once) == {f.key() for f in facts}
    ok = interp_count >= 50 and overlap_pairs == 0 and idempotent
    report(f"criterion 6: no overlapping facts across {interp_count} "
           "interpretations; clean is idempotent", ok,
           f"pairs={overlap_pairs} idempotent={idempotent}")


def test_criterion_7_trace_sequences():
    p = load("chain")
    seq, _ = fixpoint(p, 4)
    got = {rule_sequence(f.traces[0]) for f in seq[4].facts.values()}
    required = {
        ("H",), ("G", "H"), ("F", "G", "H"), ("Goal", "F", "G", "H"),
        ("Goal2", "F2", "F", "G", "H", "F", "G", "H"), ("Goal3", "J"),
    }
    # the two remaining facts are single-rule like ("H",)
    full = required | {("J",), ("F2",)}
    ok = required <= got and got == full and len(seq[4].facts) == 8
    report("criterion 7: derivation traces of the arithmetic chain", ok,
           f"got={sorted(got)}")


def test_criterion_8_debugging():
    p = load("addb")
    edt = build_edt(p, parse_expr("main24", p), 5)
    ok = len(edt.nodes) == 3
    session = new_session(edt)
    for verdict in ["wrong", "wrong", "correct"]:
        node = next_question(session)
        answer(session, node, verdict)
    ok = ok and session.status == "blamed" and session.blamed_rule == "A3"
    report("criterion 8: three-node dependence tree blames rule A3", ok,
           f"status={session.status} rule={session.blamed_rule}")


def test_criterion_9_coverage():
    p = load("rev")
    one = coverage(p, 1)
    ok = one.function_percent("rev") == 50.0 \
        and one.function_percent("append") == 50.0
    three = coverage(p, 3, stop_early=False)
    ok = ok and three.total_percent == 100.0
    seq, _ = fixpoint(p, 3)
    rev_traces = {rule_sequence(f.traces[0])
                  for f in seq[3].facts.values() if f.fn == "rev"}
    ok = ok and ("R2", "R2", "R1", "A1", "A2", "A1") in rev_traces
    by_head = dict(three.fact_rules)
    covered = set()
    for head in three.minimal_test_set:
        covered |= set(by_head[head])
    ok = ok and covered == {"R1", "R2", "A1", "A2"}
    ok = ok and three.minimal_test_set[0] == "rev(Cons(b,Cons(c,Nil)))"
    report("criterion 9: coverage 50% at step one, 100% at step three, "
           "greedy set covers all rules", ok)


def test_criterion_10_abstract_interpretation():
    p = load("parity")
    seq, converged = abstract_fixpoint(p, 6)
    ok = converged and seq[-1].step == 2 and fact_strings(seq[-1]) == {
        "add#(Even#,b) = b",
        "Suc_f#(Even#) = Odd#",
        "Suc_f#(Odd#) = Even#",
        "add#(Odd#,Odd#) = Even#",
        "add#(Odd#,Even#) = Odd#",
    }
    p = load("parity_rev")
    seq, converged = abstract_fixpoint(p, 6)
    ok = ok and converged and \
        "addr#(Odd#,b) = Suc#(b)" in fact_strings(seq[-1])
    p = load("demand")
    seq, converged = abstract_fixpoint(p, 6)
    ok = ok and converged and seq[-1].step == 2 \
        and len(seq[-1].facts) == 8 \
        and "leq#(Z#,FreeNat#) = DontCareBool#" in fact_strings(seq[-1])
    report("criterion 10: abstract fixpoints (parities, demand)", ok)
