import random

from unfolder import parse_expr
from unfolder.order import alpha_canonical, term_leq, tuple_lt
from unfolder.syntax import BOT, CApp, Lit, PApp, Var

from conftest import load


def e(text):
    return parse_expr(text, load("add"))


def test_bottom_is_least():
    assert term_leq(BOT, e("Cons(b,Bot)"))


def test_variables_are_greatest():
    assert term_leq(e("Suc(Zero)"), Var("x"))
    assert not term_leq(Var("x"), e("Zero"))


def test_componentwise_under_identical_roots():
    assert term_leq(e("Cons(b,Bot)"), e("Cons(b,Cons(b+1,Bot))"))
    assert not term_leq(e("Cons(b,Cons(b+1,Bot))"), e("Cons(b,Bot)"))


def test_distinct_constructors_incomparable():
    assert not term_leq(e("Zero"), e("Suc(Zero)"))
    assert not term_leq(e("Suc(Zero)"), e("Zero"))


def test_function_symbols_compare_like_constructors():
    assert term_leq(e("b+1"), e("b+1"))
    assert not term_leq(e("b+1"), e("b+2"))
    assert term_leq(PApp("+", (BOT, Lit(1))), e("b+1"))


def test_pattern_tuple_strictness():
    smaller = (Var("b"), e("Cons(c,Nil)"))
    larger = (Var("b"), e("Cons(c,d)"))
    assert tuple_lt(smaller, larger)
    assert not tuple_lt(larger, smaller)


def _random_term(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([BOT, CApp("Zero"), CApp("Nil"),
                           Var(rng.choice("xyz")), Lit(rng.randrange(3))])
    pick = rng.random()
    if pick < 0.4:
        return CApp("Suc", (_random_term(rng, depth - 1),))
    if pick < 0.8:
        return CApp("Cons", (_random_term(rng, depth - 1),
                             _random_term(rng, depth - 1)))
    return PApp("+", (_random_term(rng, depth - 1),
                      _random_term(rng, depth - 1)))


def test_partial_order_properties():
    rng = random.Random(11)
    terms = [_random_term(rng, 4) for _ in range(60)]
    for t in terms:
        assert term_leq(t, t)
    for a in terms:
        for b in terms:
            if term_leq(a, b) and term_leq(b, a):
                # antisymmetry up to renaming
                assert alpha_canonical([a]) == alpha_canonical([b])
            for c in terms:
                if term_leq(a, b) and term_leq(b, c):
                    assert term_leq(a, c)
