"""Information ordering on fact bodies and the fact-specificity relation.

Bottom is least, variables are greatest, and applications compare
componentwise under an identical root; function symbols occurring in
bodies (partial applications, irreducible predefined calls) are treated
exactly like constructors.
"""

from .syntax import (
    BotExpr,
    Expr,
    Lit,
    Var,
    canonical_renaming,
    children,
    subst,
)


def _root(e: Expr):
    if isinstance(e, Lit):
        return ("lit", e.value)
    if isinstance(e, BotExpr):
        return ("bot",)
    if isinstance(e, Var):
        return ("var",)
    return (type(e).__name__, e.name, len(e.args))


def term_leq(a: Expr, b: Expr) -> bool:
    """a carries no more information than b; False when incomparable."""
    if isinstance(a, BotExpr):
        return True
    if isinstance(b, Var):
        return True
    if isinstance(a, Var):
        return False
    if _root(a) != _root(b):
        return False
    return all(term_leq(x, y) for x, y in zip(children(a), children(b)))


def term_lt(a: Expr, b: Expr) -> bool:
    return term_leq(a, b) and not term_leq(b, a)


def tuple_leq(xs, ys) -> bool:
    return len(xs) == len(ys) and all(term_leq(a, b) for a, b in zip(xs, ys))


def tuple_lt(xs, ys) -> bool:
    return tuple_leq(xs, ys) and not tuple_leq(ys, xs)


def alpha_canonical(exprs) -> tuple:
    ren = canonical_renaming(exprs)
    return tuple(subst(e, ren) for e in exprs)


def variants(xs, ys) -> bool:
    """The two expression tuples are equal up to variable renaming."""
    return alpha_canonical(xs) == alpha_canonical(ys)
