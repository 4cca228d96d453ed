"""Predefined functions: evaluation, non-unifiability, lazy matching, HNF.

``eval_expr`` reduces predefined applications wherever that is possible
without guessing: ground arithmetic computes, comparisons compute unless
deferred, anything symbolic survives untouched.  ``match`` is the runtime
lazy matcher; it reduces function-rooted scrutinees to head normal form
against the current fact set, so it terminates on finite prefixes of
infinite values.  ``static_match`` is the unfolding-time approximation that
never consults facts.
"""

from dataclasses import dataclass
from typing import Callable, Optional

from .config import Config
from .syntax import (
    ARITH_OPS,
    BOT,
    CMP_OPS,
    BotExpr,
    CApp,
    Expr,
    FALSE,
    FApp,
    Lit,
    PApp,
    PREDEF_ARITY,
    Signature,
    TRUE,
    Var,
    children,
    conj_list,
    is_full,
    is_term,
    mk_conj,
    rebuild,
    rename_with_prefix,
    subst,
    unify,
)

FactLookup = Callable[[str], list]


@dataclass
class MatchResult:
    binding: dict
    condition: Expr  # boolean-valued residual


def _both_ints(a, b):
    return isinstance(a, Lit) and isinstance(b, Lit)


def _is_ground(e: Expr) -> bool:
    if isinstance(e, Var):
        return False
    return all(_is_ground(a) for a in children(e))


_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
}
_CMP = {
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
}


def eval_expr(e: Expr, sig: Signature, cfg: Config) -> Expr:
    """Reduce predefined applications to normal form where possible.

    Variables, constructor-rooted expressions and user-function applications
    pass through; a full predefined application reduces only when its
    reduced arguments permit an error-free answer.
    """
    if isinstance(e, (Var, Lit, BotExpr)):
        return e
    if isinstance(e, CApp):
        if len(e.args) < sig.ctor_arity.get(e.name, len(e.args)):
            return e  # partial constructor application stays untouched
        return rebuild(e, tuple(eval_expr(a, sig, cfg) for a in e.args))
    if isinstance(e, FApp):
        return e
    assert isinstance(e, PApp)
    name = e.name
    if name == "match":
        return e
    arity = PREDEF_ARITY.get(name)
    if arity is not None and len(e.args) < arity:
        return e
    if name == "cond":
        return _eval_cond(e, sig, cfg)
    args = tuple(eval_expr(a, sig, cfg) for a in e.args)
    e = rebuild(e, args)
    if name == "@":
        if isinstance(args[0], BotExpr):
            return BOT
        return e
    if name in ARITH_OPS:
        if any(isinstance(a, BotExpr) for a in args):
            return BOT
        if _both_ints(*args):
            if name == "/":
                if args[1].value == 0:
                    return e  # division faults stay symbolic
                return Lit(int(args[0].value / args[1].value))
            return Lit(_ARITH[name](args[0].value, args[1].value))
        return e
    if name in CMP_OPS:
        if cfg.defer_comparisons:
            return e
        if any(isinstance(a, BotExpr) for a in args):
            return BOT
        if name == "==":
            if _both_ints(*args):
                return TRUE if args[0].value == args[1].value else FALSE
            if _is_ground(args[0]) and _is_ground(args[1]) and \
                    is_term(args[0]) and is_term(args[1]):
                return TRUE if args[0] == args[1] else FALSE
            return e
        if _both_ints(*args):
            return TRUE if _CMP[name](args[0].value, args[1].value) else FALSE
        return e
    if name == "not":
        if args[0] == TRUE:
            return FALSE
        if args[0] == FALSE:
            return TRUE
        if isinstance(args[0], BotExpr):
            return BOT
        return e
    if name == "and":
        if FALSE in args:
            return FALSE
        live = tuple(a for a in args if a != TRUE)
        if not live:
            return TRUE
        if len(live) == 1:
            return live[0]
        return rebuild(e, live)
    if name == "or":
        if TRUE in args:
            return TRUE
        live = tuple(a for a in args if a != FALSE)
        if not live:
            return FALSE
        if len(live) == 1:
            return live[0]
        return rebuild(e, live)
    if name == "nunif":
        if is_term(args[0]) and is_term(args[1]):
            if nunif(args[0], args[1]):
                return TRUE  # non-unifiability survives any instantiation
            if _is_ground(args[0]) and _is_ground(args[1]):
                return FALSE
        return e
    if name in ("fst", "snd"):
        arg = args[0]
        if isinstance(arg, CApp) and arg.name == "#tuple" and len(arg.args) == 2:
            return arg.args[0] if name == "fst" else arg.args[1]
        return e
    return e


def _eval_cond(e: PApp, sig: Signature, cfg: Config) -> Expr:
    cond, body = e.args
    conjs = list(conj_list(cond))
    changed = True
    while changed:
        changed = False
        out = []
        for i, c in enumerate(conjs):
            c = eval_expr(c, sig, cfg)
            if c == FALSE:
                return BOT
            if c == TRUE:
                changed = True
                continue
            m = _match_conjunct(c)
            if m is not None:
                verdict = static_match(m[0], eval_expr(m[1], sig, cfg))
                if verdict[0] == "no":
                    return BOT
                if verdict[0] == "yes":
                    binding = verdict[1]
                    rest = [subst(x, binding) for x in conjs[i + 1:]]
                    out = [subst(x, binding) for x in out]
                    body = subst(body, binding)
                    conjs = out + rest
                    changed = True
                    break
            out.append(c)
        else:
            conjs = out
    if not conjs:
        return eval_expr(body, sig, cfg)
    return PApp("cond", (mk_conj(conjs), body))


def _match_conjunct(c: Expr) -> Optional[tuple]:
    """Destructure ``snd(match(p, e))`` conjuncts."""
    if (isinstance(c, PApp) and c.name == "snd" and len(c.args) == 1
            and isinstance(c.args[0], PApp) and c.args[0].name == "match"):
        return c.args[0].args
    return None


def nunif(t1: Expr, t2: Expr) -> bool:
    """True only when the two pattern terms provably cannot unify."""
    if isinstance(t1, Var) or isinstance(t2, Var):
        return False
    k1, k2 = _ctor_key(t1), _ctor_key(t2)
    if k1 != k2:
        return True
    return any(nunif(a, b) for a, b in zip(children(t1), children(t2)))


def nunif_tuple(ts1, ts2) -> bool:
    if len(ts1) != len(ts2):
        return True
    return any(nunif(a, b) for a, b in zip(ts1, ts2))


def _ctor_key(t: Expr):
    if isinstance(t, Lit):
        return ("lit", t.value)
    if isinstance(t, BotExpr):
        return ("bot",)
    if isinstance(t, CApp):
        return ("c", t.name, len(t.args))
    if isinstance(t, FApp):
        return ("f", t.name, len(t.args))
    return ("p", t.name, len(t.args))


def static_match(pattern: Expr, e: Expr):
    """Decide a match without reducing the scrutinee.

    Returns ``("yes", binding)``, ``("no",)`` or ``("maybe",)``; bindings are
    only reported for fully decided matches.
    """
    binding = {}
    undecided = False
    work = [(pattern, e)]
    while work:
        p, s = work.pop(0)
        p = subst(p, binding)
        s = subst(s, binding)
        if isinstance(p, Var):
            if p.name in binding:
                work.append((binding[p.name], s))
            else:
                binding[p.name] = s
            continue
        if isinstance(s, BotExpr):
            return ("no",)
        if isinstance(s, Var):
            binding[s.name] = p
            continue
        if isinstance(s, (FApp, PApp)):
            undecided = True
            continue
        if _ctor_key(p) != _ctor_key(s):
            return ("no",)
        work.extend(zip(children(p), children(s)))
    if undecided:
        return ("maybe",)
    return ("yes", binding)


class Fuel:
    def __init__(self, amount):
        self.left = amount

    def spend(self, n=1) -> bool:
        self.left -= n
        return self.left >= 0


def hnf(e: Expr, lookup: FactLookup, sig: Signature, cfg: Config,
        fuel: Optional[Fuel] = None):
    """Reduce to head normal form using the given facts.

    Returns ``(assumptions, expr)``: the expression is a variable or
    constructor-rooted unless reduction got stuck or fuel ran out, in which
    case the result is the syntactic bottom.  Assumptions are match
    conditions adopted along the way when a fact guard could not be decided.
    """
    if fuel is None:
        fuel = Fuel(cfg.hnf_fuel)
    assumed = []
    counter = [0]
    while True:
        if not fuel.spend():
            return (), BOT
        if isinstance(e, (Var, Lit, BotExpr, CApp)):
            return tuple(assumed), e
        if isinstance(e, PApp):
            if e.name == "cond":
                verdict, binding, residual = runtime_guard(
                    conj_list(e.args[0]), lookup, sig, cfg, fuel)
                if verdict == "no":
                    return tuple(assumed), BOT
                body = subst(e.args[1], binding)
                if verdict == "maybe":
                    assumed.extend(residual)
                e = body
                continue
            e2 = eval_expr(e, sig, cfg)
            if e2 == e:
                return tuple(assumed), e
            e = e2
            continue
        assert isinstance(e, FApp)
        if not is_full(e, sig):
            return tuple(assumed), e
        nxt = _apply_some_fact(e, lookup, sig, cfg, fuel, counter)
        if nxt is None:
            return tuple(assumed), BOT
        conds, e = nxt
        assumed.extend(conds)


def _apply_some_fact(e: FApp, lookup: FactLookup, sig: Signature, cfg: Config,
                     fuel: Fuel, counter):
    """One rewrite of a full user application by the first applicable fact."""
    stuck = None
    for fact in lookup(e.name):
        counter[0] += 1
        ren = rename_with_prefix(list(fact.patterns) + list(fact.guard)
                                 + [fact.body], f"_h{counter[0]}_")
        pats = [subst(p, ren) for p in fact.patterns]
        sigma = unify(list(zip(pats, e.args)))
        if sigma is None:
            continue
        guard = [subst(subst(c, ren), sigma) for c in fact.guard]
        verdict, binding, residual = runtime_guard(tuple(guard), lookup, sig,
                                                   cfg, fuel)
        body = subst(subst(subst(fact.body, ren), sigma), binding)
        if verdict == "yes":
            return (), body
        if verdict == "maybe" and stuck is None:
            stuck = (tuple(residual), body)
    return stuck


def runtime_guard(conjuncts, lookup: FactLookup, sig: Signature, cfg: Config,
                  fuel: Optional[Fuel] = None):
    """Evaluate guard conjuncts, binding variables as matches succeed.

    Returns ``(verdict, binding, residual)`` with verdict yes/no/maybe.
    """
    if fuel is None:
        fuel = Fuel(cfg.hnf_fuel)
    binding: dict = {}
    residual = []
    queue = list(conjuncts)
    while queue:
        c = subst(queue.pop(0), binding)
        c = eval_expr(c, sig, cfg)
        if c == TRUE:
            continue
        if c == FALSE or isinstance(c, BotExpr):
            return "no", {}, ()
        m = _match_conjunct(c)
        if m is not None:
            res = match(m[0], m[1], lookup, sig, cfg, fuel)
            cond = eval_expr(res.condition, sig, cfg)
            if cond == TRUE:
                for k, v in res.binding.items():
                    binding[k] = v
                queue = [subst(q, res.binding) for q in queue]
                residual = [subst(r, res.binding) for r in residual]
                continue
            if cond == FALSE:
                return "no", {}, ()
            residual.append(c)
            continue
        residual.append(c)
    if residual:
        return "maybe", binding, tuple(residual)
    return "yes", binding, ()


def match(pattern: Expr, e: Expr, lookup: FactLookup, sig: Signature,
          cfg: Config, fuel: Optional[Fuel] = None) -> MatchResult:
    """Lazily match a pattern term against an expression.

    Cases apply first-to-last: variables capture anything, bottom never
    matches, function-rooted scrutinees are reduced to HNF first, and
    constructor applications match componentwise.
    """
    if fuel is None:
        fuel = Fuel(cfg.hnf_fuel)
    if not fuel.spend():
        return MatchResult({}, FALSE)
    if isinstance(pattern, Var):
        return MatchResult({pattern.name: e}, TRUE)
    if isinstance(e, BotExpr):
        return MatchResult({}, FALSE)
    if isinstance(e, (FApp, PApp)):
        conds, head = hnf(e, lookup, sig, cfg, fuel)
        if isinstance(head, (FApp, PApp)):
            return MatchResult({}, FALSE)  # undersaturated or stuck scrutinee
        inner = match(pattern, head, lookup, sig, cfg, fuel)
        condition = mk_conj(list(conds) + list(conj_list(inner.condition)))
        return MatchResult(inner.binding, condition)
    if isinstance(e, Var):
        return MatchResult({e.name: pattern}, TRUE)
    if _ctor_key(pattern) != _ctor_key(e):
        return MatchResult({}, FALSE)
    binding: dict = {}
    conds = []
    for p, s in zip(children(pattern), children(e)):
        sub = match(subst(p, binding), subst(s, binding), lookup, sig, cfg,
                    fuel)
        if sub.condition == FALSE:
            return MatchResult({}, FALSE)
        for k, v in sub.binding.items():
            binding[k] = v
        conds.extend(conj_list(sub.condition))
    return MatchResult(binding, mk_conj(conds))


def judge(e: Expr, sig: Signature, cfg: Config) -> str:
    """Three-valued truth of a boolean expression, without fact lookups."""
    e = eval_expr(e, sig, cfg)
    if e == TRUE:
        return "yes"
    if e == FALSE or isinstance(e, BotExpr):
        return "no"
    m = _match_conjunct(e)
    if m is not None:
        verdict = static_match(m[0], eval_expr(m[1], sig, cfg))
        if verdict[0] == "no":
            return "no"
        if verdict[0] == "yes":
            return "yes"
    return "unknown"
