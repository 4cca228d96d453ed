"""Expression evaluation: by unfolding (ueval) and by small steps.

``ueval`` rewrites an expression with the facts of an interpretation,
exploring every applicable position, and collects the normal forms.  The
small-step relation rewrites with the program rules themselves and is
deliberately position-indeterministic; the two must agree on ground goals,
which the test suite exercises as the central cross-check.
"""

import random
from dataclasses import dataclass, field

from .config import Config, DEFAULT
from .parser import Program
from .prim import Fuel, _match_conjunct, eval_expr, match
from .syntax import (
    BOT,
    BotExpr,
    CApp,
    Expr,
    FALSE,
    FApp,
    PApp,
    Signature,
    TRUE,
    Var,
    canonical_renaming,
    children,
    conj_list,
    is_full,
    mk_conj,
    positions,
    rename_with_prefix,
    replace as replace_at,
    subst,
    unify,
)


def contains_bot(e: Expr) -> bool:
    if isinstance(e, BotExpr):
        return True
    return any(contains_bot(a) for a in children(e))


@dataclass
class UevalResult:
    values: list = field(default_factory=list)  # normal forms reached
    partial: list = field(default_factory=list)  # frontier left by fuel
    fuel_exhausted: bool = False
    fuel_used: int = 0

    def bot_free_values(self):
        return [v for v in self.values if not contains_bot(v)]


def _canon(e: Expr) -> Expr:
    return subst(e, canonical_renaming([e]))


def ueval(interp, e: Expr, sig: Signature, cfg: Config = DEFAULT,
          lookup=None) -> UevalResult:
    """Evaluate by unfolding: the set of expressions reachable by fact
    application and predefined reduction at any position, kept until no
    rewrite applies anywhere."""
    if lookup is None:
        lookup = interp.kept_lookup() if hasattr(interp, "kept_lookup") \
            else (lambda fn: [])
    fuel = Fuel(cfg.ueval_fuel)
    seen = set()
    result = UevalResult()
    frontier = [_canon(e)]
    values = set()
    partial = set()
    while frontier:
        cur = frontier.pop()
        if cur in seen:
            continue
        seen.add(cur)
        if not fuel.spend():
            result.fuel_exhausted = True
            partial.add(cur)
            continue
        succs = set()
        for pos, sub in positions(cur):
            for nxt in _ueval_aux(sub, lookup, sig, cfg):
                succs.add(_canon(replace_at(cur, pos, nxt)))
        if not succs:
            values.add(cur)
        else:
            frontier.extend(s for s in succs if s not in seen)
    result.values = sorted(values, key=str)
    result.partial = sorted(partial, key=str)
    result.fuel_used = max(cfg.ueval_fuel - fuel.left, 0)
    return result


def _ueval_aux(e: Expr, lookup, sig: Signature, cfg: Config):
    """All single rewrites applicable to this subterm."""
    out = []
    if isinstance(e, PApp):
        if e.name == "cond" and len(e.args) == 2:
            cond, body = e.args
            if cond == TRUE:
                out.append(body)
            elif cond == FALSE:
                out.append(BOT)
            else:
                spliced = _splice_match(cond, body, lookup, sig, cfg)
                if spliced is not None:
                    out.append(spliced)
        elif e.name == "and":
            if all(a == TRUE for a in e.args):
                out.append(TRUE)
            elif any(a == FALSE for a in e.args):
                out.append(FALSE)
            else:
                spliced = _splice_match(e, None, lookup, sig, cfg)
                if spliced is not None:
                    out.append(spliced)
        elif e.name == "match":
            pass  # only meaningful under snd(...) inside a guard
        else:
            reduced = eval_expr(e, sig, cfg)
            if reduced != e:
                out.append(reduced)
    elif isinstance(e, FApp) and is_full(e, sig):
        applied = False
        for i, fact in enumerate(lookup(e.name)):
            ren = rename_with_prefix(list(fact.patterns) + list(fact.guard)
                                     + [fact.body], f"_v{i}_")
            pats = [subst(p, ren) for p in fact.patterns]
            sigma = unify(list(zip(pats, e.args)))
            if sigma is None:
                continue
            applied = True
            guard = [subst(subst(c, ren), sigma) for c in fact.guard]
            body = subst(subst(fact.body, ren), sigma)
            if guard:
                out.append(PApp("cond", (mk_conj(guard), body)))
            else:
                out.append(body)
        if not applied:
            out.append(BOT)
    return out


def _splice_match(cond_expr: Expr, body, lookup, sig: Signature, cfg: Config):
    """Rewrite the first ``snd(match(p, e))`` conjunct by running the
    matcher; its bindings apply to the whole guarded expression."""
    conjs = list(conj_list(cond_expr))
    for i, c in enumerate(conjs):
        c2 = eval_expr(c, sig, cfg)
        if c2 != c:
            conjs[i] = c2
            new_cond = mk_conj(conjs)
            return new_cond if body is None else PApp("cond",
                                                      (new_cond, body))
        m = _match_conjunct(c)
        if m is None:
            continue
        res = match(m[0], m[1], lookup, sig, cfg, Fuel(cfg.hnf_fuel))
        conjs[i] = res.condition
        new_cond = subst(mk_conj(conjs), res.binding)
        if body is None:
            return new_cond
        return PApp("cond", (new_cond, subst(body, res.binding)))
    return None


# ---------------------------------------------------------------------------
# the small-step relation


def _guard_holds(program: Program, guard, sig, cfg, fuel: Fuel) -> bool:
    """sigma(g) must rewrite to True; checked by bounded lazy normalization."""
    for c in guard:
        nf = _normalize_lazy(program, c, sig, cfg, fuel)
        if nf != TRUE:
            return False
    return True


def _rule_steps(program: Program, e: FApp, sig, cfg, fuel: Fuel):
    succs = []
    applicable = False
    for rule in program.rules_for(e.name):
        ren = rename_with_prefix(list(rule.patterns) + list(rule.guard)
                                 + [rule.body], "_r_")
        pats = [subst(p, ren) for p in rule.patterns]
        sigma = unify(list(zip(pats, e.args)))
        if sigma is None:
            continue
        guard = [subst(subst(c, ren), sigma) for c in rule.guard]
        if not _guard_holds(program, guard, sig, cfg, fuel):
            continue
        applicable = True
        succs.append(subst(subst(rule.body, ren), sigma))
    if not applicable:
        succs.append(BOT)
    return succs, applicable


def _predef_steps(program: Program, e: PApp, sig, cfg, fuel: Fuel):
    succs = []
    if e.name == "cond" and len(e.args) == 2:
        if e.args[0] == TRUE:
            succs.append(e.args[1])
        elif e.args[0] == FALSE:
            succs.append(BOT)
    elif e.name == "and" and len(e.args) == 2:
        if all(a == TRUE for a in e.args):
            succs.append(TRUE)
        else:
            for a in e.args:
                if _normalize_lazy(program, a, sig, cfg, fuel) == FALSE:
                    succs.append(FALSE)
                    break
    else:
        reduced = eval_expr(e, sig, cfg)
        if reduced != e:
            succs.append(reduced)
    return succs


def small_step(program: Program, e: Expr, cfg: Config = DEFAULT):
    """All one-step successors of a ground expression, any position."""
    sig = program.signature
    fuel = Fuel(cfg.small_step_fuel)
    succs = set()
    for pos, sub in positions(e):
        local = []
        if isinstance(sub, FApp) and is_full(sub, sig):
            local, _ = _rule_steps(program, sub, sig, cfg, fuel)
        elif isinstance(sub, PApp):
            local = _predef_steps(program, sub, sig, cfg, fuel)
        for nxt in local:
            succs.add(replace_at(e, pos, nxt))
    return succs


def _redexes(program: Program, e: Expr, sig, cfg, fuel):
    """(position, successors, is_rulebot) triples for every redex."""
    out = []
    for pos, sub in positions(e):
        if isinstance(sub, FApp) and is_full(sub, sig):
            succs, applicable = _rule_steps(program, sub, sig, cfg, fuel)
            out.append((pos, succs, not applicable))
        elif isinstance(sub, PApp):
            succs = _predef_steps(program, sub, sig, cfg, fuel)
            if succs:
                out.append((pos, succs, False))
    return out


def _lazy_pick(program: Program, e: Expr, sig, cfg, fuel: Fuel):
    """Demand-driven outermost step: at a blocked call, descend into the
    argument whose evaluation the patterns demand instead of giving up."""
    if isinstance(e, FApp) and is_full(e, sig):
        succs, applicable = _rule_steps(program, e, sig, cfg, fuel)
        if applicable:
            return succs[0]
        demanded = set()
        for rule in program.rules_for(e.name):
            for j, pat in enumerate(rule.patterns):
                if not isinstance(pat, Var) and \
                        isinstance(e.args[j], (FApp, PApp)):
                    demanded.add(j)
        for j in sorted(demanded):
            stepped = _lazy_pick(program, e.args[j], sig, cfg, fuel)
            if stepped is not None:
                args = list(e.args)
                args[j] = stepped
                return FApp(e.name, tuple(args))
        return BOT  # nothing can ever match
    if isinstance(e, PApp):
        local = _predef_steps(program, e, sig, cfg, fuel)
        if local:
            return local[0]
        for j, a in enumerate(e.args):
            stepped = _lazy_pick(program, a, sig, cfg, fuel)
            if stepped is not None:
                args = list(e.args)
                args[j] = stepped
                return PApp(e.name, tuple(args))
        return None
    if isinstance(e, CApp):
        for j, a in enumerate(e.args):
            stepped = _lazy_pick(program, a, sig, cfg, fuel)
            if stepped is not None:
                args = list(e.args)
                args[j] = stepped
                return CApp(e.name, tuple(args))
        return None
    return None


def _normalize_lazy(program, e, sig, cfg, fuel: Fuel):
    while True:
        if not fuel.spend():
            return None
        nxt = _lazy_pick(program, e, sig, cfg, fuel)
        if nxt is None:
            return e
        e = nxt


def _innermost_pick(program, e, sig, cfg, fuel):
    reds = _redexes(program, e, sig, cfg, fuel)
    if not reds:
        return None
    pos, succs, _ = max(reds, key=lambda r: (len(r[0]), [-i for i in r[0]]))
    return replace_at(e, pos, succs[0])


def normalize(program: Program, e: Expr, strategy: str = "lazy",
              fuel: int = None, cfg: Config = DEFAULT, seed: int = 0):
    """Drive an expression to normal form under a position strategy.

    Strategies: ``lazy`` (leftmost-outermost with demand-driven descent),
    ``innermost`` (leftmost-innermost), ``random`` (uniform over redexes,
    bottoming out a call only when no other redex remains).  Returns the
    normal form, or None when fuel runs out.
    """
    sig = program.signature
    budget = Fuel(fuel if fuel is not None else cfg.small_step_fuel)
    rng = random.Random(seed)
    while True:
        if not budget.spend():
            return None
        if strategy == "lazy":
            nxt = _lazy_pick(program, e, sig, cfg, budget)
        elif strategy == "innermost":
            nxt = _innermost_pick(program, e, sig, cfg, budget)
        elif strategy == "random":
            reds = _redexes(program, e, sig, cfg, budget)
            real = [r for r in reds if not r[2]]
            pool = real or reds
            if not pool:
                nxt = None
            else:
                pos, succs, _ = pool[rng.randrange(len(pool))]
                nxt = replace_at(e, pos, succs[rng.randrange(len(succs))])
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if nxt is None:
            return e
        e = nxt


def reachable_by_steps(program: Program, start: Expr, target: Expr,
                       cfg: Config = DEFAULT, cap: int = 2000) -> bool:
    """Bounded search for a small-step path from start to target."""
    seen = {start}
    frontier = [start]
    budget = cap
    while frontier and budget > 0:
        e = frontier.pop()
        if e == target:
            return True
        budget -= 1
        for nxt in small_step(program, e, cfg):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return any(e == target for e in seen)
