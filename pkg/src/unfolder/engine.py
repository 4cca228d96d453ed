"""The unfolding engine.

One step takes every program rule, rewrites its full user-function calls
with all facts proved so far (recording matching conditions where arguments
are not yet known), replaces positions nothing fits with the syntactic
bottom, and then prunes the union: unguarded bottom facts move to a side
set that seeds the next step, and facts overlapped by a more specific one
are dropped (or guard-amended, depending on the cleaning mode).  Iterating
reaches a fixpoint exactly when the program's meaning is finite.
"""

import itertools
from dataclasses import dataclass, replace
from typing import Optional

from .config import Config, DEFAULT
from .order import term_leq, tuple_lt, variants
from .parser import Program, Rule
from .prim import eval_expr, judge, static_match, _match_conjunct
from .printer import expr_str, fact_str
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
    is_full,
    match_first_order,
    occurs,
    positions,
    rename_with_prefix,
    replace as replace_at,
    subst,
    unify,
)
from .traces import (
    TraceStep,
    bot_step,
    compose_position,
    cross_concat,
    merge_trace_lists,
)


@dataclass(frozen=True)
class Fact:
    """Proved knowledge: a rule whose guard and body are call-free."""

    fn: str
    patterns: tuple
    guard: tuple  # ordered conjuncts, () means True
    body: Expr
    origin_rule: str = ""
    traces: tuple = ()

    def key(self):
        return (self.fn, self.patterns, self.guard, self.body)

    def is_unguarded_bottom(self):
        return not self.guard and isinstance(self.body, BotExpr)

    def __str__(self):
        return fact_str(self)


def _shape_key(e: Expr) -> str:
    blank = {v: Var("_") for v in _collect_vars(e)}
    return expr_str(subst(e, blank))


def _collect_vars(e: Expr, acc=None):
    from .syntax import vars_of

    return vars_of(e, acc)


def make_fact(fn, patterns, guard, body, origin_rule="", traces=(),
              cfg: Config = DEFAULT) -> Fact:
    """Canonical form: variables renamed b, c, ... in reading order; in the
    default mode guard conjuncts are additionally sorted so that reordered
    conjunctions collapse to one fact."""
    guard = tuple(guard)
    if not cfg.defer_comparisons and len(guard) > 1:
        ren = canonical_renaming(list(patterns) + list(guard) + [body])
        guard = tuple(sorted(
            guard, key=lambda c: (_shape_key(c), expr_str(subst(c, ren)))))
    ren = canonical_renaming(list(patterns) + list(guard) + [body])
    return Fact(
        fn,
        tuple(subst(p, ren) for p in patterns),
        tuple(subst(c, ren) for c in guard),
        subst(body, ren),
        origin_rule,
        tuple(traces),
    )


class Interpretation:
    """A set of facts plus the bottom facts extracted so far, with a step index."""

    def __init__(self, facts=None, bot_facts=None, step=0):
        self.facts: dict = dict(facts or {})
        self.bot_facts: dict = dict(bot_facts or {})
        self.step = step

    @classmethod
    def empty(cls):
        return cls({}, {}, 0)

    def add(self, fact: Fact, cfg: Config = DEFAULT):
        _merge_fact(self.facts, fact, cfg)

    def facts_for(self, fn):
        return [f for f in self.facts.values() if f.fn == fn]

    def all_facts(self):
        return list(self.facts.values())

    def sorted_facts(self):
        return sorted(self.facts.values(), key=_fact_sort_key)

    def sorted_bot_facts(self):
        return sorted(self.bot_facts.values(), key=_fact_sort_key)

    def same_facts(self, other) -> bool:
        return (set(self.facts) == set(other.facts)
                and set(self.bot_facts) == set(other.bot_facts))

    def lookup(self):
        table = {}
        for f in itertools.chain(self.facts.values(), self.bot_facts.values()):
            table.setdefault(f.fn, []).append(f)
        for fs in table.values():
            fs.sort(key=_fact_sort_key)
        return lambda fn: table.get(fn, [])

    def kept_lookup(self):
        table = {}
        for f in self.facts.values():
            table.setdefault(f.fn, []).append(f)
        for fs in table.values():
            fs.sort(key=_fact_sort_key)
        return lambda fn: table.get(fn, [])


def _fact_sort_key(f: Fact):
    return (f.fn, len(f.patterns), fact_str(f))


def _merge_fact(table: dict, fact: Fact, cfg: Config):
    key = fact.key()
    old = table.get(key)
    if old is None:
        table[key] = fact
        return
    traces = merge_trace_lists(old.traces, fact.traces, cfg.trace_cap)
    table[key] = replace(old, traces=tuple(traces))


# ---------------------------------------------------------------------------
# umatch: fitting a fact head onto evaluated call arguments


def umatch(pats, exprs, sig: Signature, cfg: Config = DEFAULT):
    """Unify fact patterns with argument expressions, emitting a matching
    condition for every blocking position rooted in a predefined symbol.

    Returns ``(binding, conditions)`` or None when the mismatch is not
    caused by a predefined function.
    """
    if len(pats) != len(exprs):
        return None
    binding: dict = {}
    raw_conds = []
    work = list(zip(pats, exprs))
    while work:
        t, e = work.pop(0)
        t = subst(t, binding)
        e = subst(e, binding)
        if t == e:
            continue
        if isinstance(t, Var):
            if occurs(t.name, e):
                return None
            _bind(binding, t.name, e)
            continue
        if isinstance(e, Var):
            if occurs(e.name, t):
                return None
            _bind(binding, e.name, t)
            continue
        if isinstance(e, PApp):
            raw_conds.append((t, e))
            continue
        if _rigid_key(t) != _rigid_key(e):
            return None
        work.extend(zip(children(t), children(e)))
    conds = tuple(
        PApp("snd", (PApp("match", (subst(t, binding), subst(e, binding))),))
        for t, e in raw_conds)
    return binding, conds


def _bind(binding, name, value):
    one = {name: value}
    for k in list(binding):
        binding[k] = subst(binding[k], one)
    binding[name] = value


def _rigid_key(e: Expr):
    if isinstance(e, BotExpr):
        return ("bot",)
    if isinstance(e, CApp):
        return ("c", e.name, len(e.args))
    if isinstance(e, FApp):
        return ("f", e.name, len(e.args))
    if hasattr(e, "value"):
        return ("lit", e.value)
    return ("p", e.name, len(e.args))


# ---------------------------------------------------------------------------
# guard assembly shared by unfold and clean


def simplify_pseudofact(patterns, conjuncts, body, sig, cfg):
    """Normalize a pseudofact: evaluate conjuncts, splice decided matches
    (their bindings flow into head and body), drop duplicates, detect
    unsatisfiable guards.  Returns None for dead branches."""
    binding: dict = {}
    out = []
    queue = list(conjuncts)
    while queue:
        c = subst(queue.pop(0), binding)
        c = eval_expr(c, sig, cfg)
        if c == TRUE:
            continue
        if c == FALSE or isinstance(c, BotExpr):
            return None
        m = _match_conjunct(c)
        if m is not None:
            scrut = eval_expr(m[1], sig, cfg)
            verdict = static_match(m[0], scrut)
            if verdict[0] == "no":
                return None
            if verdict[0] == "yes":
                b = verdict[1]
                queue = [subst(q, b) for q in queue]
                out = [subst(o, b) for o in out]
                for k, v in b.items():
                    _bind(binding, k, v)
                continue
            c = PApp("snd", (PApp("match", (m[0], scrut)),))
        if judge(c, sig, cfg) == "no":
            return None
        if c not in out:
            out.append(c)
    if _contradictory(out):
        return None
    patterns = tuple(subst(p, binding) for p in patterns)
    body = eval_expr(subst(body, binding), sig, cfg)
    return patterns, tuple(out), body


def _contradictory(conjuncts) -> bool:
    """Two match conditions on one scrutinee with non-unifiable patterns
    can never hold together."""
    from .prim import nunif

    matches = []
    for c in conjuncts:
        m = _match_conjunct(c)
        if m is not None:
            matches.append(m)
    for i, (p1, e1) in enumerate(matches):
        for p2, e2 in matches[i + 1:]:
            if e1 == e2 and nunif(p1, p2):
                return True
    return False


def satisfiable(guard, sig: Signature, cfg: Config = DEFAULT) -> str:
    """Three-valued satisfiability of a guard (an expression or conjunct
    tuple): 'no' only on a provable contradiction, 'yes' when it reduces to
    truth, 'unknown' otherwise (callers treat unknown as satisfiable)."""
    if isinstance(guard, Expr):
        conjuncts = _as_conjuncts(guard)
    else:
        conjuncts = tuple(guard)
    res = simplify_pseudofact((), conjuncts, TRUE, sig, cfg)
    if res is None:
        return "no"
    _, residual, _ = res
    if not residual:
        return "yes"
    if _contradictory(residual):
        return "no"
    for c in residual:
        if _nunif_conjunct_unsat(c):
            return "no"
    return "unknown"


def _as_conjuncts(e: Expr):
    from .syntax import conj_list

    return conj_list(e)


def _nunif_conjunct_unsat(c: Expr) -> bool:
    # nunif(t, p) can never hold when t is already an instance of p
    if isinstance(c, PApp) and c.name == "nunif" and len(c.args) == 2:
        t, p = c.args
        return match_first_order(p, t) is not None
    return False


# ---------------------------------------------------------------------------
# unfold


@dataclass(frozen=True)
class _Pseudo:
    patterns: tuple
    guard: tuple
    body: Expr

    def canon(self):
        ren = canonical_renaming(list(self.patterns) + list(self.guard)
                                 + [self.body])
        return (tuple(subst(p, ren) for p in self.patterns),
                tuple(subst(c, ren) for c in self.guard),
                subst(self.body, ren))


def _call_positions(pf: _Pseudo, sig):
    """Full user-function applications, guard conjuncts first, prefix order.

    Body positions are plain integer tuples (the root is ``()``); guard
    positions carry a ``('g', i)`` prefix naming the conjunct.
    """
    out = []
    for gi, c in enumerate(pf.guard):
        for pos, sub in positions(c):
            if isinstance(sub, FApp) and is_full(sub, sig):
                out.append((("g", gi) + pos, sub))
    for pos, sub in positions(pf.body):
        if isinstance(sub, FApp) and is_full(sub, sig):
            out.append((pos, sub))
    return out


def _pf_replace(pf: _Pseudo, pos, new) -> _Pseudo:
    if pos and pos[0] == "g":
        gi = pos[1]
        guard = list(pf.guard)
        guard[gi] = replace_at(guard[gi], pos[2:], new)
        return _Pseudo(pf.patterns, tuple(guard), pf.body)
    return _Pseudo(pf.patterns, pf.guard, replace_at(pf.body, pos, new))


def unfold(rule: Rule, interp, sig: Signature, cfg: Config = DEFAULT,
           lookup=None):
    """All facts derivable from one rule under the given interpretation.

    Expansion tries every (position, fact) pair; a position no fact fits is
    replaced by the syntactic bottom.  Each produced fact carries its
    derivation traces, the rule's own label first.
    """
    if lookup is None:
        lookup = interp.lookup() if interp is not None else (lambda fn: [])
    fresh = itertools.count(1)
    memo: dict = {}
    running: set = set()

    start = simplify_pseudofact(rule.patterns, rule.guard, rule.body, sig, cfg)
    if start is None:
        return []

    def rec(pf: _Pseudo, depth):
        key = pf.canon()
        if key in memo:
            return memo[key]
        if key in running:
            return []
        running.add(key)
        calls = _call_positions(pf, sig)
        results = []
        if not calls:
            if satisfiable(pf.guard, sig, cfg) == "no":
                results = []
            else:
                fact = make_fact(rule.fn, pf.patterns, pf.guard, pf.body,
                                 origin_rule=rule.label, cfg=cfg)
                results = [(fact, ())]
        else:
            for pos, fapp in calls:
                eargs = tuple(eval_expr(a, sig, cfg) for a in fapp.args)
                fits = []
                for f in lookup(fapp.name):
                    n = next(fresh)
                    ren = rename_with_prefix(
                        list(f.patterns) + list(f.guard) + [f.body],
                        f"_u{n}_")
                    pats = [subst(p, ren) for p in f.patterns]
                    um = umatch(pats, eargs, sig, cfg)
                    if um is None:
                        continue
                    sigma, conds = um
                    fguard = tuple(subst(subst(c, ren), sigma)
                                   for c in f.guard)
                    fbody = subst(subst(f.body, ren), sigma)
                    new_pf = _pf_replace(pf, pos, fbody)
                    guard = tuple(subst(c, sigma) for c in new_pf.guard) \
                        + fguard + conds
                    simp = simplify_pseudofact(
                        tuple(subst(p, sigma) for p in new_pf.patterns),
                        guard,
                        subst(new_pf.body, sigma),
                        sig, cfg)
                    if simp is None:
                        continue
                    fits.append((f, _Pseudo(*simp)))
                if fits and depth < cfg.expansion_depth:
                    for f, pf2 in fits:
                        sub = rec(pf2, depth + 1)
                        if not sub:
                            continue
                        lefts = compose_position(pos, f.traces or ((),))
                        for fact, suffix in sub:
                            for t in cross_concat(lefts, [suffix],
                                                  cfg.trace_cap):
                                results.append((fact, t))
                else:
                    pf2 = _pf_replace(pf, pos, BOT)
                    simp = simplify_pseudofact(pf2.patterns, pf2.guard,
                                               pf2.body, sig, cfg)
                    if simp is not None:
                        for fact, suffix in rec(_Pseudo(*simp), depth + 1):
                            results.append(
                                (fact, (bot_step(fapp.name, pos),) + suffix))
        running.discard(key)
        deduped: dict = {}
        for fact, suffix in results:
            slot = deduped.setdefault(fact.key(), (fact, []))
            if suffix not in slot[1] and len(slot[1]) < cfg.trace_cap:
                slot[1].append(suffix)
        results = [(fact, s) for fact, suffixes in deduped.values()
                   for s in suffixes]
        memo[key] = results
        return results

    table: dict = {}
    for fact, suffix in rec(_Pseudo(*start), 0):
        trace = (TraceStep(rule.label, ()),) + suffix
        _merge_fact(table, replace(fact, traces=(trace,)), cfg)
    return list(table.values())


# ---------------------------------------------------------------------------
# overlap, specificity, clean


def overlaps(f1: Fact, f2: Fact, sig: Signature,
             cfg: Config = DEFAULT) -> Optional[dict]:
    """The matcher making both facts applicable to a common call, if the
    heads unify and the conjoined guards are not provably unsatisfiable.
    The returned binding is expressed over the second fact's variables."""
    if f1.fn != f2.fn or len(f1.patterns) != len(f2.patterns):
        return None
    ren = rename_with_prefix(list(f2.patterns) + list(f2.guard) + [f2.body],
                             "_o_")
    pats2 = [subst(p, ren) for p in f2.patterns]
    theta = unify(list(zip(pats2, f1.patterns)))
    if theta is None:
        return None
    both = tuple(subst(c, theta) for c in f1.guard) + tuple(
        subst(subst(c, ren), theta) for c in f2.guard)
    if satisfiable(both, sig, cfg) == "no":
        return None
    back = {v.name: orig for orig, v in ren.items()}
    mu = {}
    for name, val in theta.items():
        if name in back:
            mu[back[name]] = val
    return mu


def guard_at_least_restrictive(cprime, c, sig, cfg: Config) -> bool:
    """Whether guard cprime entails guard c, by the implemented judgment."""
    if cfg.defer_comparisons:
        return list(cprime) == list(c)
    counts = {}
    for x in cprime:
        counts[x] = counts.get(x, 0) + 1
    ok = True
    for x in c:
        if counts.get(x, 0) > 0:
            counts[x] -= 1
        else:
            ok = False
            break
    if ok:
        return True
    return satisfiable(tuple(c), sig, cfg) == "yes" and \
        satisfiable(tuple(cprime), sig, cfg) != "yes"


def more_specific(fi: Fact, f: Fact, sig: Signature,
                  cfg: Config = DEFAULT) -> bool:
    """fi is more specific than f: smaller patterns, or variant patterns
    with a more restrictive guard, or equivalent guards and a greater body."""
    if tuple_lt(fi.patterns, f.patterns):
        return True
    if not variants(fi.patterns, f.patterns):
        return False
    rho = {}
    for p, q in zip(f.patterns, fi.patterns):
        rho = match_first_order(p, q, rho)
        if rho is None:
            return False
    guard_f = tuple(subst(c, rho) for c in f.guard)
    fi_entails_f = guard_at_least_restrictive(fi.guard, guard_f, sig, cfg)
    f_entails_fi = guard_at_least_restrictive(guard_f, fi.guard, sig, cfg)
    if fi_entails_f and not f_entails_fi:
        return True
    if not (fi_entails_f and f_entails_fi):
        return False
    body_f = subst(f.body, rho)
    return term_leq(body_f, fi.body) and not term_leq(fi.body, body_f)


def drop_instances(facts, cfg: Config):
    """Remove facts that are mere instances of another fact (same guard and
    body under the instantiating substitution): they add no knowledge."""
    merged: dict = {}
    for f in facts:
        _merge_fact(merged, f, cfg)
    facts = list(merged.values())
    out = {}
    for f in facts:
        redundant = False
        for g in facts:
            if g.key() == f.key() or g.fn != f.fn \
                    or len(g.patterns) != len(f.patterns):
                continue
            sigma = {}
            for p, q in zip(g.patterns, f.patterns):
                sigma = match_first_order(p, q, sigma)
                if sigma is None:
                    break
            if sigma is None:
                continue
            if tuple(subst(c, sigma) for c in g.guard) == f.guard and \
                    subst(g.body, sigma) == f.body:
                redundant = True
                break
        if not redundant:
            _merge_fact(out, f, cfg)
    return list(out.values())


def clean(facts, sig: Signature, cfg: Config = DEFAULT,
          mode: str = "optimized"):
    """Prune a fact set.

    Unguarded bottom facts are extracted and returned separately; a fact
    overlapped by more specific ones is dropped (optimized mode) or kept
    with its guard amended by non-unification/negation conjuncts, falling
    away when the amended guard is unsatisfiable (general mode).
    """
    bots: dict = {}
    rest: dict = {}
    for f in facts:
        if f.is_unguarded_bottom():
            _merge_fact(bots, f, cfg)
        else:
            _merge_fact(rest, f, cfg)
    bots = {f.key(): f for f in drop_instances(bots.values(), cfg)}
    kept = drop_instances(rest.values(), cfg)
    by_fn: dict = {}
    for f in kept:
        by_fn.setdefault(f.fn, []).append(f)
    out: dict = {}
    for f in kept:
        siblings = by_fn.get(f.fn, [])
        s_set = [fi for fi in siblings
                 if fi is not f
                 and overlaps(f, fi, sig, cfg) is not None
                 and more_specific(fi, f, sig, cfg)]
        if not s_set:
            _merge_fact(out, f, cfg)
            continue
        if mode == "optimized":
            continue
        amended = _amend(f, s_set, sig, cfg)
        if amended is not None:
            _merge_fact(out, amended, cfg)
    return out, bots


def _amend(f: Fact, s_set, sig, cfg) -> Optional[Fact]:
    from .syntax import mk_conj

    conjs = list(f.guard)
    for i, fi in enumerate(s_set, start=1):
        ren = rename_with_prefix(list(fi.patterns) + list(fi.guard), f"_a{i}_")
        pats_i = [subst(p, ren) for p in fi.patterns]
        guard_i = [subst(c, ren) for c in fi.guard]
        if len(f.patterns) == 1:
            nu = PApp("nunif", (f.patterns[0], pats_i[0]))
        else:
            nu = PApp("nunif", (CApp("#tuple", tuple(f.patterns)),
                                CApp("#tuple", tuple(pats_i))))
        clause = eval_expr(PApp("or", (nu, PApp("not", (mk_conj(guard_i),)))),
                           sig, cfg)
        if clause == TRUE:
            continue
        if clause == FALSE:
            return None
        if clause not in conjs:
            conjs.append(clause)
    if satisfiable(tuple(conjs), sig, cfg) == "no":
        return None
    return make_fact(f.fn, f.patterns, tuple(conjs), f.body,
                     origin_rule=f.origin_rule, traces=f.traces, cfg=cfg)


# ---------------------------------------------------------------------------
# the step operator and its fixpoint


def resolve_clean_mode(program: Program, cfg: Config) -> str:
    if cfg.clean_mode in ("optimized", "general"):
        return cfg.clean_mode
    for fn in program.functions():
        if not is_complete(program, fn, cfg):
            return "general"
    for rule in program.rules:
        if not is_productive(program, rule, cfg.productivity_probe, cfg):
            return "general"
    return "optimized"


def u_step(program: Program, interp: Interpretation, cfg: Config = DEFAULT,
           mode: Optional[str] = None) -> Interpretation:
    sig = program.signature
    if mode is None:
        mode = resolve_clean_mode(program, cfg)
    lookup = interp.lookup()
    table: dict = {}
    for f in interp.facts.values():
        _merge_fact(table, f, cfg)
    for rule in program.rules:
        for fact in unfold(rule, None, sig, cfg, lookup=lookup):
            _merge_fact(table, fact, cfg)
    kept, new_bots = clean(table.values(), sig, cfg, mode)
    bots = dict(interp.bot_facts)
    for b in new_bots.values():
        _merge_fact(bots, b, cfg)
    bots = {f.key(): f for f in drop_instances(bots.values(), cfg)}
    return Interpretation(kept, bots, interp.step + 1)


def fixpoint(program: Program, max_steps: int, cfg: Config = DEFAULT):
    """Iterate the step operator; returns (sequence, converged)."""
    mode = resolve_clean_mode(program, cfg)
    seq = [Interpretation.empty()]
    for _ in range(max_steps):
        nxt = u_step(program, seq[-1], cfg, mode=mode)
        if nxt.same_facts(seq[-1]):
            return seq, True
        seq.append(nxt)
    return seq, False


# ---------------------------------------------------------------------------
# completeness and productivity (license for the optimized clean)


def is_complete(program: Program, fn: str, cfg: Config = DEFAULT) -> bool:
    """Constructor coverage of the function's rules, guards included."""
    sig = program.signature
    rules = program.rules_for(fn)
    rows = []
    for r in rules:
        guard_ok = all(judge(c, sig, cfg) == "yes" for c in r.guard)
        rows.append((list(r.patterns), guard_ok))
    return _exhaustive(rows, sig)


def _exhaustive(rows, sig) -> bool:
    rows = [r for r in rows]
    if not rows:
        return False
    width = len(rows[0][0])
    if width == 0:
        return any(ok for _, ok in rows)
    col = None
    for j in range(width):
        if any(not isinstance(pats[j], Var) for pats, _ in rows):
            col = j
            break
    if col is None:
        return any(ok for _, ok in rows)

    def drop(pats, j):
        return pats[:j] + pats[j + 1:]

    heads = [pats[col] for pats, _ in rows if not isinstance(pats[col], Var)]
    groups = set()
    for h in heads:
        if isinstance(h, CApp):
            groups.add(sig.group_of(h.name))
        else:
            groups.add(None)  # literals and bottoms have no finite group
    if len(groups) == 1 and None not in groups:
        (group_ty,) = groups
        members = sig.groups[group_ty]
        for ctor in members:
            arity = sig.ctor_arity[ctor]
            sub = []
            for pats, ok in rows:
                p = pats[col]
                if isinstance(p, Var):
                    sub.append((list(Var(f"{p.name}.{k}")
                                     for k in range(arity))
                                + drop(pats, col), ok))
                elif isinstance(p, CApp) and p.name == ctor:
                    sub.append((list(p.args) + drop(pats, col), ok))
            if not _exhaustive(sub, sig):
                return False
        return True
    # infinite or mixed domain: only a variable row can close the column
    var_rows = [(drop(pats, col), ok) for pats, ok in rows
                if isinstance(pats[col], Var)]
    return _exhaustive(var_rows, sig)


def is_productive(program: Program, rule: Rule, probe_steps: int = 4,
                  cfg: Config = DEFAULT) -> bool:
    """A rule is productive when some interpretation within the probe bound
    holds a fact of its making that is more than the unguarded bottom."""
    interp = Interpretation.empty()
    for _ in range(probe_steps):
        interp = u_step(program, interp, cfg, mode="general")
        for f in interp.facts.values():
            if f.origin_rule == rule.label:
                return True
    return False


# ---------------------------------------------------------------------------
# rule/fact renaming helper


def rename_apart(obj, start: int = 0):
    """Fresh, readable variable names (b, c, d, ...) for a rule or fact."""
    from .syntax import fresh_names

    names = fresh_names()
    for _ in range(start):
        next(names)
    if isinstance(obj, Fact):
        parts = list(obj.patterns) + list(obj.guard) + [obj.body]
        ren = canonical_renaming(parts)
        mapping = {v: Var(next(names)) for v in ren}
        return replace(obj,
                       patterns=tuple(subst(p, mapping) for p in obj.patterns),
                       guard=tuple(subst(c, mapping) for c in obj.guard),
                       body=subst(obj.body, mapping))
    parts = list(obj.patterns) + list(obj.guard) + [obj.body]
    ren = canonical_renaming(parts)
    mapping = {v: Var(next(names)) for v in ren}
    return Rule(obj.label, obj.fn,
                tuple(subst(p, mapping) for p in obj.patterns),
                tuple(subst(c, mapping) for c in obj.guard),
                subst(obj.body, mapping))
