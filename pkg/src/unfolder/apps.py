"""Derived analyses: declarative debugging, rule coverage, abstract
interpretation.

The execution dependence tree is rebuilt from a goal's derivation trace:
every step becomes a node holding the instantiated call it rewrote and the
call's final value, nested by position prefixes.  Coverage counts which
rules appear in the traces of bottom-free facts and proposes a small test
set by greedy set cover.  Abstract interpretation reruns the unfolding step
but normalizes fact heads with constructor-replacing fold rules after each
cleaning pass.
"""

from dataclasses import dataclass, field

from .config import Config, DEFAULT
from .engine import (
    Interpretation,
    clean,
    drop_instances,
    make_fact,
    resolve_clean_mode,
    u_step,
    unfold,
    is_productive,
)
from .machine import contains_bot, ueval
from .parser import Program, Rule
from .prim import eval_expr
from .printer import expr_str, head_str
from .syntax import (
    BOT,
    CApp,
    Expr,
    FApp,
    PApp,
    Var,
    children,
    is_term,
    match_first_order,
    rebuild,
    rename_with_prefix,
    replace as replace_at,
    subst,
    unify,
)
from .traces import rule_sequence


class GoalUndefined(Exception):
    """The goal kept an undefined part for every computed interpretation."""


class CataDiverged(Exception):
    """Constructor-replacement rules failed to terminate on a head term."""


class DebugError(Exception):
    pass


class AlreadyAnswered(DebugError):
    pass


class SessionClosed(DebugError):
    pass


class UnknownNode(DebugError):
    pass


# ---------------------------------------------------------------------------
# execution dependence trees


@dataclass
class EdtNode:
    id: int
    call: Expr
    value: Expr
    rule: str
    children: list = field(default_factory=list)

    def to_json(self):
        return {
            "id": self.id,
            "call": expr_str(self.call),
            "value": expr_str(self.value),
            "rule": self.rule,
            "children": [c.to_json() for c in self.children],
        }


@dataclass
class Edt:
    root: EdtNode
    nodes: dict  # id -> node
    interp: Interpretation

    def node(self, node_id):
        if node_id not in self.nodes:
            raise UnknownNode(f"no node {node_id}")
        return self.nodes[node_id]

    def to_json(self):
        return {"schema": 1, "nodes": self.root.to_json()}


def goal_trace(program: Program, goal: Expr, interp: Interpretation,
               cfg: Config = DEFAULT):
    """Traces of an expression: unfold a wrapper rule and drop its step."""
    wrapper = Rule("\x00goal", "\x00goal", (), (), goal)
    sig = program.signature
    out = []
    for fact in unfold(wrapper, interp, sig, cfg):
        for t in fact.traces:
            out.append((fact, t[1:]))
    return out


def traces_of_fact(interp: Interpretation, fact):
    """The stored derivations of a fact belonging to the interpretation."""
    key = fact.key()
    if key in interp.facts:
        return list(interp.facts[key].traces)
    if key in interp.bot_facts:
        return list(interp.bot_facts[key].traces)
    raise KeyError(f"fact {fact} is not part of the interpretation")


def traces_of_expr(program: Program, goal: Expr, interp: Interpretation,
                   cfg: Config = DEFAULT):
    """All derivation traces of a goal expression under an interpretation."""
    return [trace for _, trace in goal_trace(program, goal, interp, cfg)]


def build_edt(program: Program, goal: Expr, max_steps: int,
              cfg: Config = DEFAULT) -> Edt:
    """Derive the dependence tree for a ground goal.

    The interpretation sequence is advanced until the goal acquires a
    bottom-free value; its trace is then replayed, each step contributing a
    node whose call is the redex the step rewrote.
    """
    sig = program.signature
    mode = resolve_clean_mode(program, cfg)
    interp = Interpretation.empty()
    chosen = None
    for _ in range(max_steps):
        interp = u_step(program, interp, cfg, mode=mode)
        for fact, trace in goal_trace(program, goal, interp, cfg):
            if not fact.guard and not contains_bot(fact.body):
                chosen = (fact, trace, interp)
                break
        if chosen:
            break
    if not chosen:
        raise GoalUndefined(
            f"goal {expr_str(goal)} stays undefined after {max_steps} steps")
    fact, trace, interp = chosen
    nodes: dict = {}
    counter = [0]
    lookup = interp.kept_lookup()

    def new_node(call, rule):
        counter[0] += 1
        value = _value_of(interp, call, sig, cfg)
        node = EdtNode(counter[0], call, value, rule)
        nodes[node.id] = node
        return node

    # guard-position steps discharge matching assumptions; they rewrite no
    # part of the goal expression and contribute no node of their own
    steps = [s for s in trace if not s.bot and "g" not in s.pos]
    if not steps:
        root = new_node(goal, "")
        return Edt(root, nodes, interp)

    expr = goal
    root = None
    stack = []  # (node, position)
    for step in steps:
        rule = program.rule_by_label(step.rule)
        pos = tuple(step.pos)
        redex = _subexpr(expr, pos)
        if not isinstance(redex, FApp):
            raise GoalUndefined(
                f"trace step {step.rule} does not sit on a call")
        call = FApp(redex.name, tuple(eval_expr(a, sig, cfg)
                                      for a in redex.args))
        node = new_node(call, step.rule)
        while stack and not _is_prefix(stack[-1][1], pos):
            stack.pop()
        if stack:
            stack[-1][0].children.append(node)
        else:
            root = node
        stack.append((node, pos))
        ren = rename_with_prefix(list(rule.patterns) + list(rule.guard)
                                 + [rule.body], "\x00e")
        pats = [subst(p, ren) for p in rule.patterns]
        sigma = _unify_demanding(list(zip(pats, call.args)), lookup, sig, cfg)
        if sigma is None:
            raise GoalUndefined(
                f"trace step {step.rule} is not applicable during replay")
        expr = replace_at(expr, pos, subst(subst(rule.body, ren), sigma))
    return Edt(root, nodes, interp)


def _unify_demanding(pairs, lookup, sig, cfg):
    """Pattern unification that reduces a function-rooted argument to head
    normal form exactly where a constructor pattern demands it."""
    from .prim import hnf

    binding: dict = {}
    work = list(pairs)
    while work:
        t, e = work.pop(0)
        t = subst(t, binding)
        e = subst(e, binding)
        if isinstance(t, Var):
            binding[t.name] = e
            continue
        if isinstance(e, Var):
            binding[e.name] = t
            continue
        if isinstance(e, (FApp, PApp)):
            conds, e = hnf(e, lookup, sig, cfg)
            if conds or isinstance(e, (FApp, PApp)):
                return None
        if type(t) is not type(e) or getattr(t, "name", None) != \
                getattr(e, "name", None) or \
                getattr(t, "value", None) != getattr(e, "value", None) or \
                len(children(t)) != len(children(e)):
            return None
        work.extend(zip(children(t), children(e)))
    return binding


def _subexpr(e, pos):
    for i in pos:
        if i == "g":
            return None
        e = children(e)[i - 1]
    return e


def _is_prefix(p, q):
    return len(p) <= len(q) and tuple(q[:len(p)]) == tuple(p)


def _value_of(interp, call, sig, cfg):
    res = ueval(interp, call, sig, cfg)
    best = res.bot_free_values()
    if best:
        return best[0]
    if res.values:
        return res.values[0]
    return BOT


# ---------------------------------------------------------------------------
# interactive debugging sessions


@dataclass
class DebugSession:
    edt: Edt
    verdicts: dict = field(default_factory=dict)  # id -> "correct"/"wrong"
    status: str = "in-progress"
    blamed_rule: str = ""

    def verdict(self, node_id):
        return self.verdicts.get(node_id, "unanswered")


def new_session(edt: Edt) -> DebugSession:
    return DebugSession(edt)


def _deepest_wrong(session):
    wrong = None
    node = session.edt.root
    while True:
        if session.verdict(node.id) != "wrong":
            break
        wrong = node
        nxt = None
        for child in node.children:
            if session.verdict(child.id) == "wrong":
                nxt = child
                break
        if nxt is None:
            break
        node = nxt
    return wrong


def next_question(session: DebugSession):
    """The shallowest unanswered node under the deepest wrong one, with
    subtrees already judged correct pruned away."""
    if session.status != "in-progress":
        return None
    root = session.edt.root
    if session.verdict(root.id) == "unanswered":
        return root.id
    start = _deepest_wrong(session)
    if start is None:
        return None
    queue = list(start.children)
    while queue:
        node = queue.pop(0)
        v = session.verdict(node.id)
        if v == "unanswered":
            return node.id
        if v == "wrong":
            queue = list(node.children)
        # correct verdicts prune the whole subtree
    return None


def answer(session: DebugSession, node_id, verdict: str) -> DebugSession:
    if session.status != "in-progress":
        raise SessionClosed(f"session already {session.status}")
    if verdict not in ("correct", "wrong"):
        raise DebugError(f"verdict must be correct or wrong, not {verdict!r}")
    session.edt.node(node_id)
    if node_id in session.verdicts:
        raise AlreadyAnswered(f"node {node_id} already answered")
    session.verdicts[node_id] = verdict
    _update_status(session)
    return session


def _update_status(session):
    root = session.edt.root
    if session.verdict(root.id) == "correct":
        session.status = "exonerated"
        return
    w = _deepest_wrong(session)
    if w is None:
        return
    if all(session.verdict(c.id) == "correct" for c in w.children):
        session.status = "blamed"
        session.blamed_rule = w.rule


# ---------------------------------------------------------------------------
# coverage


@dataclass
class CoverageReport:
    steps_run: int
    rule_hits: dict  # label -> sorted list of covering fact heads
    fact_rules: list  # (fact string, rule labels tuple)
    function_coverage: dict  # fn -> (covered, total)
    total_covered: int
    total_rules: int
    minimal_test_set: list  # fact head strings
    method: str = "greedy"

    @property
    def total_percent(self):
        if not self.total_rules:
            return 100.0
        return 100.0 * self.total_covered / self.total_rules

    def function_percent(self, fn):
        covered, total = self.function_coverage[fn]
        return 100.0 * covered / total if total else 100.0

    def to_json(self):
        return {
            "schema": 1,
            "steps": self.steps_run,
            "method": self.method,
            "total": {"covered": self.total_covered,
                      "rules": self.total_rules,
                      "percent": self.total_percent},
            "functions": {
                fn: {"covered": c, "rules": t,
                     "percent": self.function_percent(fn)}
                for fn, (c, t) in self.function_coverage.items()},
            "rules": {label: heads for label, heads in self.rule_hits.items()},
            "facts": [{"fact": f, "rules": list(rs)}
                      for f, rs in self.fact_rules],
            "minimal_test_set": self.minimal_test_set,
        }

    def table(self):
        lines = ["function        covered  rules  percent"]
        for fn, (c, t) in sorted(self.function_coverage.items()):
            lines.append(f"{fn:<15} {c:>7} {t:>6} {self.function_percent(fn):>7.1f}%")
        lines.append(f"{'TOTAL':<15} {self.total_covered:>7} "
                     f"{self.total_rules:>6} {self.total_percent:>7.1f}%")
        lines.append(f"minimal test set ({self.method}): "
                     + (", ".join(self.minimal_test_set) or "(empty)"))
        return "\n".join(lines)


def _fact_rule_set(fact):
    rules = set()
    for t in fact.traces:
        rules.update(rule_sequence(t))
    return rules


def coverage(program: Program, max_steps: int, cfg: Config = DEFAULT,
             stop_early: bool = True) -> CoverageReport:
    """Run the unfolding until every productive rule shows up in the trace
    of some bottom-free fact (or the step bound runs out) and report."""
    all_rules = [r.label for r in program.rules]
    productive = {r.label for r in program.rules
                  if is_productive(program, r, cfg.productivity_probe, cfg)}
    mode = resolve_clean_mode(program, cfg)
    interp = Interpretation.empty()
    steps = 0
    covered_facts = {}
    for _ in range(max_steps):
        interp = u_step(program, interp, cfg, mode=mode)
        steps += 1
        covered_facts = {
            f.key(): f for f in interp.facts.values()
            if not contains_bot(f.body)
            and not any(contains_bot(c) for c in f.guard)}
        covered = set()
        for f in covered_facts.values():
            covered.update(_fact_rule_set(f))
        if stop_early and productive <= covered:
            break
    rule_hits = {label: [] for label in all_rules}
    fact_rules = []
    for f in sorted(covered_facts.values(),
                    key=lambda f: head_str(f.fn, f.patterns)):
        rules = _fact_rule_set(f) & set(all_rules)
        fact_rules.append((head_str(f.fn, f.patterns), tuple(sorted(rules))))
        for label in rules:
            rule_hits[label].append(head_str(f.fn, f.patterns))
    covered_set = {label for label, heads in rule_hits.items() if heads}
    function_coverage = {}
    for fn in program.functions():
        labels = [r.label for r in program.rules_for(fn)]
        function_coverage[fn] = (len([l for l in labels if l in covered_set]),
                                 len(labels))
    test_set = _greedy_cover(fact_rules, covered_set)
    return CoverageReport(
        steps_run=steps,
        rule_hits=rule_hits,
        fact_rules=fact_rules,
        function_coverage=function_coverage,
        total_covered=len(covered_set),
        total_rules=len(all_rules),
        minimal_test_set=test_set,
    )


def _greedy_cover(fact_rules, universe):
    remaining = set(universe)
    chosen = []
    candidates = list(fact_rules)
    while remaining:
        best = None
        best_gain = 0
        for head, rules in candidates:
            gain = len(remaining & set(rules))
            if gain > best_gain or (
                    gain == best_gain and gain > 0 and best is not None
                    and (len(head), head) < (len(best[0]), best[0])):
                best = (head, rules)
                best_gain = gain
        if best is None or best_gain == 0:
            break
        chosen.append(best[0])
        remaining -= set(best[1])
        candidates.remove(best)
    return chosen


# ---------------------------------------------------------------------------
# abstract interpretation: unfolding plus head normalization


class _Unresolved(Exception):
    pass


def _cata_rewrite(t: Expr, cata_rules, depth: int):
    if depth > 200:
        raise CataDiverged(f"replacement of {expr_str(t)} does not terminate")
    for cr in cata_rules:
        sigma = match_first_order(cr.pattern, t)
        if sigma is not None:
            return _expand_rhs(cr.rhs, sigma, cata_rules, depth + 1)
    if isinstance(t, Var):
        raise _Unresolved
    if isinstance(t, CApp) and t.args:
        return CApp(t.name, tuple(_cata_rewrite(a, cata_rules, depth + 1)
                                  for a in t.args))
    return t


def _expand_rhs(rhs: Expr, sigma, cata_rules, depth):
    if isinstance(rhs, FApp) and rhs.name.startswith("\x00cata:"):
        (arg,) = rhs.args
        return _cata_rewrite(subst(arg, sigma), cata_rules, depth)
    if isinstance(rhs, Var):
        return subst(rhs, sigma)
    kids = children(rhs)
    if not kids:
        return rhs
    return rebuild(rhs, tuple(_expand_rhs(a, sigma, cata_rules, depth)
                              for a in kids))


def _head_eval(e: Expr, lookup, sig, cfg, depth=0) -> Expr:
    """Deterministic reduction of function calls in a head term: a call
    reduces only when exactly one unguarded fact matches it outright."""
    if depth > 200:
        raise CataDiverged(f"head evaluation of {expr_str(e)} loops")
    kids = children(e)
    if kids:
        e = rebuild(e, tuple(_head_eval(a, lookup, sig, cfg, depth + 1)
                             for a in kids))
    if isinstance(e, FApp):
        hits = []
        for fact in lookup(e.name):
            if fact.guard or len(fact.patterns) != len(e.args):
                continue
            sigma = {}
            for p, a in zip(fact.patterns, e.args):
                sigma = match_first_order(p, a, sigma)
                if sigma is None:
                    break
            if sigma is not None:
                hits.append(subst(fact.body, sigma))
        if len({expr_str(h) for h in hits}) == 1:
            return _head_eval(hits[0], lookup, sig, cfg, depth + 1)
    return e


def _normalize_head(fact, program: Program, lookup, cfg):
    sig = program.signature
    new_patterns = []
    for p in fact.patterns:
        try:
            r = _cata_rewrite(p, program.cata_rules, 0)
            r = _head_eval(r, lookup, sig, cfg)
        except _Unresolved:
            r = p
        new_patterns.append(r if is_term(r) else p)
    if tuple(new_patterns) == fact.patterns:
        return fact
    return make_fact(fact.fn, tuple(new_patterns), fact.guard, fact.body,
                     origin_rule=fact.origin_rule, traces=fact.traces,
                     cfg=cfg)


def abstract_step(program: Program, interp: Interpretation,
                  cfg: Config = DEFAULT, mode=None) -> Interpretation:
    nxt = u_step(program, interp, cfg, mode=mode)
    lookup = nxt.kept_lookup()
    rewritten = [_normalize_head(f, program, lookup, cfg)
                 for f in nxt.facts.values()]
    rewritten = drop_instances(rewritten, cfg)
    kept, extra_bots = clean(rewritten, program.signature, cfg,
                             mode or resolve_clean_mode(program, cfg))
    bots = dict(nxt.bot_facts)
    for b in extra_bots.values():
        bots[b.key()] = b
    bots = {f.key(): f for f in drop_instances(bots.values(), cfg)}
    return Interpretation(kept, bots, nxt.step)


def abstract_fixpoint(program: Program, max_steps: int,
                      cfg: Config = DEFAULT):
    """Iterate the unfolding step with head normalization to a fixpoint.

    The replacement rules never take part in unfolding itself; they only
    rewrite the heads of cleaned facts.
    """
    if not program.cata_rules:
        raise ValueError("program declares no cata section")
    mode = resolve_clean_mode(program, cfg)
    seq = [Interpretation.empty()]
    for _ in range(max_steps):
        nxt = abstract_step(program, seq[-1], cfg, mode=mode)
        if nxt.same_facts(seq[-1]):
            return seq, True
        seq.append(nxt)
    return seq, False
