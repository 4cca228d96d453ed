"""Pretty-printing in the uncurried listing style and JSON serialization.

Listings use the tuple form throughout (``map(b,Cons(c,d))``), a ``|`` before
comma-separated guard conjuncts, ``*`` fact markers and an optional
``<R1,R2,...>`` derivation suffix.
"""

from .syntax import (
    CMP_OPS,
    BotExpr,
    CApp,
    Expr,
    FApp,
    Lit,
    PApp,
    Var,
)

_PREC = {"+": 6, "-": 6, "*": 7, "/": 7, **{op: 4 for op in CMP_OPS}}


def expr_str(e: Expr, prec: int = 0) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, BotExpr):
        return "Bot"
    if isinstance(e, (CApp, FApp)):
        name = e.name
        if name.startswith("\x00cata:"):
            name = name[len("\x00cata:"):]
        if not e.args:
            return name
        return f"{name}({','.join(expr_str(a) for a in e.args)})"
    assert isinstance(e, PApp)
    if e.name == "@":
        head = expr_str(e.args[0], 10)
        return f"{head}@[{','.join(expr_str(a) for a in e.args[1:])}]"
    if e.name in _PREC and len(e.args) == 2:
        p = _PREC[e.name]
        left = expr_str(e.args[0], p)
        right = expr_str(e.args[1], p + 1)
        s = f"{left}{e.name}{right}"
        return f"({s})" if p < prec else s
    if e.name == "cond" and len(e.args) == 2:
        s = f"{expr_str(e.args[0], 1)} ▶ {expr_str(e.args[1], 1)}"
        return f"({s})" if prec > 0 else s
    if e.name == "and" and len(e.args) == 2:
        s = f"{expr_str(e.args[0], 3)} && {expr_str(e.args[1], 2)}"
        return f"({s})" if prec > 2 else s
    if e.name == "or" and len(e.args) == 2:
        s = f"{expr_str(e.args[0], 2)} || {expr_str(e.args[1], 1)}"
        return f"({s})" if prec > 1 else s
    if not e.args:
        return e.name
    return f"{e.name}({','.join(expr_str(a) for a in e.args)})"


def head_str(fn: str, patterns) -> str:
    if not patterns:
        return fn
    return f"{fn}({','.join(expr_str(p) for p in patterns)})"


def guard_str(guard) -> str:
    return ",".join(expr_str(c) for c in guard)


def fact_str(fact, traces=False, positions=False, bots=False) -> str:
    s = head_str(fact.fn, fact.patterns)
    if fact.guard:
        s += f" | {guard_str(fact.guard)}"
    s += f" = {expr_str(fact.body)}"
    if traces and fact.traces:
        s += f" {trace_str(fact.traces[0], positions=positions, bots=bots)}"
    return s


def trace_str(trace, positions=False, bots=False) -> str:
    parts = []
    for step in trace:
        if step.bot and not bots:
            continue
        label = f"Bot_{step.rule}" if step.bot else step.rule
        if positions:
            label += f"@{pos_str(step.pos)}"
        parts.append(label)
    return f"<{','.join(parts)}>"


def pos_str(pos) -> str:
    if not pos:
        return "{}"
    return ".".join(str(p) for p in pos)


def rule_str(rule) -> str:
    s = f"{rule.label}: " if rule.label else ""
    s += head_str(rule.fn, rule.patterns)
    if rule.guard:
        s += f" | {guard_str(rule.guard)}"
    return s + f" = {expr_str(rule.body)}"


def program_str(program) -> str:
    """Source form that reparses to the same program."""
    lines = []
    from .syntax import BUILTIN_GROUPS

    for ty, members in program.signature.groups.items():
        if ty in BUILTIN_GROUPS:
            continue
        decls = []
        for m in members:
            arity = program.signature.ctor_arity[m]
            decls.append(m + "".join(f"(t{i})" for i in range(arity)))
        lines.append(f"data {ty} = " + " | ".join(decls))
    if lines:
        lines.append("")
    for rule in program.rules:
        lines.append(rule_str(rule))
    if program.cata_rules:
        lines.append("")
        lines.append("cata:")
        for cr in program.cata_rules:
            lines.append(f"{cr.cata_fn} ({expr_str(cr.pattern)})"
                         f" = {expr_str(cr.rhs)}")
    return "\n".join(lines) + "\n"


def interp_listing(interp, traces=True, positions=False, bots=False,
                   show_bot_facts=True) -> str:
    lines = []
    for fact in interp.sorted_facts():
        lines.append("* " + fact_str(fact, traces=traces, positions=positions,
                                     bots=bots))
    if show_bot_facts and interp.bot_facts:
        lines.append("-- undefined so far:")
        for fact in interp.sorted_bot_facts():
            lines.append("* " + fact_str(fact))
    return "\n".join(lines)


def trace_json(trace) -> list:
    return [{"rule": ("Bot_" + s.rule) if s.bot else s.rule,
             "position": pos_str(s.pos)} for s in trace]


def fact_json(fact) -> dict:
    return {
        "head": head_str(fact.fn, fact.patterns),
        "guard": guard_str(fact.guard),
        "body": expr_str(fact.body),
        "origin": fact.origin_rule,
        "trace": trace_json(fact.traces[0]) if fact.traces else [],
    }


def interp_json(interp) -> dict:
    return {
        "schema": 1,
        "step": interp.step,
        "facts": [fact_json(f) for f in interp.sorted_facts()],
        "bot_facts": [fact_json(f) for f in interp.sorted_bot_facts()],
    }
