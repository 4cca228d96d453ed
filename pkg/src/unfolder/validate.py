"""Static checks on parsed programs.

Violations are data, not exceptions: pattern linearity, free variables,
reserved generated-only symbols, and pairwise rule overlap (unifiable heads
whose conjoined guards cannot be refuted).
"""

from dataclasses import dataclass

from .config import Config, DEFAULT
from .engine import make_fact, overlaps
from .parser import Program, Rule
from .syntax import BotExpr, Expr, children, vars_of


@dataclass(frozen=True)
class Violation:
    kind: str  # nonlinear | free_variable | overlap | reserved
    rule: str
    detail: str

    def __str__(self):
        return f"{self.kind} in {self.rule}: {self.detail}"


def _pattern_vars(rule: Rule):
    out = []
    for p in rule.patterns:
        vars_of(p, out)
    return out


def _contains_reserved(e: Expr) -> bool:
    if isinstance(e, BotExpr):
        return True
    if getattr(e, "name", None) in ("match", "nunif"):
        return True
    return any(_contains_reserved(a) for a in children(e))


def validate_program(program: Program, cfg: Config = DEFAULT):
    violations = []
    for rule in program.rules:
        seen = []
        for p in rule.patterns:
            for v in vars_of(p):
                if v in seen:
                    violations.append(Violation(
                        "nonlinear", rule.label,
                        f"variable {v} repeats across the patterns"))
                else:
                    seen.append(v)
        allowed = set(seen)
        for c in rule.guard:
            allowed.update(vars_of(c))
        for v in vars_of(rule.body):
            if v not in allowed:
                violations.append(Violation(
                    "free_variable", rule.label,
                    f"variable {v} does not occur in pattern or guard"))
        for part in list(rule.guard) + [rule.body]:
            if _contains_reserved(part):
                violations.append(Violation(
                    "reserved", rule.label,
                    "Bot/match/nunif belong to generated facts only"))
                break
    rules = program.rules
    for i, r1 in enumerate(rules):
        for r2 in rules[i + 1:]:
            if r1.fn != r2.fn:
                continue
            f1 = make_fact(r1.fn, r1.patterns, r1.guard, r1.body, cfg=cfg)
            f2 = make_fact(r2.fn, r2.patterns, r2.guard, r2.body, cfg=cfg)
            if overlaps(f1, f2, program.signature, cfg) is not None:
                violations.append(Violation(
                    "overlap", f"{r1.label},{r2.label}",
                    "rule heads unify and guards may hold together"))
    return violations
