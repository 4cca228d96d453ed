"""Derivation traces: which rule was applied where to produce each fact.

A trace is a tuple of steps.  Each step names a program rule (or the
implicit bottom rule of a function, for positions that had to be given up)
and the position at which it fired.  A fact's first step is always the rule
the fact originates from, at the root position.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class TraceStep:
    rule: str
    pos: tuple = ()
    bot: bool = False


Trace = tuple  # tuple[TraceStep, ...]


def bot_step(fn: str, pos: tuple) -> TraceStep:
    return TraceStep(fn, pos, bot=True)


def compose_position(pos: tuple, traces):
    """Prefix ``pos`` onto every step of every trace.

    Composing with an empty trace list yields the empty list.
    """
    return [tuple(TraceStep(s.rule, tuple(pos) + tuple(s.pos), s.bot)
                  for s in t)
            for t in traces]


def cross_concat(lefts, rights, cap):
    """Append every right-hand trace to every left-hand trace.

    An empty side acts as the identity so that finished branches do not
    erase accumulated histories.  Results are truncated breadth-first at
    ``cap``.
    """
    if not lefts:
        return list(rights)[:cap]
    if not rights:
        return list(lefts)[:cap]
    out = []
    for left in lefts:
        for right in rights:
            out.append(tuple(left) + tuple(right))
            if len(out) >= cap:
                return out
    return out


def rule_sequence(trace, include_bots=False):
    """The rule labels of a trace in application order."""
    return tuple(s.rule for s in trace if include_bots or not s.bot)


def merge_trace_lists(old, new, cap):
    out = list(old)
    seen = set(out)
    for t in new:
        if t not in seen:
            out.append(t)
            seen.add(t)
        if len(out) >= cap:
            break
    return out[:cap]
