"""Abstract syntax for the guarded-rule kernel language.

Expressions are immutable trees built from variables, integer literals,
constructor applications, user-function applications, predefined-function
applications and the syntactic bottom ``Bot`` that stands for absent
information.  Curried source applications are represented with the
predefined apply operator ``@`` and normalized ("grafted") onto their head
symbol as soon as the head is a known constructor or function.
"""

from dataclasses import dataclass
from typing import Iterator, Optional


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True)
class Lit(Expr):
    value: int

    def __repr__(self):
        return f"Lit({self.value})"


@dataclass(frozen=True)
class CApp(Expr):
    """Constructor application, possibly partial."""

    name: str
    args: tuple = ()

    def __repr__(self):
        return f"CApp({self.name},{list(self.args)})"


@dataclass(frozen=True)
class FApp(Expr):
    """User-function application; full iff len(args) == declared arity."""

    name: str
    args: tuple = ()

    def __repr__(self):
        return f"FApp({self.name},{list(self.args)})"


@dataclass(frozen=True)
class PApp(Expr):
    """Predefined-function application (``@``, match, nunif, arithmetic...)."""

    name: str
    args: tuple = ()

    def __repr__(self):
        return f"PApp({self.name},{list(self.args)})"


@dataclass(frozen=True)
class BotExpr(Expr):
    def __repr__(self):
        return "Bot"


BOT = BotExpr()
TRUE = CApp("True")
FALSE = CApp("False")
NIL = CApp("Nil")

# Builtin constructor arities and type groups used by coverage analysis.
BUILTIN_CTORS = {"True": 0, "False": 0, "Nil": 0, "Cons": 2}
BUILTIN_GROUPS = {"Bool": ("True", "False"), "List": ("Nil", "Cons")}

ARITH_OPS = {"+", "-", "*", "/"}
CMP_OPS = {">", "<", ">=", "<=", "=="}
PREDEF_ARITY = {
    "@": None,  # variadic
    "match": 2,
    "nunif": 2,
    "snd": 1,
    "fst": 1,
    "and": 2,
    "or": 2,
    "not": 1,
    "cond": 2,
    **{op: 2 for op in ARITH_OPS | CMP_OPS},
}
PREDEF_NAMES = frozenset(PREDEF_ARITY)


class Signature:
    """Constructor and function arities for one program."""

    def __init__(self, ctor_arity=None, fn_arity=None, groups=None):
        self.ctor_arity = dict(BUILTIN_CTORS)
        self.ctor_arity.update(ctor_arity or {})
        self.fn_arity = dict(fn_arity or {})
        self.groups = dict(BUILTIN_GROUPS)
        self.groups.update(groups or {})

    def is_ctor(self, name):
        return name in self.ctor_arity

    def is_fn(self, name):
        return name in self.fn_arity

    def group_of(self, ctor) -> Optional[str]:
        for ty, members in self.groups.items():
            if ctor in members:
                return ty
        return None

    def copy(self):
        sig = Signature()
        sig.ctor_arity = dict(self.ctor_arity)
        sig.fn_arity = dict(self.fn_arity)
        sig.groups = dict(self.groups)
        return sig


def children(e: Expr) -> tuple:
    if isinstance(e, (CApp, FApp, PApp)):
        return e.args
    return ()


def rebuild(e: Expr, args: tuple) -> Expr:
    if isinstance(e, CApp):
        return CApp(e.name, args)
    if isinstance(e, FApp):
        return FApp(e.name, args)
    if isinstance(e, PApp):
        return PApp(e.name, args)
    return e


def mk_app(head: Expr, args, sig: Signature) -> Expr:
    """Apply head to args, grafting onto known symbols up to their arity.

    ``senior @ [64]`` becomes the full application ``senior(64)``; whatever
    cannot be absorbed stays wrapped under the ``@`` operator (variable
    heads, saturated heads).
    """
    args = list(args)
    while args:
        if isinstance(head, CApp):
            room = sig.ctor_arity.get(head.name, len(head.args)) - len(head.args)
        elif isinstance(head, FApp):
            room = sig.fn_arity.get(head.name, len(head.args)) - len(head.args)
        elif isinstance(head, PApp) and head.name != "@":
            ar = PREDEF_ARITY.get(head.name)
            room = (ar - len(head.args)) if ar is not None else 0
        else:
            room = 0
        if room <= 0:
            break
        take, args = args[:room], args[room:]
        head = rebuild(head, head.args + tuple(take))
    if not args:
        return head
    if isinstance(head, PApp) and head.name == "@":
        return PApp("@", head.args + tuple(args))
    return PApp("@", (head,) + tuple(args))


def is_full(e: Expr, sig: Signature) -> bool:
    if isinstance(e, CApp):
        return len(e.args) == sig.ctor_arity.get(e.name, len(e.args))
    if isinstance(e, FApp):
        return len(e.args) == sig.fn_arity.get(e.name, len(e.args))
    if isinstance(e, PApp):
        ar = PREDEF_ARITY.get(e.name)
        return ar is None or len(e.args) == ar
    return True


def is_term(e: Expr) -> bool:
    """Terms carry variables and constructors only."""
    if isinstance(e, (Var, Lit, BotExpr)):
        return True
    if isinstance(e, CApp):
        return all(is_term(a) for a in e.args)
    return False


def subst(e: Expr, binding: dict) -> Expr:
    """Simultaneous substitution; bindings may map to full expressions."""
    if not binding:
        return e
    if isinstance(e, Var):
        return binding.get(e.name, e)
    kids = children(e)
    if not kids:
        return e
    new = tuple(subst(a, binding) for a in kids)
    if new == kids:
        return e
    return _regraft(rebuild(e, new))


def _regraft(e: Expr) -> Expr:
    # Substitution can put a symbol under "@"; re-normalize those nodes.
    if isinstance(e, PApp) and e.name == "@" and e.args:
        head = e.args[0]
        if isinstance(head, (CApp, FApp)) or (
            isinstance(head, PApp) and head.name != "@"
        ):
            return mk_app(head, e.args[1:], _GRAFT_SIG)
    return e


class _GraftSig:
    """Arity oracle used during substitution; set per program by the parser."""

    def __init__(self):
        self.sig = Signature()

    @property
    def ctor_arity(self):
        return self.sig.ctor_arity

    @property
    def fn_arity(self):
        return self.sig.fn_arity


_GRAFT_SIG = _GraftSig()


def set_active_signature(sig: Signature):
    """Install the signature used to re-graft ``@`` nodes after substitution."""
    _GRAFT_SIG.sig = sig


def vars_of(e: Expr, acc=None) -> list:
    """Variable names in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(e, Var):
        if e.name not in acc:
            acc.append(e.name)
    else:
        for a in children(e):
            vars_of(a, acc)
    return acc


def positions(e: Expr, prefix=()) -> Iterator[tuple]:
    """All positions of e in prefix (outermost, left-to-right) order."""
    yield prefix, e
    for i, a in enumerate(children(e), start=1):
        yield from positions(a, prefix + (i,))


def at(e: Expr, pos: tuple) -> Expr:
    for i in pos:
        e = children(e)[i - 1]
    return e


def replace(e: Expr, pos: tuple, new: Expr) -> Expr:
    if not pos:
        return new
    kids = list(children(e))
    kids[pos[0] - 1] = replace(kids[pos[0] - 1], pos[1:], new)
    return rebuild(e, tuple(kids))


def occurs(name: str, e: Expr) -> bool:
    if isinstance(e, Var):
        return e.name == name
    return any(occurs(name, a) for a in children(e))


def _root_key(e: Expr):
    if isinstance(e, Lit):
        return ("lit", e.value)
    if isinstance(e, BotExpr):
        return ("bot",)
    if isinstance(e, CApp):
        return ("c", e.name, len(e.args))
    if isinstance(e, FApp):
        return ("f", e.name, len(e.args))
    if isinstance(e, PApp):
        return ("p", e.name, len(e.args))
    return ("v",)


def unify(pairs) -> Optional[dict]:
    """Most general unifier over rigid applications, with occurs check.

    Function symbols (user or predefined) are treated like constructors:
    applications unify only when root symbol and argument count agree.
    Variables on either side may be bound to arbitrary expressions.
    """
    binding: dict = {}
    work = list(pairs)
    while work:
        a, b = work.pop()
        a = subst(a, binding)
        b = subst(b, binding)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs(a.name, b):
                return None
            _compose(binding, a.name, b)
            continue
        if isinstance(b, Var):
            if occurs(b.name, a):
                return None
            _compose(binding, b.name, a)
            continue
        if _root_key(a) != _root_key(b):
            return None
        work.extend(zip(children(a), children(b)))
    return binding


def _compose(binding: dict, name: str, value: Expr):
    one = {name: value}
    for k in list(binding):
        binding[k] = subst(binding[k], one)
    binding[name] = value


def match_first_order(pattern: Expr, term: Expr, binding=None) -> Optional[dict]:
    """One-way matching: sigma with sigma(pattern) == term, or None."""
    if binding is None:
        binding = {}
    if isinstance(pattern, Var):
        if pattern.name in binding:
            return binding if binding[pattern.name] == term else None
        binding[pattern.name] = term
        return binding
    if _root_key(pattern) != _root_key(term):
        return None
    for p, t in zip(children(pattern), children(term)):
        if match_first_order(p, t, binding) is None:
            return None
    return binding


# Canonical variable alphabet mirrors generated listings: b, c, d, ...
_ALPHABET = "bcdefghijklmnopqrstuvwxyza"


def fresh_names() -> Iterator[str]:
    k = 0
    while True:
        for ch in _ALPHABET:
            yield ch + (str(k) if k else "")
        k += 1


def canonical_renaming(exprs) -> dict:
    """First-occurrence renaming over the given expressions, in order."""
    names = fresh_names()
    ren = {}
    for e in exprs:
        for v in vars_of(e):
            if v not in ren:
                ren[v] = next(names)
    return {v: Var(n) for v, n in ren.items()}


def rename_with_prefix(exprs, prefix: str) -> dict:
    ren = {}
    for e in exprs:
        for v in vars_of(e):
            if v not in ren:
                ren[v] = Var(f"{prefix}{len(ren) + 1}")
    return ren


def conj_list(e: Expr) -> tuple:
    """Flatten nested conjunctions into an ordered conjunct tuple."""
    if isinstance(e, PApp) and e.name == "and":
        out = []
        for a in e.args:
            out.extend(conj_list(a))
        return tuple(out)
    if e == TRUE:
        return ()
    return (e,)


def mk_conj(conjuncts) -> Expr:
    conjuncts = list(conjuncts)
    if not conjuncts:
        return TRUE
    e = conjuncts[-1]
    for c in reversed(conjuncts[:-1]):
        e = PApp("and", (c, e))
    return e
