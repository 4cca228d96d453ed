"""Parser for ``.ufl`` sources.

The concrete syntax accepts both application styles found in practice:
Haskell-like juxtaposition (``add (Suc x) y = Suc (add x y)``) and the
uncurried tuple style (``ite(True,t,e) = t``).  Rules may carry an optional
``LABEL:`` prefix; unlabeled rules are numbered ``R1, R2, ...``.  Lines
without ``=`` (type signatures, blanks) are ignored, ``//`` starts a
comment, ``data`` declares constructors, and everything after a ``cata:``
line defines constructor-replacement rules that are kept apart from the
program proper.
"""

import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    BOT,
    CApp,
    Expr,
    FApp,
    Lit,
    PApp,
    PREDEF_NAMES,
    Signature,
    Var,
    is_term,
    mk_app,
    set_active_signature,
    vars_of,
)


class ParseError(Exception):
    def __init__(self, msg, line=None, col=None):
        self.line = line
        self.col = col
        where = f" at line {line}" if line is not None else ""
        where += f", column {col}" if col is not None else ""
        super().__init__(msg + where)


@dataclass(frozen=True)
class Rule:
    label: str
    fn: str
    patterns: tuple
    guard: tuple  # ordered conjuncts; empty means True
    body: Expr

    def head_vars(self):
        out = []
        for p in self.patterns:
            vars_of(p, out)
        return out


@dataclass
class CataRule:
    pattern: Expr  # a term over abstract constructors
    rhs: Expr  # may mention cata applications and program functions
    cata_fn: str


@dataclass
class Program:
    rules: list
    signature: Signature
    cata_rules: list = field(default_factory=list)
    source: str = ""

    def rules_for(self, fn):
        return [r for r in self.rules if r.fn == fn]

    def functions(self):
        seen = []
        for r in self.rules:
            if r.fn not in seen:
                seen.append(r.fn)
        return seen

    def rule_by_label(self, label) -> Optional[Rule]:
        for r in self.rules:
            if r.label == label:
                return r
        return None


_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t]+)
      | (?P<comment>//[^\n]*)
      | (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_'#]*)
      | (?P<op>::|>=|<=|==|&&|\|\||[()\[\],:|=+\-*/><_@])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize_line(text, lineno):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        pos = m.end()
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        out.append(Token(kind, m.group(), lineno, m.start() + 1))
    return out


def _logical_lines(text):
    """Join physical lines while brackets stay unbalanced."""
    pending = []
    depth = 0
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize_line(raw, lineno)
        if not toks and depth == 0:
            continue
        if start is None:
            start = lineno
        pending.extend(toks)
        depth = sum(1 for t in pending if t.text in "([") - sum(
            1 for t in pending if t.text in ")]"
        )
        if depth <= 0 and pending:
            yield start, pending
            pending, depth, start = [], 0, None
    if pending:
        yield start, pending


class _ExprParser:
    """Recursive-descent expression parser over one token list."""

    def __init__(self, toks, resolve):
        self.toks = toks
        self.i = 0
        self.resolve = resolve
        self.fresh = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of line")
        self.i += 1
        return t

    def expect(self, text):
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def at_end(self):
        return self.i >= len(self.toks)

    # precedence: comparisons < cons(:) < additive < multiplicative < app
    def expr(self):
        left = self.cons()
        t = self.peek()
        if t and t.text in (">", "<", ">=", "<=", "=="):
            self.next()
            right = self.cons()
            return PApp(t.text, (left, right))
        return left

    def cons(self):
        left = self.additive()
        t = self.peek()
        if t and t.text == ":":
            self.next()
            return CApp("Cons", (left, self.cons()))
        return left

    def additive(self):
        left = self.multiplicative()
        while True:
            t = self.peek()
            if t and t.text in ("+", "-"):
                self.next()
                left = PApp(t.text, (left, self.multiplicative()))
            else:
                return left

    def multiplicative(self):
        left = self.app()
        while True:
            t = self.peek()
            if t and t.text in ("*", "/"):
                self.next()
                left = PApp(t.text, (left, self.app()))
            else:
                return left

    def app(self):
        head = self.atom()
        args = []
        while True:
            t = self.peek()
            if t is None or t.text in (")", "]", ",", "|", "=", ":", "+", "-",
                                       "*", "/", ">", "<", ">=", "<=", "==",
                                       "&&", "||"):
                break
            if t.text == "@":
                head = self._at_suffix(head, args)
                args = []
                continue
            if t.text == "(":
                args.extend(self.paren_group())
            else:
                args.append(self.atom())
        if not args:
            return head
        return self.resolve.apply(head, args)

    def _at_suffix(self, head, args):
        """Explicit application: ``e@[e1,...,en]``."""
        if args:
            head = self.resolve.apply(head, args)
        self.expect("@")
        self.expect("[")
        items = [self.expr()]
        while self.peek() and self.peek().text == ",":
            self.next()
            items.append(self.expr())
        self.expect("]")
        return self.resolve.apply(head, items)

    def paren_group(self):
        """A parenthesized group; top-level commas yield several arguments."""
        self.expect("(")
        items = [self.expr()]
        while self.peek() and self.peek().text == ",":
            self.next()
            items.append(self.expr())
        self.expect(")")
        return items

    def atom(self):
        t = self.next()
        if t.kind == "int":
            return Lit(int(t.text))
        if t.text == "-" and self.peek() and self.peek().kind == "int":
            return Lit(-int(self.next().text))
        if t.text == "_":
            self.fresh += 1
            return Var(f"_w{self.fresh}")
        if t.text == "(":
            self.i -= 1
            items = self.paren_group()
            if len(items) != 1:
                raise ParseError("tuple syntax is only valid in argument "
                                 "position", t.line, t.col)
            return items[0]
        if t.text == "[":
            items = []
            if self.peek() and self.peek().text != "]":
                items.append(self.expr())
                while self.peek() and self.peek().text == ",":
                    self.next()
                    items.append(self.expr())
            self.expect("]")
            lst = CApp("Nil")
            for item in reversed(items):
                lst = CApp("Cons", (item, lst))
            return lst
        if t.kind == "ident":
            # an immediately adjacent '(' makes a call in the tuple style;
            # with whitespace in between the group is a separate argument
            nxt = self.peek()
            if (nxt and nxt.text == "(" and nxt.line == t.line
                    and nxt.col == t.col + len(t.text)):
                args = self.paren_group()
                return self.resolve.apply(self.resolve.ident(t), args)
            return self.resolve.ident(t)
        raise ParseError(f"unexpected token {t.text!r}", t.line, t.col)


class _Resolver:
    """Classifies identifiers into constructors, functions and variables."""

    def __init__(self, sig, fn_names, cata_names=(), allow_bot=False):
        self.sig = sig
        self.fn_names = set(fn_names)
        self.cata_names = set(cata_names)
        self.allow_bot = allow_bot

    def ident(self, tok):
        name = tok.text
        if name == "Bot":
            if not self.allow_bot:
                raise ParseError("Bot cannot appear in source programs",
                                 tok.line, tok.col)
            return BOT
        if name in ("match", "nunif") and not self.allow_bot:
            raise ParseError(f"{name} is reserved for generated facts",
                             tok.line, tok.col)
        if name in self.cata_names:
            return FApp("\x00cata:" + name, ())
        if name in self.fn_names:
            return FApp(name, ())
        if name in PREDEF_NAMES:
            return PApp(name, ())
        if name in self.sig.ctor_arity:
            return CApp(name, ())
        if name[0].isupper():
            # implicitly declared constructor; arity fixed at first use
            return CApp(name, ())
        return Var(name)

    def apply(self, head, args):
        if isinstance(head, CApp) and head.name not in self.sig.ctor_arity:
            self.sig.ctor_arity[head.name] = len(head.args) + len(args)
        if isinstance(head, FApp) and head.name.startswith("\x00cata:"):
            return FApp(head.name, head.args + tuple(args))
        out = mk_app(head, args, self.sig)
        if isinstance(out, PApp) and out.name == "@" and \
                isinstance(out.args[0], CApp):
            full = out.args[0]
            raise ParseError(
                f"constructor {full.name} takes "
                f"{self.sig.ctor_arity.get(full.name)} argument(s)")
        self._check_arity(out)
        return out

    def _check_arity(self, e):
        if isinstance(e, CApp):
            declared = self.sig.ctor_arity.get(e.name)
            if declared is not None and len(e.args) > declared:
                raise ParseError(
                    f"constructor {e.name} takes {declared} argument(s), "
                    f"got {len(e.args)}")


def _parse_data(toks, sig, lineno):
    # data Name = C1 | C2 T1 T2 | ...
    i = 1
    if i >= len(toks) or toks[i].kind != "ident":
        raise ParseError("expected type name after 'data'", lineno)
    ty = toks[i].text
    i += 1
    if i >= len(toks) or toks[i].text != "=":
        raise ParseError("expected '=' in data declaration", lineno)
    i += 1
    groups = []
    current = []
    depth = 0
    for t in toks[i:]:
        if t.text == "|" and depth == 0:
            groups.append(current)
            current = []
        else:
            if t.text in "([":
                depth += 1
            elif t.text in ")]":
                depth -= 1
            current.append(t)
    groups.append(current)
    members = []
    for g in groups:
        if not g or g[0].kind != "ident":
            raise ParseError("malformed constructor declaration", lineno)
        name = g[0].text
        arity = 0
        depth = 0
        for t in g[1:]:
            if t.text in "([":
                if depth == 0:
                    arity += 1
                depth += 1
            elif t.text in ")]":
                depth -= 1
            elif depth == 0 and (t.kind in ("ident", "int")):
                arity += 1
        prev = sig.ctor_arity.get(name)
        if prev is not None and prev != arity:
            raise ParseError(f"constructor {name} declared with arity {arity} "
                             f"but used with arity {prev}", lineno)
        sig.ctor_arity[name] = arity
        members.append(name)
    sig.groups[ty] = tuple(members)


def _split_rule(toks):
    """head | guard = body, with '|' and '=' taken at bracket depth 0."""
    depth = 0
    bar = eq = None
    for i, t in enumerate(toks):
        if t.text in "([":
            depth += 1
        elif t.text in ")]":
            depth -= 1
        elif depth == 0 and t.text == "|" and bar is None and eq is None:
            bar = i
        elif depth == 0 and t.text == "=" and eq is None:
            eq = i
            break
    if eq is None:
        return None
    head = toks[:bar] if bar is not None else toks[:eq]
    guard = toks[bar + 1:eq] if bar is not None else []
    return head, guard, toks[eq + 1:]


def _parse_head(toks, resolver):
    p = _ExprParser(toks, resolver)
    e = p.expr()
    if not p.at_end():
        t = p.peek()
        raise ParseError(f"trailing tokens in rule head: {t.text!r}",
                         t.line, t.col)
    # before the arity is registered, surplus head arguments sit under "@"
    if isinstance(e, PApp) and e.name == "@" and e.args and \
            isinstance(e.args[0], FApp):
        f = e.args[0]
        e = FApp(f.name, f.args + e.args[1:])
    if isinstance(e, FApp):
        return e.name, e.args
    raise ParseError("rule head must be a function application",
                     toks[0].line, toks[0].col)


def _parse_guard(toks, resolver):
    if not toks:
        return ()
    conjuncts = []
    depth = 0
    cur = []
    for t in toks:
        if t.text in "([":
            depth += 1
        elif t.text in ")]":
            depth -= 1
        if depth == 0 and t.text in (",", "&&"):
            conjuncts.append(cur)
            cur = []
        else:
            cur.append(t)
    conjuncts.append(cur)
    out = []
    for c in conjuncts:
        p = _ExprParser(c, resolver)
        e = p.expr()
        if not p.at_end():
            t = p.peek()
            raise ParseError(f"trailing tokens in guard: {t.text!r}",
                             t.line, t.col)
        if e != CApp("True"):
            out.append(e)
    return tuple(out)


def _parse_expr_toks(toks, resolver):
    p = _ExprParser(toks, resolver)
    e = p.expr()
    if not p.at_end():
        t = p.peek()
        raise ParseError(f"trailing tokens: {t.text!r}", t.line, t.col)
    return e


def parse_program(text: str) -> Program:
    sig = Signature()
    lines = list(_logical_lines(text))

    # pass 1: data declarations, rule labels/heads, cata section boundary
    cata_start = None
    heads = []  # (index, label, toks) for rule lines
    for idx, (lineno, toks) in enumerate(lines):
        if toks[0].text == "cata" and len(toks) >= 2 and toks[1].text == ":":
            cata_start = idx
            continue
        if toks[0].text == "data":
            _parse_data(toks, sig, lineno)

    def strip_label(toks):
        if (len(toks) >= 2 and toks[0].kind == "ident" and toks[1].text == ":"
                and any(t.text == "=" for t in toks)):
            return toks[0].text, toks[2:]
        return None, toks

    rule_lines = []
    cata_lines = []
    for idx, (lineno, toks) in enumerate(lines):
        if toks[0].text in ("data",):
            continue
        if toks[0].text == "cata" and len(toks) >= 2 and toks[1].text == ":":
            continue
        if not any(t.text == "=" for t in toks):
            continue  # type signature or stray text
        if "::" in [t.text for t in toks]:
            continue
        label, body_toks = strip_label(toks)
        if cata_start is not None and idx > cata_start:
            cata_lines.append((lineno, label, body_toks))
        else:
            rule_lines.append((lineno, label, body_toks))

    fn_names = []
    for lineno, label, toks in rule_lines:
        parts = _split_rule(toks)
        if parts is None:
            raise ParseError("rule has no '='", lineno)
        head_toks = parts[0]
        if not head_toks or head_toks[0].kind != "ident":
            raise ParseError("rule head must start with a function name",
                             lineno)
        name = head_toks[0].text
        if name not in fn_names and not _looks_ctor(name, sig):
            fn_names.append(name)
    cata_names = []
    for lineno, label, toks in cata_lines:
        if toks and toks[0].kind == "ident" and toks[0].text not in cata_names:
            cata_names.append(toks[0].text)

    # pass 2: full parse
    resolver = _Resolver(sig, fn_names, cata_names)
    rules = []
    auto = 0
    for lineno, label, toks in rule_lines:
        head_toks, guard_toks, body_toks = _split_rule(toks)
        fn, patterns = _parse_head(head_toks, resolver)
        if fn in sig.ctor_arity:
            raise ParseError(f"{fn} is a constructor, not a function", lineno)
        for pat in patterns:
            if not is_term(pat):
                raise ParseError("rule patterns must be built from variables "
                                 "and constructors", lineno)
        arity = sig.fn_arity.setdefault(fn, len(patterns))
        if arity != len(patterns):
            raise ParseError(f"{fn} defined with {arity} argument(s) but this "
                             f"rule has {len(patterns)}", lineno)
        guard = _parse_guard(guard_toks, resolver)
        body = _parse_expr_toks(body_toks, resolver)
        if not label:
            auto += 1
            label = f"R{auto}"
        rules.append(Rule(label, fn, tuple(patterns), guard, body))

    # re-parse bodies now that every function arity is known, so that
    # juxtaposed partial applications graft correctly
    resolver2 = _Resolver(sig, fn_names, cata_names)
    rules = [
        Rule(r.label, r.fn, r.patterns,
             _parse_guard(guard_toks, resolver2),
             _parse_expr_toks(body_toks, resolver2))
        for r, (lineno, label, toks) in zip(rules, rule_lines)
        for head_toks, guard_toks, body_toks in [_split_rule(toks)]
    ]

    cata_rules = []
    for lineno, label, toks in cata_lines:
        parts = _split_rule(toks)
        if parts is None:
            continue
        head_toks, guard_toks, body_toks = parts
        if guard_toks:
            raise ParseError("cata rules cannot carry guards", lineno)
        cp = _ExprParser(head_toks, resolver2)
        head = cp.expr()
        if not (isinstance(head, FApp) and head.name.startswith("\x00cata:")):
            raise ParseError("cata rule head must be a cata function "
                             "application", lineno)
        if len(head.args) != 1:
            raise ParseError("cata rules take exactly one pattern", lineno)
        if not is_term(head.args[0]):
            raise ParseError("cata patterns must be constructor terms", lineno)
        rhs = _parse_expr_toks(body_toks, resolver2)
        cata_rules.append(CataRule(head.args[0], rhs,
                                   head.name[len("\x00cata:"):]))

    program = Program(rules, sig, cata_rules, source=text)
    set_active_signature(sig)
    return program


def _looks_ctor(name, sig):
    return name in sig.ctor_arity


def parse_expr(text: str, program: Program, allow_bot: bool = True) -> Expr:
    """Parse a standalone expression (a goal) against a program's signature."""
    toks = _tokenize_line(text, 1)
    resolver = _Resolver(program.signature, [r.fn for r in program.rules],
                         allow_bot=allow_bot)
    return _parse_expr_toks(toks, resolver)
