"""Concrete syntax: a parser for source terms and printers for all three.

Grammar:

    term  ::= "fun" "(" idents ")" "->" term | app
    app   ::= punit punit*
    punit ::= "pi" INT punit | atom
    atom  ::= ident | "<" terms ">" | "(" term ")"

Application is left associative; "pi" grabs the next unit only, so it
binds tighter than application. An abstraction body extends as far
right as possible, which means an abstraction in function or argument
position must be parenthesized. "#" starts a comment running to the
end of the line. Identifiers are letters, digits, and underscores, not
starting with a digit; "fun" and "pi" are reserved.

Intermediate and target terms have printers only, no parser: they are
produced by the translations, never written by hand.
"""

from __future__ import annotations

import re

from .terms import (
    Abs,
    App,
    Closure,
    PVar,
    PVarBag,
    Proj,
    SourceTerm,
    TClosure,
    Tuple,
    ValBag,
    Var,
    VarBag,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
      (?P<ws>\s+|\#[^\n]*)
    | (?P<arrow>->)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<int>[0-9]+)
    | (?P<punct>[(),<>])
    """,
    re.VERBOSE,
)

_KEYWORDS = ("fun", "pi")


def _tokenize(src: str):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            line += text.count("\n")
            if "\n" in text:
                line_start = pos + text.rindex("\n") + 1
        else:
            col = pos - line_start + 1
            if kind == "ident" and text in _KEYWORDS:
                kind = text
            elif kind == "punct":
                kind = text
            tokens.append((kind, text, line, col))
        pos = m.end()
    tokens.append(("eof", "", line, len(src) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok[2], tok[3])

    def term(self) -> SourceTerm:
        if self.peek()[0] == "fun":
            tok = self.next()
            self.expect("(")
            params = []
            if self.peek()[0] == "ident":
                params.append(Var(self.next()[1]))
                while self.peek()[0] == ",":
                    self.next()
                    params.append(Var(self.expect("ident")[1]))
            self.expect(")")
            self.expect("arrow")
            body = self.term()
            try:
                return Abs(tuple(params), body)
            except ValueError as e:
                raise ParseError(str(e), tok[2], tok[3]) from None
        return self.app()

    def app(self) -> SourceTerm:
        t = self.punit()
        while self.peek()[0] in ("ident", "pi", "<", "("):
            t = App(t, self.punit())
        return t

    def punit(self) -> SourceTerm:
        kind, text, line, col = self.peek()
        if kind == "pi":
            self.next()
            idx = self.expect("int")
            return Proj(int(idx[1]), self.punit())
        if kind == "ident":
            self.next()
            return Var(text)
        if kind == "<":
            self.next()
            items = []
            if self.peek()[0] != ">":
                items.append(self.term())
                while self.peek()[0] == ",":
                    self.next()
                    items.append(self.term())
            self.expect(">")
            return Tuple(tuple(items))
        if kind == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        self.fail(f"expected a term, found {text or 'end of input'!r}")


def parse(src: str) -> SourceTerm:
    """Parse one source term; raises ParseError with line:col on failure."""
    p = _Parser(src)
    t = p.term()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input starting at {tok[1]!r}", tok[2], tok[3])
    return t


# printer contexts: TOP admits anything bare, FN is the function side of
# an application, ARG is an application argument or projection operand
_TOP, _FN, _ARG = 0, 1, 2


def _print(t, ctx: int, leaf) -> str:
    match t:
        case Var(name):
            return name
        case App(fn, arg):
            s = f"{_print(fn, _FN, leaf)} {_print(arg, _ARG, leaf)}"
            return f"({s})" if ctx == _ARG else s
        case Proj(i, arg):
            return f"pi {i} {_print(arg, _ARG, leaf)}"
        case Abs(params, body):
            ps = ", ".join(p.name for p in params)
            s = f"fun({ps}) -> {_print(body, _TOP, leaf)}"
            return s if ctx == _TOP else f"({s})"
        case Tuple(items):
            return "<" + ", ".join(_print(it, _TOP, leaf) for it in items) + ">"
    return leaf(t, ctx)


def print_source(t) -> str:
    def leaf(t, ctx):
        raise TypeError(f"not a source term: {t!r}")

    return _print(t, _TOP, leaf)


def _print_bag(bag, leaf) -> str:
    match bag:
        case VarBag(vs):
            return "<" + ", ".join(v.name for v in vs) + ">"
        case PVarBag(ps):
            return "<" + ", ".join(_print(p, _TOP, leaf) for p in ps) + ">"
        case ValBag(vals):
            return "<" + ", ".join(_print(v, _TOP, leaf) for v in vals) + ">"
    raise TypeError(f"not a bag: {bag!r}")


def print_int(t) -> str:
    def leaf(t, ctx):
        match t:
            case Closure(wrapped, params, body, bag):
                ws = ", ".join(v.name for v in wrapped)
                ps = ", ".join(v.name for v in params)
                return f"[({ws}); ({ps}). {_print(body, _TOP, leaf)}]{_print_bag(bag, leaf)}"
        raise TypeError(f"not an intermediate term: {t!r}")

    return _print(t, _TOP, leaf)


def print_target(t) -> str:
    def leaf(t, ctx):
        match t:
            case PVar(base, i):
                s = f"pi{i} {base}"
                return s if ctx == _TOP else f"({s})"
            case TClosure(n, m, body, bag):
                return f"[^{{{n},{m}}} {_print(body, _TOP, leaf)}]{_print_bag(bag, leaf)}"
        raise TypeError(f"not a target term: {t!r}")

    return _print(t, _TOP, leaf)
