"""Recursive-descent parser for series and residue-field expressions.

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | atom ("^" int)?
    atom   := int | var | "(" expr ")" | "O" "(" "t" ("^" int)? ")"
    int    := "-"? digit+

``t`` is the uniformizer; other variables are the p-basis names of the field
(``b`` for r = 1, which also answers to ``b1``; ``b1``, ``b2`` for r = 2).
Integers are reduced mod p.  The degree cap applies to residue-field
subexpressions as written, not to coefficients produced by expanding
series.  ``O(t^k)`` adds an error term, so printed
truncated series parse back to themselves.
"""

from __future__ import annotations

import re

from .errors import DivisionByZero, ExprSyntaxError, UndefinedVariable, ZeroDenominator
from .scalars import ResidueElem, ResidueField, check_degree, default_names
from .series import Series

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*/^()])")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        num, name, sym = m.groups()
        if num:
            tokens.append(("int", num, pos))
        elif name:
            tokens.append(("name", name, pos))
        else:
            tokens.append((sym, sym, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, field, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.field = field
        self.vars = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {kind}, found {what}", tok[2])
        self.i += 1
        return tok

    def integer(self):
        tok = self.peek()
        sign = 1
        if tok[0] == "-":
            self.take()
            sign = -1
        return sign * int(self.take("int")[1])

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                value = _divide(value, rhs, pos)
        return value

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        value = self.atom()
        if self.peek()[0] == "^":
            _, _, pos = self.take()
            n = self.integer()
            if n < 0 and _is_zero(value):
                raise ZeroDenominator(f"negative power of zero at offset {pos}")
            value = value**n
            if isinstance(value, ResidueElem):
                check_degree(value)
        return value

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "int":
            self.take()
            return self.field.const(int(text))
        if kind == "name":
            self.take()
            if text == "O" and self.peek()[0] == "(":
                return self.error_term()
            if text in self.vars:
                return self.vars[text]
            raise UndefinedVariable(f"undefined variable {text!r} at offset {pos}")
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"expected a number, variable or '(', found {what}", pos)

    def error_term(self):
        self.take("(")
        kind, text, pos = self.peek()
        if kind == "int" and text == "1":
            self.take()
            k = 0
        elif kind == "name" and text == "t":
            self.take()
            k = 1
            if self.peek()[0] == "^":
                self.take()
                k = self.integer()
        else:
            raise ExprSyntaxError("O(...) takes t^k", pos)
        self.take(")")
        return Series.zero(self.field, prec=k)


def _is_zero(x):
    if isinstance(x, Series):
        return x.exact_zero
    return not x


def _divide(x, y, pos):
    if _is_zero(y):
        raise ZeroDenominator(f"division by zero at offset {pos}")
    try:
        return x / y
    except DivisionByZero as exc:
        raise ZeroDenominator(f"{exc} at offset {pos}") from None


def parse_expr(text, p=None, r=0, names=None, field=None):
    """Parse ``text`` over l((t)); returns a Series when t occurs, else a ResidueElem."""
    if field is None:
        if p is None:
            raise ValueError("either p or field is required")
        field = ResidueField(p, names if names is not None else default_names(r))
    variables = {n: g for n, g in zip(field.names, field.gens())}
    if field.r == 1 and "b1" not in variables and field.names == ("b",):
        variables["b1"] = variables["b"]
    variables["t"] = Series.gen(field)
    parser = _Parser(text, field, variables)
    value = parser.expr()
    end = parser.peek()
    if end[0] != "end":
        raise ExprSyntaxError(f"unexpected {end[1]!r}", end[2])
    if isinstance(value, ResidueElem):
        check_degree(value)
    return value


def as_series(value, field):
    """Coerce a parsed value to a Series over ``field``."""
    if isinstance(value, Series):
        return value
    return Series.constant(field, value)


def to_text(value):
    """Printed form; parse(to_text(x)) == x."""
    return str(value)
