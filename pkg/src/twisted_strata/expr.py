"""Class expressions: a small precedence-climbing parser and an evaluator.

Grammar (all binary operators left-associative, ``^`` binds tightest)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)*
    atom   := NUMBER | NAME | "(" expr ")"
            | "psi" "(" LABEL ")" | "kappa" "(" INT ")"
            | "pushglue" "(" NAME ("," expr)* ")"
            | "pushforget" "(" expr "," LABEL ")"
            | "restrict" "(" expr ")"

Numbers are exact rationals; a number standing alone is that multiple of the
fundamental class.  Division is only by a number.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .decoration import Decoration
from .graph import AmbientSpace, TwistedGraph, vertex_ambient
from .strata import (AmbientMismatch, TautClass, fundamental_class, kappa_class, make_class, psi_class,
                     restrict_to_unvalued)


class ExprError(ValueError):
    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        if pos is not None and text is not None:
            message = f"{message} at position {pos}\n  {text}\n  {' ' * pos}^"
        super().__init__(message)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_~][A-Za-z0-9_~.]*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class Tok:
    kind: str  # num, name, op, end
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    out, i = [], 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i == len(text):
            out.append(Tok("end", "", i))
            return out
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ExprError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        out.append(Tok(kind, m.group(kind), m.start(kind)))
        i = m.end()


# AST nodes are plain tuples: ("num", Fraction), ("name", str), ("psi", label),
# ("kappa", j), ("neg", x), ("add"|"sub"|"mul"|"div", x, y), ("pow", x, n),
# ("pushglue", name, [args]), ("pushforget", x, label), ("restrict", x)
Node = tuple

_BINARY = {"+": (1, "add"), "-": (1, "sub"), "*": (2, "mul"), "/": (2, "div")}


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def advance(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        if self.tok.text != text or self.tok.kind not in ("op",):
            raise ExprError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}",
                            self.tok.pos, self.text)
        return self.advance()

    def parse(self) -> Node:
        node = self.binary(1)
        if self.tok.kind != "end":
            raise ExprError(f"unexpected {self.tok.text!r}", self.tok.pos, self.text)
        return node

    def binary(self, min_prec: int) -> Node:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in _BINARY and _BINARY[self.tok.text][0] >= min_prec:
            prec, name = _BINARY[self.advance().text]
            right = self.binary(prec + 1)
            left = (name, left, right)
        return left

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return ("neg", self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            t = self.advance()
            if t.kind != "num" or not t.text.isdigit():
                raise ExprError("exponent must be a nonnegative integer", t.pos, self.text)
            node = ("pow", node, int(t.text))
        return node

    def label(self) -> str:
        t = self.advance()
        if t.kind not in ("num", "name"):
            raise ExprError("expected a marking label", t.pos, self.text)
        return t.text

    def atom(self) -> Node:
        t = self.advance()
        if t.kind == "num":
            return ("num", Fraction(t.text))
        if t.kind == "op" and t.text == "(":
            node = self.binary(1)
            self.expect(")")
            return node
        if t.kind != "name":
            raise ExprError(f"unexpected {t.text or 'end of input'!r}", t.pos, self.text)
        fn = t.text
        if fn in ("psi", "kappa", "pushglue", "pushforget", "restrict") and self.tok.text == "(":
            self.advance()
            if fn == "psi":
                node = ("psi", self.label())
            elif fn == "kappa":
                j = self.advance()
                if j.kind != "num" or not j.text.isdigit():
                    raise ExprError("kappa index must be a nonnegative integer", j.pos, self.text)
                node = ("kappa", int(j.text))
            elif fn == "restrict":
                node = ("restrict", self.binary(1))
            elif fn == "pushforget":
                inner = self.binary(1)
                self.expect(",")
                node = ("pushforget", inner, self.label())
            else:
                g = self.advance()
                if g.kind != "name":
                    raise ExprError("pushglue needs a graph name first", g.pos, self.text)
                args = []
                while self.tok.text == ",":
                    self.advance()
                    args.append(self.binary(1))
                node = ("pushglue", g.text, args)
            self.expect(")")
            return node
        return ("name", fn)


def parse(text: str) -> Node:
    return Parser(text).parse()


Value = Union[Fraction, TautClass]


def _as_class(v: Value, ambient: AmbientSpace) -> TautClass:
    return fundamental_class(ambient).scale(v) if isinstance(v, Fraction) else v


class Evaluator:
    def __init__(self, bindings: Mapping[str, object] | None = None, kappa0: str = "formal"):
        self.bindings = dict(bindings or {})
        self.kappa0 = kappa0

    def value(self, node: Node, ambient: AmbientSpace) -> Value:
        kind = node[0]
        if kind == "num":
            return node[1]
        if kind == "name":
            if node[1] not in self.bindings:
                raise ExprError(f"unbound name {node[1]!r}")
            v = self.bindings[node[1]]
            if isinstance(v, TwistedGraph):
                v = (v, Decoration())
            if isinstance(v, tuple):
                v = make_class(v[0], v[1], ambient)
            if v.ambient != ambient:
                raise AmbientMismatch(f"{node[1]!r} lives on {v.ambient}, expected {ambient}")
            return v
        if kind == "psi":
            if node[1] not in ambient.labels:
                raise ExprError(f"psi({node[1]}): no marking {node[1]!r} on {ambient}")
            return psi_class(ambient, node[1])
        if kind == "kappa":
            return kappa_class(ambient, node[1])
        if kind == "neg":
            v = self.value(node[1], ambient)
            return -v
        if kind in ("add", "sub"):
            a, b = self.value(node[1], ambient), self.value(node[2], ambient)
            if isinstance(a, Fraction) and isinstance(b, Fraction):
                return a + b if kind == "add" else a - b
            a, b = _as_class(a, ambient), _as_class(b, ambient)
            return a + b if kind == "add" else a - b
        if kind == "mul":
            a, b = self.value(node[1], ambient), self.value(node[2], ambient)
            if isinstance(a, Fraction) or isinstance(b, Fraction):
                return a * b if isinstance(a, Fraction) and isinstance(b, Fraction) else (
                    b.scale(a) if isinstance(a, Fraction) else a.scale(b))
            from .calculus import product
            return product(a, b)
        if kind == "div":
            a, b = self.value(node[1], ambient), self.value(node[2], ambient)
            if not isinstance(b, Fraction):
                raise ExprError("division is only by a number")
            if b == 0:
                raise ExprError("division by zero")
            return a / b
        if kind == "pow":
            return self.value(node[1], ambient) ** node[2]
        if kind == "restrict":
            return restrict_to_unvalued(_as_class(self.value(node[1], ambient), ambient))
        if kind == "pushforget":
            from .calculus import pushforward_forgetful
            label = node[2]
            if label in ambient.labels:
                raise ExprError(f"pushforget: {label!r} is already a marking of the target {ambient}")
            up = ambient.with_marking(label, 1)
            return pushforward_forgetful(_as_class(self.value(node[1], up), up), label, self.kappa0)
        if kind == "pushglue":
            from .calculus import pushforward_gluing
            g = self.bindings.get(node[1])
            if isinstance(g, tuple):
                g = g[0]
            if not isinstance(g, TwistedGraph):
                raise ExprError(f"pushglue: {node[1]!r} is not bound to a graph")
            if len(node[2]) != g.n_vertices:
                raise ExprError(f"pushglue: graph {node[1]!r} has {g.n_vertices} vertices, "
                                f"got {len(node[2])} classes")
            classes = []
            for v, arg in enumerate(node[2]):
                amb_v = vertex_ambient(g, v)
                classes.append(_as_class(self.value(arg, amb_v), amb_v))
            return pushforward_gluing(g, ambient, classes)
        raise ExprError(f"unknown node {kind!r}")

    def evaluate(self, node: Node, ambient: AmbientSpace) -> TautClass:
        return _as_class(self.value(node, ambient), ambient)


def parse_class_expr(text: str, ambient: AmbientSpace, bindings: Mapping[str, object] | None = None,
                     kappa0: str = "formal") -> TautClass:
    return Evaluator(bindings, kappa0).evaluate(parse(text), ambient)
