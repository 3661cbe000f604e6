"""Strictly positive formulas: syntax, concrete text form, JSON form."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, slots=True)
class Top:
    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Dia:
    label: int
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


Formula = Union[Top, Var, Dia, And]
TOP = Top()


@dataclass(frozen=True, slots=True)
class Sequent:
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return f"{to_text(self.lhs)} |- {to_text(self.rhs)}"


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at offset {pos}")
        self.pos = pos


IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(<\s*-?[0-9.]*\s*>)|([a-zA-Z][a-zA-Z0-9_]*)|([&()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[start]!r}", start)
        start = m.start(m.lastindex)
        if m.group(1):
            inner = m.group(1)[1:-1].strip()
            if not inner.isdigit():
                raise FormulaSyntaxError(f"diamond label must be a natural number, got {inner!r}", start)
            tokens.append(("dia", inner, start))
        elif m.group(2):
            tokens.append(("top" if m.group(2) == "T" else "var", m.group(2), start))
        else:
            tokens.append((m.group(3), m.group(3), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise FormulaSyntaxError(f"expected {kind}, found {what}", tok[2])
        self.i += 1
        return tok

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.take("&")
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "dia":
            self.i += 1
            return Dia(int(value), self.unary())
        if kind == "top":
            self.i += 1
            return TOP
        if kind == "var":
            self.i += 1
            return Var(value)
        if kind == "(":
            self.i += 1
            f = self.conj()
            self.take(")")
            return f
        what = "end of input" if kind == "eof" else repr(value)
        raise FormulaSyntaxError(f"expected a formula, found {what}", pos)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.conj()
    p.take("eof")
    return f


def to_text(f: Formula) -> str:
    """Render with the fewest parentheses that still parse back to ``f``."""
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Dia):
        if isinstance(f.body, And):
            return f"<{f.label}>({to_text(f.body)})"
        return f"<{f.label}> {to_text(f.body)}"
    right = to_text(f.right)
    if isinstance(f.right, And):
        right = f"({right})"
    return f"{to_text(f.left)} & {right}"


def modal_depth(f: Formula) -> int:
    if isinstance(f, Dia):
        return 1 + modal_depth(f.body)
    if isinstance(f, And):
        return max(modal_depth(f.left), modal_depth(f.right))
    return 0


def big_and(fs) -> Formula:
    """Right-nested conjunction ending in T; T for the empty list."""
    out: Formula = TOP
    for f in reversed(list(fs)):
        out = And(f, out)
    return out


def variables(f: Formula) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Dia):
        return variables(f.body)
    if isinstance(f, And):
        return variables(f.left) | variables(f.right)
    return set()


def to_json(f: Formula):
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Var):
        return {"var": f.name}
    if isinstance(f, Dia):
        return {"dia": [f.label, to_json(f.body)]}
    return {"and": [to_json(f.left), to_json(f.right)]}


def from_json(data) -> Formula:
    if data == "T":
        return TOP
    if isinstance(data, dict) and len(data) == 1:
        (key, value), = data.items()
        if key == "var" and isinstance(value, str) and IDENT.fullmatch(value) and value != "T":
            return Var(value)
        if key == "dia" and isinstance(value, list) and len(value) == 2:
            label = value[0]
            if isinstance(label, int) and not isinstance(label, bool) and label >= 0:
                return Dia(label, from_json(value[1]))
        if key == "and" and isinstance(value, list) and len(value) == 2:
            return And(from_json(value[0]), from_json(value[1]))
    raise ValueError(f"not a formula: {data!r}")
