"""The eight tree rewriting rules, as explicit rule instances.

A rule instance names a kind, the position ``pos`` of the node it rewrites
and its integer arguments. Indices are 1-based, as are positions.

======== ====== =====================================================
kind      args   effect on the node <atoms; children>
======== ====== =====================================================
rho_plus  i      prepend a copy of atom i
rho_minus i      remove atom i
sigma     i, j   swap children i and j
pi_plus   i      prepend a copy of child i
pi_minus  i      remove child i
four      i      child (b, <[]; [(b, S)]>) becomes (b, S)
m         i, b   child i's label a becomes b, where b < a
j         i, j   child j (label b) is appended under child i (label a > b)
======== ====== =====================================================
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .tree import (
    EPSILON,
    ModalTree,
    Position,
    format_position,
    is_position,
    parse_position,
    position_from_json,
    position_to_json,
    replace,
    subtree,
)

RHO_PLUS, RHO_MINUS, SIGMA = "rho_plus", "rho_minus", "sigma"
PI_PLUS, PI_MINUS, FOUR, M, J = "pi_plus", "pi_minus", "four", "m", "j"

KINDS = (RHO_PLUS, RHO_MINUS, SIGMA, PI_PLUS, PI_MINUS, FOUR, M, J)
KIND_ORDER = {k: n for n, k in enumerate(KINDS)}

ATOMIC, STRUCTURAL, REPLICATIVE, DECREASING, MODAL = (
    "atomic", "structural", "replicative", "decreasing", "modal")
KIND_CLASS = {
    RHO_PLUS: ATOMIC, RHO_MINUS: ATOMIC,
    SIGMA: STRUCTURAL,
    PI_PLUS: REPLICATIVE,
    PI_MINUS: DECREASING, FOUR: DECREASING,
    M: MODAL, J: MODAL,
}
# Block order of a normal sequence.
CLASS_ORDER = (REPLICATIVE, MODAL, DECREASING, ATOMIC, STRUCTURAL)
BLOCK_INDEX = {c: n for n, c in enumerate(CLASS_ORDER)}

_ARG_NAMES = {
    RHO_PLUS: ("i",), RHO_MINUS: ("i",), PI_PLUS: ("i",), PI_MINUS: ("i",), FOUR: ("i",),
    SIGMA: ("i", "j"), J: ("i", "j"), M: ("i", "b"),
}
_TEXT_NAME = {J: "J"}
_ALIASES = {
    "rho+": RHO_PLUS, "rho-": RHO_MINUS, "pi+": PI_PLUS, "pi-": PI_MINUS,
    "4": FOUR, "J": J, "s": SIGMA,
}


class NotApplicable(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Rule:
    kind: str
    pos: Position
    args: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if len(self.args) != len(_ARG_NAMES[self.kind]):
            raise ValueError(f"{self.kind} takes arguments {_ARG_NAMES[self.kind]}, got {self.args}")
        if any(i < 1 for i in self.pos):
            raise ValueError("positions are 1-based")
        if self.args[0] < 1 or (self.kind in (SIGMA, J) and self.args[1] < 1):
            raise ValueError("indices are 1-based")
        if self.kind == M and self.args[1] < 0:
            raise ValueError("labels are natural numbers")
        if self.kind in (SIGMA, J) and self.args[0] == self.args[1]:
            raise ValueError(f"{self.kind} needs two distinct children")

    @property
    def i(self) -> int:
        return self.args[0]

    @property
    def j(self) -> int:
        return self.args[1]

    @property
    def beta(self) -> int:
        return self.args[1]

    @property
    def block(self) -> int:
        return BLOCK_INDEX[KIND_CLASS[self.kind]]

    def sort_key(self):
        return (self.pos, KIND_ORDER[self.kind], self.args)

    def __str__(self) -> str:
        return format_rule(self)

    __repr__ = __str__


def rho_plus(pos, i):
    return Rule(RHO_PLUS, tuple(pos), (i,))


def rho_minus(pos, i):
    return Rule(RHO_MINUS, tuple(pos), (i,))


def sigma(pos, i, j):
    return Rule(SIGMA, tuple(pos), (i, j))


def pi_plus(pos, i):
    return Rule(PI_PLUS, tuple(pos), (i,))


def pi_minus(pos, i):
    return Rule(PI_MINUS, tuple(pos), (i,))


def four(pos, i):
    return Rule(FOUR, tuple(pos), (i,))


def m_rule(pos, i, beta):
    return Rule(M, tuple(pos), (i, beta))


def j_rule(pos, i, j):
    return Rule(J, tuple(pos), (i, j))


def _local_violation(node: ModalTree, r: Rule) -> str | None:
    kind, a = r.kind, r.args
    if kind in (RHO_PLUS, RHO_MINUS):
        if not 1 <= a[0] <= len(node.atoms):
            return f"atom index {a[0]} out of range 1..{len(node.atoms)}"
        return None
    n = len(node.children)
    for idx in a[:2] if kind in (SIGMA, J) else a[:1]:
        if not 1 <= idx <= n:
            return f"child index {idx} out of range 1..{n}"
    if kind == FOUR:
        label, mid = node.children[a[0] - 1]
        if mid.atoms:
            return "4-shape: intermediate node has a non-empty atom list"
        if len(mid.children) != 1:
            return f"4-shape: intermediate node has {len(mid.children)} children, needs exactly 1"
        if mid.children[0][0] != label:
            return f"4-shape: inner label {mid.children[0][0]} differs from outer label {label}"
    elif kind == M:
        label = node.children[a[0] - 1][0]
        if not label > a[1]:
            return f"label ordering: m needs {label} > {a[1]}"
    elif kind == J:
        upper, lower = node.children[a[0] - 1][0], node.children[a[1] - 1][0]
        if not upper > lower:
            return f"label ordering: J needs label {upper} of child {a[0]} > label {lower} of child {a[1]}"
    return None


def why_not(t: ModalTree, r: Rule) -> str | None:
    """The violated side condition, or None when ``r`` applies to ``t``."""
    if not is_position(t, r.pos):
        return f"position {format_position(r.pos)} is not in the tree"
    return _local_violation(subtree(t, r.pos), r)


def applicable(t: ModalTree, r: Rule) -> bool:
    return why_not(t, r) is None


def apply_local(node: ModalTree, r: Rule) -> ModalTree:
    """Apply ``r`` at the root of ``node``, ignoring ``r.pos``. No checks."""
    kind, a = r.kind, r.args
    atoms, kids = node.atoms, node.children
    i = a[0] - 1
    if kind == RHO_PLUS:
        return ModalTree((atoms[i],) + atoms, kids)
    if kind == RHO_MINUS:
        return ModalTree(atoms[:i] + atoms[i + 1:], kids)
    if kind == PI_PLUS:
        return ModalTree(atoms, (kids[i],) + kids)
    if kind == PI_MINUS:
        return ModalTree(atoms, kids[:i] + kids[i + 1:])
    new = list(kids)
    if kind == SIGMA:
        j = a[1] - 1
        new[i], new[j] = new[j], new[i]
    elif kind == FOUR:
        label, mid = kids[i]
        new[i] = (label, mid.children[0][1])
    elif kind == M:
        new[i] = (a[1], kids[i][1])
    else:
        j = a[1] - 1
        label, target = kids[i]
        new[i] = (label, ModalTree(target.atoms, target.children + (kids[j],)))
        del new[j]
    return ModalTree(atoms, tuple(new))


def apply(t: ModalTree, r: Rule) -> ModalTree:
    problem = why_not(t, r)
    if problem is not None:
        raise NotApplicable(f"{r} not applicable: {problem}")
    return replace(t, r.pos, apply_local(subtree(t, r.pos), r))


def apply_all(t: ModalTree, steps: Iterable[Rule]) -> ModalTree:
    for r in steps:
        t = apply(t, r)
    return t


def lift(r: Rule, prefix: Position) -> Rule:
    return Rule(r.kind, tuple(prefix) + r.pos, r.args)


def _local_instances(node: ModalTree, pos: Position, allowed, betas) -> list[Rule]:
    out = []
    n_atoms, kids = len(node.atoms), node.children
    n = len(kids)
    for kind in KINDS:
        if kind not in allowed:
            continue
        if kind in (RHO_PLUS, RHO_MINUS):
            out.extend(Rule(kind, pos, (i,)) for i in range(1, n_atoms + 1))
        elif kind in (PI_PLUS, PI_MINUS):
            out.extend(Rule(kind, pos, (i,)) for i in range(1, n + 1))
        elif kind == SIGMA:
            out.extend(Rule(kind, pos, (i, j)) for i in range(1, n + 1) for j in range(1, n + 1) if i != j)
        elif kind == FOUR:
            for i, (label, mid) in enumerate(kids, 1):
                if not mid.atoms and len(mid.children) == 1 and mid.children[0][0] == label:
                    out.append(Rule(kind, pos, (i,)))
        elif kind == M:
            for i, (label, _) in enumerate(kids, 1):
                candidates = range(label) if betas is None else sorted(b for b in betas if b < label)
                out.extend(Rule(kind, pos, (i, b)) for b in candidates)
        else:
            out.extend(Rule(kind, pos, (i, j))
                       for i in range(1, n + 1) for j in range(1, n + 1)
                       if i != j and kids[i - 1][0] > kids[j - 1][0])
    return out


def enumerate_applicable(t: ModalTree, allowed: Iterable[str] = KINDS, betas=None) -> list[Rule]:
    """Every applicable instance of the allowed kinds, in canonical order.

    ``betas``, when given, restricts the target labels tried for ``m``.
    """
    allowed = frozenset(allowed)
    out: list[Rule] = []

    def walk(node: ModalTree, pos: Position):
        out.extend(_local_instances(node, pos, allowed, betas))
        for i, (_, c) in enumerate(node.children, 1):
            walk(c, pos + (i,))

    walk(t, EPSILON)
    return out


def format_rule(r: Rule) -> str:
    names = _ARG_NAMES[r.kind]
    args = ",".join(f"{n}={v}" for n, v in zip(names, r.args))
    return f"{_TEXT_NAME.get(r.kind, r.kind)}@{format_position(r.pos)}({args})"


_RULE_TEXT = re.compile(r"\s*([A-Za-z_0-9+\-]+)\s*@\s*([0-9.]*|e|ε)\s*\(([^)]*)\)\s*")


def kind_from_name(name: str) -> str:
    if name in _ALIASES:
        return _ALIASES[name]
    if name.lower() in KIND_ORDER:
        return name.lower()
    raise ValueError(f"unknown rule kind {name!r}")


def parse_rule(text: str) -> Rule:
    m = _RULE_TEXT.fullmatch(text)
    if m is None:
        raise ValueError(f"bad rule syntax {text!r}; expected kind@pos(i=..,...)")
    kind = kind_from_name(m.group(1))
    pos = parse_position(m.group(2))
    given = {}
    for part in filter(None, (p.strip() for p in m.group(3).split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"argument {part!r} must look like name=value")
        key = {"beta": "b"}.get(key.strip(), key.strip())
        given[key] = int(value)
    names = _ARG_NAMES[kind]
    if set(given) != set(names):
        raise ValueError(f"{kind} takes arguments {', '.join(names)}")
    return Rule(kind, pos, tuple(given[n] for n in names))


def rule_to_json(r: Rule) -> dict:
    out = {"kind": r.kind, "pos": position_to_json(r.pos)}
    for name, value in zip(_ARG_NAMES[r.kind], r.args):
        out["beta" if name == "b" else name] = value
    return out


def rule_from_json(data) -> Rule:
    if isinstance(data, str):
        return parse_rule(data)
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError(f"not a rule: {data!r}")
    kind = kind_from_name(data["kind"])
    names = ["beta" if n == "b" else n for n in _ARG_NAMES[kind]]
    try:
        args = tuple(int(data[n]) for n in names)
    except KeyError as e:
        raise ValueError(f"{kind} rule is missing argument {e.args[0]!r}") from None
    return Rule(kind, position_from_json(data.get("pos", [])), args)
