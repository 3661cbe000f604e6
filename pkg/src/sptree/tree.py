"""Modal trees: an atom list plus an ordered list of labelled children.

Trees are immutable tuples, so equality and hashing are structural and
cheap. ``a + b`` is the tree sum (concatenate atoms and children).
"""
from __future__ import annotations

from typing import Iterable, NamedTuple

Position = tuple[int, ...]
EPSILON: Position = ()


class InvalidPosition(ValueError):
    pass


class ModalTree(NamedTuple):
    atoms: tuple[str, ...] = ()
    children: tuple[tuple[int, "ModalTree"], ...] = ()

    def __add__(self, other: "ModalTree") -> "ModalTree":  # type: ignore[override]
        return ModalTree(self.atoms + other.atoms, self.children + other.children)

    def __mul__(self, n):  # tuple repetition makes no sense for trees
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"({a}, {c!r})" for a, c in self.children)
        return f"<[{', '.join(self.atoms)}]; [{inner}]>"


LEAF = ModalTree()


def tree(atoms: Iterable[str] = (), children: Iterable[tuple[int, ModalTree]] = ()) -> ModalTree:
    """Convenience constructor accepting any iterables."""
    return ModalTree(tuple(atoms), tuple((int(a), c) for a, c in children))


def width(t: ModalTree) -> int:
    if not t.children:
        return 1
    return max(len(t.children), max(width(c) for _, c in t.children))


def height(t: ModalTree) -> int:
    if not t.children:
        return 0
    return 1 + max(height(c) for _, c in t.children)


def node_count(t: ModalTree) -> int:
    return 1 + sum(node_count(c) for _, c in t.children)


def tree_sum(a: ModalTree, b: ModalTree) -> ModalTree:
    return a + b


def big_sum(ts: Iterable[ModalTree]) -> ModalTree:
    atoms: list[str] = []
    children: list[tuple[int, ModalTree]] = []
    for t in ts:
        atoms.extend(t.atoms)
        children.extend(t.children)
    return ModalTree(tuple(atoms), tuple(children))


def positions(t: ModalTree) -> list[Position]:
    """All positions in pre-order, which is also lexicographic order."""
    out: list[Position] = [EPSILON]
    for i, (_, c) in enumerate(t.children, 1):
        out.extend((i,) + k for k in positions(c))
    return out


def is_position(t: ModalTree, k: Position) -> bool:
    for i in k:
        if not 1 <= i <= len(t.children):
            return False
        t = t.children[i - 1][1]
    return True


def subtree(t: ModalTree, k: Position) -> ModalTree:
    for depth, i in enumerate(k):
        if not 1 <= i <= len(t.children):
            raise InvalidPosition(f"no node at {format_position(k)} (fails at {format_position(k[:depth + 1])})")
        t = t.children[i - 1][1]
    return t


def replace(t: ModalTree, k: Position, s: ModalTree) -> ModalTree:
    if not k:
        return s
    i = k[0]
    if not 1 <= i <= len(t.children):
        raise InvalidPosition(f"no child {i} at a node with {len(t.children)} children")
    label, child = t.children[i - 1]
    kids = list(t.children)
    kids[i - 1] = (label, replace(child, k[1:], s))
    return ModalTree(t.atoms, tuple(kids))


def format_position(k: Position, empty: str = "e") -> str:
    return ".".join(map(str, k)) if k else empty


def parse_position(text: str) -> Position:
    text = text.strip()
    if text in ("", "e", "ε"):
        return EPSILON
    try:
        k = tuple(int(x) for x in text.split("."))
    except ValueError:
        raise ValueError(f"bad position {text!r}") from None
    if any(i < 1 for i in k):
        raise ValueError(f"position indices are 1-based: {text!r}")
    return k


def to_json(t: ModalTree) -> dict:
    return {"atoms": list(t.atoms), "children": [[a, to_json(c)] for a, c in t.children]}


def from_json(data) -> ModalTree:
    if not isinstance(data, dict) or set(data) - {"atoms", "children"}:
        raise ValueError(f"not a tree: {data!r}")
    atoms = data.get("atoms", [])
    if not isinstance(atoms, list) or not all(isinstance(a, str) and a for a in atoms):
        raise ValueError(f"atoms must be a list of names: {atoms!r}")
    kids = []
    for entry in data.get("children", []):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ValueError(f"child must be [label, tree]: {entry!r}")
        label, child = entry
        if not isinstance(label, int) or isinstance(label, bool) or label < 0:
            raise ValueError(f"labels are natural numbers: {label!r}")
        kids.append((label, from_json(child)))
    return ModalTree(tuple(atoms), tuple(kids))


def position_to_json(k: Position):
    return list(k) if k else ""


def position_from_json(data) -> Position:
    if data == "" or data == []:
        return EPSILON
    if isinstance(data, str):
        return parse_position(data)
    if isinstance(data, list) and all(isinstance(i, int) and i >= 1 for i in data):
        return tuple(data)
    raise ValueError(f"bad position {data!r}")
