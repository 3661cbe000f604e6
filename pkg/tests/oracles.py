"""Independent brute-force oracles used to freeze expected values in tests."""
from __future__ import annotations

import itertools
from collections import deque

from sptree.calculus import System
from sptree.rules import enumerate_applicable, apply
from sptree.tree import ModalTree, node_count

LABELS = (0, 1)


def _closure(seeds, kinds, max_nodes=None, max_steps=None, key=None):
    """Breadth-first closure under ``kinds``; ``key`` may pick one representative per class."""
    key = key or (lambda t: t)
    seen = {key(t): 0 for t in seeds}
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        if max_steps is not None and seen[t] >= max_steps:
            continue
        for r in enumerate_applicable(t, kinds):
            s = key(apply(t, r))
            if s in seen or (max_nodes is not None and node_count(s) > max_nodes):
                continue
            seen[s] = seen[t] + 1
            queue.append(s)
    return set(seen)


def atoms_then_order(src: ModalTree, dst: ModalTree) -> bool:
    """Can atom steps followed by swaps turn ``src`` into ``dst``?

    Atom steps copy and delete atoms, so each node of ``dst`` may use any
    atoms that its matching node of ``src`` has. Swaps reorder children, so
    the children are matched under every permutation.
    """
    if not set(dst.atoms) <= set(src.atoms) or len(src.children) != len(dst.children):
        return False
    for perm in itertools.permutations(src.children):
        if all(a == b and atoms_then_order(c, d) for (a, c), (b, d) in zip(perm, dst.children)):
            return True
    return False


def normal_reachable(start: ModalTree, end: ModalTree, sys: System, max_copies=4, max_nodes=16) -> bool:
    """Breadth-first search over sequences whose kinds come in normal block order.

    Copies are capped at ``max_copies`` steps and ``max_nodes`` nodes; the
    modal and decreasing phases are finite and searched in full.
    """
    trees = _closure([start], {"pi_plus"} & sys.kinds, max_nodes, max_copies)
    trees = _closure(trees, {"m", "j"} & sys.kinds)
    trees = _closure(trees, {"pi_minus", "four"} & sys.kinds)
    return any(atoms_then_order(t, end) for t in trees if node_count(t) == node_count(end))


def shape(t: ModalTree):
    """``t`` with atoms erased and children sorted, the part atom steps and swaps cannot change."""
    return tuple(sorted((a, shape(c)) for a, c in t.children))


def canonical(t: ModalTree) -> ModalTree:
    return ModalTree(t.atoms, tuple(sorted((a, canonical(c)) for a, c in t.children)))


def normal_closure(start: ModalTree, sys: System, max_copies=3, max_nodes=12) -> dict:
    """Trees reachable by copies, then modal steps, then decreasing steps, indexed by shape.

    Every rule commutes with reordering siblings, and the final check allows
    any order, so the search keeps one sorted representative per tree.
    """
    trees = _closure([start], {"pi_plus"} & sys.kinds, max_nodes, max_copies, canonical)
    trees = _closure(trees, {"m", "j"} & sys.kinds, key=canonical)
    trees = _closure(trees, {"pi_minus", "four"} & sys.kinds, key=canonical)
    out: dict = {}
    for t in trees:
        out.setdefault(shape(t), []).append(t)
    return out


def reachable_in_closure(closure: dict, end: ModalTree) -> bool:
    return any(atoms_then_order(t, end) for t in closure.get(shape(end), ()))


def small_trees(max_nodes: int, max_atoms: int, variables=("p",), labels=LABELS) -> list[ModalTree]:
    """Every tree with children in sorted order, up to the node and atom-occurrence limits."""

    def atom_lists(k):
        for n in range(k + 1):
            yield from itertools.product(variables, repeat=n)

    def forests(nodes, atoms):
        # sorted lists of (label, tree) using exactly ``nodes`` nodes and at most ``atoms`` atoms
        if nodes == 0:
            yield ()
            return
        for n in range(1, nodes + 1):
            for a in labels:
                for c in build(n, atoms):
                    used = _atom_count(c)
                    for rest in forests(nodes - n, atoms - used):
                        kids = ((a, c),) + rest
                        if list(kids) == sorted(kids):
                            yield kids

    def build(nodes, atoms):
        for here in atom_lists(atoms):
            for kids in forests(nodes - 1, atoms - len(here)):
                yield ModalTree(tuple(here), kids)

    return sorted({t for n in range(1, max_nodes + 1) for t in build(n, max_atoms)})


def _atom_count(t: ModalTree) -> int:
    return len(t.atoms) + sum(_atom_count(c) for _, c in t.children)


def derivations_upto(start: ModalTree, sys: System, max_steps: int):
    """Every sequence of at most ``max_steps`` applicable steps, with its end tree."""
    out = [((), start)]
    frontier = [((), start)]
    for _ in range(max_steps):
        nxt = []
        for steps, t in frontier:
            for r in enumerate_applicable(t, sys.kinds):
                nxt.append((steps + (r,), apply(t, r)))
        out += nxt
        frontier = nxt
    return out


def _labels_at_least(t: ModalTree, k: int) -> int:
    return sum((a >= k) + _labels_at_least(c, k) for a, c in t.children)


class OracleGaveUp(Exception):
    pass


class NormalPathSearch:
    """Is there a normal-order sequence from ``start`` to ``end``?

    Copies are tried first, fewest copies first; the modal and decreasing
    phases are then searched exhaustively, sharing dead ends between
    copy states. Nothing here uses the normalizer.
    """

    def __init__(self, start: ModalTree, sys: System, max_copies=4, max_nodes=16, max_states=None):
        self.sys, self.max_states = sys, max_states
        copies = {canonical(start): 0}
        queue = deque(copies)
        while queue:
            t = queue.popleft()
            if copies[t] >= max_copies:
                continue
            for r in enumerate_applicable(t, {"pi_plus"} & sys.kinds):
                s = canonical(apply(t, r))
                if s not in copies and node_count(s) <= max_nodes:
                    copies[s] = copies[t] + 1
                    queue.append(s)
        self.copies = sorted(copies, key=lambda t: (copies[t], node_count(t)))

    def reaches(self, end: ModalTree) -> bool:
        self.end, self.end_shape, self.end_nodes = end, shape(end), node_count(end)
        self.end_marks = [_labels_at_least(end, k) for k in range(1, 1 + max(LABELS))]
        self.dead: set = set()
        self.states = 0
        for t in self.copies:
            if node_count(t) >= self.end_nodes and self._modal(t):
                return True
        return False

    def _count(self):
        self.states += 1
        if self.max_states is not None and self.states > self.max_states:
            raise OracleGaveUp

    def _room(self, t):
        return all(_labels_at_least(t, k + 1) >= need for k, need in enumerate(self.end_marks))

    def _modal(self, t) -> bool:
        stack, seen = [t], {t}
        while stack:
            u = stack.pop()
            self._count()
            if ("d", u) not in self.dead and self._decreasing(u):
                return True
            for r in enumerate_applicable(u, {"m", "j"} & self.sys.kinds):
                s = canonical(apply(u, r))
                if s not in seen and ("m", s) not in self.dead and self._room(s):
                    seen.add(s)
                    stack.append(s)
        self.dead |= {("m", s) for s in seen}
        return False

    def _decreasing(self, t) -> bool:
        stack, seen = [t], {t}
        while stack:
            u = stack.pop()
            self._count()
            if shape(u) == self.end_shape and atoms_then_order(u, self.end):
                return True
            for r in enumerate_applicable(u, {"pi_minus", "four"} & self.sys.kinds):
                s = canonical(apply(u, r))
                if s not in seen and ("d", s) not in self.dead and node_count(s) >= self.end_nodes and self._room(s):
                    seen.add(s)
                    stack.append(s)
        self.dead |= {("d", s) for s in seen}
        return False
