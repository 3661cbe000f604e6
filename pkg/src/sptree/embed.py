"""Translations between formulas and modal trees."""
from __future__ import annotations

from .formula import And, Dia, Formula, Top, Var, big_and
from .tree import LEAF, ModalTree


def to_tree(f: Formula) -> ModalTree:
    if isinstance(f, Top):
        return LEAF
    if isinstance(f, Var):
        return ModalTree((f.name,), ())
    if isinstance(f, Dia):
        return ModalTree((), ((f.label, to_tree(f.body)),))
    return to_tree(f.left) + to_tree(f.right)


def to_formula(t: ModalTree) -> Formula:
    """Read a tree back as a formula, without simplifying away any T."""
    atoms = big_and(Var(p) for p in t.atoms)
    diamonds = big_and(Dia(a, to_formula(c)) for a, c in t.children)
    return And(atoms, diamonds)


def roundtrip_tree(t: ModalTree) -> ModalTree:
    return to_tree(to_formula(t))
