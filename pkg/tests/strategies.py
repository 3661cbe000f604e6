from hypothesis import strategies as st

from sptree.formula import TOP, And, Dia, Var
from sptree.rules import enumerate_applicable
from sptree.tree import ModalTree, positions

atoms = st.lists(st.sampled_from("pqr"), max_size=3).map(tuple)
labels = st.integers(0, 2)


def trees(max_leaves=10, max_children=3):
    leaf = st.builds(ModalTree, atoms, st.just(()))
    return st.recursive(
        leaf,
        lambda kids: st.builds(ModalTree, atoms,
                               st.lists(st.tuples(labels, kids), max_size=max_children).map(tuple)),
        max_leaves=max_leaves,
    )


def formulas(max_leaves=8):
    base = st.sampled_from([TOP, Var("p"), Var("q"), Var("r")])
    return st.recursive(
        base,
        lambda f: st.one_of(st.builds(Dia, labels, f), st.builds(And, f, f)),
        max_leaves=max_leaves,
    )


@st.composite
def tree_and_position(draw, max_leaves=10):
    t = draw(trees(max_leaves))
    return t, draw(st.sampled_from(positions(t)))


@st.composite
def tree_and_rule(draw, kinds=None, max_leaves=10):
    t = draw(trees(max_leaves))
    options = enumerate_applicable(t, kinds) if kinds is not None else enumerate_applicable(t)
    if not options:
        t = ModalTree(("p",), ((1, ModalTree()), (0, ModalTree())))
        options = enumerate_applicable(t, kinds) if kinds is not None else enumerate_applicable(t)
    return t, draw(st.sampled_from(options))
