"""Tree rewriting calculi for strictly positive modal logics."""
from .formula import And, Dia, Formula, Sequent, Top, Var, big_and, modal_depth, parse, to_text
from .tree import LEAF, ModalTree, big_sum, height, node_count, replace, subtree, tree, width
from .embed import to_formula, to_tree
from .rules import Rule, applicable, apply, enumerate_applicable, parse_rule
from .calculus import K4PLUS, KPLUS, RC, Derivation, System, check, translate_sequent_proof
from .normalize import NormalizationObstruction, NormalShape, is_normal, normalize, theorem_bounds
from .prover import Proved, Refuted, SearchBudget, Unknown, entails_kplus, equiv, models, prove

__all__ = [
    "And", "Dia", "Formula", "Sequent", "Top", "Var", "big_and", "modal_depth", "parse", "to_text",
    "LEAF", "ModalTree", "big_sum", "height", "node_count", "replace", "subtree", "tree", "width",
    "to_formula", "to_tree",
    "Rule", "applicable", "apply", "enumerate_applicable", "parse_rule",
    "K4PLUS", "KPLUS", "RC", "Derivation", "System", "check", "translate_sequent_proof",
    "NormalizationObstruction", "NormalShape", "is_normal", "normalize", "theorem_bounds",
    "Proved", "Refuted", "SearchBudget", "Unknown", "entails_kplus", "equiv", "models", "prove",
]
