"""Rewriting systems, derivations, and the translation of sequent proofs.

A system is the base rule set {rho_plus, rho_minus, sigma, pi_plus,
pi_minus} plus any of {four, m, j}. Sequent proofs use the Hilbert-style
presentation: axioms ``id``, ``top``, ``and_left``, ``and_right``, ``4``,
``m``, ``J`` and rules ``cut``, ``and_intro``, ``dist``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import formula as fm
from .embed import to_tree
from .formula import And, Dia, Formula, Top
from .rules import (
    FOUR, J, M, PI_MINUS, PI_PLUS, RHO_MINUS, RHO_PLUS, SIGMA,
    Rule, apply, four, j_rule, lift, m_rule, pi_minus, pi_plus, rho_minus,
    rho_plus, rule_from_json, rule_to_json, sigma, why_not,
)
from .tree import EPSILON, ModalTree, Position, from_json as tree_from_json, to_json as tree_to_json

BASE_KINDS = frozenset({RHO_PLUS, RHO_MINUS, SIGMA, PI_PLUS, PI_MINUS})
EXTENSIONS = (FOUR, M, J)


@dataclass(frozen=True)
class System:
    extensions: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "extensions", frozenset(self.extensions))
        unknown = self.extensions - set(EXTENSIONS)
        if unknown:
            raise ValueError(f"unknown extensions {sorted(unknown)}; choose from four, m, j")

    @property
    def kinds(self) -> frozenset:
        return BASE_KINDS | self.extensions

    def allows(self, kind: str) -> bool:
        return kind in BASE_KINDS or kind in self.extensions

    def __le__(self, other: "System") -> bool:
        return self.extensions <= other.extensions

    def __str__(self) -> str:
        named = {frozenset(): "K+", frozenset({FOUR}): "K4+", frozenset(EXTENSIONS): "RC"}
        if self.extensions in named:
            return named[self.extensions]
        return "K+ + {" + ", ".join(e for e in EXTENSIONS if e in self.extensions) + "}"


KPLUS = System()
K4PLUS = System(frozenset({FOUR}))
RC = System(frozenset(EXTENSIONS))


def system_from_name(name: str) -> System:
    """``k``/``kplus``, ``k4``, ``rc``, or ``k+`` joined with extensions (``k+m+j``)."""
    key = name.strip().lower().replace("⁺", "+")
    presets = {"k": KPLUS, "k+": KPLUS, "kplus": KPLUS, "k4": K4PLUS, "k4+": K4PLUS,
               "k4plus": K4PLUS, "rc": RC}
    if key in presets:
        return presets[key]
    parts = [p for p in key.replace(",", "+").split("+") if p]
    if not parts or parts[0] not in ("k", "kplus"):
        raise ValueError(f"unknown system {name!r}")
    ext = {"4": FOUR, "four": FOUR, "m": M, "j": J}
    try:
        return System(frozenset(ext[p] for p in parts[1:]))
    except KeyError as e:
        raise ValueError(f"unknown extension {e.args[0]!r} in system {name!r}") from None


@dataclass(frozen=True)
class Derivation:
    start: ModalTree
    steps: tuple[Rule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)


class DerivationError(ValueError):
    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


class StepNotApplicable(DerivationError):
    pass


class StepNotInSystem(DerivationError):
    pass


def check(d: Derivation, sys: System = RC, trace: bool = False):
    """Replay ``d`` under ``sys``; return the end tree (and the trace if asked).

    The trace lists every intermediate tree, starting with ``d.start``.
    """
    t = d.start
    seen = [t]
    for n, r in enumerate(d.steps, 1):
        if not sys.allows(r.kind):
            raise StepNotInSystem(n, f"{r} uses {r.kind}, which {sys} does not include")
        problem = why_not(t, r)
        if problem is not None:
            raise StepNotApplicable(n, f"{r} not applicable: {problem}")
        t = apply(t, r)
        if trace:
            seen.append(t)
    return (t, seen) if trace else t


def derivation_to_json(d: Derivation) -> dict:
    return {"start": tree_to_json(d.start), "steps": [rule_to_json(r) for r in d.steps]}


def derivation_from_json(data) -> Derivation:
    if not isinstance(data, dict) or "start" not in data:
        raise ValueError("a derivation needs a start tree")
    return Derivation(tree_from_json(data["start"]), tuple(rule_from_json(r) for r in data.get("steps", [])))


# --- witnesses for sums of trees -------------------------------------------

def permute_atoms_steps(n_left: int, n_right: int, pos: Position = EPSILON) -> list[Rule]:
    """Atoms ``A + B`` to ``B + A`` where ``|A| = n_left``, ``|B| = n_right``."""
    steps = [rho_plus(pos, n_left + n_right) for _ in range(n_right)]
    steps += [rho_minus(pos, n_right + n_left + 1) for _ in range(n_right)]
    return steps


def permutation_sigmas(current: list, target: list, pos: Position = EPSILON) -> list[Rule]:
    """Transpositions (at ``pos``) turning the child order ``current`` into ``target``.

    Both lists hold the same distinct keys. Each slot is filled left to
    right by swapping in the element it needs, so at most ``len - 1`` swaps.
    """
    cur = list(current)
    where = {key: n for n, key in enumerate(cur)}
    steps = []
    for n, key in enumerate(target):
        k = where[key]
        if k != n:
            steps.append(sigma(pos, n + 1, k + 1))
            cur[n], cur[k] = cur[k], cur[n]
            where[cur[n]], where[cur[k]] = n, k
    return steps


def duplicate_steps(t: ModalTree, pos: Position = EPSILON) -> list[Rule]:
    """``t`` to ``t + t`` (item 1, forwards)."""
    k, m = len(t.atoms), len(t.children)
    return [rho_plus(pos, k) for _ in range(k)] + [pi_plus(pos, m) for _ in range(m)]


def contract_steps(t: ModalTree, pos: Position = EPSILON) -> list[Rule]:
    """``t + t`` to ``t`` (item 1, backwards)."""
    return project_left_steps(t, t, pos)


def project_left_steps(a: ModalTree, b: ModalTree, pos: Position = EPSILON) -> list[Rule]:
    """``a + b`` to ``a``."""
    return ([rho_minus(pos, len(a.atoms) + 1) for _ in b.atoms]
            + [pi_minus(pos, len(a.children) + 1) for _ in b.children])


def project_right_steps(a: ModalTree, b: ModalTree, pos: Position = EPSILON) -> list[Rule]:
    """``a + b`` to ``b``."""
    return [rho_minus(pos, 1) for _ in a.atoms] + [pi_minus(pos, 1) for _ in a.children]


def swap_steps(a: ModalTree, b: ModalTree, pos: Position = EPSILON) -> list[Rule]:
    """``a + b`` to ``b + a``."""
    m, n = len(a.children), len(b.children)
    order = list(range(m + n))
    steps = permute_atoms_steps(len(a.atoms), len(b.atoms), pos)
    return steps + permutation_sigmas(order, order[m:] + order[:m], pos)


def pair_steps(t: ModalTree, left: Derivation, right: Derivation, sys: System = RC) -> list[Rule]:
    """From ``t`` to ``s1`` and ``t`` to ``s2``, build ``t`` to ``s1 + s2``.

    A rewrite of the left summand keeps every index it uses, since the right
    summand only appends atoms and children, so ``left.steps`` are reused as is.
    """
    s1, s2 = check(left, sys), check(right, sys)
    return (duplicate_steps(t) + list(left.steps) + swap_steps(s1, t)
            + list(right.steps) + swap_steps(s2, s1))


def sum_steps(a: Derivation, b: Derivation, sys: System = RC) -> list[Rule]:
    """From ``a1`` to ``s1`` and ``a2`` to ``s2``, build ``a1 + a2`` to ``s1 + s2``."""
    s1, s2 = check(a, sys), check(b, sys)
    return (list(a.steps) + swap_steps(s1, b.start)
            + list(b.steps) + swap_steps(s2, s1))


# --- sequent proofs ---------------------------------------------------------

AXIOMS = ("id", "top", "and_left", "and_right", "4", "m", "J")
INFERENCES = {"cut": 2, "and_intro": 2, "dist": 1}
_AXIOM_KIND = {"4": FOUR, "m": M, "J": J}


class MalformedProof(ValueError):
    pass


@dataclass(frozen=True)
class ProofNode:
    rule: str
    lhs: Formula
    rhs: Formula
    premises: tuple["ProofNode", ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    def depth(self) -> int:
        return 1 + max((p.depth() for p in self.premises), default=0)


def validate_proof(p: ProofNode) -> None:
    """Raise MalformedProof unless every node is a correct instance of its rule."""
    for q in p.premises:
        validate_proof(q)
    bad = _node_problem(p)
    if bad:
        raise MalformedProof(f"{p.rule} step concluding {fm.to_text(p.lhs)} |- {fm.to_text(p.rhs)}: {bad}")


def _node_problem(p: ProofNode) -> str | None:
    lhs, rhs, prem = p.lhs, p.rhs, p.premises
    if p.rule in AXIOMS and prem:
        return "axioms take no premises"
    if p.rule in INFERENCES and len(prem) != INFERENCES[p.rule]:
        return f"needs {INFERENCES[p.rule]} premises"
    if p.rule == "id":
        return None if lhs == rhs else "sides differ"
    if p.rule == "top":
        return None if isinstance(rhs, Top) else "right side must be T"
    if p.rule in ("and_left", "and_right"):
        if not isinstance(lhs, And):
            return "left side must be a conjunction"
        part = lhs.left if p.rule == "and_left" else lhs.right
        return None if part == rhs else "right side is not the projected conjunct"
    if p.rule == "4":
        ok = (isinstance(lhs, Dia) and isinstance(lhs.body, Dia) and lhs.body.label == lhs.label
              and rhs == lhs.body)
        return None if ok else "not of the form <a><a>f |- <a>f"
    if p.rule == "m":
        ok = (isinstance(lhs, Dia) and isinstance(rhs, Dia) and lhs.body == rhs.body
              and lhs.label > rhs.label)
        return None if ok else "not of the form <a>f |- <b>f with a > b"
    if p.rule == "J":
        ok = (isinstance(lhs, And) and isinstance(lhs.left, Dia) and isinstance(lhs.right, Dia)
              and lhs.left.label > lhs.right.label
              and rhs == Dia(lhs.left.label, And(lhs.left.body, lhs.right)))
        return None if ok else "not of the form <a>f & <b>g |- <a>(f & <b>g) with a > b"
    if p.rule == "cut":
        a, b = prem
        if a.lhs != lhs or b.rhs != rhs or a.rhs != b.lhs:
            return "premises do not chain into the conclusion"
        return None
    if p.rule == "and_intro":
        a, b = prem
        if not (isinstance(rhs, And) and a.lhs == lhs == b.lhs and a.rhs == rhs.left and b.rhs == rhs.right):
            return "premises do not match the conjunction"
        return None
    if p.rule == "dist":
        (a,) = prem
        ok = (isinstance(lhs, Dia) and isinstance(rhs, Dia) and lhs.label == rhs.label
              and a.lhs == lhs.body and a.rhs == rhs.body)
        return None if ok else "premise does not match the diamonds"
    return f"unknown rule {p.rule!r}"


def _top_steps(lhs: Formula, rhs: Formula) -> list[Rule]:
    t = to_tree(lhs)
    return [pi_minus(EPSILON, 1) for _ in t.children] + [rho_minus(EPSILON, 1) for _ in t.atoms]


def _and_left_steps(lhs: And, rhs: Formula) -> list[Rule]:
    return project_left_steps(to_tree(lhs.left), to_tree(lhs.right))


def _and_right_steps(lhs: And, rhs: Formula) -> list[Rule]:
    return project_right_steps(to_tree(lhs.left), to_tree(lhs.right))


def axiom_derivations(sys: System = RC) -> dict[str, Callable[[Formula, Formula], list[Rule]]]:
    """Rewrite steps from ``to_tree(lhs)`` to ``to_tree(rhs)`` for each axiom of ``sys``."""
    out = {
        "id": lambda lhs, rhs: [],
        "top": _top_steps,
        "and_left": _and_left_steps,
        "and_right": _and_right_steps,
    }
    if sys.allows(FOUR):
        out["4"] = lambda lhs, rhs: [four(EPSILON, 1)]
    if sys.allows(M):
        out["m"] = lambda lhs, rhs: [m_rule(EPSILON, 1, rhs.label)]
    if sys.allows(J):
        out["J"] = lambda lhs, rhs: [j_rule(EPSILON, 1, 2)]
    return out


def translate_sequent_proof(proof: ProofNode, sys: System = RC) -> Derivation:
    """Turn a sequent proof into a derivation from ``to_tree(lhs)`` to ``to_tree(rhs)``."""
    validate_proof(proof)
    return Derivation(to_tree(proof.lhs), tuple(_translate(proof, sys, axiom_derivations(sys))))


def _translate(p: ProofNode, sys: System, axioms) -> list[Rule]:
    if p.rule in AXIOMS:
        if p.rule not in axioms:
            raise MalformedProof(f"axiom ({p.rule}) is not available in {sys}")
        return axioms[p.rule](p.lhs, p.rhs)
    if p.rule == "cut":
        return _translate(p.premises[0], sys, axioms) + _translate(p.premises[1], sys, axioms)
    if p.rule == "dist":
        return [lift(r, (1,)) for r in _translate(p.premises[0], sys, axioms)]
    a, b = p.premises
    start = to_tree(p.lhs)
    left = Derivation(start, tuple(_translate(a, sys, axioms)))
    right = Derivation(start, tuple(_translate(b, sys, axioms)))
    return pair_steps(start, left, right, sys)


def proof_to_json(p: ProofNode) -> dict:
    return {"rule": p.rule, "conclusion": [fm.to_text(p.lhs), fm.to_text(p.rhs)],
            "premises": [proof_to_json(q) for q in p.premises]}


def _formula_from(data) -> Formula:
    return fm.parse(data) if isinstance(data, str) and data != "T" else fm.from_json(data)


def proof_from_json(data) -> ProofNode:
    try:
        lhs, rhs = data["conclusion"]
        return ProofNode(data["rule"], _formula_from(lhs), _formula_from(rhs),
                         tuple(proof_from_json(q) for q in data.get("premises", [])))
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedProof(f"bad proof node: {e}") from None

