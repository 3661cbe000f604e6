"""Budgeted proof search, and the tree-model decision procedure for K+.

``prove`` looks for a derivation from ``to_tree(phi)`` to ``to_tree(psi)``
whose steps come in normal block order. The replicative, modal and
decreasing blocks are found by iterative-deepening search. The atomic and
structural blocks are then built directly: they can only edit atom lists
and reorder children, so it is enough to match the reached tree against
the goal node by node.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .calculus import KPLUS, RC, Derivation, System, check
from .embed import to_tree
from .formula import And, Dia, Formula, Top, Var
from .rules import (
    FOUR, J, M, PI_MINUS, PI_PLUS, Rule, apply, enumerate_applicable,
)
from .normalize import finish
from .tree import ModalTree, node_count


def models(t: ModalTree, f: Formula) -> bool:
    """Does the root of ``t``, read as a Kripke model, satisfy ``f``?"""
    if isinstance(f, Top):
        return True
    if isinstance(f, Var):
        return f.name in t.atoms
    if isinstance(f, And):
        return models(t, f.left) and models(t, f.right)
    return any(a == f.label and models(c, f.body) for a, c in t.children)


def entails_kplus(phi: Formula, psi: Formula) -> bool:
    return models(to_tree(phi), psi)


@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 12
    max_nodes: int = 32
    max_states: int = 200_000

    def __post_init__(self):
        for name in ("max_steps", "max_nodes", "max_states"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class Proved:
    derivation: Derivation
    verdict = "proved"


@dataclass(frozen=True)
class Refuted:
    reason: str
    verdict = "refuted"


@dataclass(frozen=True)
class Unknown:
    diagnostics: dict = field(default_factory=dict)
    verdict = "unknown"


ProofResult = Proved | Refuted | Unknown


# --- search -------------------------------------------------------------------

_PHASES = (frozenset({PI_PLUS}), frozenset({M, J}), frozenset({PI_MINUS, FOUR}))


class _OutOfStates(Exception):
    pass


class _Search:
    def __init__(self, start: ModalTree, goal: ModalTree, sys: System, budget: SearchBudget):
        self.start, self.goal, self.sys, self.budget = start, goal, sys, budget
        self.goal_nodes = node_count(goal)
        self.betas = sorted(_labels(goal) | {0})
        self.states = 0
        self.phases = [kinds & sys.kinds for kinds in _PHASES]

    def run(self):
        for limit in range(self.budget.max_steps + 1):
            self.seen: dict = {}
            found = self.dfs(self.start, 0, [], limit)
            if found is not None:
                return found, limit
        return None, self.budget.max_steps

    def dfs(self, t: ModalTree, phase: int, path: list[Rule], limit: int):
        self.states += 1
        if self.states > self.budget.max_states:
            raise _OutOfStates
        left = limit - len(path)
        if left == 0:
            # only finish at the exact depth, so each iteration adds new work
            tail = finish(t, self.goal)
            if tail is not None and len(path) + len(tail) <= self.budget.max_steps:
                return path + tail
            return None
        key = (t, phase)
        if self.seen.get(key, -1) >= left:
            return None
        self.seen[key] = left
        for p in range(phase, len(self.phases)):
            if p > 0 and node_count(t) < self.goal_nodes:
                break  # no later phase adds nodes
            kinds = self.phases[p]
            if not kinds:
                continue
            for r in enumerate_applicable(t, kinds, self.betas):
                s = apply(t, r)
                if node_count(s) > self.budget.max_nodes:
                    continue
                found = self.dfs(s, p, path + [r], limit)
                if found is not None:
                    return found
        return None


def _labels(t: ModalTree) -> set[int]:
    out = set()
    for a, c in t.children:
        out.add(a)
        out |= _labels(c)
    return out


def prove(phi: Formula, psi: Formula, sys: System = RC, budget: SearchBudget = DEFAULT_BUDGET) -> ProofResult:
    start, goal = to_tree(phi), to_tree(psi)
    if sys == KPLUS and not models(start, psi):
        return Refuted(f"the tree model of the left side does not satisfy the right side")
    search = _Search(start, goal, sys, budget)
    try:
        steps, depth = search.run()
    except _OutOfStates:
        return Unknown({"reason": "max_states exhausted", "states": search.states})
    if steps is None:
        return Unknown({"reason": "max_steps exhausted", "states": search.states, "depth": depth})
    d = Derivation(start, tuple(steps))
    if check(d, sys) != goal:
        raise AssertionError("search produced a derivation that misses the goal")
    return Proved(d)


@dataclass(frozen=True)
class Equivalence:
    verdict: str  # "equivalent", "not-equivalent" or "unknown"
    forward: ProofResult
    backward: ProofResult


def equiv(phi: Formula, psi: Formula, sys: System = RC, budget: SearchBudget = DEFAULT_BUDGET) -> Equivalence:
    forward = prove(phi, psi, sys, budget)
    backward = prove(psi, phi, sys, budget)
    if isinstance(forward, Proved) and isinstance(backward, Proved):
        verdict = "equivalent"
    elif isinstance(forward, Refuted) or isinstance(backward, Refuted):
        verdict = "not-equivalent"
    else:
        verdict = "unknown"
    return Equivalence(verdict, forward, backward)
