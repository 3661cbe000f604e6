"""Reordering derivations into normal form.

A derivation is normal when its steps come in five blocks: replicative
(pi_plus), modal (m, j), decreasing (pi_minus, four), atomic (rho_plus,
rho_minus), structural (sigma). ``normalize`` inserts the steps of a
derivation one at a time into a normal prefix, moving each new step left
past the blocks it must precede. Every local exchange of two adjacent steps
is computed on a *marked* tree, where each node carries a unique ``uid``, so
a rule can be re-aimed at the same nodes after the tree around them has
changed. Each exchange is replayed and compared before it is accepted.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from collections import deque
from typing import Iterable, Iterator, NamedTuple, Optional

from .calculus import RC, Derivation, System, check, permutation_sigmas
from .rules import (
    BLOCK_INDEX, CLASS_ORDER, FOUR, J, KIND_CLASS, M, MODAL, PI_MINUS, PI_PLUS,
    REPLICATIVE, RHO_MINUS, RHO_PLUS, SIGMA, STRUCTURAL, ATOMIC, DECREASING,
    NotApplicable, Rule, apply, apply_all, enumerate_applicable, four, j_rule, m_rule, pi_plus,
    rho_minus, rho_plus, rule_to_json, why_not,
)
from .tree import EPSILON, ModalTree, Position, height, node_count, subtree, width


class NormalizationError(RuntimeError):
    """An exchange of steps failed its replay check (a bug, not bad input)."""


class NormalizationObstruction(NormalizationError):
    """The derivation cannot be brought into normal form.

    This happens when atom eliminations empty a node that a later ``four``
    step then removes: ``four`` needs the empty atom list, and every atom
    step must come after every ``four`` step in a normal sequence.
    """


# --- marked trees -------------------------------------------------------------

class MNode(NamedTuple):
    uid: int
    token: int
    atoms: tuple[str, ...]
    children: tuple[tuple[int, "MNode"], ...]


def mark(t: ModalTree, fresh: Iterator[int] | None = None) -> MNode:
    """Give every node a fresh uid; the token starts equal to the uid."""
    fresh = fresh if fresh is not None else itertools.count()

    def go(node: ModalTree) -> MNode:
        uid = next(fresh)
        return MNode(uid, uid, node.atoms, tuple((a, go(c)) for a, c in node.children))

    return go(t)


def erase(m: MNode) -> ModalTree:
    return ModalTree(m.atoms, tuple((a, erase(c)) for a, c in m.children))


def _copy(m: MNode, fresh, reuse: dict | None, out: dict) -> MNode:
    uid = reuse[m.uid] if reuse and m.uid in reuse else next(fresh)
    out[m.uid] = uid
    return MNode(uid, m.token, m.atoms, tuple((a, _copy(c, fresh, reuse, out)) for a, c in m.children))


def _msub(m: MNode, k: Position) -> MNode:
    for i in k:
        m = m.children[i - 1][1]
    return m


def _mreplace(m: MNode, k: Position, s: MNode) -> MNode:
    if not k:
        return s
    kids = list(m.children)
    label, child = kids[k[0] - 1]
    kids[k[0] - 1] = (label, _mreplace(child, k[1:], s))
    return m._replace(children=tuple(kids))


def mapply(m: MNode, r: Rule, fresh: Iterator[int], reuse: dict | None = None) -> tuple[MNode, dict]:
    """Apply ``r`` to a marked tree.

    Tokens travel with their nodes, and a pi_plus copy keeps the tokens of
    the nodes it copies. Copies get fresh uids unless ``reuse`` maps the
    original uid to the one to use. Returns the new tree and the copy map
    (original uid to copy uid, empty unless ``r`` is pi_plus).
    """
    problem = why_not(erase(m), r)
    if problem is not None:
        raise NotApplicable(f"{r} not applicable: {problem}")
    node = _msub(m, r.pos)
    kind, a = r.kind, r.args
    atoms, kids = node.atoms, list(node.children)
    i = a[0] - 1
    copied: dict = {}
    if kind == RHO_PLUS:
        atoms = (atoms[i],) + atoms
    elif kind == RHO_MINUS:
        atoms = atoms[:i] + atoms[i + 1:]
    elif kind == PI_PLUS:
        label, child = kids[i]
        kids.insert(0, (label, _copy(child, fresh, reuse, copied)))
    elif kind == PI_MINUS:
        del kids[i]
    elif kind == SIGMA:
        kids[i], kids[a[1] - 1] = kids[a[1] - 1], kids[i]
    elif kind == FOUR:
        label, mid = kids[i]
        kids[i] = (label, mid.children[0][1])
    elif kind == M:
        kids[i] = (a[1], kids[i][1])
    else:
        label, target = kids[i]
        kids[i] = (label, target._replace(children=target.children + (kids[a[1] - 1],)))
        del kids[a[1] - 1]
    new = node._replace(atoms=atoms, children=tuple(kids))
    return _mreplace(m, r.pos, new), copied


def mapply_all(m: MNode, steps: Iterable[Rule], fresh) -> MNode:
    for r in steps:
        m, _ = mapply(m, r, fresh)
    return m


class _Where(NamedTuple):
    pos: Position
    parent: int | None
    index: int  # 1-based index among the parent's children


def _locate(m: MNode) -> dict[int, _Where]:
    out = {m.uid: _Where(EPSILON, None, 0)}
    stack = [(m, EPSILON)]
    while stack:
        node, pos = stack.pop()
        for i, (_, c) in enumerate(node.children, 1):
            out[c.uid] = _Where(pos + (i,), node.uid, i)
            stack.append((c, pos + (i,)))
    return out


def _uids(m: MNode) -> set[int]:
    out = {m.uid}
    for _, c in m.children:
        out |= _uids(c)
    return out


# A rule aimed at nodes rather than positions: (kind, node uids..., extra args).
# For rho the uid is the node whose atoms change; for every other kind the
# uids are the affected children, and the rule is applied at their parent.

def _aim(r: Rule, m: MNode) -> tuple:
    node = _msub(m, r.pos)
    if r.kind in (RHO_PLUS, RHO_MINUS):
        return (r.kind, (node.uid,), r.args)
    child = node.children[r.i - 1][1].uid
    if r.kind in (SIGMA, J):
        return (r.kind, (child, node.children[r.j - 1][1].uid), ())
    if r.kind == M:
        return (r.kind, (child,), (r.beta,))
    return (r.kind, (child,), ())


def _rename(aim: tuple, mapping: dict) -> tuple:
    kind, uids, extra = aim
    return (kind, tuple(mapping.get(u, u) for u in uids), extra)


def _shoot(aim: tuple, m: MNode) -> Rule | None:
    """Turn an aimed rule back into a positional one, or None if its nodes are gone."""
    kind, uids, extra = aim
    where = _locate(m)
    if any(u not in where for u in uids):
        return None
    if kind in (RHO_PLUS, RHO_MINUS):
        return Rule(kind, where[uids[0]].pos, extra)
    first = where[uids[0]]
    pos = first.pos[:-1]
    if kind in (SIGMA, J):
        second = where[uids[1]]
        if second.parent != first.parent:
            raise NormalizationError(f"{kind} targets are no longer siblings")
        return Rule(kind, pos, (first.index, second.index))
    return Rule(kind, pos, (first.index,) + extra)


def _anchor(aim: tuple, m: MNode) -> int:
    """The node whose own lists the rule edits."""
    kind, uids, _ = aim
    return uids[0] if kind in (RHO_PLUS, RHO_MINUS) else _locate(m)[uids[0]].parent


def sigma_repair(current: MNode, target: MNode) -> list[Rule]:
    """Swaps turning ``current`` into ``target``, which differ only in child order.

    Nodes are matched by uid. Deeper nodes are sorted first, so each
    swap's position is still valid when it is applied, and the total is at
    most one less than the number of nodes.
    """
    goal = {}
    stack = [target]
    while stack:
        node = stack.pop()
        goal[node.uid] = node
        stack.extend(c for _, c in node.children)
    by_depth: dict[int, list] = {}
    stack = [(current, EPSILON)]
    while stack:
        node, pos = stack.pop()
        want = goal.get(node.uid)
        if want is None or want.atoms != node.atoms or sorted(
                (a, c.uid) for a, c in want.children) != sorted((a, c.uid) for a, c in node.children):
            raise NormalizationError("trees differ by more than the order of children")
        by_depth.setdefault(len(pos), []).append((pos, node))
        stack.extend((c, pos + (i,)) for i, (_, c) in enumerate(node.children, 1))
    steps = []
    for depth in sorted(by_depth, reverse=True):
        for pos, node in sorted(by_depth[depth], key=lambda e: e[0]):
            steps += permutation_sigmas([c.uid for _, c in node.children],
                                        [c.uid for _, c in goal[node.uid].children], pos)
    return steps


def compress_structural(t: ModalTree, sigmas: list[Rule]) -> list[Rule]:
    """An equivalent structural block of at most ``node_count(t) - 1`` swaps."""
    fresh = itertools.count()
    start = mark(t, fresh)
    return sigma_repair(start, mapply_all(start, sigmas, fresh))


# --- finishing with atom steps and swaps -------------------------------------

def _match(src: ModalTree, dst: ModalTree) -> Optional[list]:
    """For each child of ``dst``, the index of the matching child of ``src``.

    Returns a nested matching ``[(src_index, submatch), ...]`` or None.
    Nodes match when their labels agree, the atoms of ``dst`` all occur in
    ``src``, and their children match in some order.
    """
    if len(src.children) != len(dst.children) or not set(dst.atoms) <= set(src.atoms):
        return None
    used = [False] * len(src.children)
    out: list = []

    def place(k: int) -> bool:
        if k == len(dst.children):
            return True
        label, target = dst.children[k]
        for i, (a, c) in enumerate(src.children):
            if used[i] or a != label:
                continue
            sub = _match(c, target)
            if sub is None:
                continue
            used[i] = True
            out.append((i, sub))
            if place(k + 1):
                return True
            used[i] = False
            out.pop()
        return False

    return out if place(0) else None


def _atom_steps(have: tuple, want: tuple, pos: Position) -> list[Rule]:
    if have == want:
        return []
    # delete only, when ``want`` is a subsequence of ``have``
    keep, k = [], 0
    for n, a in enumerate(have):
        if k < len(want) and a == want[k]:
            keep.append(n)
            k += 1
    if k == len(want):
        drop = [n for n in range(len(have)) if n not in keep]
        return [rho_minus(pos, n + 1 - done) for done, n in enumerate(drop)]
    steps, cur = [], list(have)
    for a in reversed(want):
        steps.append(rho_plus(pos, cur.index(a) + 1))
        cur.insert(0, a)
    return steps + [rho_minus(pos, len(want) + 1) for _ in have]


def finish(src: ModalTree, dst: ModalTree) -> Optional[list[Rule]]:
    """Atom steps then swaps turning ``src`` into ``dst``, or None if impossible."""
    matching = _match(src, dst)
    if matching is None:
        return None
    atoms: list[Rule] = []
    orders: dict[Position, list] = {}

    def walk(s: ModalTree, d: ModalTree, match, pos: Position):
        atoms.extend(_atom_steps(s.atoms, d.atoms, pos))
        orders[pos] = [i for i, _ in match]
        for k, (i, sub) in enumerate(match):
            walk(s.children[i][1], d.children[k][1], sub, pos + (i + 1,))

    walk(src, dst, matching, EPSILON)
    swaps: list[Rule] = []
    for pos in sorted(orders, key=lambda p: (-len(p), p)):
        swaps += permutation_sigmas(list(range(len(orders[pos]))), orders[pos], pos)
    return atoms + swaps


# --- exchanging two adjacent steps -------------------------------------------

def _verify(t: ModalTree, before: list[Rule], after: list[Rule], what: str) -> None:
    try:
        ok = apply_all(t, before) == apply_all(t, after)
    except NotApplicable as e:
        raise NormalizationError(f"{what}: rebuilt steps do not replay ({e})") from None
    if not ok:
        raise NormalizationError(f"{what}: rebuilt steps reach a different tree")


def _past_sigma(t: ModalTree, s: Rule, y: Rule):
    """sigma then y (not pi_plus)  ==>  y', then swaps."""
    fresh = itertools.count()
    m0 = mark(t, fresh)
    m1, _ = mapply(m0, s, fresh)
    m2, _ = mapply(m1, y, fresh)
    y2 = _shoot(_aim(y, m1), m0)
    m3, _ = mapply(m0, y2, fresh)
    return [y2], sigma_repair(m3, m2), []


def _past_with_copy(t: ModalTree, x: Rule, p: Rule):
    """x (not pi_plus, not j) then pi_plus  ==>  pi_plus', then x once or twice."""
    fresh = itertools.count()
    m0 = mark(t, fresh)
    m1, _ = mapply(m0, x, fresh)
    m2, copy_map = mapply(m1, p, fresh)
    dup = _msub(m1, p.pos).children[p.i - 1][1].uid
    where = _locate(m0)
    host = _msub(m1, p.pos).uid
    if where[dup].parent != host:
        # x was a four step that lifted ``dup`` out of the node it removed
        dup = where[dup].parent
    p2 = pi_plus(where[host].pos, where[dup].index)
    m3, copy_map = mapply(m0, p2, fresh, reuse=copy_map)
    aim = _aim(x, m0)
    inside = _uids(_msub(m0, where[dup].pos))
    twice = _anchor(aim, m0) in inside or (x.kind in (M, FOUR) and aim[1][0] == dup)
    xs = []
    if twice:
        x_copy = _shoot(_rename(aim, copy_map), m3)
        m3, _ = mapply(m3, x_copy, fresh)
        xs.append(x_copy)
    x2 = _shoot(aim, m3)
    xs.append(x2)
    return [p2], xs, []


def _past_atomic(t: ModalTree, rho: Rule, y: Rule):
    """rho then y (pi_minus, four, m or j)  ==>  y, then rho or nothing."""
    problem = why_not(t, y)
    if problem is not None and y.kind == FOUR:
        detour = _detour(t, apply(apply(t, rho), y))
        if detour is not None:
            return detour
    if problem is not None:
        raise NormalizationObstruction(
            f"{y} only becomes applicable after {rho} ({problem}), and atom steps must follow it")
    fresh = itertools.count()
    m0 = mark(t, fresh)
    m1, _ = mapply(m0, y, fresh)
    rho2 = _shoot(_aim(rho, m0), m1)
    return [y], [rho2] if rho2 is not None else [], []


def _detour(t: ModalTree, target: ModalTree, max_states: int = 5000):
    """Decreasing steps, then atom steps, then swaps from ``t`` to ``target``.

    Used when an atom step empties the node that a ``four`` step removes:
    the same tree may still be reachable by pruning instead. Breadth-first,
    so the decreasing part is as short as possible.
    """
    floor = node_count(target)
    paths = {t: []}
    queue = deque([t])
    while queue and len(paths) <= max_states:
        s = queue.popleft()
        tail = finish(s, target)
        if tail is not None:
            split = next((n for n, r in enumerate(tail) if r.kind == SIGMA), len(tail))
            return paths[s], tail[:split], tail[split:]
        for r in enumerate_applicable(s, (PI_MINUS, FOUR)):
            nxt = apply(s, r)
            if nxt not in paths and node_count(nxt) >= floor:
                paths[nxt] = paths[s] + [r]
                queue.append(nxt)
    return None


def _past_decreasing(t: ModalTree, d: Rule, y: Rule):
    """pi_minus/four then m/j  ==>  one or two of y, then the decreasing step."""
    fresh = itertools.count()
    m0 = mark(t, fresh)
    d_aim = _aim(d, m0)
    m1, _ = mapply(m0, d, fresh)
    y_aim = _aim(y, m1)
    aims = [y_aim]
    if d.kind == FOUR:
        mid = d_aim[1][0]
        lifted = _msub(m0, _locate(m0)[mid].pos).children[0][1].uid
        kind, uids, extra = y_aim
        if kind == M and uids[0] == lifted:
            aims = [(M, (mid,), extra), (M, (lifted,), extra)]
        elif kind == J and uids[0] == lifted:
            aims = [(J, (mid, uids[1]), ()), (J, (lifted, uids[1]), ())]
        elif kind == J and uids[1] == lifted:
            aims = [(J, (uids[0], mid), ())]
    ys = []
    m = m0
    for aim in aims:
        r = _shoot(aim, m)
        m, _ = mapply(m, r, fresh)
        ys.append(r)
    return ys, [_shoot(d_aim, m)], []


def _j_past_copy(t: ModalTree, jr: Rule, p: Rule):
    """j then pi_plus  ==>  pi_plus steps, j steps, swaps.

    The copy is made before the j step. If it duplicates a node flagged by
    the j step (the child that receives, the child that moves, or the node
    where j acts), the j step is repeated in the copy as well.
    """
    fresh = itertools.count()
    m0 = mark(t, fresh)
    upper, lower = _aim(jr, m0)[1]
    host_j = _locate(m0)[upper].parent
    m1, _ = mapply(m0, jr, fresh)
    m2, copy_map = mapply(m1, p, fresh)
    host = _msub(m1, p.pos).uid
    dup = _msub(m1, p.pos).children[p.i - 1][1].uid
    in_dup = _uids(_msub(m1, _locate(m1)[dup].pos))
    if host == host_j and dup == upper:
        copies = [lower, upper]
        js = [(J, (copy_map[upper], copy_map[lower]), ()), (J, (upper, lower), ())]
    elif host == upper and dup == lower:
        copies = [lower]
        js = [(J, (upper, copy_map[lower]), ()), (J, (upper, lower), ())]
    elif host_j in in_dup:
        copies = [dup]
        js = [(J, (copy_map[upper], copy_map[lower]), ()), (J, (upper, lower), ())]
    else:
        copies = [dup]
        js = [(J, (upper, lower), ())]
    pis, m = [], m0
    for uid in copies:
        where = _locate(m)[uid]
        r = pi_plus(where.pos[:-1], where.index)
        m, _ = mapply(m, r, fresh, reuse=copy_map)
        pis.append(r)
    j_steps = []
    for aim in js:
        r = _shoot(aim, m)
        m, _ = mapply(m, r, fresh)
        j_steps.append(r)
    if len(js) == 2:
        # each new j step carries a strict subset of the flags of the old one
        flagged = {upper, lower, copy_map.get(upper), copy_map.get(lower)} - {None}
        for _, uids, _ in js:
            if not set(uids) < flagged:
                raise NormalizationError("j split does not shrink its flags")
    return pis, j_steps, sigma_repair(m, m2)


def exchange(t: ModalTree, x: Rule, y: Rule):
    """Rewrite ``x`` then ``y`` (``y`` belongs in an earlier block) as ``ys, xs, sigmas``.

    ``ys`` share ``y``'s block and ``xs`` share ``x``'s block; ``sigmas``
    is non-empty only when a j step is moved past a pi_plus step.
    """
    if x.block <= y.block:
        raise ValueError(f"{x} does not need to move past {y}")
    if y.kind == PI_PLUS:
        out = _j_past_copy(t, x, y) if x.kind == J else _past_with_copy(t, x, y)
    elif x.kind == SIGMA:
        out = _past_sigma(t, x, y)
    elif KIND_CLASS[x.kind] == ATOMIC:
        out = _past_atomic(t, x, y)
    else:
        out = _past_decreasing(t, x, y)
    _verify(t, [x, y], [s for part in out for s in part], f"moving {y} before {x}")
    return out


def push(t: ModalTree, xs: list[Rule], y: Rule):
    """Move ``y`` to the front of ``xs``: ``t, xs, y  ==>  ys, xs', sigmas``.

    Every step of ``xs`` must belong to a later block than ``y``. The steps
    of ``xs'`` keep the blocks of ``xs``; ``sigmas`` collects the swaps that
    j/pi_plus exchanges produce and is empty otherwise.
    """
    if not xs:
        return [y], [], []
    prefix, x = list(xs[:-1]), xs[-1]
    ys1, xs1, tail = exchange(apply_all(t, prefix), x, y)
    out: list[Rule] = []
    loose: list[Rule] = []  # swaps stranded between ``prefix`` and ``xs1``
    for y1 in ys1:
        base = apply_all(t, out)
        (y2,), loose, _ = push(apply_all(base, prefix), loose, y1)
        ys2, prefix, more = push(base, prefix, y2)
        out += ys2
        loose = more + loose
    here = apply_all(t, out + prefix)
    xs1, loose = sink(here, loose, xs1)
    return out, prefix + xs1, loose + tail


def sink(t: ModalTree, sigmas: list[Rule], zs: list[Rule]):
    """``t, sigmas, zs  ==>  zs', sigmas'`` by moving each of ``zs`` past the swaps."""
    out = []
    for z in zs:
        (z2,), sigmas, _ = push(apply_all(t, out), sigmas, z)
        out.append(z2)
    return out, sigmas


# --- operations on lists ------------------------------------------------------

def commute_over_piplus(start: ModalTree, pre_steps: list[Rule], pi: Rule) -> list[Rule]:
    """``pre_steps, pi  ==>  [pi'] + tail`` for pre_steps without pi_plus or j."""
    if any(r.kind in (PI_PLUS, J) for r in pre_steps):
        raise ValueError("pre_steps may not contain pi_plus or j")
    ys, xs, _ = push(start, list(pre_steps), pi)
    return ys + xs


def commute_structural(start: ModalTree, sig_steps: list[Rule], mu: Rule):
    ys, xs, _ = push(start, list(sig_steps), mu)
    return ys[0], xs


def commute_atomic(start: ModalTree, rho_steps: list[Rule], mu: Rule):
    ys, xs, _ = push(start, list(rho_steps), mu)
    return ys[0], xs


def commute_decreasing(start: ModalTree, delta_steps: list[Rule], mu: Rule):
    ys, xs, _ = push(start, list(delta_steps), mu)
    return ys, xs


def commute_m_over_replicatives(start: ModalTree, m_step: Rule, rep_steps: list[Rule]):
    reps: list[Rule] = []
    ms = [m_step]
    for p in rep_steps:
        ys, ms, _ = push(apply_all(start, reps), ms, p)
        reps += ys
    return reps, ms


def commute_j_over_replicatives(start, j_step: Rule, rep_steps: list[Rule]):
    """``j, pi_plus...  ==>  pi_plus..., j..., sigma...``. ``start`` may be marked."""
    if isinstance(start, MNode):
        start = erase(start)
    reps: list[Rule] = []
    js = [j_step]
    sigmas: list[Rule] = []
    for p in rep_steps:
        base = apply_all(start, reps)
        (p2,), sigmas, _ = push(apply_all(base, js), sigmas, p)
        ys, js, more = push(base, js, p2)
        reps += ys
        sigmas = more + sigmas
    return reps, js, sigmas


def commute_modal_block_over_piplus(start: ModalTree, modal_steps: list[Rule], pi: Rule):
    return push(start, list(modal_steps), pi)


# --- flags of j steps ---------------------------------------------------------

@dataclass(frozen=True)
class JFlagSet:
    internal: Position
    upper: Position
    lower: Position


def jflags(t: ModalTree, r: Rule) -> JFlagSet:
    if r.kind != J:
        raise ValueError(f"{r} is not a j step")
    problem = why_not(t, r)
    if problem is not None:
        raise NotApplicable(f"{r} not applicable: {problem}")
    return JFlagSet(r.pos[:1], r.pos + (r.i,), r.pos + (r.j,))


def flag_occurrences(start: ModalTree, steps: list[Rule], k: int) -> int:
    """How many nodes of the end tree carry the upper or lower flag of step ``k`` (0-based).

    The flags are placed on the two children the j step touches, just
    before it applies, and are copied along with their nodes afterwards.
    """
    fresh = itertools.count()
    m = mark(apply_all(start, steps[:k]), fresh)
    upper, lower = _aim(steps[k], m)[1]
    m = mapply_all(m, steps[k:], fresh)
    count = 0
    stack = [m]
    while stack:
        node = stack.pop()
        count += node.token in (upper, lower)
        stack.extend(c for _, c in node.children)
    return count


# --- normal shape -------------------------------------------------------------

def is_normal(steps: Iterable[Rule]) -> bool:
    last = 0
    for r in steps:
        if r.block < last:
            return False
        last = r.block
    return True


@dataclass(frozen=True)
class NormalShape:
    replicative: tuple[Rule, ...] = ()
    modal: tuple[Rule, ...] = ()
    decreasing: tuple[Rule, ...] = ()
    atomic: tuple[Rule, ...] = ()
    structural: tuple[Rule, ...] = ()
    by_search: bool = False  # found by the fallback search rather than by commuting steps

    @property
    def blocks(self) -> tuple[tuple[Rule, ...], ...]:
        return (self.replicative, self.modal, self.decreasing, self.atomic, self.structural)

    @property
    def steps(self) -> tuple[Rule, ...]:
        return tuple(r for block in self.blocks for r in block)

    def to_json(self) -> dict:
        return {name: [rule_to_json(r) for r in block] for name, block in zip(CLASS_ORDER, self.blocks)}


def normalize(d: Derivation, sys: System = RC, search_states: int = 200_000) -> NormalShape:
    """Reorder ``d`` into block order by commuting steps one at a time.

    Commuting can get stuck when an atom step empties a node that a later
    ``four`` step removes. Then a bounded search for any block-ordered
    sequence between the same two trees is tried; ``search_states=0``
    turns that off.
    """
    end = check(d, sys)
    blocks: list[list[Rule]] = [[] for _ in CLASS_ORDER]
    try:
        for y in d.steps:
            _insert(d.start, blocks, y)
    except NormalizationObstruction:
        steps = _search(d.start, end, sys, len(d.steps), search_states)
        if steps is None:
            raise
        blocks = [[r for r in steps if r.block == b] for b in range(len(CLASS_ORDER))]
        return NormalShape(*map(tuple, blocks), by_search=True)
    shape = NormalShape(*map(tuple, blocks))
    if apply_all(d.start, shape.steps) != end:
        raise NormalizationError("normal form does not reach the original end tree")
    return shape


@functools.lru_cache(maxsize=4096)
def _search(start: ModalTree, end: ModalTree, sys: System, n: int, max_states: int):
    if max_states < 1:
        return None
    from .prover import SearchBudget, _OutOfStates, _Search
    budget = SearchBudget(max_steps=3 * n + 12, max_nodes=max(32, 2 * node_count(start)), max_states=max_states)
    try:
        steps, _ = _Search(start, end, sys, budget).run()
    except _OutOfStates:
        return None
    if steps is None or not is_normal(steps) or apply_all(start, steps) != end:
        return None
    return tuple(steps)


def _insert(start: ModalTree, blocks: list[list[Rule]], y: Rule) -> None:
    level = y.block
    trees = [start]
    for block in blocks:
        trees.append(apply_all(trees[-1], block))
    moving = [y]
    stray: list[Rule] = []
    for b in range(len(blocks) - 1, level, -1):
        # move every step of ``moving`` in front of block b
        out = []
        rest = blocks[b]
        for z in moving:
            ys, rest, extra = push(apply_all(trees[b], out), rest, z)
            out += ys
            if extra:
                # swaps left between block b and the next one sink to the structural block
                later = [r for blk in blocks[b + 1:-1] for r in blk]
                here = apply_all(trees[b], out + rest)
                moved, extra = sink(here, extra, later)
                _refill(blocks, b + 1, moved)
                stray = extra + stray
        blocks[b] = rest
        moving = out
    blocks[level] += moving
    if stray:
        blocks[-1] = stray + blocks[-1]
    head = apply_all(start, [r for blk in blocks[:-1] for r in blk])
    blocks[-1] = compress_structural(head, blocks[-1])


def _refill(blocks: list[list[Rule]], first: int, steps: list[Rule]) -> None:
    for b in range(first, len(blocks) - 1):
        blocks[b] = []
    for r in steps:
        blocks[r.block].append(r)


# --- bounds -------------------------------------------------------------------

@dataclass(frozen=True)
class Power:
    """``base ** exp`` kept symbolic, since the exponent can be astronomically large."""
    base: int
    exp: int

    def bits(self) -> float:
        return self.exp * math.log2(self.base) if self.base > 1 else 0.0

    def admits(self, n: int) -> bool:
        if self.base <= 1 or self.exp == 0:
            return n <= (1 if self.exp == 0 or self.base == 1 else 0)
        if self.bits() > n.bit_length() + 1:
            return True
        return n <= self.base ** self.exp

    def value(self) -> int:
        return self.base ** self.exp

    def __str__(self) -> str:
        return str(self.value()) if self.bits() <= 64 else f"{self.base}^{self.exp}"


def _bound_json(b):
    if isinstance(b, Power):
        return b.value() if b.bits() <= 256 else str(b)
    return b


def _within(b, n: int) -> bool:
    return b.admits(n) if isinstance(b, Power) else n <= b


@dataclass(frozen=True)
class BoundReport:
    regime: str  # "without-j" or "with-j"
    replicative: object
    modal: object
    decreasing_atomic: object
    structural: object
    actual: tuple[int, int, int, int]

    @property
    def bounds(self) -> tuple:
        return (self.replicative, self.modal, self.decreasing_atomic, self.structural)

    @property
    def violations(self) -> list[str]:
        names = ("replicative", "modal", "decreasing+atomic", "structural")
        return [f"{name}: {n} > {b}" for name, b, n in zip(names, self.bounds, self.actual)
                if not _within(b, n)]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        names = ("replicative", "modal", "decreasing_atomic", "structural")
        return {"regime": self.regime,
                "blocks": {name: {"length": n, "bound": _bound_json(b)}
                           for name, b, n in zip(names, self.bounds, self.actual)},
                "ok": self.ok}

    def table(self) -> str:
        names = ("replicative", "modal", "decreasing+atomic", "structural")
        rows = [f"regime: {self.regime}"]
        for name, b, n in zip(names, self.bounds, self.actual):
            rows.append(f"{name:<18} {n:>6} <= {b}  {'ok' if _within(b, n) else 'VIOLATED'}")
        return "\n".join(rows)


def theorem_bounds(d: Derivation, sys: System = RC, shape: NormalShape | None = None) -> BoundReport:
    """Length bounds for each block of the normal form of ``d``.

    Two of the bounds mention the lengths of the decreasing and replicative
    blocks of the normal form itself; they are taken from ``shape``, which
    is computed when not supplied.
    """
    end = check(d, sys)
    if shape is None:
        shape = normalize(d, sys)
    n = len(d.steps)
    w, h = width(d.start), height(d.start)
    reps, dec = len(shape.replicative), len(shape.decreasing)
    if sys.allows(J):
        regime = "with-j"
        rep_bound = Power(w + 1, (h + 1) ** (2 * n))
        modal_bound = Power(2, dec + 2 * n * (reps + w + 1) ** h)
    else:
        regime = "without-j"
        rep_bound = n
        modal_bound = Power(2, dec + n)
    actual = (reps, len(shape.modal), dec + len(shape.atomic), len(shape.structural))
    return BoundReport(regime, rep_bound, modal_bound, Power(2, n), node_count(end) - 1, actual)
