"""Branching-point analysis: split sets, levels, classification, the
canonical order isomorphism between the full binary tree and the splits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .errors import HorizonExceeded, NotANode, PresentationError
from .trees import Navigator, TreePresentation, TrieNavigator
from .words import EMPTY, BinWord

_FORCED_WALK_CAP = 100_000


@dataclass(frozen=True)
class SplitProfile:
    """Per-level branching data, exact up to the stated horizon."""

    split_points: Tuple[Tuple[BinWord, ...], ...]
    s: Tuple[int, ...]  # min split length per level
    S: Tuple[int, ...]  # max split length per level
    horizon: int


@dataclass(frozen=True)
class Classification:
    balanced: bool
    uniform: bool
    silver: bool
    exact_to: Optional[int] = None  # None: exact; n: decided up to depth n


def level(P: TreePresentation, w: BinWord) -> int:
    """The number of branching points strictly below w."""
    nav = P.navigator()
    state = nav.initial
    count = 0
    for b in w.bits:
        if b not in nav.bits(state):
            raise NotANode(f"{w} is not a node")
        if len(nav.bits(state)) == 2:
            count += 1
        state = nav.step(state, b)
    return count


def split_profile(P: TreePresentation, levels: int) -> SplitProfile:
    """Exact Split_i, s_i, S_i for i < levels.

    Branches are explored until they have passed the requested number of
    levels; explicit presentations too shallow to exhibit them raise
    HorizonExceeded.
    """
    if levels <= 0:
        return SplitProfile((), (), (), 0)
    nav = P.navigator()
    points: List[List[BinWord]] = [[] for _ in range(levels)]
    frontier: List[Tuple[BinWord, object, int]] = [(EMPTY, nav.initial, 0)]
    horizon = 0
    guard = 0
    while frontier:
        guard += 1
        if guard > _FORCED_WALK_CAP:
            raise PresentationError("split exploration did not terminate; tree not perfect?")
        nxt: List[Tuple[BinWord, object, int]] = []
        for w, state, count in frontier:
            bs = nav.bits(state)
            split = len(bs) == 2
            if split:
                points[count].append(w)
            child_count = count + (1 if split else 0)
            if child_count >= levels:
                continue
            for b in bs:
                nxt.append((w.append(b), nav.step(state, b), child_count))
        if nxt:
            horizon = max(len(w) for w, _, _ in nxt)
        frontier = nxt
    for i, pts in enumerate(points):
        if not pts:
            raise PresentationError(f"no branching points on level {i}; tree not perfect")
    return SplitProfile(
        split_points=tuple(tuple(sorted(pts)) for pts in points),
        s=tuple(min(len(w) for w in pts) for pts in points),
        S=tuple(max(len(w) for w in pts) for pts in points),
        horizon=horizon,
    )


# ---------------------------------------------------------------------------
# Classification


def _state_set_sequence(nav: Navigator):
    """Reachable state sets per depth until the first repeat.

    Returns (sets, cycle_start) where sets[cycle_start:] repeats forever.
    """
    seen: Dict[FrozenSet, int] = {}
    sets: List[FrozenSet] = []
    cur = frozenset([nav.initial])
    while cur not in seen:
        seen[cur] = len(sets)
        sets.append(cur)
        cur = frozenset(
            nav.step(s, b) for s in cur for b in nav.bits(s)
        )
    return sets, seen[cur]


def _forced_walk(nav: Navigator, state, extra: int = 0) -> Tuple[object, int]:
    """Advance through single-child states until a split; returns (state, gap)."""
    gap = 0
    while True:
        bs = nav.bits(state)
        if len(bs) == 2:
            return state, gap
        if not bs:
            raise PresentationError("tree is not pruned at a forced node")
        state = nav.step(state, bs[0])
        gap += 1
        if gap > _FORCED_WALK_CAP + extra:
            raise PresentationError("no branching point below a node; tree not perfect")


def _classify_finite(nav: Navigator, budget: int) -> Classification:
    sets, _ = _state_set_sequence(nav)
    uniform = True
    silver = True
    for states in sets:
        bitsets = {nav.bits(s) for s in states}
        n_split = sum(1 for s in states if len(nav.bits(s)) == 2)
        if 0 < n_split < len(states):
            uniform = False
        if len(bitsets) > 1:
            silver = False
    silver = silver and uniform

    # level-front iteration for balancedness; fronts are sets of
    # (state, length offset) pairs, normalized to min offset 0
    start, gap0 = _forced_walk(nav, nav.initial)
    front: FrozenSet[Tuple[object, int]] = frozenset([(start, 0)])
    base = gap0  # absolute length of offset 0
    seen_fronts: Set[FrozenSet] = {front}
    balanced: Optional[bool] = True
    prev_max = base
    for _ in range(budget):
        nxt: Set[Tuple[object, int]] = set()
        for state, off in front:
            for b in nav.bits(state):
                child = nav.step(state, b)
                q, gap = _forced_walk(nav, child)
                nxt.add((q, off + 1 + gap))
        mn = min(off for _, off in nxt)
        mx = max(off for _, off in nxt)
        if base + mn <= prev_max:  # s_{i+1} <= S_i
            return Classification(False, uniform, silver, exact_to=None)
        prev_max = base + mx
        base += mn
        front = frozenset((s, off - mn) for s, off in nxt)
        if mx - mn > 4096:
            return Classification(True, uniform, silver, exact_to=base)
        if front in seen_fronts:
            return Classification(True, uniform, silver, exact_to=None)
        seen_fronts.add(front)
    return Classification(True, uniform, silver, exact_to=base)


def _classify_enumerated(nav: Navigator, depth: int) -> Classification:
    if isinstance(nav, TrieNavigator):
        depth = min(depth, nav.depth)
    level_nodes: List[List[Tuple[object, int]]] = [[(nav.initial, 0)]]
    uniform = True
    silver = True
    s: Dict[int, int] = {}
    S: Dict[int, int] = {}
    complete = 0  # levels i such that every branch passed level i in view
    min_count = None
    for d in range(depth):
        cur = level_nodes[-1]
        bitsets = {nav.bits(st) for st, _ in cur}
        n_split = sum(1 for st, _ in cur if len(nav.bits(st)) == 2)
        if 0 < n_split < len(cur):
            uniform = False
        if len(bitsets) > 1:
            silver = False
        nxt: List[Tuple[object, int]] = []
        for st, count in cur:
            bs = nav.bits(st)
            if len(bs) == 2:
                s.setdefault(count, d)
                S[count] = d
                count += 1
            for b in bs:
                nxt.append((nav.step(st, b), count))
        level_nodes.append(nxt)
        min_count = min(c for _, c in nxt)
    complete = min_count if min_count is not None else 0
    balanced = all(s[i + 1] > S[i] for i in range(complete - 1) if i + 1 in s and i in S)
    return Classification(balanced, uniform, silver and uniform, exact_to=depth)


def classify(P: TreePresentation, depth: int = 64) -> Classification:
    """Balanced / uniformly perfect / Silver classification.

    Exact for finite-state presentations (period detection on the
    automaton), depth-qualified otherwise.
    """
    nav = P.navigator()
    if nav.finite:
        return _classify_finite(nav, budget=max(depth, 64))
    try:
        return _classify_enumerated(nav, depth)
    except HorizonExceeded:
        raise


# ---------------------------------------------------------------------------
# Canonical order isomorphism


def canon_embed(P: TreePresentation, w: BinWord) -> BinWord:
    """The branching point of P corresponding to w under the order
    isomorphism of the full binary tree with Split(P).

    The empty word maps to the least branching point; appending bit b
    descends through child b to the next branching point.  The result is
    prefix-structure preserving.
    """
    nav = P.navigator()
    state = nav.initial
    out: List[int] = []

    def advance(st):
        gap_bits: List[int] = []
        guard = 0
        while len(nav.bits(st)) != 2:
            bs = nav.bits(st)
            if not bs:
                raise PresentationError("tree is not pruned at a forced node")
            gap_bits.append(bs[0])
            st = nav.step(st, bs[0])
            guard += 1
            if guard > _FORCED_WALK_CAP:
                raise PresentationError("no branching point below a node; tree not perfect")
        return st, gap_bits

    state, lead = advance(state)
    out.extend(lead)
    for b in w.bits:
        state = nav.step(state, b)
        out.append(b)
        state, lead = advance(state)
        out.extend(lead)
    return BinWord(tuple(out))
