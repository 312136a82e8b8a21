"""Exact canonical-measure computation.

All values are fractions in lowest terms; no floating point appears on any
measure path.  Cylinder measures follow the halving law at branching
points; traced measures of one closed set inside another come either as
decreasing depth-bounded clopen hulls or as an exact linear solve on the
product automaton.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (
    IntegrityError,
    UnsupportedPresentation,
    WitnessNotFound,
)
from .trees import (
    BlockTree,
    ExplicitTree,
    Navigator,
    ProductTree,
    SilverTree,
    StaircaseTree,
    Subtree,
    TreePresentation,
    to_dsl,
    product as tree_product,
)
from .words import EMPTY, BinWord, NatWord, all_words, deinterleave

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


# ---------------------------------------------------------------------------
# Cylinders and clopen sets


def mu_cylinder(P: TreePresentation, w: BinWord) -> Fraction:
    """Canonical measure of the cylinder of w: 1/2^level, or 0 when the
    cylinder misses the tree entirely."""
    nav = P.navigator()
    state = nav.initial
    lvl = 0
    for b in w.bits:
        bs = nav.bits(state)
        if b not in bs:
            return ZERO
        if len(bs) == 2:
            lvl += 1
        state = nav.step(state, b)
    return Fraction(1, 2**lvl)


def mu_clopen(P: TreePresentation, ws) -> Fraction:
    """Measure of a finite union of cylinders after prefix-disjointification."""
    uniq = sorted(set(ws))
    kept: List[BinWord] = []
    for w in uniq:
        if not any(p.is_prefix_of(w) for p in kept if len(p) < len(w)):
            kept.append(w)
    return sum((mu_cylinder(P, w) for w in kept), ZERO)


def baire_measure(w: NatWord) -> Fraction:
    """The natural product measure of a cylinder in Baire space."""
    out = ONE
    for e in w.entries:
        out *= Fraction(1, 2 ** (e + 1))
    return out


# ---------------------------------------------------------------------------
# Traced measures


@dataclass(frozen=True)
class TraceResult:
    exact: Optional[Fraction]
    upper_bounds: Tuple[Fraction, ...]
    method: str  # "exact-solve" | "depth-bounded"

    def __post_init__(self) -> None:
        for a, b in zip(self.upper_bounds, self.upper_bounds[1:]):
            if b > a:
                raise IntegrityError("trace upper bounds must be decreasing")
        if self.exact is not None and any(self.exact > u for u in self.upper_bounds):
            raise IntegrityError("exact trace value exceeds an upper bound")


def _hull_masses(P: TreePresentation, X: TreePresentation, depth: int) -> List[Fraction]:
    """Mass of the depth-d clopen hull of X within P for d = 0..depth."""
    pnav, xnav = P.navigator(), X.navigator()
    dist: Dict[Tuple[object, object], Fraction] = {(pnav.initial, xnav.initial): ONE}
    out = [ONE]
    for _ in range(depth):
        nxt: Dict[Tuple[object, object], Fraction] = {}
        for (ps, xs), mass in dist.items():
            bs = pnav.bits(ps)
            w = Fraction(1, 2) if len(bs) == 2 else ONE
            for b in bs:
                if b not in xnav.bits(xs):
                    continue
                key = (pnav.step(ps, b), xnav.step(xs, b))
                nxt[key] = nxt.get(key, ZERO) + mass * w
        dist = nxt
        out.append(sum(dist.values(), ZERO))
    return out


def trace_upper(P: TreePresentation, X: TreePresentation, depth: int) -> TraceResult:
    """Decreasing clopen-hull upper bounds for the measure of X inside P."""
    return TraceResult(None, tuple(_hull_masses(P, X, depth)), "depth-bounded")


def _period_hint(P: TreePresentation) -> int:
    if isinstance(P, BlockTree):
        return P.k
    if isinstance(P, SilverTree):
        return len(P.prefix) + len(P.period)
    if isinstance(P, ProductTree):
        return 2 * (math.lcm(_period_hint(P.left), _period_hint(P.right)))
    if isinstance(P, Subtree):
        return _period_hint(P.base) + len(P.root)
    if isinstance(P, ExplicitTree):
        return P.depth
    if isinstance(P, StaircaseTree):
        return 4
    return 1


def default_trace_depth(P: TreePresentation, X: TreePresentation) -> int:
    """Enough rounds of the joint period to expose geometric decay."""
    return min(60, max(24, 3 * math.lcm(_period_hint(P), _period_hint(X))))


def trace_exact(P: TreePresentation, X: TreePresentation) -> TraceResult:
    """Exact measure of X inside P by a linear solve on the product automaton.

    States from which every branch of P stays inside the tree of X retain
    full mass (value 1, found by a greatest fixpoint); the rest satisfy a
    contraction system solved exactly over the rationals.
    """
    pnav, xnav = P.navigator(), X.navigator()
    if not (pnav.finite and xnav.finite):
        raise UnsupportedPresentation(
            "trace_exact needs finite-state presentations on both sides"
        )
    start = (pnav.initial, xnav.initial)
    states = [start]
    seen = {start}
    i = 0
    while i < len(states):
        ps, xs = states[i]
        i += 1
        for b in pnav.bits(ps):
            if b not in xnav.bits(xs):
                continue
            t = (pnav.step(ps, b), xnav.step(xs, b))
            if t not in seen:
                seen.add(t)
                states.append(t)

    # greatest fixpoint: product states where all P-mass stays in X forever
    full = set(states)
    changed = True
    while changed:
        changed = False
        for st in list(full):
            ps, xs = st
            for b in pnav.bits(ps):
                if b not in xnav.bits(xs) or (
                    pnav.step(ps, b), xnav.step(xs, b)) not in full:
                    full.discard(st)
                    changed = True
                    break

    variables = [st for st in states if st not in full]
    index = {st: j for j, st in enumerate(variables)}
    n = len(variables)
    # rows of (I - A) v = c
    matrix = [[ZERO] * n for _ in range(n)]
    rhs = [ZERO] * n
    for st in variables:
        j = index[st]
        matrix[j][j] = ONE
        ps, xs = st
        bs = pnav.bits(ps)
        w = Fraction(1, 2) if len(bs) == 2 else ONE
        for b in bs:
            if b not in xnav.bits(xs):
                continue
            child = (pnav.step(ps, b), xnav.step(xs, b))
            if child in full:
                rhs[j] += w
            else:
                matrix[j][index[child]] -= w
    values = _solve_exact(matrix, rhs)
    result = ONE if start in full else values[index[start]]
    bounds = tuple(_hull_masses(P, X, 8))
    return TraceResult(result, bounds, "exact-solve")


def _solve_exact(matrix: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    """Gaussian elimination over the rationals."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise IntegrityError("singular trace system; value-1 detection failed")
        a[col], a[pivot] = a[pivot], a[col]
        inv = ONE / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


# ---------------------------------------------------------------------------
# Product measure and the natural measure


def product_measure(P: TreePresentation, Q: TreePresentation, v: BinWord) -> Fraction:
    """Measure of a product-tree cylinder, computed two independent ways.

    Raises IntegrityError if the direct product-tree computation disagrees
    with the product of the component cylinder measures.
    """
    if len(v) % 2 != 0:
        raise ValueError("product cylinder words must have even length")
    prod = tree_product(P, Q)
    direct = mu_cylinder(prod, v)
    wp, wq = deinterleave(v)
    split = mu_cylinder(P, wp) * mu_cylinder(Q, wq)
    if direct != split:
        raise IntegrityError(
            f"product measure mismatch at {v}: {format_rational(direct)} vs "
            f"{format_rational(split)}"
        )
    return direct


# ---------------------------------------------------------------------------
# Refinement certificates


@dataclass(frozen=True)
class BoundCertificate:
    """A finite cylinder cover of a trace together with its exact bound.

    cover holds explicit (node, level) pairs when small enough; the
    level-count aggregation is always present and determines the bound.
    """

    rounds: int
    witness_param: int
    cover: Optional[Tuple[Tuple[BinWord, int], ...]]
    cover_levels: Tuple[Tuple[int, int], ...]
    bound: Fraction
    replay_log: Tuple[str, ...]
    tree: str
    trace_of: str

    def serialize(self) -> str:
        lines = [
            "certificate lemma1 v1",
            f"p {self.tree}",
            f"x {self.trace_of}",
            f"k {self.witness_param}",
            f"rounds {self.rounds}",
        ]
        if self.cover is not None:
            lines.append("mode nodes")
            for w, lvl in self.cover:
                lines.append(f"cover {w}:{lvl}")
        else:
            lines.append("mode levels")
            for lvl, cnt in self.cover_levels:
                lines.append(f"agg {lvl}:{cnt}")
        lines.append(f"bound {format_rational(self.bound)}")
        lines.append("end")
        return "\n".join(lines) + "\n"


def _walk_states(nav: Navigator, state, bits) -> Optional[Tuple[object, int]]:
    """Walk bits from state; returns (end state, splits passed) or None."""
    gained = 0
    for b in bits:
        bs = nav.bits(state)
        if b not in bs:
            return None
        if len(bs) == 2:
            gained += 1
        state = nav.step(state, b)
    return state, gained


def _walk_optional(nav: Navigator, state, bits):
    """Walk bits through the traced tree; None state stays dead."""
    if state is None:
        return None
    for b in bits:
        if b not in nav.bits(state):
            return None
        state = nav.step(state, b)
    return state


def lemma1_refine(
    P: TreePresentation,
    X: TreePresentation,
    k: int,
    rounds: int,
    max_search_depth: int = 48,
    node_cap: int = 20000,
) -> BoundCertificate:
    """Iterated cover refinement with length-k escape windows.

    Each round replaces every cover cylinder by a finite partition of it
    into cylinders that each admit an escape window w of length k whose
    extension leaves the traced tree; only the at most 2^k - 1
    non-escaping window extensions are kept.  The witness search is
    breadth-first and picks the shallowest escape node, then the
    lexicographically least window, so certificates are deterministic.

    Raises WitnessNotFound when a reachable cover node has no escape
    window within the search depth.
    """
    if k < 1:
        raise ValueError("window length k must be at least 1")
    pnav, xnav = P.navigator(), X.navigator()
    windows = [w.bits for w in all_words(k)]

    pattern_cache: Dict[Tuple[object, object], List[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = {}

    def refine_pattern(ps, xs):
        """Finalized (relative word, escape window) pairs partitioning the
        subtree at a node with these states."""
        key = (ps, xs)
        if key in pattern_cache:
            return pattern_cache[key]
        out: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
        frontier: List[Tuple[Tuple[int, ...], object, object]] = [((), ps, xs)]
        explored = 0
        while frontier:
            nxt: List[Tuple[Tuple[int, ...], object, object]] = []
            for rel, p, x in frontier:
                explored += 1
                if len(rel) > max_search_depth or explored > 50_000:
                    raise WitnessNotFound(None)
                window = None
                for wb in windows:
                    if _walk_states(pnav, p, wb) is None:
                        continue
                    if _walk_optional(xnav, x, wb) is None:
                        window = wb
                        break
                if window is not None:
                    out.append((rel, window))
                else:
                    for b in pnav.bits(p):
                        nxt.append((rel + (b,), pnav.step(p, b), _walk_optional(xnav, x, (b,))))
            frontier = nxt
        out.sort()
        pattern_cache[key] = out
        return out

    # cover classes: (p state, x state or None, level) -> [count, representative]
    p0, x0 = pnav.initial, xnav.initial
    cover: Dict[Tuple[object, object, int], List] = {(p0, x0, 0): [1, EMPTY]}
    explicit: Optional[List[Tuple[BinWord, object, object, int]]] = [(EMPTY, p0, x0, 0)]
    log: List[str] = []

    def cover_bound(cov) -> Fraction:
        return sum((Fraction(cnt, 2**lvl) for (_, _, lvl), (cnt, _) in cov.items()), ZERO)

    log.append(f"round 0: cover 1 bound {format_rational(cover_bound(cover))}")

    for r in range(rounds):
        new_cover: Dict[Tuple[object, object, int], List] = {}
        new_explicit: Optional[List[Tuple[BinWord, object, object, int]]] = (
            [] if explicit is not None else None
        )
        for (ps, xs, lvl), (cnt, rep) in sorted(
            cover.items(), key=lambda item: str(item[1][1])
        ):
            try:
                pattern = refine_pattern(ps, xs)
            except WitnessNotFound:
                raise WitnessNotFound(rep) from None
            for rel, window in pattern:
                mid_p, mid_gain = _walk_states(pnav, ps, rel)
                mid_x = _walk_optional(xnav, xs, rel)
                for wb in windows:
                    if wb == window:
                        continue
                    walked = _walk_states(pnav, mid_p, wb)
                    if walked is None:
                        continue
                    end_p, wgain = walked
                    end_x = _walk_optional(xnav, mid_x, wb)
                    new_lvl = lvl + mid_gain + wgain
                    key = (end_p, end_x, new_lvl)
                    rep_word = BinWord(rep.bits + rel + wb)
                    entry = new_cover.get(key)
                    if entry is None:
                        new_cover[key] = [cnt, rep_word]
                    else:
                        entry[0] += cnt
                        if rep_word < entry[1]:
                            entry[1] = rep_word
            if new_explicit is not None:
                members = [e for e in explicit if (e[1], e[2], e[3]) == (ps, xs, lvl)]
                for word, _, _, wlvl in members:
                    for rel, window in pattern:
                        mid_p, mid_gain = _walk_states(pnav, ps, rel)
                        mid_x = _walk_optional(xnav, xs, rel)
                        for wb in windows:
                            if wb == window:
                                continue
                            walked = _walk_states(pnav, mid_p, wb)
                            if walked is None:
                                continue
                            end_p, wgain = walked
                            end_x = _walk_optional(xnav, mid_x, wb)
                            new_explicit.append(
                                (BinWord(word.bits + rel + wb), end_p, end_x, wlvl + mid_gain + wgain)
                            )
                if len(new_explicit) > node_cap:
                    new_explicit = None
        cover = new_cover
        explicit = new_explicit
        total = sum(cnt for cnt, _ in cover.values())
        log.append(f"round {r + 1}: cover {total} bound {format_rational(cover_bound(cover))}")

    bound = cover_bound(cover)
    ceiling = Fraction(2**k - 1, 2**k) ** rounds
    if bound > ceiling:
        raise IntegrityError(
            f"refined bound {format_rational(bound)} exceeds "
            f"((2^k-1)/2^k)^m = {format_rational(ceiling)}"
        )
    levels = Counter()
    for (_, _, lvl), (cnt, _) in cover.items():
        levels[lvl] += cnt
    nodes = None
    if explicit is not None:
        nodes = tuple(sorted((w, lvl) for w, _, _, lvl in explicit))
    return BoundCertificate(
        rounds=rounds,
        witness_param=k,
        cover=nodes,
        cover_levels=tuple(sorted(levels.items())),
        bound=bound,
        replay_log=tuple(log),
        tree=to_dsl(P),
        trace_of=to_dsl(X),
    )
