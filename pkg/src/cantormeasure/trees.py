"""Finite presentations of closed subtrees of the binary tree.

Every presentation compiles once into a navigator: a deterministic
transition structure whose unrolling is the presented tree.  Full,
block-periodic, Silver, staircase, product and subtree presentations
compile to finite automata, so membership, prunedness, perfection and all
measure questions downstream have exact answers.  Explicit presentations
carry a hard horizon and fail loudly past it.
"""

from __future__ import annotations

import itertools
import threading
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import HorizonExceeded, NotANode, ParseError, PresentationError
from .words import EMPTY, BinWord


# ---------------------------------------------------------------------------
# Navigators


class Navigator:
    """Transition-structure view of a tree; states are hashable."""

    finite = True
    initial: object

    def bits(self, state) -> Tuple[int, ...]:
        raise NotImplementedError

    def step(self, state, bit: int):
        raise NotImplementedError

    def reachable(self) -> List[object]:
        """All reachable states, in BFS order (finite navigators only)."""
        seen = {self.initial}
        order = [self.initial]
        queue = deque([self.initial])
        while queue:
            s = queue.popleft()
            for b in self.bits(s):
                t = self.step(s, b)
                if t is not None and t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order


class TableNavigator(Navigator):
    def __init__(self, initial, trans: Mapping[object, Mapping[int, object]]):
        self.initial = initial
        self._trans = {s: dict(m) for s, m in trans.items()}

    def bits(self, state) -> Tuple[int, ...]:
        return tuple(sorted(self._trans[state]))

    def step(self, state, bit: int):
        return self._trans[state].get(bit)


class TrieNavigator(Navigator):
    """Explicit finite trie; state = node word as a bit tuple."""

    finite = False

    def __init__(self, depth: int, nodes: FrozenSet[Tuple[int, ...]]):
        self.depth = depth
        self._nodes = nodes
        self.initial = ()

    def bits(self, state) -> Tuple[int, ...]:
        if len(state) >= self.depth:
            raise HorizonExceeded(
                f"explicit tree of depth {self.depth} queried past its horizon"
            )
        return tuple(b for b in (0, 1) if state + (b,) in self._nodes)

    def step(self, state, bit: int):
        t = state + (bit,)
        return t if t in self._nodes else None


class ProductNavigator(Navigator):
    """Bits at even positions feed the left tree, odd positions the right."""

    def __init__(self, left: Navigator, right: Navigator):
        self.left = left
        self.right = right
        self.finite = left.finite and right.finite
        self.initial = (left.initial, right.initial, 0)

    def bits(self, state) -> Tuple[int, ...]:
        ls, rs, parity = state
        return self.left.bits(ls) if parity == 0 else self.right.bits(rs)

    def step(self, state, bit: int):
        ls, rs, parity = state
        if parity == 0:
            nl = self.left.step(ls, bit)
            return None if nl is None else (nl, rs, 1)
        nr = self.right.step(rs, bit)
        return None if nr is None else (ls, nr, 0)


class StemNavigator(Navigator):
    """Forced bits along a stem word, then the base tree from its far end."""

    def __init__(self, stem: Tuple[int, ...], base: Navigator, base_state):
        self.stem = stem
        self.base = base
        self._base_state = base_state
        self.finite = base.finite
        self.initial = ("stem", 0) if stem else ("base", base_state)

    def bits(self, state) -> Tuple[int, ...]:
        kind, val = state
        if kind == "stem":
            return (self.stem[val],)
        return self.base.bits(val)

    def step(self, state, bit: int):
        kind, val = state
        if kind == "stem":
            if bit != self.stem[val]:
                return None
            if val + 1 == len(self.stem):
                return ("base", self._base_state)
            return ("stem", val + 1)
        t = self.base.step(val, bit)
        return None if t is None else ("base", t)


# ---------------------------------------------------------------------------
# Presentations


class TreePresentation:
    """Base class for tree presentations; immutable after validation."""

    def navigator(self) -> Navigator:
        nav = getattr(self, "_nav", None)
        if nav is None:
            nav = self._compile()
            object.__setattr__(self, "_nav", nav)
        return nav

    def _compile(self) -> Navigator:
        raise NotImplementedError


@dataclass(frozen=True)
class FullTree(TreePresentation):
    def _compile(self) -> Navigator:
        return TableNavigator(0, {0: {0: 0, 1: 0}})


@dataclass(frozen=True)
class ExplicitTree(TreePresentation):
    depth: int
    frontier: FrozenSet[BinWord]

    def __post_init__(self) -> None:
        if not self.frontier:
            raise PresentationError("explicit frontier must be nonempty")
        if any(len(w) != self.depth for w in self.frontier):
            raise PresentationError(
                f"all frontier words must have the stated depth {self.depth}"
            )

    def _compile(self) -> Navigator:
        nodes = set()
        for w in self.frontier:
            for n in range(self.depth + 1):
                nodes.add(w.bits[:n])
        return TrieNavigator(self.depth, frozenset(nodes))


@dataclass(frozen=True)
class BlockTree(TreePresentation):
    """Branches whose consecutive length-k blocks all lie in the block set."""

    k: int
    blocks: FrozenSet[BinWord]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise PresentationError("block length must be at least 1")
        if not self.blocks:
            raise PresentationError("block set must be nonempty")
        if any(len(b) != self.k for b in self.blocks):
            raise PresentationError(f"all blocks must have length {self.k}")

    def _compile(self) -> Navigator:
        blocks = {b.bits for b in self.blocks}
        prefixes = {b[:n] for b in blocks for n in range(self.k)}
        trans: Dict[Tuple[int, ...], Dict[int, Tuple[int, ...]]] = {}
        for p in prefixes:
            row: Dict[int, Tuple[int, ...]] = {}
            for bit in (0, 1):
                q = p + (bit,)
                if len(q) == self.k:
                    if q in blocks:
                        row[bit] = ()
                else:
                    if q in prefixes:
                        row[bit] = q
            trans[p] = row
        return TableNavigator((), trans)


@dataclass(frozen=True)
class SilverTree(TreePresentation):
    """Per-depth entry -1 means split on all branches; 0/1 force that bit.

    The period must contain a -1, which guarantees infinitely many split
    levels and hence perfection.
    """

    prefix: Tuple[int, ...] = ()
    period: Tuple[int, ...] = (-1,)

    def __post_init__(self) -> None:
        if not self.period:
            raise PresentationError("silver period must be nonempty")
        if any(a not in (-1, 0, 1) for a in self.prefix + self.period):
            raise PresentationError("silver entries must lie in {-1,0,1}")
        if -1 not in self.period:
            raise PresentationError("silver period must contain a -1 entry")

    def entry(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.period[(n - len(self.prefix)) % len(self.period)]

    def _compile(self) -> Navigator:
        return _silver_navigator(self.prefix, self.period)


def _silver_navigator(prefix: Tuple[int, ...], period: Tuple[int, ...]) -> Navigator:
    entries = prefix + period
    L = len(prefix)
    trans: Dict[int, Dict[int, int]] = {}
    for n, a in enumerate(entries):
        nxt = n + 1 if n + 1 < len(entries) else L
        trans[n] = {0: nxt, 1: nxt} if a == -1 else {a: nxt}
    return TableNavigator(0, trans)


class StaircaseNavigator(Navigator):
    """Lazily generated trie for the one-split-per-depth staircase tree.

    At every depth exactly one live node splits: the one whose path has
    gone longest without a branching point, ties broken lexicographically.
    Rotating the split through the live nodes keeps every branch splitting
    infinitely often, so the tree is perfect.  All non-chosen nodes extend
    by 0.  State = node word as a bit tuple; levels are generated on
    demand, so there is no horizon.
    """

    finite = False

    def __init__(self) -> None:
        self.initial = ()
        self._lock = threading.Lock()
        # per depth: {node: (last_split_depth, chosen)}
        self._levels: List[Dict[Tuple[int, ...], Tuple[int, bool]]] = [{(): (-1, True)}]

    def _extend(self) -> None:
        d = len(self._levels) - 1
        cur = self._levels[-1]
        nxt: Dict[Tuple[int, ...], int] = {}
        for node, (last, chosen) in cur.items():
            if chosen:
                nxt[node + (0,)] = d
                nxt[node + (1,)] = d
            else:
                nxt[node + (0,)] = last
        pick = min(nxt, key=lambda n: (nxt[n], n))
        self._levels.append({n: (ls, n == pick) for n, ls in nxt.items()})

    def _level(self, d: int) -> Dict[Tuple[int, ...], Tuple[int, bool]]:
        if len(self._levels) <= d:
            with self._lock:
                while len(self._levels) <= d:
                    self._extend()
        return self._levels[d]

    def bits(self, state) -> Tuple[int, ...]:
        info = self._level(len(state)).get(state)
        if info is None:
            raise NotANode(f"{BinWord(state)} is not a staircase node")
        return (0, 1) if info[1] else (0,)

    def step(self, state, bit: int):
        t = state + (bit,)
        return t if t in self._level(len(t)) else None


@dataclass(frozen=True)
class StaircaseTree(TreePresentation):
    """The balanced perfect tree with exactly one branching point per depth."""

    def _compile(self) -> Navigator:
        return StaircaseNavigator()


@dataclass(frozen=True)
class ProductTree(TreePresentation):
    left: TreePresentation
    right: TreePresentation

    def _compile(self) -> Navigator:
        return ProductNavigator(self.left.navigator(), self.right.navigator())


@dataclass(frozen=True)
class Subtree(TreePresentation):
    """The nodes of the base tree comparable with the root word.

    Its branch set is the relative cylinder of the root inside the base
    tree, hence a subset of the base's branch set.
    """

    base: TreePresentation
    root: BinWord

    def __post_init__(self) -> None:
        state = walk_navigator(self.base.navigator(), self.root)
        if state is None:
            raise PresentationError(f"subtree root {self.root} is not a node")

    def _compile(self) -> Navigator:
        nav = self.base.navigator()
        return StemNavigator(self.root.bits, nav, walk_navigator(nav, self.root))


# ---------------------------------------------------------------------------
# Queries


def walk_navigator(nav: Navigator, w: BinWord):
    """The state reached by w, or None if w leaves the tree."""
    state = nav.initial
    for b in w.bits:
        if b not in nav.bits(state):
            return None
        state = nav.step(state, b)
    return state


def contains(P: TreePresentation, w: BinWord) -> bool:
    """Whether w is a node of the presented tree.

    Raises HorizonExceeded for explicit presentations queried past their
    depth rather than guessing.
    """
    return walk_navigator(P.navigator(), w) is not None


def children(P: TreePresentation, w: BinWord) -> Tuple[int, ...]:
    """The bits b with w⌢b a node of the tree."""
    state = walk_navigator(P.navigator(), w)
    if state is None:
        raise NotANode(f"{w} is not a node")
    return P.navigator().bits(state)


def node_words(P: TreePresentation, depth: int) -> Iterator[BinWord]:
    """All node words of length at most depth, in BFS/lexicographic order."""
    nav = P.navigator()
    level: List[Tuple[BinWord, object]] = [(EMPTY, nav.initial)]
    yield EMPTY
    for _ in range(depth):
        nxt: List[Tuple[BinWord, object]] = []
        for w, s in level:
            for b in nav.bits(s):
                nxt.append((w.append(b), nav.step(s, b)))
        for w, _ in nxt:
            yield w
        level = nxt


def frontier_words(P: TreePresentation, depth: int) -> List[BinWord]:
    """The node words of length exactly depth."""
    return [w for w in node_words(P, depth) if len(w) == depth]


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class ValidationReport:
    pruned: bool
    perfect: bool
    witnesses: Tuple[BinWord, ...] = ()
    exact_to: Optional[int] = None  # None: exact; n: decided up to depth n

    def __post_init__(self) -> None:
        if self.perfect and not self.pruned:
            raise PresentationError("perfect implies pruned")


def validate(P: TreePresentation) -> ValidationReport:
    """Prunedness and perfection, exact for finite-state presentations."""
    nav = P.navigator()
    if nav.finite:
        return _validate_finite(nav)
    if isinstance(nav, TrieNavigator):
        return _validate_trie(nav)
    # the staircase is pruned and perfect by its rotating-split construction
    assert isinstance(nav, StaircaseNavigator)
    return ValidationReport(pruned=True, perfect=True)


def _shortest_words(nav: Navigator) -> Dict[object, BinWord]:
    seen = {nav.initial: EMPTY}
    queue = deque([nav.initial])
    while queue:
        s = queue.popleft()
        for b in nav.bits(s):
            t = nav.step(s, b)
            if t is not None and t not in seen:
                seen[t] = seen[s].append(b)
                queue.append(t)
    return seen


def _validate_finite(nav: Navigator) -> ValidationReport:
    witness_of = _shortest_words(nav)
    states = list(witness_of)
    dead = [s for s in states if not nav.bits(s)]
    if dead:
        ws = tuple(sorted(witness_of[s] for s in dead))
        return ValidationReport(pruned=False, perfect=False, witnesses=ws)
    splitting = {s for s in states if len(nav.bits(s)) == 2}
    reach = set(splitting)
    changed = True
    while changed:
        changed = False
        for s in states:
            if s not in reach and any(nav.step(s, b) in reach for b in nav.bits(s)):
                reach.add(s)
                changed = True
    bad = [s for s in states if s not in reach]
    if bad:
        ws = tuple(sorted(witness_of[s] for s in bad))
        return ValidationReport(pruned=True, perfect=False, witnesses=ws)
    return ValidationReport(pruned=True, perfect=True)


def _validate_trie(nav: TrieNavigator) -> ValidationReport:
    nodes = sorted(nav._nodes, key=lambda t: (len(t), t))
    pruned_witness = [
        t for t in nodes if len(t) < nav.depth and not any(t + (b,) in nav._nodes for b in (0, 1))
    ]
    if pruned_witness:
        ws = tuple(BinWord(t) for t in pruned_witness)
        return ValidationReport(False, False, ws, exact_to=nav.depth)
    splits = {
        t for t in nodes if len(t) < nav.depth and all(t + (b,) in nav._nodes for b in (0, 1))
    }
    bad = []
    for t in nodes:
        if len(t) >= nav.depth:
            continue
        if not any(s[: len(t)] == t for s in splits):
            bad.append(t)
    if bad:
        return ValidationReport(True, False, tuple(BinWord(t) for t in bad), exact_to=nav.depth)
    return ValidationReport(True, True, exact_to=nav.depth)


# ---------------------------------------------------------------------------
# Products and Silver splitting


def product(P: TreePresentation, Q: TreePresentation) -> ProductTree:
    return ProductTree(P, Q)


def silver_split(
    S: SilverTree, horizon: int = 32
) -> Tuple[TreePresentation, TreePresentation]:
    """Split a Silver tree into its even- and odd-entry component trees.

    The original tree equals the product of the two components node for
    node.  A component whose entries contain only finitely many -1 is no
    longer perfect and is returned as an explicit tree truncated at the
    given horizon.
    """
    return (
        _silver_component(S, 0, horizon),
        _silver_component(S, 1, horizon),
    )


def _silver_component(S: SilverTree, par: int, horizon: int) -> TreePresentation:
    L, M = len(S.prefix), len(S.period)
    npl = max(0, -(-(L - par) // 2))  # number of n with 2n+par < L
    t0 = M if M % 2 else M // 2
    new_prefix = tuple(S.entry(2 * n + par) for n in range(npl))
    new_period = tuple(S.entry(2 * (npl + j) + par) for j in range(t0))
    if -1 in new_period:
        # drop forced prefix-only normalization; keep entries as computed
        return SilverTree(new_prefix, new_period)
    entries = [new_prefix[n] if n < npl else new_period[(n - npl) % t0] for n in range(horizon)]
    frontier = []
    choice_positions = [n for n, a in enumerate(entries) if a == -1]
    for combo in itertools.product((0, 1), repeat=len(choice_positions)):
        bits = list(entries)
        for pos, b in zip(choice_positions, combo):
            bits[pos] = b
        frontier.append(BinWord(tuple(bits)))
    return ExplicitTree(horizon, frozenset(frontier))


# ---------------------------------------------------------------------------
# DSL text forms


def to_dsl(P: TreePresentation) -> str:
    """Canonical DSL expression for a presentation."""
    if isinstance(P, FullTree):
        return "full"
    if isinstance(P, StaircaseTree):
        return "staircase"
    if isinstance(P, ExplicitTree):
        ws = " ".join(str(w) for w in sorted(P.frontier))
        return "words{" + ws + "}"
    if isinstance(P, BlockTree):
        bs = " ".join(str(b) for b in sorted(P.blocks))
        return f"blocks({P.k}){{{bs}}}"
    if isinstance(P, SilverTree):
        pre = " ".join(str(a) for a in P.prefix)
        per = " ".join(str(a) for a in P.period)
        return f"silver[{pre}]repeat[{per}]"
    if isinstance(P, ProductTree):
        return f"product({to_dsl(P.left)},{to_dsl(P.right)})"
    if isinstance(P, Subtree):
        return f"subtree({to_dsl(P.base)},{P.root})"
    raise PresentationError(f"no DSL form for {type(P).__name__}")


_SYMBOLS = "{}[](),"


def _tokenize(text: str) -> List[str]:
    tokens: List[str] = []
    cur = ""
    for ch in text:
        if ch in _SYMBOLS:
            if cur:
                tokens.append(cur)
                cur = ""
            tokens.append(ch)
        elif ch.isspace():
            if cur:
                tokens.append(cur)
                cur = ""
        else:
            cur += ch
    if cur:
        tokens.append(cur)
    return tokens


class _TokenStream:
    def __init__(self, tokens: Sequence[str], line: int):
        self.tokens = list(tokens)
        self.pos = 0
        self.line = line

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression", self.line)
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}", self.line)


def parse_tree_expr(
    text: str,
    env: Optional[Mapping[str, TreePresentation]] = None,
    line: int = 0,
) -> TreePresentation:
    """Parse a DSL tree expression; names resolve through env."""
    stream = _TokenStream(_tokenize(text), line)
    tree = _parse_expr(stream, env or {}, line)
    if stream.peek() is not None:
        raise ParseError(f"trailing tokens after expression: {stream.peek()!r}", line)
    return tree


def _parse_word_list(stream: _TokenStream, line: int) -> Tuple[BinWord, ...]:
    stream.expect("{")
    out = []
    while stream.peek() != "}":
        tok = stream.next()
        try:
            out.append(BinWord.from_str(tok))
        except ValueError as exc:
            raise ParseError(str(exc), line) from exc
    stream.expect("}")
    return tuple(out)


def _parse_entry_list(stream: _TokenStream, line: int) -> Tuple[int, ...]:
    stream.expect("[")
    out = []
    while stream.peek() != "]":
        tok = stream.next()
        try:
            val = int(tok)
        except ValueError as exc:
            raise ParseError(f"bad entry {tok!r}", line) from exc
        out.append(val)
    stream.expect("]")
    return tuple(out)


def _parse_expr(
    stream: _TokenStream, env: Mapping[str, TreePresentation], line: int
) -> TreePresentation:
    tok = stream.next()
    try:
        if tok == "full":
            return FullTree()
        if tok == "staircase":
            return StaircaseTree()
        if tok == "words":
            ws = _parse_word_list(stream, line)
            if not ws:
                raise ParseError("words{} needs at least one word", line)
            return ExplicitTree(len(ws[0]), frozenset(ws))
        if tok == "blocks":
            stream.expect("(")
            k = int(stream.next())
            stream.expect(")")
            return BlockTree(k, frozenset(_parse_word_list(stream, line)))
        if tok == "silver":
            prefix = _parse_entry_list(stream, line)
            stream.expect("repeat")
            period = _parse_entry_list(stream, line)
            return SilverTree(prefix, period)
        if tok == "product":
            stream.expect("(")
            left = _parse_expr(stream, env, line)
            stream.expect(",")
            right = _parse_expr(stream, env, line)
            stream.expect(")")
            return ProductTree(left, right)
        if tok == "subtree":
            stream.expect("(")
            base = _parse_expr(stream, env, line)
            stream.expect(",")
            root = BinWord.from_str(stream.next())
            stream.expect(")")
            return Subtree(base, root)
    except ValueError as exc:
        raise ParseError(str(exc), line) from exc
    if tok in env:
        return env[tok]
    raise ParseError(f"unknown tree expression or name {tok!r}", line)
