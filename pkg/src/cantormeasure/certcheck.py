"""Independent replay checker for serialized bound certificates.

The checker re-derives the certified bound from the cover alone and,
when the cover carries explicit nodes, re-counts every level with plain
membership queries instead of the measure engine's level bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import ParseError
from .trees import TreePresentation, contains, parse_tree_expr
from .words import BinWord


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    expected_bound: Optional[Fraction]
    recomputed_bound: Optional[Fraction]
    messages: Tuple[str, ...]


def _level_by_membership(P: TreePresentation, w: BinWord) -> int:
    """Branching points strictly below w, counted with contains() only."""
    count = 0
    for n in range(len(w)):
        prefix = w.prefix(n)
        if contains(P, prefix.append(0)) and contains(P, prefix.append(1)):
            count += 1
    return count


def check_certificate(text: str) -> CheckResult:
    """Replay a serialized lemma1 certificate.

    Verifies that the bound equals the cover sum, that it respects the
    ((2^k-1)/2^k)^rounds ceiling, and (explicit covers only) that every
    cover node lies in the tree with the stated level.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    messages: List[str] = []
    try:
        header = lines[0]
        if header != "certificate lemma1 v1":
            raise ParseError(f"unexpected header {header!r}", 1)
        fields = {}
        cover: List[Tuple[str, int]] = []
        agg: List[Tuple[int, int]] = []
        for i, ln in enumerate(lines[1:], start=2):
            if ln == "end":
                break
            key, _, rest = ln.partition(" ")
            if key == "cover":
                node, _, lvl = rest.partition(":")
                cover.append((node, int(lvl)))
            elif key == "agg":
                lvl, _, cnt = rest.partition(":")
                agg.append((int(lvl), int(cnt)))
            elif key in ("p", "x", "k", "rounds", "mode", "bound"):
                fields[key] = rest
            else:
                raise ParseError(f"unknown certificate line {ln!r}", i)
        k = int(fields["k"])
        rounds = int(fields["rounds"])
        bound = Fraction(fields["bound"])
    except (KeyError, ValueError, IndexError, ParseError) as exc:
        return CheckResult(False, None, None, (f"malformed certificate: {exc}",))

    if fields.get("mode") == "nodes":
        recomputed = sum((Fraction(1, 2**lvl) for _, lvl in cover), Fraction(0))
    else:
        recomputed = sum((Fraction(cnt, 2**lvl) for lvl, cnt in agg), Fraction(0))

    ok = True
    if recomputed != bound:
        ok = False
        messages.append(
            f"cover sum {recomputed} disagrees with stated bound {bound}"
        )
    ceiling = Fraction(2**k - 1, 2**k) ** rounds
    if bound > ceiling:
        ok = False
        messages.append(f"bound {bound} exceeds ceiling {ceiling}")

    if fields.get("mode") == "nodes" and "p" in fields:
        try:
            tree = parse_tree_expr(fields["p"])
        except ParseError as exc:
            tree = None
            messages.append(f"cannot replay levels: {exc}")
        if tree is not None:
            for node_text, lvl in cover:
                w = BinWord.from_str(node_text)
                if not contains(tree, w):
                    ok = False
                    messages.append(f"cover node {w} is not a node of the tree")
                    continue
                actual = _level_by_membership(tree, w)
                if actual != lvl:
                    ok = False
                    messages.append(f"node {w}: stated level {lvl}, recomputed {actual}")
    return CheckResult(ok, bound, recomputed, tuple(messages))
