"""Line-oriented script language: tree declarations plus queries.

Grammar (one statement per line, `#` starts a comment):

    tree NAME = full | staircase | words{w ...} | blocks(k){w ...}
                | silver[a ...]repeat[a ...] | product(A,B) | subtree(A,w)
    query classify NAME depth D
    query measure NAME cylinder W
    query trace X in P [depth D]
    query trace-exact X in P
    query lemma1 X in P k K rounds M
    query table1
    query table2
    query phi W
    query lusin stages N
    query product-check A B depth D

Built-in names: FULL, E, Q, PJ, U, BST.  Reports are byte-deterministic
for a given script, independent of worker count.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import constructions, measure, splits, trees
from .errors import (
    CantorMeasureError,
    CapExceeded,
    HorizonExceeded,
    IntegrityError,
    NotANode,
    ParseError,
    PresentationError,
    UnsupportedPresentation,
    WitnessNotFound,
)
from .trees import TreePresentation
from .words import BinWord


@dataclass(frozen=True)
class Query:
    kind: str
    args: Tuple
    line: int


@dataclass(frozen=True)
class Script:
    declarations: Tuple[Tuple[str, TreePresentation], ...]
    queries: Tuple[Query, ...]


@dataclass(frozen=True)
class Report:
    text: str
    exit_code: int
    certificates: Tuple[str, ...]


def builtin_env() -> Dict[str, TreePresentation]:
    env: Dict[str, TreePresentation] = {"FULL": trees.FullTree()}
    for name in ("E", "Q", "PJ", "U", "BST"):
        env[name] = constructions.make_named(name).presentation
    return env


# ---------------------------------------------------------------------------
# Parsing


def _parse_query(tokens: List[str], line: int) -> Query:
    def want(n: int) -> None:
        if len(tokens) != n:
            raise ParseError(f"malformed query: {' '.join(tokens)!r}", line)

    kind = tokens[0]
    if kind == "classify":
        want(4)
        if tokens[2] != "depth":
            raise ParseError("expected 'depth'", line)
        return Query("classify", (tokens[1], int(tokens[3])), line)
    if kind == "measure":
        want(4)
        if tokens[2] != "cylinder":
            raise ParseError("expected 'cylinder'", line)
        return Query("measure", (tokens[1], BinWord.from_str(tokens[3])), line)
    if kind == "trace":
        if len(tokens) == 4 and tokens[2] == "in":
            return Query("trace", (tokens[1], tokens[3], None), line)
        if len(tokens) == 6 and tokens[2] == "in" and tokens[4] == "depth":
            return Query("trace", (tokens[1], tokens[3], int(tokens[5])), line)
        raise ParseError(f"malformed trace query: {' '.join(tokens)!r}", line)
    if kind == "trace-exact":
        want(4)
        if tokens[2] != "in":
            raise ParseError("expected 'in'", line)
        return Query("trace-exact", (tokens[1], tokens[3]), line)
    if kind == "lemma1":
        want(8)
        if tokens[2] != "in" or tokens[4] != "k" or tokens[6] != "rounds":
            raise ParseError(f"malformed lemma1 query: {' '.join(tokens)!r}", line)
        return Query("lemma1", (tokens[1], tokens[3], int(tokens[5]), int(tokens[7])), line)
    if kind in ("table1", "table2"):
        want(1)
        return Query(kind, (), line)
    if kind == "phi":
        want(2)
        return Query("phi", (BinWord.from_str(tokens[1]),), line)
    if kind == "lusin":
        want(3)
        if tokens[1] != "stages":
            raise ParseError("expected 'stages'", line)
        return Query("lusin", (int(tokens[2]),), line)
    if kind == "product-check":
        want(5)
        if tokens[3] != "depth":
            raise ParseError("expected 'depth'", line)
        return Query("product-check", (tokens[1], tokens[2], int(tokens[4])), line)
    raise ParseError(f"unknown query kind {kind!r}", line)


def parse(text: str) -> Script:
    """Parse a script; positions are reported on failure."""
    env = builtin_env()
    declarations: List[Tuple[str, TreePresentation]] = []
    queries: List[Query] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("tree "):
            head, eq, expr = line[5:].partition("=")
            name = head.strip()
            if not eq or not name or not name.isidentifier():
                raise ParseError(f"malformed tree declaration: {raw!r}", lineno)
            if name in env:
                raise ParseError(f"duplicate name {name!r}", lineno)
            tree = trees.parse_tree_expr(expr.strip(), env, lineno)
            env[name] = tree
            declarations.append((name, tree))
        elif line.startswith("query "):
            tokens = line[6:].split()
            try:
                query = _parse_query(tokens, lineno)
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
            for name in _query_names(query):
                if name not in env:
                    raise ParseError(f"unknown name {name!r}", lineno)
            queries.append(query)
        else:
            raise ParseError(f"expected 'tree' or 'query': {raw!r}", lineno)
    return Script(tuple(declarations), tuple(queries))


def _query_names(q: Query) -> Tuple[str, ...]:
    if q.kind in ("classify", "measure"):
        return (q.args[0],)
    if q.kind in ("trace", "trace-exact", "lemma1"):
        return (q.args[0], q.args[1])
    if q.kind == "product-check":
        return (q.args[0], q.args[1])
    return ()


def render_query(q: Query) -> str:
    a = q.args
    if q.kind == "classify":
        return f"query classify {a[0]} depth {a[1]}"
    if q.kind == "measure":
        return f"query measure {a[0]} cylinder {a[1]}"
    if q.kind == "trace":
        tail = "" if a[2] is None else f" depth {a[2]}"
        return f"query trace {a[0]} in {a[1]}{tail}"
    if q.kind == "trace-exact":
        return f"query trace-exact {a[0]} in {a[1]}"
    if q.kind == "lemma1":
        return f"query lemma1 {a[0]} in {a[1]} k {a[2]} rounds {a[3]}"
    if q.kind in ("table1", "table2"):
        return f"query {q.kind}"
    if q.kind == "phi":
        return f"query phi {a[0]}"
    if q.kind == "lusin":
        return f"query lusin stages {a[0]}"
    if q.kind == "product-check":
        return f"query product-check {a[0]} {a[1]} depth {a[2]}"
    raise ValueError(f"unknown query kind {q.kind!r}")


def render_script(script: Script) -> str:
    """Canonical text form; reparsing yields an identical structure."""
    lines = [f"tree {name} = {trees.to_dsl(tree)}" for name, tree in script.declarations]
    lines.extend(render_query(q) for q in script.queries)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Execution


_ERROR_KINDS = (
    (HorizonExceeded, "horizon"),
    (NotANode, "not-a-node"),
    (WitnessNotFound, "witness-not-found"),
    (UnsupportedPresentation, "unsupported"),
    (CapExceeded, "cap"),
    (IntegrityError, "integrity"),
    (PresentationError, "presentation"),
)


def _fmt(q) -> str:
    return measure.format_rational(q)


def _run_query(
    q: Query, env: Dict[str, TreePresentation], max_depth: Optional[int]
) -> Tuple[bool, List[str], Optional[str]]:
    """Returns (ok, report lines, optional certificate text)."""

    def clamp(d: int) -> int:
        return d if max_depth is None else min(d, max_depth)

    lines: List[str] = []
    cert: Optional[str] = None
    try:
        if q.kind == "classify":
            c = splits.classify(env[q.args[0]], depth=clamp(q.args[1]))
            flags = " ".join(
                f"{name}={'yes' if val else 'no'}"
                for name, val in (
                    ("balanced", c.balanced),
                    ("uniform", c.uniform),
                    ("silver", c.silver),
                )
            )
            tail = "exact" if c.exact_to is None else f"up-to-depth({c.exact_to})"
            lines.append(f"= {flags} {tail}")
        elif q.kind == "measure":
            lines.append(f"= {_fmt(measure.mu_cylinder(env[q.args[0]], q.args[1]))}")
        elif q.kind == "trace":
            x, p = env[q.args[0]], env[q.args[1]]
            depth = q.args[2]
            if depth is None:
                depth = measure.default_trace_depth(p, x)
            result = measure.trace_upper(p, x, clamp(depth))
            lines.append(f"= {_fmt(result.upper_bounds[-1])} at depth {len(result.upper_bounds) - 1}")
            lines.append("  bounds " + " ".join(_fmt(b) for b in result.upper_bounds))
        elif q.kind == "trace-exact":
            x, p = env[q.args[0]], env[q.args[1]]
            result = measure.trace_exact(p, x)
            lines.append(f"= {_fmt(result.exact)}")
        elif q.kind == "lemma1":
            x, p = env[q.args[0]], env[q.args[1]]
            c = measure.lemma1_refine(p, x, q.args[2], q.args[3])
            size = sum(cnt for _, cnt in c.cover_levels)
            lines.append(f"= bound {_fmt(c.bound)} cover {size} rounds {c.rounds}")
            cert = c.serialize()
        elif q.kind == "table1":
            lines.append("= s w mu fiber")
            for row in constructions.table1():
                lines.append(
                    f"  {row.block} {row.projected} {_fmt(row.cylinder_measure)} "
                    f"{_fmt(row.fiber_measure)}"
                )
        elif q.kind == "table2":
            lines.append("= s w")
            for s, w in constructions.table2():
                lines.append(f"  {s} {w}")
        elif q.kind == "phi":
            lines.append(f"= {constructions.phi(q.args[0])}")
        elif q.kind == "lusin":
            lt = constructions.lusin_tree(q.args[0])
            total = sum(lt.removed_mass)
            for n, removed in enumerate(lt.removed_mass):
                lines.append(
                    f"  stage {n}: size {len(lt.stages[n])} removed {_fmt(removed)}"
                )
            lines.append(f"= total removed {_fmt(total)}")
        elif q.kind == "product-check":
            p, r = env[q.args[0]], env[q.args[1]]
            prod = trees.product(p, r)
            checked = 0
            for w in trees.node_words(prod, clamp(q.args[2])):
                if len(w) % 2 == 0:
                    measure.product_measure(p, r, w)
                    checked += 1
            lines.append(f"= ok {checked} nodes checked")
        else:
            raise ValueError(f"unknown query kind {q.kind!r}")
        return True, lines, cert
    except CantorMeasureError as exc:
        for cls, kind in _ERROR_KINDS:
            if isinstance(exc, cls):
                return False, [f"! error({kind}): {exc}"], None
        return False, [f"! error(other): {exc}"], None


def run(
    script: Script,
    max_depth: Optional[int] = None,
    workers: int = 1,
) -> Report:
    """Execute all queries; one query's failure never aborts the rest."""
    env = builtin_env()
    env.update(dict(script.declarations))

    def job(q: Query):
        return _run_query(q, env, max_depth)

    if workers > 1 and len(script.queries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, script.queries))
    else:
        results = [job(q) for q in script.queries]

    blocks: List[str] = []
    certificates: List[str] = []
    all_ok = True
    for q, (ok, lines, cert) in zip(script.queries, results):
        blocks.append("\n".join([render_query(q)] + lines))
        if cert is not None:
            certificates.append(cert)
        all_ok = all_ok and ok
    text = "\n\n".join(blocks) + "\n" if blocks else ""
    return Report(text, 0 if all_ok else 3, tuple(certificates))


# ---------------------------------------------------------------------------
# Entry point


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cantormeasure",
        description="Exact measure computations on finitely presented perfect trees",
    )
    parser.add_argument("script", help="script file, or - for stdin")
    parser.add_argument("--certs", metavar="PATH", help="write certificates to PATH")
    parser.add_argument("--max-depth", type=int, default=None, help="global depth cap")
    parser.add_argument("--workers", type=int, default=1, help="query evaluation threads")
    args = parser.parse_args(argv)

    if args.script == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.script, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"cannot read script: {exc}", file=sys.stderr)
            return 1

    try:
        script = parse(text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except PresentationError as exc:
        print(f"invalid presentation: {exc}", file=sys.stderr)
        return 2

    report = run(script, max_depth=args.max_depth, workers=args.workers)
    sys.stdout.write(report.text)
    if args.certs and report.certificates:
        with open(args.certs, "w", encoding="utf-8") as fh:
            fh.write("\n".join(report.certificates))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
