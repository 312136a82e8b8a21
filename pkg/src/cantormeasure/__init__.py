"""Exact arithmetic on finitely presented perfect subtrees of Cantor space."""

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
from .words import (
    BinWord,
    EMPTY,
    NatWord,
    all_words,
    deinterleave,
    interleave,
    parse_words,
    select,
    subword,
    xor_sum,
)
from .trees import (
    BlockTree,
    ExplicitTree,
    FullTree,
    ProductTree,
    SilverTree,
    StaircaseTree,
    Subtree,
    TreePresentation,
    ValidationReport,
    children,
    contains,
    frontier_words,
    node_words,
    parse_tree_expr,
    product,
    silver_split,
    to_dsl,
    validate,
)
from .splits import (
    Classification,
    SplitProfile,
    canon_embed,
    classify,
    level,
    split_profile,
)
from .measure import (
    BoundCertificate,
    Rational,
    TraceResult,
    baire_measure,
    format_rational,
    lemma1_refine,
    mu_clopen,
    mu_cylinder,
    parse_rational,
    product_measure,
    trace_exact,
    trace_upper,
)
from .constructions import (
    LusinTree,
    NamedConstruction,
    ProjectionRow,
    lusin_tree,
    make_named,
    phi,
    phi_level_points,
    project_blocks,
    table1,
    table2,
    z2_independent,
)
from .certcheck import CheckResult, check_certificate
from .cli import Report, Script, parse, render_script, run

__all__ = [
    "BinWord", "EMPTY", "NatWord", "all_words", "deinterleave", "interleave",
    "parse_words", "select", "subword", "xor_sum",
    "BlockTree", "ExplicitTree", "FullTree", "ProductTree", "SilverTree",
    "StaircaseTree", "Subtree", "TreePresentation", "ValidationReport",
    "children", "contains", "frontier_words", "node_words", "parse_tree_expr",
    "product", "silver_split", "to_dsl", "validate",
    "Classification", "SplitProfile", "canon_embed", "classify", "level",
    "split_profile",
    "BoundCertificate", "Rational", "TraceResult", "baire_measure",
    "format_rational", "lemma1_refine", "mu_clopen", "mu_cylinder",
    "parse_rational", "product_measure", "trace_exact", "trace_upper",
    "LusinTree", "NamedConstruction", "ProjectionRow", "lusin_tree",
    "make_named", "phi", "phi_level_points", "project_blocks", "table1",
    "table2", "z2_independent",
    "CheckResult", "check_certificate",
    "Report", "Script", "parse", "render_script", "run",
    "CantorMeasureError", "CapExceeded", "HorizonExceeded", "IntegrityError",
    "NotANode", "ParseError", "PresentationError", "UnsupportedPresentation",
    "WitnessNotFound",
]
