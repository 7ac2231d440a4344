"""Static set-sharing analysis for a Prolog subset.

Four abstract domains (sharing, sharing-freeness, clique-sharing,
clique-sharing-freeness) under one goal-dependent fixpoint engine, with
clique detection and widening to keep representations small.
"""

from .cliques import CliquePair, extend_pair, extend_parts, worstcase_success
from .domains import BOTTOM, DOMAIN_NAMES, get_domain, is_bottom
from .engine import AnalysisError, AnalysisResult, EngineOptions, analyze
from .freeness import CliqueSharingFreeness, SharingFreeness
from .normalize import (
    NormalizePolicy,
    detect_cliques,
    minimize,
    normalize,
    regularize,
    widen,
)
from .parser import ParseError, parse_file, parse_program
from .report import analyze_to_report, build_report, render_table
from .sharing import SharingSet
from .terms import ContractError, Program, Struct, Term, Var
from .verify import VerifyReport, run_verify

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "AnalysisResult",
    "BOTTOM",
    "CliquePair",
    "CliqueSharingFreeness",
    "ContractError",
    "DOMAIN_NAMES",
    "EngineOptions",
    "NormalizePolicy",
    "ParseError",
    "Program",
    "SharingFreeness",
    "SharingSet",
    "Struct",
    "Term",
    "Var",
    "VerifyReport",
    "analyze",
    "analyze_to_report",
    "build_report",
    "detect_cliques",
    "extend_pair",
    "extend_parts",
    "get_domain",
    "is_bottom",
    "minimize",
    "normalize",
    "parse_file",
    "parse_program",
    "regularize",
    "render_table",
    "run_verify",
    "widen",
    "worstcase_success",
    "__version__",
]
