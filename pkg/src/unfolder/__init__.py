"""Workbench for unfolding-based semantics of lazy functional programs.

Parse guarded-rule programs, compute their interpretation sequence by
iterated unfolding, evaluate goals both by unfolding and by a small-step
interpreter, and run the derived analyses: declarative debugging over
execution dependence trees, rule coverage, and abstract interpretation
driven by constructor-replacing folds.
"""

from .config import Config, DEFAULT
from .engine import (
    Fact,
    Interpretation,
    clean,
    fixpoint,
    is_complete,
    is_productive,
    make_fact,
    more_specific,
    overlaps,
    rename_apart,
    resolve_clean_mode,
    satisfiable,
    u_step,
    umatch,
    unfold,
)
from .machine import UevalResult, contains_bot, normalize, small_step, ueval
from .parser import ParseError, Program, Rule, parse_expr, parse_program
from .prim import MatchResult, eval_expr, hnf, match, nunif, static_match
from .printer import expr_str, fact_str, interp_json, interp_listing
from .syntax import BOT, CApp, Expr, FApp, Lit, PApp, Signature, Var
from .validate import Violation, validate_program

__all__ = [
    "BOT", "CApp", "Config", "DEFAULT", "Expr", "FApp", "Fact",
    "Interpretation", "Lit", "MatchResult", "PApp", "ParseError", "Program",
    "Rule", "Signature", "UevalResult", "Var", "Violation", "clean",
    "contains_bot", "eval_expr", "expr_str", "fact_str", "fixpoint", "hnf",
    "interp_json", "interp_listing", "is_complete", "is_productive",
    "make_fact", "match", "more_specific", "normalize", "nunif", "overlaps",
    "parse_expr", "parse_program", "rename_apart", "resolve_clean_mode",
    "satisfiable", "small_step", "static_match", "u_step", "ueval", "umatch",
    "unfold", "validate_program",
]
