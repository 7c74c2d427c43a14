"""Tableau-based satisfiability for converse PDL extended with
automaton-specified program inclusion axioms."""

from .automata import (
    AutomatonError,
    FiniteAutomaton,
    LogicSpec,
    accepts,
    compile_closed,
    compile_program,
    derive_converse,
    enumerate_words,
    identity_logic,
)
from .consistency import OnTheFlyChecker, solve_batch, solve_onthefly
from .parsing import ParseError, Problem, parse_formula, parse_problem
from .semantics import (
    ExtractionError,
    KripkeModel,
    ModelGraph,
    bounded_sat,
    close_model,
    eval_formula,
    extract_model,
    model_graph_to_kripke,
    naive_check,
    verify_extraction,
)
from .solver import SolveResult, solve
from .syntax import Context, Formula, Program, bsf, cls, negate_ncnf, to_ncnf
from .tableau import ResourceLimitError, Status, Tableau, check_invariants

__all__ = [
    "AutomatonError",
    "Context",
    "ExtractionError",
    "FiniteAutomaton",
    "Formula",
    "KripkeModel",
    "LogicSpec",
    "ModelGraph",
    "OnTheFlyChecker",
    "ParseError",
    "Problem",
    "Program",
    "ResourceLimitError",
    "SolveResult",
    "Status",
    "Tableau",
    "accepts",
    "bounded_sat",
    "bsf",
    "check_invariants",
    "close_model",
    "cls",
    "compile_closed",
    "compile_program",
    "derive_converse",
    "enumerate_words",
    "eval_formula",
    "extract_model",
    "identity_logic",
    "model_graph_to_kripke",
    "naive_check",
    "negate_ncnf",
    "parse_formula",
    "parse_problem",
    "solve",
    "solve_batch",
    "solve_onthefly",
    "to_ncnf",
    "verify_extraction",
]

__version__ = "0.1.0"
