"""Terms, theory files and elaboration."""

from meloid.core.lexer import ParseError
from meloid.core.syntax import TheoryFile, parse_theory, pretty_theory
from meloid.core.terms import (
    App,
    Equation,
    SequentGoal,
    Term,
    Var,
    apply_subst,
    free_vars,
    match,
    pretty_equation,
    pretty_goal,
    pretty_term,
    term_size,
)
from meloid.core.theory import (
    Constructor,
    DatatypeDef,
    ElaborationError,
    FunctionDef,
    Lemma,
    TheoryContext,
    elaborate,
    load_theory,
)

__all__ = [
    "App",
    "Constructor",
    "DatatypeDef",
    "ElaborationError",
    "Equation",
    "FunctionDef",
    "Lemma",
    "ParseError",
    "SequentGoal",
    "Term",
    "TheoryContext",
    "TheoryFile",
    "Var",
    "apply_subst",
    "elaborate",
    "free_vars",
    "load_theory",
    "match",
    "parse_theory",
    "pretty_equation",
    "pretty_goal",
    "pretty_term",
    "pretty_theory",
    "term_size",
]
