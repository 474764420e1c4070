"""Survey propagation, belief propagation, and cover combinatorics for CNF."""

from .errors import ContradictionError, ParseError
from .formula import (
    FactorGraph,
    Formula,
    build_factor_graph,
    evaluate,
    generate_random_3sat,
    parse_dimacs,
    render_dimacs,
    simplify,
)

__version__ = "0.1.0"

__all__ = [
    "ContradictionError",
    "ParseError",
    "FactorGraph",
    "Formula",
    "build_factor_graph",
    "evaluate",
    "generate_random_3sat",
    "parse_dimacs",
    "render_dimacs",
    "simplify",
    "__version__",
]
