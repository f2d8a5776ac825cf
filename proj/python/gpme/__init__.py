from ._core import (
    ConvergenceError,
    GpmeError,
    Graph,
    HypothesisRefusal,
    LazyGraph,
    Nonlinearity,
    ParseError,
    apply_L,
    bracket_plus,
    check,
    evolve,
    family,
    heat_exact,
    laplacian,
    norm,
    resolve,
    suites,
)

__all__ = [
    "ConvergenceError",
    "GpmeError",
    "Graph",
    "HypothesisRefusal",
    "LazyGraph",
    "Nonlinearity",
    "ParseError",
    "apply_L",
    "bracket_plus",
    "check",
    "evolve",
    "family",
    "heat_exact",
    "laplacian",
    "norm",
    "resolve",
    "suites",
]
