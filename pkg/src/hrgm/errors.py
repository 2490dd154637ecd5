"""Exception types shared across the package.

Plain argument mistakes (bad indices, wrong lengths) raise the builtin
``ValueError``; the classes below mark conditions that depend on the data
or on numerical state, so callers such as the fitting loops and the CLI
can tell them apart.
"""


class HrgmError(Exception):
    """Base class for model-specific failures."""


class ParameterError(HrgmError):
    """A matrix is outside its parameter domain (definiteness, rank, feasibility)."""


class GraphError(HrgmError):
    """Invalid graph structure, coloring, or enumeration size guard."""


class DataError(HrgmError):
    """Degenerate data: constant margins, empty exceedance sets, undefined estimators."""
