"""Exception types shared across the toolkit."""


class EdgeEntropyError(Exception):
    """Base class for all toolkit errors."""


class ParseError(EdgeEntropyError):
    """A graph file contained a token that could not be parsed."""


class MissingLabelError(EdgeEntropyError):
    """A node referenced by the edge list has no label entry."""


class ShapeMismatchError(EdgeEntropyError):
    """Array dimensions are inconsistent with the graph or network."""


class DegenerateGraphError(EdgeEntropyError):
    """The graph has no edges usable by the requested metric."""


class ZeroRowError(EdgeEntropyError):
    """A count matrix row sums to zero and cannot be normalized."""


class ConfigMismatchError(EdgeEntropyError):
    """A graph does not match the generator config it is checked against."""


class EmptyMaskError(EdgeEntropyError):
    """A node mask selects no nodes."""


class NumericalError(EdgeEntropyError):
    """A non-finite value appeared during network evaluation."""


class PlanMismatchError(EdgeEntropyError):
    """Experiment results are incompatible with the requested aggregation."""
