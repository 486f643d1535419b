"""Exception types raised by dualbm."""


class DualBMError(Exception):
    """Base class for all dualbm errors."""


class GridError(DualBMError, ValueError):
    """Unsupported grid parameters or mismatched grids."""


class GridNotClosedError(GridError):
    """A rotation does not map the grid node set onto itself.

    Attributes
    ----------
    node : int
        Index of the first node whose image has no match.
    """

    def __init__(self, message, node):
        super().__init__(message)
        self.node = node


class BodyError(DualBMError, ValueError):
    """Invalid star body description or evaluation request."""


class UnboundedPolytopeError(BodyError):
    """An H-polytope is unbounded in some sampled direction."""


class SizeCapError(DualBMError, ValueError):
    """Exact computation requested beyond its size cap."""


class NotDiagonalError(DualBMError, ValueError):
    """A polymeasure has an off-diagonal entry above tolerance.

    Attributes
    ----------
    witness : tuple of int
        Atom indices of a maximal-magnitude off-diagonal entry.
    """

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = tuple(witness)


class ProbeFailure(DualBMError, ValueError):
    """A sampled probe contradicted a declared property of a functional.

    Attributes
    ----------
    property : str
        Name of the violated property.
    witness : object
        Inputs reproducing the violation.
    violation : float
        Size of the observed discrepancy.
    """

    def __init__(self, message, property, witness=None, violation=float("nan")):
        super().__init__(message)
        self.property = property
        self.witness = witness
        self.violation = violation


class InvarianceError(DualBMError, ValueError):
    """A measure is not invariant under a grid permutation.

    Attributes
    ----------
    node : int
        Node where the largest discrepancy was found.
    residual : float
        ``max_i |mu[perm[i]] - mu[i]|`` over all permutations.
    """

    def __init__(self, message, node, residual):
        super().__init__(message)
        self.node = node
        self.residual = residual


class TransitivityError(DualBMError, ValueError):
    """A rotation set does not act transitively on grid nodes."""


class SeparationError(DualBMError, ValueError):
    """Grid nodes are too close to place disjoint bumps on them."""
