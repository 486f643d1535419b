r"""Quadrature grids on the unit sphere :math:`S^{n-1}`.

A :class:`SphereGrid` is a finite set of unit vectors with strictly positive
weights whose sum is the surface area :math:`|S^{n-1}|` (``2*pi`` on the
circle, ``4*pi`` on the 2-sphere).  Integrals over the sphere become weighted
sums

.. math:: \int_{S^{n-1}} f(u)\,du \approx \sum_i w_i f(u_i).

Two families are provided:

* ``dim=2``: ``k`` equally spaced angles :math:`2\pi j/k` with weights
  :math:`2\pi/k`.  Exact for trigonometric polynomials of degree below ``k``.
* ``dim=3``: Gauss-Legendre nodes in :math:`\cos\theta` (``k`` rings) times
  ``2k`` uniform azimuths.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation as _ScipyRotation

from .exceptions import GridError, GridNotClosedError

__all__ = [
    "SphereGrid",
    "Rotation",
    "make_grid",
    "integrate",
    "grid_permutation",
    "rotation_2d",
    "rotation_3d",
    "cyclic_rotations",
    "sphere_area",
    "min_angular_separation",
]

NODE_MATCH_TOL = 1e-9


def sphere_area(dim):
    """Surface area of the unit sphere in ``R^dim``."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Quadrature nodes and weights on :math:`S^{dim-1}`.

    Parameters
    ----------
    dim : int
        Ambient dimension ``n >= 2``.
    nodes : array_like, shape (N, dim)
        Unit vectors.
    weights : array_like, shape (N,)
        Positive weights summing to the sphere area.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        weights = _frozen(self.weights)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if self.dim < 2:
            raise GridError(f"dimension must be >= 2, got {self.dim}")
        if nodes.ndim != 2 or nodes.shape[1] != self.dim:
            raise GridError(f"nodes must have shape (N, {self.dim}), got {nodes.shape}")
        if weights.shape != (nodes.shape[0],):
            raise GridError("one weight per node required")
        if not np.all(np.isfinite(nodes)) or not np.all(np.isfinite(weights)):
            raise GridError("nodes and weights must be finite")
        norms = np.linalg.norm(nodes, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise GridError("every node must be a unit vector")
        if np.any(weights <= 0):
            raise GridError("weights must be strictly positive")
        area = sphere_area(self.dim)
        if abs(math.fsum(weights) - area) > 1e-10:
            raise GridError(
                f"weights sum to {math.fsum(weights)!r}, expected |S^{self.dim - 1}| = {area!r}"
            )
        if len(nodes) > 1:
            d, _ = cKDTree(nodes).query(nodes, k=2)
            if np.min(d[:, 1]) <= 0.0:
                raise GridError("nodes must be pairwise distinct")

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def size(self):
        return self.nodes.shape[0]

    def same_as(self, other):
        """True if ``other`` holds the same nodes and weights."""
        if self is other:
            return True
        return (
            isinstance(other, SphereGrid)
            and self.dim == other.dim
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def to_dict(self):
        return {
            "dim": int(self.dim),
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(int(data["dim"]), data["nodes"], data["weights"])
        except KeyError as exc:
            raise GridError(f"grid JSON is missing field {exc.args[0]!r}") from None


@dataclass(frozen=True, eq=False)
class Rotation:
    """A proper rotation of ``R^n`` given by its matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GridError("rotation matrix must be square")
        if np.max(np.abs(m.T @ m - np.eye(m.shape[0]))) > 1e-12:
            raise GridError("rotation matrix must be orthogonal")
        if abs(np.linalg.det(m) - 1.0) > 1e-12:
            raise GridError("rotation matrix must have determinant +1")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.matrix.T


def rotation_2d(angle):
    c, s = math.cos(angle), math.sin(angle)
    return Rotation(np.array([[c, -s], [s, c]]))


def rotation_3d(axis, angle):
    """Rotation of ``R^3`` by ``angle`` about ``axis`` (right-hand rule)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return Rotation(_ScipyRotation.from_rotvec(angle * axis).as_matrix())


def make_grid(dim, resolution):
    """Build the standard quadrature grid.

    Parameters
    ----------
    dim : {2, 3}
        Ambient dimension.
    resolution : int
        ``k >= 4``.  ``k`` nodes on the circle; ``k`` polar rings times
        ``2k`` azimuths on the 2-sphere.

    Returns
    -------
    SphereGrid

    Examples
    --------
    >>> g = make_grid(2, 4)
    >>> g.weights.tolist() == [math.pi / 2] * 4
    True
    """
    if dim not in (2, 3):
        raise GridError(f"unsupported dimension {dim}; only 2 and 3 are available")
    if int(resolution) != resolution or resolution < 4:
        raise GridError(f"resolution must be an integer >= 4, got {resolution}")
    k = int(resolution)
    if dim == 2:
        theta = 2.0 * np.pi * np.arange(k) / k
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        weights = np.full(k, 2.0 * np.pi / k)
        return SphereGrid(2, nodes, weights)

    x, wx = np.polynomial.legendre.leggauss(k)
    phi = 2.0 * np.pi * np.arange(2 * k) / (2 * k)
    sin_t = np.sqrt(1.0 - x**2)
    X = np.outer(sin_t, np.cos(phi))
    Y = np.outer(sin_t, np.sin(phi))
    Z = np.repeat(x[:, None], 2 * k, axis=1)
    nodes = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    weights = np.repeat(wx * (np.pi / k), 2 * k)
    return SphereGrid(3, nodes, weights)


def integrate(grid, values):
    """Quadrature sum ``sum_i w_i * values_i``.

    The sum is accumulated with :func:`math.fsum`, so it is correctly
    rounded and independent of node order.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.size,):
        raise GridError(f"expected {grid.size} values, got shape {values.shape}")
    return math.fsum(grid.weights * values)


def grid_permutation(grid, rot, tol=NODE_MATCH_TOL):
    """Index permutation induced by a rotation that preserves the grid.

    Returns an integer array ``perm`` with ``rot @ nodes[i] == nodes[perm[i]]``
    up to ``tol`` in Euclidean distance.

    Raises
    ------
    GridNotClosedError
        If some rotated node has no partner, or weights are not preserved.
    """
    if rot.dim != grid.dim:
        raise GridError(f"rotation acts on R^{rot.dim}, grid lives in R^{grid.dim}")
    moved = rot.apply(grid.nodes)
    dist, perm = cKDTree(grid.nodes).query(moved)
    bad = np.flatnonzero(dist > tol)
    if bad.size:
        i = int(bad[0])
        raise GridNotClosedError(
            f"grid not closed under rotation: node {i} maps {dist[i]:.3g} away from the nearest node",
            node=i,
        )
    if len(np.unique(perm)) != len(perm):
        raise GridNotClosedError("rotation does not induce a bijection of nodes", node=0)
    drift = np.abs(grid.weights[perm] - grid.weights)
    if np.max(drift) > 1e-12:
        i = int(np.argmax(drift))
        raise GridNotClosedError(f"rotation does not preserve the weight of node {i}", node=i)
    return perm


def cyclic_rotations(grid):
    """The full cyclic rotation group of a uniform circle grid."""
    if grid.dim != 2:
        raise GridError("cyclic rotation group is defined for dim=2 grids only")
    k = grid.size
    return [rotation_2d(2.0 * np.pi * j / k) for j in range(k)]


def min_angular_separation(grid):
    """Smallest angle between two distinct nodes."""
    d, _ = cKDTree(grid.nodes).query(grid.nodes, k=2)
    chord = float(np.min(d[:, 1]))
    return 2.0 * math.asin(min(1.0, chord / 2.0))
