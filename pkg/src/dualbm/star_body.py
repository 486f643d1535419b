r"""Star bodies through their radial functions.

A star body :math:`L` is stored as its radial function
:math:`\rho_L(u) = \max\{c \ge 0 : cu \in L\}` on the unit sphere.  Symbolic
shapes (:class:`Ball`, :class:`Ellipsoid`, :class:`HPolytope`,
:class:`CapBump`, :class:`RadialSumOf`) evaluate to :class:`RadialFunction`
samples on a :class:`~dualbm.sphere_grid.SphereGrid`.

The radial sum :math:`L \tilde{+} M` has radial function
:math:`\rho_L + \rho_M`; it is computed pointwise on samples by
:func:`radial_sum`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import BodyError, GridError, UnboundedPolytopeError
from .sphere_grid import SphereGrid

__all__ = [
    "GridFunction",
    "RadialFunction",
    "Ball",
    "Ellipsoid",
    "HPolytope",
    "CapBump",
    "RadialSumOf",
    "bump_profile",
    "radial_eval",
    "sample",
    "radial_sum",
    "scale",
    "volume",
    "essentially_disjoint",
    "body_from_dict",
    "body_to_dict",
]


# ---------------------------------------------------------------------------
# grid functions


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values attached to the nodes of a grid.

    Signed values are allowed; this is the finite stand-in for
    :math:`C(S^{n-1})`.  Arithmetic (``+``, ``-``, scalar ``*``) acts
    pointwise and returns plain :class:`GridFunction` objects.
    """

    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise GridError(f"expected {self.grid.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise BodyError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def _check(self, other):
        if not self.grid.same_as(other.grid):
            raise GridError("grid functions live on different grids")

    def __add__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.values - other.values)

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __mul__(self, c):
        return GridFunction(self.grid, float(c) * self.values)

    __rmul__ = __mul__

    def positive_part(self):
        return RadialFunction(self.grid, np.maximum(self.values, 0.0))

    def negative_part(self):
        return RadialFunction(self.grid, np.maximum(-self.values, 0.0))

    def support(self, tau=0.0):
        """Boolean mask of nodes where ``|f| > tau``."""
        return np.abs(self.values) > tau

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.size))


@dataclass(frozen=True, eq=False)
class RadialFunction(GridFunction):
    """Nonnegative samples of a radial function on a grid."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.values < 0):
            raise BodyError("radial function values must be nonnegative")


def _as_grid_function(f):
    if not isinstance(f, GridFunction):
        raise TypeError(f"expected a GridFunction, got {type(f).__name__}")
    return f


# ---------------------------------------------------------------------------
# shapes


def bump_profile(t):
    """``cos(pi t / 2)**2`` on ``[0, 1)``, zero for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    # Roundoff in the angle must not leave a 1e-30 tail on the cap boundary.
    inside = t < 1.0 - 1e-12
    return np.where(inside, np.cos(0.5 * np.pi * np.minimum(t, 1.0)) ** 2, 0.0)


class _Shape:
    dim = None

    def radial(self, u):
        """Vectorised radial function at the rows of ``u``."""
        raise NotImplementedError

    def _check_dim(self, u):
        if self.dim is not None and u.shape[-1] != self.dim:
            raise BodyError(f"shape lives in R^{self.dim}, got directions in R^{u.shape[-1]}")


@dataclass(frozen=True)
class Ball(_Shape):
    r: float = 1.0

    def __post_init__(self):
        if not self.r > 0 or not math.isfinite(self.r):
            raise BodyError(f"ball radius must be positive, got {self.r}")

    def radial(self, u):
        return np.full(u.shape[0], float(self.r))


@dataclass(frozen=True)
class Ellipsoid(_Shape):
    """Axis-aligned ellipsoid with the given semi-axes."""

    axes: tuple

    def __post_init__(self):
        axes = tuple(float(a) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        if len(axes) < 2 or any(not a > 0 or not math.isfinite(a) for a in axes):
            raise BodyError(f"ellipsoid semi-axes must be positive, got {axes}")

    @property
    def dim(self):
        return len(self.axes)

    def radial(self, u):
        self._check_dim(u)
        a = np.asarray(self.axes)
        return 1.0 / np.sqrt(np.sum((u / a) ** 2, axis=1))


@dataclass(frozen=True)
class HPolytope(_Shape):
    """``{x : A x <= b}`` with ``b > 0``; the origin is interior."""

    A: tuple
    b: tuple

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.ndim != 2 or b.shape != (A.shape[0],):
            raise BodyError("HPolytope needs A of shape (m, n) and b of shape (m,)")
        if np.any(b <= 0):
            raise BodyError("HPolytope offsets must be positive (origin in the interior)")
        object.__setattr__(self, "A", tuple(map(tuple, A.tolist())))
        object.__setattr__(self, "b", tuple(b.tolist()))

    @property
    def dim(self):
        return len(self.A[0])

    def radial(self, u):
        self._check_dim(u)
        A = np.asarray(self.A)
        b = np.asarray(self.b)
        dots = u @ A.T
        facing = dots > 1e-12
        ratios = np.where(facing, b / np.where(facing, dots, 1.0), np.inf)
        rho = ratios.min(axis=1)
        if not np.all(np.isfinite(rho)):
            i = int(np.flatnonzero(~np.isfinite(rho))[0])
            raise UnboundedPolytopeError(f"polytope is unbounded in direction {u[i].tolist()}")
        return rho


@dataclass(frozen=True)
class CapBump(_Shape):
    """Smooth bump of height ``h`` on the cap of angular radius ``alpha``.

    The radial function is ``h * bump_profile(angle(u, center) / alpha)``;
    it vanishes off the open cap, where the body reduces to the origin.
    """

    center: tuple
    alpha: float
    h: float = 1.0

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        nrm = np.linalg.norm(c)
        if c.ndim != 1 or c.size < 2 or not nrm > 0:
            raise BodyError("CapBump center must be a nonzero vector")
        object.__setattr__(self, "center", tuple((c / nrm).tolist()))
        if not 0 < self.alpha < math.pi:
            raise BodyError(f"CapBump width must lie in (0, pi), got {self.alpha}")
        if not self.h >= 0 or not math.isfinite(self.h):
            raise BodyError(f"CapBump height must be >= 0, got {self.h}")

    @property
    def dim(self):
        return len(self.center)

    def angle_to(self, u):
        chord = np.linalg.norm(u - np.asarray(self.center), axis=-1)
        return 2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0))

    def radial(self, u):
        self._check_dim(u)
        return self.h * bump_profile(self.angle_to(u) / self.alpha)


@dataclass(frozen=True)
class RadialSumOf(_Shape):
    """Radial combination ``sum_i lambda_i L_i``."""

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((float(lam), body) for lam, body in self.terms)
        object.__setattr__(self, "terms", terms)
        for lam, body in terms:
            if not lam >= 0 or not math.isfinite(lam):
                raise BodyError(f"radial-sum scales must be >= 0, got {lam}")
            if not isinstance(body, _Shape):
                raise BodyError(f"not a body spec: {body!r}")

    def radial(self, u):
        out = np.zeros(u.shape[0])
        for lam, body in self.terms:
            out = out + lam * body.radial(u)
        return out


def radial_eval(spec, u):
    """Radial function of ``spec`` at the unit vector ``u``."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise BodyError(f"direction must be a unit vector, got {u.tolist()}")
    return float(spec.radial(u[None, :])[0])


def sample(spec, grid):
    """Sample ``spec`` at every grid node."""
    spec._check_dim(grid.nodes)
    return RadialFunction(grid, spec.radial(grid.nodes))


# ---------------------------------------------------------------------------
# operations on samples


def radial_sum(f, g):
    _as_grid_function(f)._check(_as_grid_function(g))
    return RadialFunction(f.grid, f.values + g.values)


def scale(f, lam):
    if not lam >= 0:
        raise BodyError(f"scale factor must be >= 0, got {lam}")
    return RadialFunction(f.grid, float(lam) * f.values)


def _power_product(fs):
    """Pointwise product of the sample vectors, left to right."""
    out = fs[0].values
    for f in fs[1:]:
        out = out * f.values
    return out


def volume(f):
    r"""Volume ``(1/n) sum_i w_i f_i^n`` of the body with radial samples ``f``.

    Accepts signed grid functions too, in which case the value is the
    degree-``n`` form ``(1/n) \int f^n``.
    """
    _as_grid_function(f)
    n = f.grid.dim
    return math.fsum(f.grid.weights * _power_product([f] * n)) / n


def essentially_disjoint(f, g, tau=0.0):
    """True when ``min(f, g) <= tau`` at every node, i.e. ``L ∩ M = {o}``."""
    _as_grid_function(f)._check(_as_grid_function(g))
    if tau < 0:
        raise BodyError("threshold must be >= 0")
    return bool(np.all(np.minimum(f.values, g.values) <= tau))


# ---------------------------------------------------------------------------
# JSON


def body_from_dict(data):
    """Parse a body spec such as ``{"shape": "ball", "r": 1.0}``."""
    if not isinstance(data, dict) or "shape" not in data:
        raise BodyError(f"body spec must be an object with a 'shape' field, got {data!r}")
    shape = data["shape"]
    try:
        if shape == "ball":
            return Ball(float(data.get("r", 1.0)))
        if shape == "ellipsoid":
            return Ellipsoid(tuple(data["axes"]))
        if shape == "hpolytope":
            return HPolytope(data["A"], data["b"])
        if shape == "capbump":
            return CapBump(tuple(data["center"]), float(data["alpha"]), float(data.get("h", 1.0)))
        if shape == "radialsum":
            return RadialSumOf(
                tuple((float(t["lambda"]), body_from_dict(t["body"])) for t in data["terms"])
            )
    except KeyError as exc:
        raise BodyError(f"{shape} spec is missing field {exc.args[0]!r}") from None
    raise BodyError(f"unknown shape {shape!r}")


def body_to_dict(spec):
    if isinstance(spec, Ball):
        return {"shape": "ball", "r": spec.r}
    if isinstance(spec, Ellipsoid):
        return {"shape": "ellipsoid", "axes": list(spec.axes)}
    if isinstance(spec, HPolytope):
        return {"shape": "hpolytope", "A": [list(r) for r in spec.A], "b": list(spec.b)}
    if isinstance(spec, CapBump):
        return {"shape": "capbump", "center": list(spec.center), "alpha": spec.alpha, "h": spec.h}
    if isinstance(spec, RadialSumOf):
        return {
            "shape": "radialsum",
            "terms": [{"lambda": lam, "body": body_to_dict(b)} for lam, b in spec.terms],
        }
    raise BodyError(f"not a body spec: {spec!r}")
