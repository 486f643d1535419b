r"""Finite polymeasures as tensors over partition atoms.

With a finite partition :math:`A_0,\dots,A_{k-1}` of the grid nodes, an
``m``-polymeasure :math:`\gamma` is determined by the ``k**m`` numbers
:math:`\gamma(A_{j_1},\dots,A_{j_m})`; its value on unions of atoms follows
by separate additivity.  The order-1 case is an ordinary signed measure.

Sums that must agree exactly across code paths (evaluation, product
measure masses, variation) go through :func:`math.fsum`, which is correctly
rounded and therefore independent of summation order.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import GridError, NotDiagonalError, SizeCapError

__all__ = [
    "FinitePartition",
    "PolyMeasure",
    "ProductMeasure",
    "SemivariationResult",
    "DiagonalCheck",
    "evaluate",
    "variation",
    "semivariation",
    "integrate_simple",
    "jordan_decomposition",
    "product_measure",
    "is_diagonal",
    "diagonal_measure",
    "coarsen",
    "EXACT_CAP",
]

EXACT_CAP = 24
RANDOMIZED_SAMPLE_CAP = 10**6


@dataclass(frozen=True, eq=False)
class FinitePartition:
    """Disjoint nonempty node-index sets covering every node of ``grid``."""

    grid: object
    atoms: tuple

    def __post_init__(self):
        atoms = tuple(tuple(sorted(int(i) for i in a)) for a in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        seen = [i for a in atoms for i in a]
        if any(len(a) == 0 for a in atoms):
            raise GridError("partition atoms must be nonempty")
        if len(seen) != len(set(seen)):
            raise GridError("partition atoms must be pairwise disjoint")
        if sorted(seen) != list(range(self.grid.size)):
            raise GridError("partition atoms must cover every grid node exactly once")

    def __len__(self):
        return len(self.atoms)

    @classmethod
    def node_level(cls, grid):
        """One atom per grid node."""
        return cls(grid, tuple((i,) for i in range(grid.size)))

    @property
    def is_node_level(self):
        return all(len(a) == 1 for a in self.atoms) and len(self.atoms) == self.grid.size

    def atom_of(self):
        """Array mapping each node index to its atom index."""
        out = np.empty(self.grid.size, dtype=int)
        for j, a in enumerate(self.atoms):
            out[list(a)] = j
        return out


@dataclass(frozen=True, eq=False)
class PolyMeasure:
    """Order-``m`` polymeasure on ``k`` atoms.

    Parameters
    ----------
    tensor : array_like, shape (k,) * m
        ``tensor[j_1, ..., j_m] = gamma(atom_{j_1}, ..., atom_{j_m})``.
    partition : FinitePartition, optional
        The atoms on a grid.  ``None`` for abstract atoms (e.g. tensors read
        from JSON without a grid).
    """

    tensor: np.ndarray
    partition: FinitePartition = None

    def __post_init__(self):
        t = np.array(self.tensor, dtype=float)
        if t.ndim < 1:
            raise GridError("polymeasure order must be >= 1")
        if len(set(t.shape)) != 1:
            raise GridError(f"tensor must have equal side lengths, got shape {t.shape}")
        if t.shape[0] < 1:
            raise GridError("polymeasure needs at least one atom")
        if not np.all(np.isfinite(t)):
            raise GridError("tensor entries must be finite")
        if self.partition is not None and len(self.partition) != t.shape[0]:
            raise GridError(
                f"tensor has {t.shape[0]} atoms per axis, partition has {len(self.partition)}"
            )
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)

    @property
    def order(self):
        return self.tensor.ndim

    @property
    def atoms(self):
        return self.tensor.shape[0]

    def with_tensor(self, tensor):
        return PolyMeasure(tensor, self.partition)

    def to_dict(self):
        return {
            "order": self.order,
            "atoms": self.atoms,
            "entries": self.tensor.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data, partition=None):
        try:
            m, k, entries = int(data["order"]), int(data["atoms"]), data["entries"]
        except KeyError as exc:
            raise GridError(f"tensor JSON is missing field {exc.args[0]!r}") from None
        if m < 1 or k < 1:
            raise GridError("order and atoms must be >= 1")
        try:
            arr = np.asarray(entries, dtype=float)
        except ValueError:
            raise GridError("tensor entries must form a rectangular numeric array") from None
        # Entries may be nested with shape (k,)*m or flat in row-major order.
        if arr.shape != (k,) * m and arr.shape != (k**m,):
            raise GridError(f"expected {k**m} entries for order {m} on {k} atoms, got shape {arr.shape}")
        return cls(arr.reshape((k,) * m), partition)


def _check_sets(gamma, sets):
    sets = [sorted(set(int(j) for j in s)) for s in sets]
    if len(sets) != gamma.order:
        raise GridError(f"expected {gamma.order} sets, got {len(sets)}")
    for s in sets:
        if any(j < 0 or j >= gamma.atoms for j in s):
            raise GridError(f"atom index out of range 0..{gamma.atoms - 1}: {s}")
    return sets


def evaluate(gamma, sets):
    """``gamma(U_1, ..., U_m)`` for unions of atoms given by index sets."""
    sets = _check_sets(gamma, sets)
    if any(len(s) == 0 for s in sets):
        return 0.0
    return math.fsum(gamma.tensor[np.ix_(*sets)].ravel())


def variation(gamma):
    """Total variation at ``(S, ..., S)``: sum of absolute entries."""
    return math.fsum(np.abs(gamma.tensor).ravel())


@dataclass(frozen=True)
class SemivariationResult:
    value: float
    status: str  # "exact" or "lower_bound"
    signs: tuple = None

    def __post_init__(self):
        if self.signs is not None:
            signs = tuple(tuple(float(x) for x in s) for s in self.signs)
            object.__setattr__(self, "signs", signs)

    def __float__(self):
        return self.value


def _sign_matrix(k):
    """All ``2**k`` sign vectors as rows."""
    return np.array(list(itertools.product((1.0, -1.0), repeat=k)))


def _semivariation_exact(t):
    m, k = t.ndim, t.shape[0]
    if m == 1:
        return math.fsum(np.abs(t)), (tuple(np.where(t >= 0, 1.0, -1.0)),)
    S = _sign_matrix(k)
    # A global sign flip of the first factor leaves |.| unchanged.
    first = S[S[:, 0] > 0]
    best, best_signs = -1.0, None
    for s1 in first:
        X = np.tensordot(s1, t, axes=(0, 0)).reshape(1, -1)
        for _ in range(m - 2):
            B = X.shape[0]
            X = np.einsum("sj,bjr->bsr", S, X.reshape(B, k, -1)).reshape(B * len(S), -1)
        scores = np.abs(X).sum(axis=1)
        i = int(np.argmax(scores))
        if scores[i] > best:
            best = float(scores[i])
            rest = np.unravel_index(i, (len(S),) * (m - 2)) if m > 2 else ()
            last = np.where(X[i] >= 0, 1.0, -1.0)
            best_signs = (tuple(s1),) + tuple(tuple(S[r]) for r in rest) + (tuple(last),)
    return _contract_signs(t, best_signs), best_signs


def _contract_signs(t, signs):
    """``|sum a_1[j_1]...a_m[j_m] t[j_1..j_m]|`` with a correctly rounded sum."""
    w = np.ones(())
    for s in signs:
        w = np.multiply.outer(w, np.asarray(s))
    return abs(math.fsum((w * t).ravel()))


def _best_response(t, signs, axis):
    """Optimal signs on ``axis`` given the others (closed form)."""
    X = np.moveaxis(t, axis, -1)
    others = [s for i, s in enumerate(signs) if i != axis]
    for s in others:
        X = np.tensordot(np.asarray(s), X, axes=(0, 0))
    return tuple(np.where(X >= 0, 1.0, -1.0))


def _semivariation_randomized(t, rng, samples):
    m, k = t.ndim, t.shape[0]
    batch = max(1, min(samples, 4096))
    best_val, best_signs = -1.0, None
    drawn = 0
    while drawn < samples:
        b = min(batch, samples - drawn)
        A = rng.choice((-1.0, 1.0), size=(b, m - 1, k))
        X = t.reshape(k, -1)
        X = np.einsum("bj,jr->br", A[:, 0], X)
        for i in range(1, m - 1):
            X = np.einsum("bj,bjr->br", A[:, i], X.reshape(b, k, -1))
        scores = np.abs(X).sum(axis=1)
        i = int(np.argmax(scores))
        if scores[i] > best_val:
            best_val = float(scores[i])
            last = np.where(X[i] >= 0, 1.0, -1.0)
            best_signs = tuple(tuple(a) for a in A[i]) + (tuple(last),)
        drawn += b
    # Local improvement: coordinate-wise best responses until no factor changes.
    signs = list(best_signs)
    for _ in range(100 * m):
        changed = False
        for axis in range(m):
            new = _best_response(t, signs, axis)
            if new != signs[axis]:
                trial = signs.copy()
                trial[axis] = new
                if _contract_signs(t, trial) > _contract_signs(t, signs):
                    signs = trial
                    changed = True
        if not changed:
            break
    return _contract_signs(t, signs), tuple(signs)


def semivariation(gamma, mode="exact", *, seed=0, samples=None):
    """Semivariation at ``(S, ..., S)``.

    The supremum over coefficients in ``[-1, 1]`` is attained at sign
    vectors because the form is affine in each coefficient.  ``exact`` mode
    enumerates signs on the first ``m - 1`` factors and picks the last
    factor in closed form; it is limited to ``m * k <= 24``.  ``randomized``
    mode samples signs, improves the best sample by coordinate ascent and
    reports a lower bound.

    Returns
    -------
    SemivariationResult
    """
    t = gamma.tensor
    m, k = t.ndim, t.shape[0]
    if mode == "exact":
        if m * k > EXACT_CAP:
            raise SizeCapError(f"exact semivariation needs order*atoms <= {EXACT_CAP}, got {m * k}")
        value, signs = _semivariation_exact(t)
        return SemivariationResult(value, "exact", signs)
    if mode == "randomized":
        if m == 1:
            value, signs = _semivariation_exact(t)
            return SemivariationResult(value, "exact", signs)
        if samples is None:
            samples = min(10 * 2 ** min(m * k, 20), RANDOMIZED_SAMPLE_CAP)
        rng = np.random.default_rng(seed)
        value, signs = _semivariation_randomized(t, rng, int(samples))
        return SemivariationResult(value, "lower_bound", signs)
    raise ValueError(f"unknown semivariation mode {mode!r}")


def _atom_values(gamma, f):
    """Per-atom values of a simple function given per atom or per node."""
    v = np.asarray(getattr(f, "values", f), dtype=float)
    part = gamma.partition
    if part is not None and v.shape == (part.grid.size,) and not part.is_node_level:
        out = np.empty(len(part))
        for j, atom in enumerate(part.atoms):
            vals = v[list(atom)]
            if np.any(vals != vals[0]):
                raise GridError(f"function is not constant on atom {j}")
            out[j] = vals[0]
        return out
    if v.shape != (gamma.atoms,):
        raise GridError(f"simple function needs {gamma.atoms} atom values, got shape {v.shape}")
    return v


def integrate_simple(gamma, simples):
    r"""Elementary integral :math:`\int (f_1,\dots,f_m)\,d\gamma` of simple functions.

    Each function is given by its value on every atom, or (when the
    partition is known) on every node, in which case it must be constant on
    each atom.
    """
    simples = list(simples)
    if len(simples) != gamma.order:
        raise GridError(f"expected {gamma.order} functions, got {len(simples)}")
    vals = [_atom_values(gamma, f) for f in simples]
    X = gamma.tensor
    for v in reversed(vals):
        X = X @ v
    return float(X)


def jordan_decomposition(gamma):
    """Entrywise split ``gamma = pos - neg`` into nonnegative polymeasures."""
    t = gamma.tensor
    return gamma.with_tensor(np.maximum(t, 0.0)), gamma.with_tensor(np.maximum(-t, 0.0))


@dataclass(frozen=True, eq=False)
class ProductMeasure:
    """Measure on the ``k**m`` product atoms ``A_{j_1} x ... x A_{j_m}``."""

    masses: np.ndarray
    atoms: int
    order: int

    def mass(self, sets):
        """Mass of the rectangle ``U_1 x ... x U_m``."""
        if len(sets) != self.order:
            raise GridError(f"expected {self.order} sets, got {len(sets)}")
        sets = [sorted(set(int(j) for j in s)) for s in sets]
        if any(len(s) == 0 for s in sets):
            return 0.0
        flat = [np.ravel_multi_index(idx, (self.atoms,) * self.order) for idx in itertools.product(*sets)]
        return math.fsum(self.masses[flat])

    def total(self):
        return math.fsum(self.masses)


def product_measure(gamma):
    """The measure on product atoms carrying the tensor entries as masses."""
    masses = gamma.tensor.ravel().copy()
    masses.setflags(write=False)
    return ProductMeasure(masses, gamma.atoms, gamma.order)


@dataclass(frozen=True)
class DiagonalCheck:
    is_diagonal: bool
    witness: tuple = None
    magnitude: float = 0.0

    def __bool__(self):
        return self.is_diagonal


def _offdiagonal_mask(m, k):
    idx = np.indices((k,) * m)
    return np.any(idx != idx[0], axis=0)


def is_diagonal(gamma, tol=1e-12):
    """Whether every entry with not-all-equal indices is within ``tol`` of 0.

    On failure the witness is the index tuple of a largest off-diagonal
    entry in magnitude.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    t = gamma.tensor
    if t.ndim == 1:
        return DiagonalCheck(True)
    off = np.where(_offdiagonal_mask(t.ndim, t.shape[0]), np.abs(t), -1.0)
    flat = int(np.argmax(off))
    mag = float(off.ravel()[flat])
    if mag <= tol:
        return DiagonalCheck(True)
    witness = tuple(int(j) for j in np.unravel_index(flat, t.shape))
    return DiagonalCheck(False, witness, mag)


def diagonal_measure(gamma, tol=1e-12):
    """Masses ``mu_j = tensor[j, ..., j]`` of a diagonal polymeasure."""
    check = is_diagonal(gamma, tol)
    if not check:
        raise NotDiagonalError(
            f"polymeasure has off-diagonal entry {check.magnitude:.3g} at {check.witness}",
            check.witness,
        )
    t = gamma.tensor
    if t.ndim == 1:
        return t.copy()
    return np.array([t[(j,) * t.ndim] for j in range(t.shape[0])])


def coarsen(gamma, groups):
    """Merge atoms: ``groups`` lists, for each new atom, the old atoms in it."""
    groups = [list(g) for g in groups]
    flat = sorted(j for g in groups for j in g)
    if flat != list(range(gamma.atoms)) or any(not g for g in groups):
        raise GridError("groups must partition the atom indices")
    M = np.zeros((len(groups), gamma.atoms))
    for a, g in enumerate(groups):
        M[a, g] = 1.0
    t = gamma.tensor
    for axis in range(t.ndim):
        t = np.moveaxis(np.tensordot(M, t, axes=(1, axis)), 0, axis)
    part = None
    if gamma.partition is not None:
        part = FinitePartition(
            gamma.partition.grid,
            tuple(tuple(i for j in g for i in gamma.partition.atoms[j]) for g in groups),
        )
    return PolyMeasure(t, part)
