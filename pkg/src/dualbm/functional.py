r"""Functionals on tuples of star bodies and the characterization harness.

A :class:`BodyFunctional` ``F`` of arity ``m`` maps ``m`` sampled star bodies
to a real number.  It is backed by one of

* :class:`DiagonalMeasure` -- ``F = sum_i mu_i f_1(i) ... f_m(i)``;
* :class:`TensorBacking` -- a node-level :class:`~dualbm.polymeasure.PolyMeasure`,
  ``F = int (f_1, ..., f_m) d gamma``;
* :class:`BlackBox` -- any callable, declared separately additive and
  positively homogeneous and probed before use.

The harness checks the three equivalent conditions on such ``F``:

1. ``F`` vanishes whenever two arguments are essentially disjoint;
2. ``F`` is symmetric and ``P_F(L + M) = P_F(L) + P_F(M)`` for essentially
   disjoint ``L, M``;
3. ``F`` comes from a single measure (diagonal backing).

and reduces rotation-invariant diagonal functionals to a multiple of the
dual mixed volume.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import (
    GridError,
    InvarianceError,
    NotDiagonalError,
    ProbeFailure,
    SeparationError,
    TransitivityError,
)
from .polymeasure import PolyMeasure, integrate_simple, is_diagonal
from .sphere_grid import grid_permutation
from .star_body import (
    Ball,
    CapBump,
    RadialFunction,
    _power_product,
    body_to_dict,
    sample,
)

__all__ = [
    "DiagonalMeasure",
    "TensorBacking",
    "BlackBox",
    "BodyFunctional",
    "CheckReport",
    "ProbeReport",
    "MeasureRecovery",
    "RotationReduction",
    "ViolationWitness",
    "from_measure",
    "from_polymeasure",
    "from_blackbox",
    "dual_volume_functional",
    "probe_functional",
    "tf_extend",
    "random_capbump",
    "random_disjoint_pair",
    "check_vanishing_on_disjoint",
    "check_symmetry",
    "check_poly_orthogonal_additivity",
    "recover_measure_from_polynomial",
    "reduce_rotation_invariant",
    "find_violation_witness",
    "characterize",
]

DEFAULT_RTOL = 1e-9
MIN_WIDTH = np.pi / 16
MAX_WIDTH = np.pi / 4


@dataclass(frozen=True, eq=False)
class DiagonalMeasure:
    masses: np.ndarray


@dataclass(frozen=True, eq=False)
class TensorBacking:
    gamma: PolyMeasure


@dataclass(frozen=True, eq=False)
class BlackBox:
    evaluator: object


@dataclass(frozen=True, eq=False)
class BodyFunctional:
    """``F: (star bodies)^m -> R`` on a fixed grid.

    Call it with a sequence of ``m`` grid functions: ``F([f, g])``.
    """

    arity: int
    grid: object
    backing: object

    def __call__(self, fs):
        fs = list(fs)
        if len(fs) != self.arity:
            raise GridError(f"functional takes {self.arity} arguments, got {len(fs)}")
        for f in fs:
            if not self.grid.same_as(f.grid):
                raise GridError("argument lives on a different grid")
        b = self.backing
        if isinstance(b, DiagonalMeasure):
            return math.fsum(b.masses * _power_product(fs))
        if isinstance(b, TensorBacking):
            return integrate_simple(b.gamma, [f.values for f in fs])
        return float(b.evaluator(fs))

    def of_bodies(self, specs):
        """Evaluate on body specs, sampling each on the grid."""
        return self([sample(s, self.grid) for s in specs])

    def polynomial(self, f):
        """Associated polynomial ``P_F(f) = F(f, ..., f)``."""
        return self([f] * self.arity)

    @property
    def kind(self):
        return {DiagonalMeasure: "measure", TensorBacking: "tensor", BlackBox: "blackbox"}[
            type(self.backing)
        ]


def from_measure(mu, grid, m):
    """``F(f_1..f_m) = sum_i mu_i f_1(i)...f_m(i)``."""
    mu = np.array(mu, dtype=float)
    if mu.shape != (grid.size,):
        raise GridError(f"measure needs one mass per node ({grid.size}), got shape {mu.shape}")
    if m < 1:
        raise GridError("arity must be >= 1")
    mu.setflags(write=False)
    return BodyFunctional(int(m), grid, DiagonalMeasure(mu))


def from_polymeasure(gamma):
    """``F(f_1..f_m) = int (f_1, ..., f_m) d gamma`` for a node-level polymeasure."""
    part = gamma.partition
    if part is None or not part.is_node_level:
        raise GridError("polymeasure must live on the node-level partition of a grid")
    return BodyFunctional(gamma.order, part.grid, TensorBacking(gamma))


def from_blackbox(evaluator, grid, m):
    return BodyFunctional(int(m), grid, BlackBox(evaluator))


def dual_volume_functional(grid):
    """The dual mixed volume as a diagonal-measure functional."""
    return from_measure(grid.weights / grid.dim, grid, grid.dim)


# ---------------------------------------------------------------------------
# random bodies


def _rng(seed, *stream):
    return np.random.default_rng([int(seed), *stream])


def random_capbump(grid, rng):
    """Bump centred at a uniformly chosen node, width in [pi/16, pi/4], height in [0.1, 2]."""
    c = grid.nodes[rng.integers(grid.size)]
    return CapBump(tuple(c), float(rng.uniform(MIN_WIDTH, MAX_WIDTH)), float(rng.uniform(0.1, 2.0)))


def _angle(a, b):
    return 2.0 * math.asin(min(1.0, float(np.linalg.norm(np.subtract(a, b))) / 2.0))


def random_disjoint_pair(grid, rng, max_tries=1000):
    """Two bumps whose centre separation exceeds the sum of their widths."""
    for _ in range(max_tries):
        L, M = random_capbump(grid, rng), random_capbump(grid, rng)
        if _angle(L.center, M.center) > L.alpha + M.alpha:
            return L, M
    raise SeparationError("could not draw a disjoint bump pair on this grid")


def _control_tuple(grid, m, rng):
    """Bodies that pairwise overlap: balls, or bumps sharing one centre."""
    if rng.random() < 0.5:
        return [Ball(float(rng.uniform(0.5, 2.0))) for _ in range(m)]
    c = tuple(grid.nodes[rng.integers(grid.size)])
    return [
        CapBump(c, float(rng.uniform(MIN_WIDTH, MAX_WIDTH)), float(rng.uniform(0.1, 2.0)))
        for _ in range(m)
    ]


def _scale(F, trials, seed):
    vals = [abs(F.of_bodies(_control_tuple(F.grid, F.arity, _rng(seed, 0, t)))) for t in range(trials)]
    return max(vals, default=0.0)


# ---------------------------------------------------------------------------
# reports


@dataclass
class CheckReport:
    name: str
    max_violation: float
    scale: float
    passed: bool
    trials: int
    witness: list = None

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if d["witness"] is None:
            del d["witness"]
        return d


def _finish(name, worst, worst_tuple, scale, trials, rtol):
    passed = worst <= rtol * scale
    witness = None
    if not passed and worst_tuple is not None:
        witness = [body_to_dict(b) for b in worst_tuple]
    return CheckReport(name, float(worst), float(scale), bool(passed), int(trials), witness)


# ---------------------------------------------------------------------------
# probes and the signed extension


@dataclass
class ProbeReport:
    additivity: float
    homogeneity: float
    degenerate: float
    bound: float
    scale: float
    passed: bool
    failure: str = None
    witness: list = None


def probe_functional(F, trials=20, seed=0, rtol=DEFAULT_RTOL):
    """Sample separate additivity, positive homogeneity and boundedness.

    Each slot is probed on random bumps and balls with the other slots held
    fixed.  Violations are measured relative to the magnitudes involved.
    """
    grid, m = F.grid, F.arity
    add = hom = deg = bound = scale = 0.0
    worst = {"additivity": (0.0, None), "homogeneity": (0.0, None), "degenerate": (0.0, None)}
    zero = RadialFunction.zeros(grid)
    for t in range(trials):
        rng = _rng(seed, 1, t)
        specs = [random_capbump(grid, rng) for _ in range(m)]
        fs = [sample(s, grid) for s in specs]
        slot = int(rng.integers(m))
        g_spec = random_capbump(grid, rng) if rng.random() < 0.5 else Ball(float(rng.uniform(0.1, 2)))
        g = sample(g_spec, grid)
        lam = float(rng.uniform(0.1, 5.0))

        def at(h):
            args = list(fs)
            args[slot] = h
            return F(args)

        base, other = at(fs[slot]), at(g)
        both = at(RadialFunction(grid, fs[slot].values + g.values))
        scaled = at(RadialFunction(grid, lam * fs[slot].values))
        nil = at(zero)
        mag = max(abs(base), abs(other), abs(both), abs(scaled), 1e-300)
        scale = max(scale, abs(base), abs(other))
        bound = max(bound, abs(base))
        v_add = abs(both - base - other) / mag
        v_hom = abs(scaled - lam * base) / mag
        v_deg = abs(nil) / mag
        witness = [body_to_dict(s) for s in specs] + [{"slot": slot, "other": body_to_dict(g_spec), "lambda": lam}]
        for key, v in (("additivity", v_add), ("homogeneity", v_hom), ("degenerate", v_deg)):
            if v > worst[key][0]:
                worst[key] = (v, witness)
        add, hom, deg = max(add, v_add), max(hom, v_hom), max(deg, v_deg)
    failure = None
    for key in ("additivity", "homogeneity", "degenerate"):
        if worst[key][0] > rtol:
            failure = key
            break
    if not math.isfinite(bound):
        failure = "boundedness"
    return ProbeReport(
        add, hom, deg, bound, scale, failure is None, failure,
        worst[failure][1] if failure in worst else None,
    )


def tf_extend(F, probe=True, trials=20, seed=0):
    r"""Extend ``F`` to signed grid functions by the sign expansion.

    With :math:`f_i = f_i^+ - f_i^-`,

    .. math:: T_F(f_1,\dots,f_m) = \sum_{\sigma\in\{+,-\}^m}
              (-1)^{\#\{i:\sigma_i=-\}} F(f_1^{\sigma_1},\dots,f_m^{\sigma_m}).

    Black-box backings are probed first; a failed probe raises
    :class:`ProbeFailure`.
    """
    if probe and isinstance(F.backing, BlackBox):
        rep = probe_functional(F, trials=trials, seed=seed)
        if not rep.passed:
            raise ProbeFailure(
                f"black-box functional fails the {rep.failure} probe", rep.failure, rep.witness,
                max(rep.additivity, rep.homogeneity, rep.degenerate),
            )
    m = F.arity

    def T(fs):
        fs = list(fs)
        if len(fs) != m:
            raise GridError(f"extension takes {m} arguments, got {len(fs)}")
        parts = [(f.positive_part(), f.negative_part()) for f in fs]
        terms = []
        for choice in np.ndindex(*(2,) * m):
            sign = -1.0 if sum(choice) % 2 else 1.0
            args = [parts[i][c] for i, c in enumerate(choice)]
            if any(not np.any(a.values) for a in args):
                continue
            terms.append(sign * F(args))
        return math.fsum(terms)

    T.arity = m
    return T


# ---------------------------------------------------------------------------
# condition checks


def check_vanishing_on_disjoint(F, trials=100, seed=0, rtol=DEFAULT_RTOL):
    """Condition (1): ``F = 0`` when two arguments are essentially disjoint."""
    grid, m = F.grid, F.arity
    scale = _scale(F, trials, seed)
    if m < 2:
        return CheckReport("vanishing_on_disjoint", 0.0, scale, True, 0)
    worst, worst_tuple = 0.0, None
    for t in range(trials):
        rng = _rng(seed, 2, t)
        specs = [random_capbump(grid, rng) for _ in range(m)]
        i, j = rng.choice(m, size=2, replace=False)
        specs[i], specs[j] = random_disjoint_pair(grid, rng)
        v = abs(F.of_bodies(specs))
        if v > worst or worst_tuple is None:
            worst, worst_tuple = v, specs
    return _finish("vanishing_on_disjoint", worst, worst_tuple, scale, trials, rtol)


def check_symmetry(F, trials=100, seed=0, rtol=DEFAULT_RTOL):
    """Condition (2a): ``F`` is invariant under permuting its arguments."""
    grid, m = F.grid, F.arity
    scale = _scale(F, trials, seed)
    if m < 2:
        return CheckReport("symmetry", 0.0, scale, True, 0)
    worst, worst_tuple = 0.0, None
    for t in range(trials):
        rng = _rng(seed, 3, t)
        specs = [random_capbump(grid, rng) for _ in range(m)]
        perm = rng.permutation(m)
        while m > 1 and np.array_equal(perm, np.arange(m)):
            perm = rng.permutation(m)
        fs = [sample(s, grid) for s in specs]
        v = abs(F(fs) - F([fs[p] for p in perm]))
        if v > worst or worst_tuple is None:
            worst, worst_tuple = v, specs
    return _finish("symmetry", worst, worst_tuple, scale, trials, rtol)


def check_poly_orthogonal_additivity(F, trials=100, seed=0, rtol=DEFAULT_RTOL):
    """Condition (2b): ``P_F(L + M) = P_F(L) + P_F(M)`` for disjoint ``L, M``."""
    grid = F.grid
    scale = _scale(F, trials, seed)
    worst, worst_tuple = 0.0, None
    for t in range(trials):
        rng = _rng(seed, 4, t)
        L, M = random_disjoint_pair(grid, rng)
        f, g = sample(L, grid), sample(M, grid)
        v = abs(F.polynomial(f + g) - F.polynomial(f) - F.polynomial(g))
        if v > worst or worst_tuple is None:
            worst, worst_tuple = v, (L, M)
    return _finish("poly_orthogonal_additivity", worst, worst_tuple, scale, trials, rtol)


# ---------------------------------------------------------------------------
# measure recovery


@dataclass
class MeasureRecovery:
    measure: np.ndarray
    max_rel_error: float
    orthogonality_violation: float
    homogeneity_violation: float


def _random_disjoint_simples(grid, rng):
    labels = rng.integers(0, 3, size=grid.size)
    f = np.where(labels == 1, rng.uniform(0.0, 2.0, grid.size), 0.0)
    g = np.where(labels == 2, rng.uniform(0.0, 2.0, grid.size), 0.0)
    return RadialFunction(grid, f), RadialFunction(grid, g)


def recover_measure_from_polynomial(P, grid, degree=None, *, probes=20, validation=100, seed=0, rtol=DEFAULT_RTOL):
    r"""Recover ``nu`` with ``P(f) = sum_i nu_i f_i^n`` from an orthogonally additive ``P``.

    ``nu_i = P(chi_i)`` where ``chi_i`` is the indicator of node ``i``.
    Orthogonal additivity and ``n``-homogeneity are probed beforehand and
    the representation is validated on random simple functions afterwards.

    Raises
    ------
    ProbeFailure
        On a failed probe or validation, with the offending input.
    """
    n = grid.dim if degree is None else int(degree)
    orth = hom = 0.0
    for t in range(probes):
        rng = _rng(seed, 5, t)
        f, g = _random_disjoint_simples(grid, rng)
        pf, pg, pfg = P(f), P(g), P(f + g)
        v = abs(pfg - pf - pg) / max(abs(pfg), abs(pf) + abs(pg), 1e-300)
        orth = max(orth, v)
        if v > rtol:
            raise ProbeFailure("P is not orthogonally additive", "orthogonal_additivity",
                               (f.values.tolist(), g.values.tolist()), v)
        lam = float(rng.uniform(0.1, 5.0))
        pl = P(RadialFunction(grid, lam * f.values))
        v = abs(pl - lam**n * pf) / max(abs(pl), lam**n * abs(pf), 1e-300)
        hom = max(hom, v)
        if v > rtol:
            raise ProbeFailure(f"P is not {n}-homogeneous", "homogeneity", (f.values.tolist(), lam), v)

    nu = np.empty(grid.size)
    for i in range(grid.size):
        chi = np.zeros(grid.size)
        chi[i] = 1.0
        nu[i] = P(RadialFunction(grid, chi))

    err = 0.0
    for t in range(validation):
        rng = _rng(seed, 6, t)
        f = rng.uniform(0.0, 2.0, grid.size)
        pf = P(RadialFunction(grid, f))
        rep = math.fsum(nu * f**n)
        v = abs(pf - rep) / max(abs(pf), math.fsum(np.abs(nu) * f**n), 1e-300)
        err = max(err, v)
        if v > rtol:
            raise ProbeFailure("recovered measure does not reproduce P", "representation", f.tolist(), v)
    nu.setflags(write=False)
    return MeasureRecovery(nu, err, orth, hom)


# ---------------------------------------------------------------------------
# rotation invariance


@dataclass
class RotationReduction:
    c: float
    residual: float
    invariance_residual: float


def _orbit_size(perms, n):
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for p in perms:
            j = int(p[i])
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen)


def reduce_rotation_invariant(F, rotations, rtol=DEFAULT_RTOL):
    r"""Write a rotation-invariant diagonal functional as ``c`` times the dual mixed volume.

    The rotations must preserve the grid and act transitively on its nodes.
    After checking ``mu[perm[i]] == mu[i]`` for every rotation, the constant
    is ``c = sum(mu) / ((1/n) sum(w))`` and ``residual = max |mu_i - c w_i / n|``.

    Raises
    ------
    TransitivityError
        If the rotations do not connect every node to every other.
    InvarianceError
        If ``mu`` changes under some rotation by more than ``rtol * max|mu|``.
        The reported node is the one whose density ``mu_i / w_i`` is
        furthest from the median density.
    """
    if not isinstance(F.backing, DiagonalMeasure):
        raise TypeError("rotation reduction needs a diagonal-measure functional")
    grid = F.grid
    if F.arity != grid.dim:
        raise GridError(f"arity {F.arity} differs from the dimension {grid.dim}")
    mu = F.backing.masses
    perms = [grid_permutation(grid, r) for r in rotations]
    if _orbit_size(perms, grid.size) != grid.size:
        raise TransitivityError("rotation set does not act transitively on the grid nodes")
    inv = max(float(np.max(np.abs(mu[p] - mu))) for p in perms) if perms else 0.0
    tol = rtol * float(np.max(np.abs(mu), initial=0.0))
    if inv > tol:
        # Both ends of a mismatched pair look equally wrong; blame the node
        # whose density strays furthest from the typical one.
        density = mu / grid.weights
        node = int(np.argmax(np.abs(density - np.median(density))))
        raise InvarianceError(
            f"measure is not rotation invariant: residual {inv:.3g} at node {node}", node, inv
        )
    n = grid.dim
    c = math.fsum(mu) / (math.fsum(grid.weights) / n)
    residual = float(np.max(np.abs(mu - c * grid.weights / n)))
    return RotationReduction(c, residual, inv)


# ---------------------------------------------------------------------------
# violation witnesses


@dataclass
class ViolationWitness:
    bodies: list
    atoms: tuple
    entry: float
    value: float

    def to_dict(self):
        return {
            "bodies": [body_to_dict(b) for b in self.bodies],
            "atoms": list(self.atoms),
            "entry": self.entry,
            "value": self.value,
        }


def find_violation_witness(F, tol=1e-12, certify_tol=1e-9):
    """Bumps on the atoms of a largest off-diagonal entry of a tensor-backed ``F``.

    Each bump is centred at its witness node and narrower than half the
    distance to the nearest other node, so on the grid it is the node's
    indicator and bumps on distinct nodes are disjoint.  The returned value
    ``F(bodies)`` equals the tensor entry.
    """
    if not isinstance(F.backing, TensorBacking):
        raise TypeError("violation witnesses need a tensor-backed functional")
    gamma = F.backing.gamma
    check = is_diagonal(gamma, tol)
    if check:
        raise NotDiagonalError("polymeasure is diagonal; condition (1) cannot fail", ())
    grid = F.grid
    atoms = check.witness
    bodies = []
    for j in atoms:
        others = np.delete(grid.nodes, j, axis=0)
        nearest = min(_angle(grid.nodes[j], o) for o in others)
        alpha = 0.45 * nearest
        if not alpha > 1e-9:
            raise SeparationError(f"node {j} is not angularly separated from its neighbours; refine the grid")
        bodies.append(CapBump(tuple(grid.nodes[j]), alpha, 1.0))
    value = F.of_bodies(bodies)
    entry = float(gamma.tensor[atoms])
    if abs(value) < abs(entry) - certify_tol:
        raise SeparationError(
            f"witness bumps give |F| = {abs(value):.3g} below the entry {abs(entry):.3g}; refine the grid"
        )
    return ViolationWitness(bodies, atoms, entry, value)


def characterize(F, trials=100, seed=0, rtol=DEFAULT_RTOL):
    """Run the three condition checks, plus a witness search for tensors.

    Returns a dict with per-check reports and an overall ``pass`` flag.
    """
    checks = [
        check_vanishing_on_disjoint(F, trials, seed, rtol),
        check_symmetry(F, trials, seed, rtol),
        check_poly_orthogonal_additivity(F, trials, seed, rtol),
    ]
    report = {"checks": [c.to_dict() for c in checks], "pass": all(c.passed for c in checks)}
    if isinstance(F.backing, TensorBacking):
        diag = is_diagonal(F.backing.gamma)
        report["diagonal"] = bool(diag)
        if not diag:
            report["witness"] = find_violation_witness(F).to_dict()
            report["pass"] = False
    return report
