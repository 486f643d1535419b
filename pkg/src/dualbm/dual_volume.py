r"""Dual mixed volumes, Lutwak's expansion and polarization.

The dual mixed volume of ``n`` star bodies in :math:`\mathbb{R}^n` is

.. math:: \tilde V(L_1,\dots,L_n) = \frac1n \int_{S^{n-1}}
          \rho_{L_1}(u)\cdots\rho_{L_n}(u)\,du ,

evaluated here by quadrature on the common grid of the samples.  Evaluators
in this module follow one calling convention: a multilinear evaluator takes
a sequence of grid functions, a homogeneous polynomial takes a single grid
function.
"""

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import GridError
from .star_body import GridFunction, RadialSumOf, _power_product, sample, volume

__all__ = [
    "dual_mixed_volume",
    "LutwakReport",
    "lutwak_check",
    "polynomial_value",
    "polarize",
]


def dual_mixed_volume(fs):
    """Dual mixed volume of ``n = grid.dim`` sampled bodies.

    Parameters
    ----------
    fs : sequence of GridFunction
        Exactly ``grid.dim`` functions on one grid.  Signed functions are
        accepted and give the multilinear extension.

    Returns
    -------
    float
    """
    fs = list(fs)
    if not fs:
        raise GridError("dual_mixed_volume needs at least one argument")
    grid = fs[0].grid
    if len(fs) != grid.dim:
        raise GridError(f"dual mixed volume in R^{grid.dim} takes {grid.dim} bodies, got {len(fs)}")
    for f in fs[1:]:
        fs[0]._check(f)
    return math.fsum(grid.weights * _power_product(fs)) / grid.dim


@dataclass(frozen=True)
class LutwakReport:
    direct: float
    expanded: float
    abs_diff: float

    def to_dict(self):
        return asdict(self)


def lutwak_check(specs, lambdas, grid):
    r"""Compare both sides of the Lutwak expansion on ``grid``.

    ``direct`` is the volume of the sampled radial combination
    :math:`\lambda_1 L_1 \tilde+ \cdots \tilde+ \lambda_m L_m`; ``expanded``
    sums :math:`\lambda_{i_1}\cdots\lambda_{i_n}\tilde V(L_{i_1},\dots,L_{i_n})`
    over all :math:`m^n` ordered index tuples.
    """
    specs = list(specs)
    lambdas = [float(x) for x in lambdas]
    if not specs:
        raise GridError("lutwak_check needs at least one body")
    if len(lambdas) != len(specs):
        raise GridError(f"{len(specs)} bodies but {len(lambdas)} scales")
    if any(not lam >= 0 for lam in lambdas):
        raise GridError("scales must be nonnegative")

    direct = volume(sample(RadialSumOf(tuple(zip(lambdas, specs))), grid))

    samples = [sample(s, grid) for s in specs]
    terms = []
    for idx in itertools.product(range(len(specs)), repeat=grid.dim):
        coef = math.prod(lambdas[i] for i in idx)
        terms.append(coef * dual_mixed_volume([samples[i] for i in idx]))
    expanded = math.fsum(terms)
    return LutwakReport(direct, expanded, abs(direct - expanded))


def polynomial_value(T, f, arity=None):
    """Diagonal value ``T(f, ..., f)`` of a multilinear evaluator.

    ``arity`` defaults to ``T.arity`` when present, else the grid dimension.
    """
    if arity is None:
        arity = getattr(T, "arity", f.grid.dim)
    return T([f] * arity)


def polarize(P, fs):
    r"""Symmetric multilinear form recovered from a homogeneous polynomial.

    .. math:: T(f_1,\dots,f_n) = \frac{1}{n!\,2^n}
              \sum_{\varepsilon\in\{\pm1\}^n} \varepsilon_1\cdots\varepsilon_n\,
              P\Big(\sum_j \varepsilon_j f_j\Big)

    ``P`` must accept signed grid functions and be homogeneous of degree
    ``n = len(fs)``.
    """
    fs = list(fs)
    n = len(fs)
    if n == 0:
        raise GridError("polarize needs at least one function")
    for f in fs[1:]:
        fs[0]._check(f)
    stacked = np.stack([f.values for f in fs])
    terms = []
    for eps in itertools.product((1.0, -1.0), repeat=n):
        combo = GridFunction(fs[0].grid, np.asarray(eps) @ stacked)
        terms.append(math.prod(eps) * P(combo))
    return math.fsum(terms) / (math.factorial(n) * 2**n)
