import itertools
import math

import numpy as np
import pytest
from scipy.integrate import quad

from dualbm import (
    Ball,
    CapBump,
    Ellipsoid,
    dual_mixed_volume,
    lutwak_check,
    make_grid,
    polarize,
    polynomial_value,
    sample,
    volume,
)
from dualbm.acceptance import random_body
from dualbm.exceptions import GridError
from dualbm.functional import from_measure
from dualbm.star_body import GridFunction


def test_unit_balls(circle, sphere):
    assert abs(dual_mixed_volume([sample(Ball(1.0), circle)] * 2) - math.pi) <= 1e-12
    assert abs(dual_mixed_volume([sample(Ball(1.0), sphere)] * 3) - 4 * math.pi / 3) <= 1e-10


def test_two_balls(circle):
    v = dual_mixed_volume([sample(Ball(1.5), circle), sample(Ball(0.4), circle)])
    assert abs(v - math.pi * 1.5 * 0.4) <= 1e-12


def test_ball_ellipsoid_against_references():
    g = make_grid(2, 512)
    v = dual_mixed_volume([sample(Ball(1.0), g), sample(Ellipsoid((2.0, 1.0)), g)])
    fine = make_grid(2, 8192)
    v_ref = dual_mixed_volume([sample(Ball(1.0), fine), sample(Ellipsoid((2.0, 1.0)), fine)])
    assert abs(v - v_ref) <= 1e-8
    rho = lambda t: (math.cos(t) ** 2 / 4 + math.sin(t) ** 2) ** -0.5
    v_quad = 0.5 * quad(rho, 0, 2 * math.pi, limit=200)[0]
    assert abs(v - v_quad) <= 1e-8


def test_arity_and_grid_errors(circle):
    f = sample(Ball(1.0), circle)
    with pytest.raises(GridError):
        dual_mixed_volume([f])
    with pytest.raises(GridError):
        dual_mixed_volume([f, f, f])
    with pytest.raises(GridError):
        dual_mixed_volume([f, sample(Ball(1.0), make_grid(2, 8))])


def test_symmetry_and_diagonal(sphere, rng):
    fs = [sample(random_body(3, rng), sphere) for _ in range(3)]
    base = dual_mixed_volume(fs)
    for p in itertools.permutations(range(3)):
        assert dual_mixed_volume([fs[i] for i in p]) == pytest.approx(base, rel=1e-15)
    f = fs[0]
    assert dual_mixed_volume([f, f, f]) == volume(f)


def test_multilinear_on_positive_cone(circle, rng):
    for _ in range(20):
        f, f2, g = (sample(random_body(2, rng), circle) for _ in range(3))
        lam, mu = rng.uniform(0, 3, 2)
        combo = GridFunction(circle, lam * f.values + mu * f2.values)
        lhs = dual_mixed_volume([combo, g])
        rhs = lam * dual_mixed_volume([f, g]) + mu * dual_mixed_volume([f2, g])
        assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1e-300) + 1e-15


def test_lutwak_two_balls(circle):
    rep = lutwak_check([Ball(1.0), Ball(1.0)], [1.0, 1.0], circle)
    assert rep.direct == pytest.approx(4 * math.pi, abs=1e-12)
    assert rep.expanded == pytest.approx(4 * math.pi, abs=1e-12)
    assert rep.abs_diff <= 1e-12


def test_lutwak_single_body(sphere):
    E = Ellipsoid((1.0, 2.0, 0.5))
    rep = lutwak_check([E], [1.0], sphere)
    assert rep.direct == rep.expanded == volume(sample(E, sphere))


def test_lutwak_random_mix():
    g = make_grid(3, 16)
    rng = np.random.default_rng(7)
    for _ in range(10):
        specs = [
            CapBump(tuple(rng.normal(size=3)), float(rng.uniform(0.3, 1.2)), float(rng.uniform(0.1, 2))),
            Ellipsoid(tuple(rng.uniform(0.3, 2, 3))),
            CapBump(tuple(rng.normal(size=3)), float(rng.uniform(0.3, 1.2)), float(rng.uniform(0.1, 2))),
        ]
        rep = lutwak_check(specs, rng.uniform(0, 2, 3), g)
        assert rep.abs_diff <= 1e-9 * max(1.0, abs(rep.direct))


def test_lutwak_errors(circle):
    with pytest.raises(GridError):
        lutwak_check([Ball(1.0)], [1.0, 2.0], circle)
    with pytest.raises(GridError):
        lutwak_check([Ball(1.0)], [-1.0], circle)
    with pytest.raises(GridError):
        lutwak_check([], [], circle)


def test_polynomial_value(circle):
    B = sample(Ball(1.0), circle)
    assert polynomial_value(dual_mixed_volume, B) == pytest.approx(math.pi, abs=1e-12)
    assert polynomial_value(lambda fs: 0.0, B, arity=3) == 0.0
    mu = np.random.default_rng(1).uniform(0, 1, circle.size)
    F = from_measure(mu, circle, 2)
    f = sample(CapBump((1, 0), 1.0, 2.0), circle)
    assert polynomial_value(F, f) == pytest.approx(math.fsum(mu * f.values**2), rel=1e-15)


def test_polarize_diagonal(circle, sphere):
    f = sample(Ellipsoid((1.0, 2.0, 3.0)), sphere)
    assert polarize(volume, [f, f, f]) == pytest.approx(volume(f), rel=1e-13)
    B = sample(Ball(1.0), circle)
    assert polarize(volume, [B, B]) == pytest.approx(math.pi, abs=1e-12)


@pytest.mark.parametrize("dim,res", [(2, 64), (3, 10)])
def test_polarize_matches_dual_mixed_volume(dim, res):
    g = make_grid(dim, res)
    rng = np.random.default_rng(dim)
    for _ in range(30):
        fs = [sample(random_body(dim, rng), g) for _ in range(dim)]
        ref = dual_mixed_volume(fs)
        scale = max(abs(ref), math.prod(volume(f) ** (1 / dim) for f in fs))
        assert abs(polarize(volume, fs) - ref) <= 1e-9 * scale


def test_polarize_cubic_form():
    # Independent check on plain vectors: polarizing sum x^3 gives sum x*y*z.
    g = make_grid(3, 4)
    rng = np.random.default_rng(3)
    xs = [GridFunction(g, rng.normal(size=g.size)) for _ in range(3)]
    P = lambda f: float(np.sum(f.values**3))
    assert polarize(P, xs) == pytest.approx(float(np.sum(xs[0].values * xs[1].values * xs[2].values)), rel=1e-12)
