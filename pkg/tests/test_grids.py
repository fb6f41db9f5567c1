import math

import numpy as np
import pytest

from bhankel import (GridFunction, PHYSICAL, SPECTRAL, build_adaptive_grid,
                     build_grid, derive_params, from_callable,
                     integrate_weighted, l2_weighted, lp_norm_deta,
                     transform_grids)


def test_log_grid_integrates_polynomial_exactly():
    g = build_grid(1e-3, 10.0, panels=40, order=8)
    got = float(np.dot(g.weights, g.nodes ** 3))
    assert got == pytest.approx((10.0 ** 4 - 1e-12) / 4.0, rel=1e-12)


def test_adaptive_grid_starts_at_origin_and_covers_domain():
    g = build_adaptive_grid(1e-4, 12.0, 250.0, beta=1.0)
    assert g.nodes[0] > 0.0
    assert g.nodes[-1] < 12.0
    assert np.all(np.diff(g.nodes) > 0)
    assert np.all(g.weights > 0)
    # total weight = length of [0, 12]
    assert float(g.weights.sum()) == pytest.approx(12.0, rel=1e-13)


def test_adaptive_grid_gaussian_integral():
    g = build_adaptive_grid(1e-4, 15.0, 50.0, beta=0.5)
    got = float(np.dot(g.weights, np.exp(-g.nodes ** 2)))
    assert got == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-12)


def test_lp_norm_deta_gaussian_closed_form():
    # ||e^{-r^2} / r^0||_{L^2_deta}, deta = r^{n-1-beta-2k} dr at k=0
    p = derive_params(3, 1.0, 0)
    g = build_adaptive_grid(1e-4, 15.0, 50.0, beta=1.0)
    f = from_callable(lambda r: np.exp(-r * r), g, PHYSICAL, p)
    want = math.sqrt(0.25)  # integral of e^{-2r^2} r dr = 1/4
    assert lp_norm_deta(f, 2.0, 0) == pytest.approx(want, rel=1e-12)
    # L^inf is the sup
    assert lp_norm_deta(f, math.inf, 0) == pytest.approx(
        float(np.exp(-g.nodes[0] ** 2)), rel=1e-12)


def test_weighted_l2_physical_vs_spectral_measures():
    p = derive_params(3, 1.0, 0)
    pg, sg = transform_grids(1.0, r_max=15.0, rho_max=15.0)
    vals_p = np.exp(-pg.nodes ** 2)
    vals_s = np.exp(-sg.nodes ** 2)
    fp = GridFunction(pg, vals_p, PHYSICAL, p)
    fs = GridFunction(sg, vals_s, SPECTRAL, p)
    # physical measure r^{n-1-beta} = r; spectral rho^{n-1+beta} = rho^3
    assert l2_weighted(fp) ** 2 == pytest.approx(0.25, rel=1e-12)
    assert l2_weighted(fs) ** 2 == pytest.approx(0.125, rel=1e-12)


def test_integrate_weighted():
    p = derive_params(3, 1.0, 0)
    g = build_adaptive_grid(1e-4, 45.0, 45.0, beta=1.0)
    f = from_callable(lambda r: np.exp(-r), g, PHYSICAL, p)
    # integral e^{-r} r dr = 1
    assert integrate_weighted(f, 1.0) == pytest.approx(1.0, rel=1e-12)
