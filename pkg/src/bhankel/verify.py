"""Named verification suites over the library's identities and estimates.

Each check returns a dict {name, anchor, measured, tolerance, pass}; the
anchor is a stable descriptive string naming the property being checked so
report rows are traceable.  Suites are deterministic: fixed seeds, fixed
grids, no thread-dependent reduction order.
"""

from __future__ import annotations

import math

import numpy as np

from .estimates import decay_exponent_fit, smoothing_constant
from .evolution import semigroup_apply
from .grids import (GridFunction, PHYSICAL, SPECTRAL, integrate_weighted,
                    l2_weighted, lp_norm_deta, transform_grids)
from .kernels import (delsarte_identity_rhs, delsarte_integral, kernel_K,
                      kernel_norm_deta, watson_lhs, watson_rhs, young_audit)
from .model import derive_params
from .transform import (apply_operator_a, hankel_forward, hankel_inverse,
                        kernel_u, plan_transform, spectral_multiply)

SUITES = ("watson", "transform", "kernels", "smoothing", "conservation")


def _check(name, anchor, measured, tolerance):
    return {"name": name, "anchor": anchor, "measured": float(measured),
            "tolerance": float(tolerance),
            "pass": bool(measured <= tolerance)}


def suite_watson(params=None):
    """Gaussian-weighted Bessel moment identity over the 18-point lattice."""
    checks = []
    for nu in (0.5, 1.0, 2.5):
        for a in (0.5, 1.0, 2.0):
            for p in (0.7, 1.0):
                rhs = watson_rhs(nu, a, p)
                err = abs(watson_lhs(nu, a, p) - rhs) / abs(rhs)
                checks.append(_check(
                    f"watson_nu{nu}_a{a}_p{p}",
                    "gaussian-weighted-bessel-moment", err, 1e-8))
    return checks


def _default_plan(params):
    pg, sg = transform_grids(params.beta, r_max=12.0)
    return plan_transform(pg, sg, params)


def suite_transform(params):
    """Round trip, isometry, diagonalization, and the small-argument limit."""
    plan = _default_plan(params)
    pg, sg = plan.physical_grid, plan.spectral_grid
    r = pg.nodes
    k, beta = params.k, params.beta
    f = GridFunction(pg, r ** k * np.exp(-r ** 2 / 2), PHYSICAL, params)
    F = hankel_forward(f, plan)
    back = hankel_inverse(F, plan)
    diff = GridFunction(pg, back.values - f.values, PHYSICAL, params)
    checks = [_check("round_trip", "transform-round-trip",
                     l2_weighted(diff) / l2_weighted(f), 1e-6)]
    iso = abs(l2_weighted(F) ** 2 - l2_weighted(f) ** 2) / l2_weighted(f) ** 2
    checks.append(_check("isometry", "transform-isometry", iso, 1e-6))
    af = apply_operator_a(f, params)
    lhs = hankel_forward(GridFunction(pg, r ** beta * af.values, PHYSICAL,
                                      params), plan)
    rhs = spectral_multiply(F, lambda rho: rho ** (2.0 - beta))
    dnum = GridFunction(sg, lhs.values - rhs.values, SPECTRAL, params)
    checks.append(_check("diagonalization", "transform-diagonalization",
                         l2_weighted(dnum) / l2_weighted(rhs), 1e-4))
    # linearity of the dense matrix application
    g = GridFunction(pg, r ** k * np.exp(-2 * r ** 2), PHYSICAL, params)
    comb = GridFunction(pg, 2.0 * f.values - 3.0 * g.values, PHYSICAL, params)
    lin = hankel_forward(comb, plan).values \
        - (2.0 * F.values - 3.0 * hankel_forward(g, plan).values)
    checks.append(_check("linearity", "transform-linearity",
                         float(np.max(np.abs(lin))), 1e-9))
    # small-argument limit s^alpha U(x s) -> x^(k-beta)/(Gamma(mu+1)(2-beta)^mu)
    s = 1e-4
    x = np.array([0.5, 1.0, 2.0])
    limit = x ** (k - beta) * (2.0 - beta) ** (-params.mu) \
        / math.gamma(params.mu + 1.0)
    got = s ** params.alpha * kernel_u(x * s, params)
    checks.append(_check("small_argument_limit", "kernel-small-argument-limit",
                         float(np.max(np.abs(got - limit) / limit)), 1e-4))
    return checks


def suite_kernels(params):
    """Closed-form kernel, its norm power law, product-kernel identities,
    and the convolution inequality."""
    checks = []
    beta, k = params.beta, params.k
    for t in (0.1, 1.0, 10.0):
        rho_max = (70.0 / t) ** (1.0 / (2.0 - beta))
        pg, sg = transform_grids(beta, r_max=20.0 if t >= 1 else 8.0,
                                 rho_max=rho_max)
        plan = plan_transform(pg, sg, params)
        F = GridFunction(sg, np.exp(-sg.nodes ** (2.0 - beta) * t)
                         / sg.nodes ** (beta - k), SPECTRAL, params)
        got = hankel_inverse(F, plan).values
        want = kernel_K(pg.nodes, t, params)
        err = float(np.max(np.abs(got - want)) / np.max(np.abs(want)))
        checks.append(_check(f"kernel_closed_form_t{t}",
                             "evolution-kernel-closed-form", err, 1e-6))
    for m in (1.0, 2.0, math.inf):
        ts = np.geomspace(1e-2, 10.0, 25)
        vals = [kernel_norm_deta(m, float(t), params) for t in ts]
        fit = decay_exponent_fit(ts, vals)
        want = params.gamma * ((0.0 if math.isinf(m) else 1.0 / m) - 1.0)
        checks.append(_check(f"kernel_norm_power_law_m{m}",
                             "kernel-norm-power-law", abs(fit - want), 1e-3))
    for slot in ("x", "y", "z"):
        worst = 0.0
        for (a, b) in ((0.5, 0.8), (1.0, 1.0), (0.3, 2.0), (1.5, 0.6),
                       (2.0, 2.5)):
            if slot == "x":
                fn = lambda v: v ** (k - beta)
            else:
                fn = lambda v: v ** k
            got = delsarte_integral(fn, a, b, params, slot=slot, npts=120)
            want = delsarte_identity_rhs(a, b, params, slot=slot)
            worst = max(worst, abs(got - want) / abs(want))
        checks.append(_check(f"product_kernel_identity_{slot}",
                             "product-kernel-weighted-integral", worst, 1e-4))
    plan = _default_plan(params)
    r = plan.physical_grid.nodes
    rng = np.random.default_rng(2024)
    worst = -1.0
    for _ in range(10):
        c1, c2 = rng.uniform(0.3, 2.0, 2)
        s1, s2 = rng.uniform(0.5, 2.0, 2)
        f = GridFunction(plan.physical_grid,
                         r ** k * np.exp(-c1 * (r - s1) ** 2), PHYSICAL, params)
        g = GridFunction(plan.physical_grid,
                         r ** k * np.exp(-c2 * (r - s2) ** 2), PHYSICAL, params)
        for (a, b, c) in ((1.0, 1.0, 1.0), (2.0, 4.0 / 3.0, 4.0 / 3.0),
                          (3.0, 1.2, 2.0)):
            lhs, rhs = young_audit(f, g, a, b, c, plan)
            worst = max(worst, lhs / rhs - 1.0)
    checks.append(_check("young_inequality", "convolution-young-inequality",
                         worst, 1e-8))
    return checks


def suite_smoothing(params):
    """Pointwise-in-t smoothing ratio against the explicit constant."""
    checks = [_check("constant_pp", "smoothing-constant-p-equals-q",
                     abs(smoothing_constant(2.0, 2.0, params) - 1.0), 1e-15)]
    pg, sg = transform_grids(params.beta, r_max=120.0, rho_max=60.0)
    plan = plan_transform(pg, sg, params)
    r = pg.nodes
    a = GridFunction(pg, r ** params.k * np.exp(-r ** 2 / 2), PHYSICAL, params)
    for (p, q) in ((2.0, 2.0), (4.0, 2.0), (3.0, 2.0), (math.inf, 1.0),
                   (4.0, 4.0), (math.inf, 2.0)):
        cpq = smoothing_constant(p, q, params)
        nq = lp_norm_deta(a, q, params.k)
        worst = -1.0
        for t in np.geomspace(1e-2, 1e2, 13):
            u = semigroup_apply(a, float(t), plan)
            invp = 0.0 if math.isinf(p) else 1.0 / p
            rate = t ** (-params.gamma * (1.0 / q - invp))
            worst = max(worst, lp_norm_deta(u, p, params.k) / (rate * nq) / cpq
                        - 1.0)
        checks.append(_check(f"smoothing_bound_p{p}_q{q}",
                             "linear-flow-smoothing-bound", worst, 1e-6))
    return checks


def suite_conservation(params):
    """Weighted mass conservation and positivity of the k = 0 linear flow."""
    params = derive_params(params.n, params.beta, 0)
    pg, sg = transform_grids(params.beta, r_max=120.0, rho_max=60.0)
    plan = plan_transform(pg, sg, params)
    r = pg.nodes
    a = GridFunction(pg, np.exp(-r ** 2 / 2), PHYSICAL, params)
    expo = params.n - 1 - params.beta
    m0 = integrate_weighted(a, expo)
    worst_mass, worst_neg = 0.0, 0.0
    for t in (0.5, 1.0, 2.0, 3.0, 5.0):
        u = semigroup_apply(a, t, plan)
        worst_mass = max(worst_mass,
                         abs(integrate_weighted(u, expo) - m0) / abs(m0))
        worst_neg = max(worst_neg, float(-u.values.min()))
    return [_check("mass_conservation", "weighted-mass-conservation",
                   worst_mass, 1e-6),
            _check("positivity", "linear-flow-positivity", worst_neg, 1e-12)]


def run_suites(names, params):
    """Run the requested suites; returns the flat list of check dicts."""
    table = {"watson": suite_watson, "transform": suite_transform,
             "kernels": suite_kernels, "smoothing": suite_smoothing,
             "conservation": suite_conservation}
    checks = []
    for name in names:
        if name not in table:
            raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
        checks.extend(table[name](params))
    return checks
