"""The weighted Hankel transform pair, spectral multipliers, and the
finite-difference realization of the radial operator it diagonalizes.

The forward kernel is U(w) = w^((2-n-2*beta)/2) J_mu(c w^((2-beta)/2)) and
the inverse kernel V(w) = w^((2-n)/2) J_mu(c w^((2-beta)/2)) with
c = 2/(2-beta).  Both are realized as dense quadrature matrices; at desk
scale (<= 2048 nodes) the O(N^2) application is trivial and the stretched
Bessel argument rules out fast algorithms anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import GridFunction, RadialGrid, PHYSICAL, SPECTRAL
from .model import ModelParams
from .specfun import DEFAULT_CONFIG, SpecFunConfig, bessel_j


def kernel_u(w, params: ModelParams, cfg: SpecFunConfig = DEFAULT_CONFIG):
    """Forward kernel U(w); behaves like w^(k-beta) as w -> 0."""
    w = np.asarray(w, dtype=float)
    c = 2.0 / (2.0 - params.beta)
    arg = c * w ** ((2.0 - params.beta) / 2.0)
    return w ** ((2.0 - params.n - 2.0 * params.beta) / 2.0) * bessel_j(params.mu, arg, cfg)


def kernel_v(w, params: ModelParams, cfg: SpecFunConfig = DEFAULT_CONFIG):
    """Inverse kernel V(w) = w^beta U(w)."""
    w = np.asarray(w, dtype=float)
    c = 2.0 / (2.0 - params.beta)
    arg = c * w ** ((2.0 - params.beta) / 2.0)
    return w ** ((2.0 - params.n) / 2.0) * bessel_j(params.mu, arg, cfg)


@dataclass
class TransformPlan:
    physical_grid: RadialGrid
    spectral_grid: RadialGrid
    params: ModelParams
    matrix_u: np.ndarray = field(repr=False)  # forward: spectral <- physical
    matrix_v: np.ndarray = field(repr=False)  # inverse: physical <- spectral
    nodes_per_period: float = float("nan")


def sampling_ratio(grid: RadialGrid, other_max: float, params: ModelParams) -> float:
    """Smallest number of grid nodes per local oscillation period of the
    transform kernel at the worst (largest) argument product."""
    r = grid.nodes
    # local phase derivative of J_mu(c (r*rho)^((2-beta)/2)) in r at rho = other_max
    phase_rate = r ** (-params.beta / 2.0) * other_max ** ((2.0 - params.beta) / 2.0)
    spacing = np.diff(r)
    per_period = (2.0 * np.pi / (spacing * phase_rate[1:]))
    return float(np.min(per_period))


def plan_transform(pg: RadialGrid, sg: RadialGrid, params: ModelParams,
                   cfg: SpecFunConfig = DEFAULT_CONFIG,
                   min_nodes_per_period: float | None = None) -> TransformPlan:
    """Precompute the dense forward/inverse quadrature matrices.

    When ``min_nodes_per_period`` is given, the plan refuses grids whose
    node density cannot resolve the kernel oscillation at the largest
    argument product.  The default leaves this to the caller: for rapidly
    decaying data the unresolved far corner carries no mass, and the
    default desk-scale grids rely on exactly that.
    """
    npp = min(sampling_ratio(pg, sg.r_max, params),
              sampling_ratio(sg, pg.r_max, params))
    if min_nodes_per_period is not None and npp < min_nodes_per_period:
        raise ValueError(
            f"grid resolves only {npp:.2f} nodes per kernel period at the "
            f"largest argument product (need >= {min_nodes_per_period})")
    w_fwd = sg.nodes[:, None] * pg.nodes[None, :]
    mat_u = kernel_u(w_fwd, params, cfg) * (pg.nodes ** (params.n - 1) * pg.weights)[None, :]
    w_inv = pg.nodes[:, None] * sg.nodes[None, :]
    mat_v = kernel_v(w_inv, params, cfg) * (sg.nodes ** (params.n - 1) * sg.weights)[None, :]
    return TransformPlan(physical_grid=pg, spectral_grid=sg, params=params,
                         matrix_u=mat_u, matrix_v=mat_v, nodes_per_period=npp)


def hankel_forward(f: GridFunction, plan: TransformPlan) -> GridFunction:
    if f.space != PHYSICAL:
        raise ValueError("hankel_forward expects a physical-space function")
    if f.grid is not plan.physical_grid:
        raise ValueError("grid mismatch: function not on the plan's physical grid")
    return GridFunction(plan.spectral_grid, plan.matrix_u @ f.values,
                        SPECTRAL, plan.params)


def hankel_inverse(F: GridFunction, plan: TransformPlan) -> GridFunction:
    if F.space != SPECTRAL:
        raise ValueError("hankel_inverse expects a spectral-space function")
    if F.grid is not plan.spectral_grid:
        raise ValueError("grid mismatch: function not on the plan's spectral grid")
    return GridFunction(plan.physical_grid, plan.matrix_v @ F.values,
                        PHYSICAL, plan.params)


def spectral_multiply(F: GridFunction, symbol) -> GridFunction:
    """Pointwise multiplication by a spectral symbol rho -> real."""
    if F.space != SPECTRAL:
        raise ValueError("spectral_multiply expects a spectral-space function")
    sym = np.asarray(symbol(F.grid.nodes), dtype=float)
    if not np.all(np.isfinite(sym)):
        raise ValueError("symbol takes non-finite values on the spectral grid")
    return GridFunction(F.grid, F.values * sym, SPECTRAL, F.params)


def _fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 on the
    stencil x (Fornberg's recurrence)."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def apply_operator_a(f: GridFunction, params: ModelParams,
                     stencil: int = 5) -> GridFunction:
    """-f'' - (n-1)/r f' + (mu_k^2 - lam^2)/r^2 f by sliding-stencil
    finite differences on the non-uniform grid.

    Fourth-order on smooth data; the outermost two nodes at each end use a
    one-sided stencil and should be excluded from comparisons.
    """
    if f.space != PHYSICAL:
        raise ValueError("apply_operator_a expects a physical-space function")
    r = f.grid.nodes
    n_nodes = r.size
    if n_nodes < stencil:
        raise ValueError("grid too coarse for the finite-difference stencil")
    half = stencil // 2
    d1 = np.empty(n_nodes)
    d2 = np.empty(n_nodes)
    for i in range(n_nodes):
        lo = min(max(i - half, 0), n_nodes - stencil)
        xs = r[lo:lo + stencil]
        vs = f.values[lo:lo + stencil]
        d1[i] = _fd_weights(xs, r[i], 1) @ vs
        d2[i] = _fd_weights(xs, r[i], 2) @ vs
    pot = params.mu_k ** 2 - params.lam ** 2
    out = -d2 - (params.n - 1) / r * d1 + pot / r ** 2 * f.values
    return GridFunction(f.grid, out, PHYSICAL, params)
