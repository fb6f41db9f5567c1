"""Space-time norms, the explicit smoothing constant, and decay-rate audits.

The smoothing bound for the linear flow reads

    ||S(t) a / r^k||_{L^p_deta} <= C(beta, mu, p, q) t^(-gamma (1/q - 1/p))
                                   * ||a / r^k||_{L^q_deta}

with the fully explicit constant

    C = [(2-beta)^(2 mu + 1) Gamma(mu+1)]^(1/p - 1/q)
        * m^(-(2k + n - beta) / ((2-beta) m)),   1 + 1/p = 1/m + 1/q.

The Duhamel audit measures both sides of the inhomogeneous estimates

    ||G f / r^k||_{L^inf(I;L^q)} and ||G f / r^k||_{L^m(I;L^p)}
        <= C T^(1 - b gamma / q) * (forcing norm)

where the forcing norm is the L^(m/(b+1))(I; L^(p/(b+1))_deta) norm when
p <= q(1+b) and the theta-interpolated product of sup and space-time
norms of |f|^(1/(b+1)) when p > q(1+b),
theta = (p - q(b+1)) / ((b+1)(p - q)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolution import Trajectory, duhamel
from .grids import GridFunction, PHYSICAL, lp_norm_deta
from .specfun import gamma_fn


@dataclass
class NormReport:
    triplet: object
    value_Lm_Lp: float
    value_Linf_Lq: float
    value_Cm: float
    fitted_exponent: float
    ratio_Linf: float = math.nan   # lhs / (T^(1 - b gamma/q) * forcing norm)
    ratio_Lm: float = math.nan
    ratio_Cm: float = math.nan

    def __post_init__(self):
        for v in (self.value_Lm_Lp, self.value_Linf_Lq, self.value_Cm):
            if v < 0:
                raise ValueError("norms must be nonnegative")

    def to_csv_row(self) -> str:
        tr = self.triplet
        return (f"{tr.m:g},{tr.p:g},{tr.q:g},{self.value_Lm_Lp:.17g},"
                f"{self.value_Linf_Lq:.17g},{self.value_Cm:.17g},"
                f"{self.fitted_exponent:.17g},{self.ratio_Linf:.17g},"
                f"{self.ratio_Lm:.17g},{self.ratio_Cm:.17g}")


def spacetime_norm(traj: Trajectory, m: float, p: float, k: int = 0) -> float:
    """L^m-in-time norm of ||u(t)/r^k||_{L^p_deta}; trapezoid in time."""
    if len(traj.states) == 0:
        raise ValueError("empty trajectory")
    vals = np.array([lp_norm_deta(s, p, k) for s in traj.states])
    if math.isinf(m):
        return float(np.max(vals))
    return float(np.trapezoid(vals ** m, traj.times)) ** (1.0 / m)


def cm_norm(traj: Trajectory, m: float, p: float, k: int = 0) -> float:
    """Time-weighted sup norm sup_t t^(1/m) ||u(t)/r^k||_{L^p_deta}."""
    if len(traj.states) == 0:
        raise ValueError("empty trajectory")
    vals = np.array([lp_norm_deta(s, p, k) for s in traj.states])
    if math.isinf(m):
        return float(np.max(vals))
    return float(np.max(traj.times ** (1.0 / m) * vals))


def smoothing_constant(p: float, q: float, params) -> float:
    """Explicit constant of the L^q -> L^p smoothing estimate; 1 at p = q."""
    if q < 1 or p < q:
        raise ValueError(f"need 1 <= q <= p, got p={p}, q={q}")
    if p == q:
        return 1.0
    beta, mu = params.beta, params.mu
    inv_m = 1.0 + (0.0 if math.isinf(p) else 1.0 / p) \
        - (0.0 if math.isinf(q) else 1.0 / q)
    diff = (0.0 if math.isinf(p) else 1.0 / p) \
        - (0.0 if math.isinf(q) else 1.0 / q)
    log_c = diff * ((2.0 * mu + 1.0) * math.log(2.0 - beta)
                    + math.lgamma(mu + 1.0))
    if inv_m > 0:
        m = 1.0 / inv_m
        log_c -= (2.0 * params.k + params.n - beta) / ((2.0 - beta) * m) \
            * math.log(m)
    return math.exp(log_c)


def decay_exponent_fit(times, values) -> float:
    """Slope of log(value) against log(t) by least squares."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 5:
        raise ValueError("need at least 5 samples")
    if np.any(times <= 0) or np.any(values <= 0):
        raise ValueError("samples must be positive")
    return float(np.polyfit(np.log(times), np.log(values), 1)[0])


def _power_trajectory(traj: Trajectory, expo: float, params) -> Trajectory:
    states = [GridFunction(s.grid, np.abs(s.values) ** expo, PHYSICAL, params)
              for s in traj.states]
    return Trajectory(traj.times, states, [0.0] * len(states))


def duhamel_estimate_audit(traj_f: Trajectory, triplet, nl, params, plan,
                           steps: int = 16) -> NormReport:
    """Measure both sides of the inhomogeneous smoothing estimates.

    traj_f is the forcing trajectory f(tau).  The report carries the
    norms of G f and the ratios lhs / (T^(1 - b gamma/q) * forcing norm)
    for the sup-in-time, space-time, and weighted-sup left sides.
    """
    m, p, q = triplet.m, triplet.p, triplet.q
    b = nl.b
    if p <= b + 1:
        raise ValueError(f"need p > b + 1, got p={p}, b={b}")
    k = params.k
    T = float(traj_f.times[-1])
    g_states = [duhamel(traj_f, float(t), plan, steps) if t > 0 else
                GridFunction(plan.physical_grid,
                             np.zeros(plan.physical_grid.size), PHYSICAL,
                             params)
                for t in traj_f.times]
    traj_g = Trajectory(traj_f.times, g_states, [0.0] * len(g_states))

    lhs_inf = spacetime_norm(traj_g, math.inf, q, k)
    lhs_m = spacetime_norm(traj_g, m, p, k)
    lhs_cm = cm_norm(traj_g, m, p, k)

    if p <= q * (1.0 + b):
        forcing = spacetime_norm(traj_f, m / (b + 1.0), p / (b + 1.0), k)
        forcing_c = cm_norm(traj_f, m / (b + 1.0), p / (b + 1.0), k)
    else:
        theta = (p - q * (b + 1.0)) / ((b + 1.0) * (p - q))
        root = _power_trajectory(traj_f, 1.0 / (b + 1.0), params)
        a_sup = spacetime_norm(root, math.inf, q, k)
        b_st = spacetime_norm(root, m, p, k)
        forcing = a_sup ** (theta * (b + 1.0)) * b_st ** ((1.0 - theta) * (b + 1.0))
        b_cm = cm_norm(root, m, p, k)
        forcing_c = a_sup ** (theta * (b + 1.0)) * b_cm ** ((1.0 - theta) * (b + 1.0))

    t_pow = T ** (1.0 - b * params.gamma / q)
    pos = traj_g.times > 0
    vals_q = np.array([lp_norm_deta(s, q, k) for s in traj_g.states])
    fitted = (decay_exponent_fit(traj_g.times[pos], vals_q[pos])
              if np.all(vals_q[pos] > 0) and pos.sum() >= 5 else math.nan)
    return NormReport(
        triplet=triplet,
        value_Lm_Lp=lhs_m, value_Linf_Lq=lhs_inf, value_Cm=lhs_cm,
        fitted_exponent=fitted,
        ratio_Linf=lhs_inf / (t_pow * forcing) if forcing > 0 else math.nan,
        ratio_Lm=lhs_m / (t_pow * forcing) if forcing > 0 else math.nan,
        ratio_Cm=lhs_cm / (t_pow * forcing_c) if forcing_c > 0 else math.nan)
