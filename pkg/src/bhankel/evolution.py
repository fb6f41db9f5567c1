"""Linear semigroup, Duhamel integration, and the Picard mild-solution solver.

The linear flow is diagonal in transform space with multiplier
exp(-rho^(2-beta) t); the nonlinearity +-|u|^b u is diagonal in physical
space.  The solver therefore alternates representations: states are kept
as spectral coefficient vectors, the forcing is formed pointwise on the
physical grid and transformed back each iteration.

Time marching uses windows whose length adapts to the current norm (the
contraction argument only holds under a smallness condition), with
composite-midpoint quadrature of the Duhamel integral inside each window
and automatic window halving when the fixed-point iteration fails to
contract.  Blow-up is declared when the reported norm exceeds a large
threshold, which separates genuine growth from iteration divergence.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .grids import GridFunction, PHYSICAL, SPECTRAL, lp_norm_deta
from .kernels import semigroup_kernel
from .model import NonlinearitySpec
from .transform import hankel_forward, hankel_inverse

MAX_HALVINGS = 12
MAX_WINDOWS = 200_000


@dataclass
class EvolutionConfig:
    t_end: float
    steps: int
    nonlinearity: NonlinearitySpec
    q: float
    picard_tol: float = 1e-10
    picard_max_iter: int = 50
    blowup_threshold: float = 1e12
    substeps: int = 4          # Duhamel midpoint panels per window
    triplet: object = None     # optional Triplet for time-weighted norms

    def __post_init__(self):
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.picard_tol <= 0 or self.blowup_threshold <= 0:
            raise ValueError("tolerances must be positive")
        if self.q < 1:
            raise ValueError("q must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    norms_q: np.ndarray
    norms_p_weighted: np.ndarray = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.norms_q = np.asarray(self.norms_q, dtype=float)
        if not (len(self.times) == len(self.states) == len(self.norms_q)):
            raise ValueError("trajectory arrays must have equal length")
        if self.times.size and (self.times[0] != 0.0
                                or np.any(np.diff(self.times) <= 0)):
            raise ValueError("times must start at 0 and increase strictly")
        if (self.norms_p_weighted is not None
                and len(self.norms_p_weighted) != len(self.times)):
            raise ValueError("norms_p_weighted length mismatch")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,norm_q,norm_p_weighted\n")
        for i, t in enumerate(self.times):
            w = ("" if self.norms_p_weighted is None
                 else f"{self.norms_p_weighted[i]:.17g}")
            buf.write(f"{t:.17g},{self.norms_q[i]:.17g},{w}\n")
        return buf.getvalue()


@dataclass
class ContractionConstants:
    C1: float
    C2: float
    T_exist: float
    probe_C1: int = -1   # index of the probe achieving C1
    probe_C2: int = -1

    def __post_init__(self):
        if self.C1 <= 0 or self.C2 <= 0:
            raise ValueError("measured constants must be positive")


@dataclass
class BlowupReport:
    detected: bool
    T_star_fit: float = math.nan
    exponent_fit: float = math.nan
    lower_bound_exponent: float = math.nan


# ---------------------------------------------------------------------------
# linear flow

def semigroup_apply(a: GridFunction, t: float, plan) -> GridFunction:
    """Apply the linear flow: inverse transform of exp(-rho^(2-beta) t) Ha."""
    if t < 0:
        raise ValueError(f"need t >= 0, got {t}")
    if t == 0:
        return a.copy()
    ha = hankel_forward(a, plan)
    mult = np.exp(-plan.spectral_grid.nodes ** (2.0 - plan.params.beta) * t)
    return hankel_inverse(
        GridFunction(plan.spectral_grid, mult * ha.values, SPECTRAL, plan.params),
        plan)


def semigroup_apply_kernel(a: GridFunction, t: float, plan) -> GridFunction:
    """Two-point-kernel route for the linear flow; quadrature oracle.

    Integrates the two-point kernel against a over the physical grid:
    same result as semigroup_apply but without the transform pair.
    """
    if t <= 0:
        raise ValueError(f"need t > 0, got {t}")
    grid = plan.physical_grid
    rho = grid.nodes
    mat = semigroup_kernel(rho[None, :], rho[:, None], t, plan.params)
    vals = mat @ (a.values * rho ** (plan.params.n - 1) * grid.weights)
    return GridFunction(grid, vals, PHYSICAL, plan.params)


# ---------------------------------------------------------------------------
# Duhamel integral

def _spectral_states(traj: Trajectory, plan) -> np.ndarray:
    return np.array([hankel_forward(s, plan).values for s in traj.states])


def duhamel(forcing: Trajectory, t: float, plan, steps: int) -> GridFunction:
    """Composite-midpoint quadrature of int_0^t S(t - tau) f(tau) dtau.

    The integrand is evaluated in transform space; forcing coefficients at
    panel midpoints are linear interpolants of the trajectory states.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if forcing.times[-1] < t - 1e-12 * max(t, 1.0):
        raise ValueError("forcing trajectory does not cover [0, t]")
    grid = plan.spectral_grid
    if t == 0:
        zero = np.zeros(plan.physical_grid.size)
        return GridFunction(plan.physical_grid, zero, PHYSICAL, plan.params)
    hf = _spectral_states(forcing, plan)
    dt = t / steps
    mids = (np.arange(steps) + 0.5) * dt
    acc = np.zeros(grid.size)
    decay = grid.nodes ** (2.0 - plan.params.beta)
    for tau in mids:
        j = np.searchsorted(forcing.times, tau) - 1
        j = min(max(j, 0), len(forcing.times) - 2)
        t0, t1 = forcing.times[j], forcing.times[j + 1]
        w = (tau - t0) / (t1 - t0)
        coeff = (1.0 - w) * hf[j] + w * hf[j + 1]
        acc += dt * np.exp(-decay * (t - tau)) * coeff
    return hankel_inverse(GridFunction(grid, acc, SPECTRAL, plan.params), plan)


# ---------------------------------------------------------------------------
# Picard fixed point

def _forcing_coeffs(hu: np.ndarray, nl: NonlinearitySpec, plan):
    """Spectral coefficients of +-|u|^b u for each row of spectral states.

    Returns None when the iterate has escaped to overflow; the caller
    treats that as a non-contracting window.
    """
    out = np.empty_like(hu)
    for i in range(hu.shape[0]):
        u = hankel_inverse(
            GridFunction(plan.spectral_grid, hu[i], SPECTRAL, plan.params), plan)
        with np.errstate(over="ignore"):
            f = nl.sign * np.abs(u.values) ** nl.b * u.values
        if not np.all(np.isfinite(f)):
            return None
        out[i] = hankel_forward(
            GridFunction(plan.physical_grid, f, PHYSICAL, plan.params), plan).values
    return out


def _window_iterate(hu0: np.ndarray, t0: float, h: float, nsub: int,
                    nl: NonlinearitySpec, plan, tol: float, max_iter: int):
    """Fixed-point iteration on one window [t0, t0+h].

    Returns (states hu at the nsub+1 sub-times, iterate difference norms)
    or None when the iteration fails to contract.
    """
    decay = plan.spectral_grid.nodes ** (2.0 - plan.params.beta)
    dt = h / nsub
    tau = dt * np.arange(nsub + 1)
    lin = np.exp(-decay[None, :] * tau[:, None]) * hu0[None, :]
    hu = lin.copy()
    diffs = []
    prev_res = math.inf
    for _ in range(max_iter):
        hf = _forcing_coeffs(hu, nl, plan)
        if hf is None:
            return None
        new = lin.copy()
        for i in range(1, nsub + 1):
            acc = np.zeros_like(hu0)
            for j in range(i):
                mid_coeff = 0.5 * (hf[j] + hf[j + 1])
                tmid = (j + 0.5) * dt
                acc += dt * np.exp(-decay * (tau[i] - tmid)) * mid_coeff
            new[i] = lin[i] + acc
        if not np.all(np.isfinite(new)):
            return None
        u_new = hankel_inverse(
            GridFunction(plan.spectral_grid, new[-1], SPECTRAL, plan.params), plan)
        u_old = hankel_inverse(
            GridFunction(plan.spectral_grid, hu[-1], SPECTRAL, plan.params), plan)
        diff = lp_norm_deta(
            GridFunction(plan.physical_grid, u_new.values - u_old.values,
                         PHYSICAL, plan.params), 2)
        scale = max(lp_norm_deta(u_new, 2), 1e-300)
        res = diff / scale
        diffs.append(diff)
        hu = new
        if res <= tol:
            return hu, diffs
        if res > 2.0 * prev_res and res > 1.0:
            return None  # diverging iteration: caller halves the window
        prev_res = min(prev_res, res)
    return None


def picard_solve(u0: GridFunction, cfg: EvolutionConfig, plan):
    """March the mild-solution fixed point to t_end or to blow-up.

    Returns (Trajectory, BlowupReport).  Windows adapt to the current
    norm; non-contracting windows are halved up to MAX_HALVINGS times.
    """
    if u0.space != PHYSICAL:
        raise ValueError("u0 must be physical-space")
    nl = cfg.nonlinearity
    k = plan.params.k
    gamma = plan.params.gamma
    hu = hankel_forward(u0, plan).values

    def norm_q(coeffs):
        u = hankel_inverse(
            GridFunction(plan.spectral_grid, coeffs, SPECTRAL, plan.params), plan)
        return lp_norm_deta(u, cfg.q, k), u

    times = [0.0]
    nq0, u_cur = norm_q(hu)
    states = [u_cur]
    norms = [nq0]
    balance = 1.0 / nl.b - gamma / cfg.q
    h_base = cfg.t_end / cfg.steps
    t = 0.0
    detected = False
    windows = 0
    while t < cfg.t_end * (1.0 - 1e-12) and windows < MAX_WINDOWS:
        windows += 1
        h = min(h_base, cfg.t_end - t)
        peak = float(np.max(np.abs(states[-1].values)))
        if peak > 0:
            # nonlinear timescale of the space-free comparison flow
            # u' = +-u^(b+1); windows shorter than this keep the
            # fixed-point iteration contracting even during blow-up
            h = min(h, 0.25 / peak ** nl.b)
        result = None
        for _ in range(MAX_HALVINGS + 1):
            result = _window_iterate(hu, t, h, cfg.substeps, nl, plan,
                                     cfg.picard_tol, cfg.picard_max_iter)
            if result is not None:
                break
            h *= 0.5
        if result is None:
            raise RuntimeError(
                f"fixed-point iteration failed to contract at t={t:.6g} "
                f"after {MAX_HALVINGS} window halvings")
        hu_states, _ = result
        dt = h / cfg.substeps
        for i in range(1, cfg.substeps + 1):
            tt = t + i * dt
            if tt <= times[-1]:
                continue
            nq, u = norm_q(hu_states[i])
            times.append(tt)
            states.append(u)
            norms.append(nq)
        hu = hu_states[-1]
        t += h
        if norms[-1] > cfg.blowup_threshold:
            detected = True
            break
        if not math.isfinite(norms[-1]):
            raise FloatingPointError("non-finite state norm during marching")

    weighted = None
    if cfg.triplet is not None:
        tr = cfg.triplet
        weighted = np.array([
            (0.0 if tt == 0 else tt ** (1.0 / tr.m) * lp_norm_deta(s, tr.p, k))
            for tt, s in zip(times, states)])
    traj = Trajectory(np.array(times), states, np.array(norms), weighted)
    if detected:
        report = blowup_fit((traj.times, traj.norms_q))
        report.lower_bound_exponent = balance
    else:
        report = BlowupReport(detected=False, lower_bound_exponent=balance)
    return traj, report


def picard_iterate_diffs(u0: GridFunction, T: float, nl: NonlinearitySpec,
                         plan, nsub: int = 4, max_iter: int = 30):
    """Successive iterate difference norms on a single window [0, T].

    Used to certify the contraction: when T satisfies the smallness
    condition the ratios diff[j+1]/diff[j] stay below ~1/2.
    """
    hu0 = hankel_forward(u0, plan).values
    result = _window_iterate(hu0, 0.0, T, nsub, nl, plan, 1e-14, max_iter)
    if result is None:
        raise RuntimeError("iteration failed to contract on [0, T]")
    return result[1]


# ---------------------------------------------------------------------------
# measured constants and existence time

def _x_norm(times, lp_vals, lq_vals, m, degenerate=False):
    """Discrete L^inf(L^q) + L^m(L^p) norm on the sample times.

    When the triplet is degenerate ((m, p) = (inf, q)) the two components
    are the same norm and are counted once.
    """
    sup_q = float(np.max(lq_vals))
    if math.isinf(m):
        return sup_q if degenerate else sup_q + float(np.max(lp_vals))
    integral = float(np.trapezoid(np.asarray(lp_vals) ** m, times))
    return sup_q + integral ** (1.0 / m)


def _linear_trajectory(psi: GridFunction, T: float, plan, nt: int):
    times = np.linspace(0.0, T, nt)
    states = [psi.copy()] + [semigroup_apply(psi, float(tt), plan)
                             for tt in times[1:]]
    return times, states


def measure_contraction_constants(triplet, params, plan, probe_set,
                                  nl: NonlinearitySpec, T: float = 1.0,
                                  nt: int = 33) -> ContractionConstants:
    """Measure C1 (homogeneous) and C2 (Duhamel) over a probe family.

    C1 = max ||S(.)psi||_X / ||psi||_q; C2 = max ||G(|u|^b u)||_X /
    (T^(1 - b gamma / q) ||u||_X^(b+1)) with u the linear flow of the
    probe.  The existence time reported uses the largest probe norm.
    """
    if not probe_set:
        raise ValueError("probe set must be nonempty")
    k = params.k
    degenerate = math.isinf(triplet.m) and triplet.p == triplet.q
    c1_best = (0.0, -1)
    c2_best = (0.0, -1)
    max_u0_norm = 0.0
    for idx, psi in enumerate(probe_set):
        times, states = _linear_trajectory(psi, T, plan, nt)
        lp = [lp_norm_deta(s, triplet.p, k) for s in states]
        lq = [lp_norm_deta(s, triplet.q, k) for s in states]
        xnorm = _x_norm(times, lp, lq, triplet.m, degenerate)
        q_norm = lp_norm_deta(psi, triplet.q, k)
        max_u0_norm = max(max_u0_norm, q_norm)
        c1 = xnorm / q_norm
        if c1 > c1_best[0]:
            c1_best = (c1, idx)
        forcing_states = [
            GridFunction(plan.physical_grid,
                         nl.sign * np.abs(s.values) ** nl.b * s.values,
                         PHYSICAL, params)
            for s in states]
        forcing = Trajectory(times, forcing_states,
                             [lp_norm_deta(s, triplet.q, k)
                              for s in forcing_states])
        g_states = [duhamel(forcing, float(tt), plan, steps=max(1, int(8 * tt / T)))
                    if tt > 0 else forcing_states[0].copy()
                    for tt in times]
        g_states[0].values[:] = 0.0
        g_lp = [lp_norm_deta(s, triplet.p, k) for s in g_states]
        g_lq = [lp_norm_deta(s, triplet.q, k) for s in g_states]
        g_x = _x_norm(times, g_lp, g_lq, triplet.m, degenerate)
        denom = T ** (1.0 - nl.b * params.gamma / triplet.q) * xnorm ** (nl.b + 1.0)
        c2 = g_x / denom
        if c2 > c2_best[0]:
            c2_best = (c2, idx)
    consts = ContractionConstants(C1=c1_best[0], C2=c2_best[0], T_exist=math.nan,
                                  probe_C1=c1_best[1], probe_C2=c2_best[1])
    if 1.0 - nl.b * params.gamma / triplet.q > 0:
        consts.T_exist = existence_time(max_u0_norm, consts, nl, triplet.q,
                                        params.gamma)
    return consts


def existence_time(u0_norm: float, constants: ContractionConstants,
                   nl: NonlinearitySpec, q: float, gamma: float) -> float:
    """Largest T with (2 C1)^b C2 T^(1 - b gamma / q) ||u0||^b = 1/2."""
    expo = 1.0 - nl.b * gamma / q
    if expo <= 0:
        raise ValueError(
            "q <= critical exponent: the smallness condition does not close "
            "(only small-data global existence applies)")
    if u0_norm == 0:
        return math.inf
    base = 0.5 / ((2.0 * constants.C1) ** nl.b * constants.C2 * u0_norm ** nl.b)
    return base ** (1.0 / expo)


# ---------------------------------------------------------------------------
# blow-up fitting

def blowup_fit(norm_history) -> BlowupReport:
    """Joint least-squares fit of value = C (T* - t)^(-e) near blow-up.

    Fits over the last decade of growth; the inner (C, e) problem is
    linear in log space for each trial T*, which is optimized by golden
    section beyond the final sample time.
    """
    times, values = (np.asarray(a, dtype=float) for a in norm_history)
    if times.size < 8:
        raise ValueError("need at least 8 samples to fit a blow-up rate")
    if values[-1] < 1e3 * values[0]:
        raise ValueError("no blow-up signature: insufficient growth")
    vmax = values.max()
    idx = np.nonzero(values >= vmax / 10.0)[0]
    if idx.size < 8:
        idx = np.arange(max(0, times.size - 8), times.size)
    ts, vs = times[idx], np.log(values[idx])
    t_last = times[-1]
    span = max(t_last - ts[0], 1e-12)

    def residual(t_star):
        x = -np.log(t_star - ts)
        coef = np.polyfit(x, vs, 1)
        return float(np.sum((np.polyval(coef, x) - vs) ** 2))

    lo = t_last * (1.0 + 1e-12) + 1e-15
    res = minimize_scalar(residual, bounds=(lo, t_last + 2.0 * span),
                          method="bounded",
                          options={"xatol": 1e-14 * max(t_last, 1.0)})
    t_star = float(res.x)
    x = -np.log(t_star - ts)
    coef = np.polyfit(x, vs, 1)
    return BlowupReport(detected=True, T_star_fit=t_star,
                        exponent_fit=float(coef[0]))
