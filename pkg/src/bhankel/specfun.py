"""Real-order Bessel J, exponentially scaled modified Bessel I, and Gamma.

These are the only special functions the kernel calculus needs.  J_mu is
evaluated by the ascending power series for small arguments and the Hankel
large-argument expansion otherwise; the switch point is raised with the
order so both branches stay inside their accurate regimes.  An independent
quadrature of the Poisson integral representation serves as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


@dataclass(frozen=True)
class SpecFunConfig:
    series_switch: float = 12.0
    series_terms_max: int = 200
    asymptotic_terms: int = 30
    abs_floor: float = 1e-300

    def __post_init__(self):
        if self.series_switch <= 0:
            raise ValueError("series_switch must be positive")
        if self.series_terms_max < 1 or self.asymptotic_terms < 1:
            raise ValueError("term caps must be >= 1")


DEFAULT_CONFIG = SpecFunConfig()


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    if x <= 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def _hankel_coeffs(mu: float, kmax: int) -> np.ndarray:
    """Coefficients c_k of the large-argument expansion, c_0 = 1."""
    c = np.empty(kmax + 1)
    c[0] = 1.0
    fourmu2 = 4.0 * mu * mu
    for k in range(1, kmax + 1):
        c[k] = c[k - 1] * (fourmu2 - (2 * k - 1) ** 2) / (8.0 * k)
    return c


def _bessel_j_series(mu: float, x: np.ndarray, cfg: SpecFunConfig) -> np.ndarray:
    """Ascending power series sum_j (-1)^j (x/2)^(mu+2j) / (j! Gamma(mu+j+1))."""
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    # leading term (x/2)^mu / Gamma(mu+1), formed in log space for mu < 0
    term = np.exp(mu * np.log(xp / 2.0) - math.lgamma(mu + 1.0))
    total = term.copy()
    q = -(xp * xp) / 4.0
    for j in range(1, cfg.series_terms_max):
        term = term * q / (j * (mu + j))
        total += term
        if np.max(np.abs(term)) < 1e-18 * max(np.max(np.abs(total)), 1e-30):
            break
    out[pos] = total
    # x == 0 limit
    zero = ~pos
    if np.any(zero):
        if mu == 0.0:
            out[zero] = 1.0
        elif mu > 0.0:
            out[zero] = 0.0
        else:
            out[zero] = np.inf
    return out


def _asym_sums(mu: float, x: np.ndarray, cfg: SpecFunConfig):
    """P, Q sums of the Hankel expansion, truncated per element at the
    smallest term so the optimal-truncation error is achieved."""
    kmax = 2 * cfg.asymptotic_terms
    c = _hankel_coeffs(mu, kmax)
    p_sum = np.ones_like(x)
    q_sum = np.zeros_like(x)
    # optimal truncation: keep the partial sums at the globally smallest
    # term, since for large mu the term magnitudes rise before they fall
    best_p = p_sum.copy()
    best_q = q_sum.copy()
    min_mag = np.full_like(x, np.inf)
    xk = np.ones_like(x)
    for k in range(1, kmax + 1):
        xk = xk * x
        term = (-1.0 if (k // 2) % 2 else 1.0) * c[k] / xk
        if k % 2:
            q_sum = q_sum + term
        else:
            p_sum = p_sum + term
        mag = np.abs(term)
        better = mag < min_mag
        if better.any():
            min_mag = np.where(better, mag, min_mag)
            best_p = np.where(better, p_sum, best_p)
            best_q = np.where(better, q_sum, best_q)
    return best_p, best_q


def bessel_j(mu: float, x, cfg: SpecFunConfig = DEFAULT_CONFIG):
    """Bessel function of the first kind, real order mu > -1/2.

    Accepts scalars or arrays; x must be nonnegative.
    """
    if mu <= -0.5:
        raise ValueError(f"bessel_j requires mu > -1/2, got {mu}")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(xa < 0):
        raise ValueError("bessel_j requires x >= 0")
    out = np.empty_like(xa)
    switch = cfg.series_switch
    small = xa <= switch
    if np.any(small):
        out[small] = _bessel_j_series(mu, xa[small], cfg)
    big = ~small
    if np.any(big):
        xb = xa[big]
        p_sum, q_sum = _asym_sums(mu, xb, cfg)
        omega = xb - (0.5 * mu + 0.25) * math.pi
        out[big] = np.sqrt(2.0 / (math.pi * xb)) * (
            p_sum * np.cos(omega) - q_sum * np.sin(omega))
    return float(out[0]) if scalar else out


@lru_cache(maxsize=64)
def _jacobi_rule(a: float, npts: int):
    nodes, weights = roots_jacobi(npts, a, a)
    return nodes, weights


def bessel_j_poisson(mu: float, x: float, npts: int = 160) -> float:
    """Oracle: J_mu(x) by Gauss-Jacobi quadrature of the Poisson integral.

    J_mu(x) = (x/2)^mu / (Gamma(mu+1/2) sqrt(pi)) * int_{-1}^{1}
              cos(x t) (1-t^2)^(mu-1/2) dt.
    The odd (imaginary) part of the integrand vanishes by symmetry, so only
    the cosine survives.  The weight (1-t^2)^(mu-1/2) is absorbed into the
    Jacobi rule, which keeps the quadrature accurate even for mu < 1/2.
    """
    if mu <= -0.5:
        raise ValueError(f"bessel_j_poisson requires mu > -1/2, got {mu}")
    if x < 0:
        raise ValueError("bessel_j_poisson requires x >= 0")
    if x == 0.0:
        return 1.0 if mu == 0.0 else (0.0 if mu > 0 else math.inf)
    logpref = mu * math.log(x / 2.0) - math.lgamma(mu + 0.5) - 0.5 * math.log(math.pi)
    if logpref > 6.0:
        # the prefactor is large and the integral cancels almost completely;
        # evaluate the quadrature in extended precision
        return _poisson_mp(mu, x)
    nodes, weights = _jacobi_rule(mu - 0.5, npts)
    integral = float(np.dot(weights, np.cos(x * nodes)))
    return math.exp(logpref) * integral


def _poisson_mp(mu: float, x: float) -> float:
    import mpmath as mp

    with mp.workdps(40):
        mmu = mp.mpf(mu)
        mx = mp.mpf(x)
        integral = mp.quad(lambda t: mp.cos(mx * t) * (1 - t * t) ** (mmu - mp.mpf("0.5")),
                           [-1, 0, 1])
        pref = (mx / 2) ** mmu / (mp.gamma(mmu + mp.mpf("0.5")) * mp.sqrt(mp.pi))
        return float(pref * integral)


def bessel_i_scaled(mu: float, x, cfg: SpecFunConfig = DEFAULT_CONFIG):
    """exp(-x) * I_mu(x), the scaled modified Bessel function.

    The scaled form stays bounded for the large arguments produced by the
    two-point semigroup kernel at small times.
    """
    if mu <= -0.5:
        raise ValueError(f"bessel_i_scaled requires mu > -1/2, got {mu}")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(xa < 0):
        raise ValueError("bessel_i_scaled requires x >= 0")
    switch = max(30.0, 0.5 * mu * mu)
    out = np.empty_like(xa)
    small = xa <= switch
    if np.any(small):
        xs = xa[small]
        res = np.zeros_like(xs)
        pos = xs > 0
        xp = xs[pos]
        term = np.exp(mu * np.log(xp / 2.0) - math.lgamma(mu + 1.0))
        total = term.copy()
        q = (xp * xp) / 4.0
        for j in range(1, cfg.series_terms_max):
            term = term * q / (j * (mu + j))
            total += term
            if np.max(term) < 1e-18 * np.max(total):
                break
        res[pos] = total * np.exp(-xp)
        if np.any(~pos):
            res[~pos] = 1.0 if mu == 0.0 else 0.0
        out[small] = res
    big = ~small
    if np.any(big):
        xb = xa[big]
        kmax = 2 * cfg.asymptotic_terms
        c = _hankel_coeffs(mu, kmax)
        total = np.ones_like(xb)
        prev = np.full_like(xb, np.inf)
        active = np.ones(xb.shape, dtype=bool)
        xk = np.ones_like(xb)
        # x^k may overflow for huge x; the resulting term underflows to
        # zero, which is the correct contribution
        with np.errstate(over="ignore"):
            for k in range(1, kmax + 1):
                xk = xk * xb
                term = ((-1.0) ** k) * c[k] / xk
                mag = np.abs(term)
                active &= mag < prev
                prev = np.where(active, mag, prev)
                total += np.where(active, term, 0.0)
                if not active.any():
                    break
        out[big] = np.maximum(total / np.sqrt(2.0 * math.pi * xb), cfg.abs_floor)
    return float(out[0]) if scalar else out
