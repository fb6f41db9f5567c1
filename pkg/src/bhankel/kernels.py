"""Evolution kernels, the three-point product kernel, and #-convolution.

Contents:

* ``kernel_K`` -- the closed-form single-point evolution kernel
  K(r,t) = ((2-beta) t)^(-mu-1) exp(-r^(2-beta)/((2-beta)^2 t)) r^k
  and its exact weighted L^m norm (a pure power law in t).
* ``semigroup_kernel`` -- the two-point kernel whose rho-integral applies
  the linear semigroup; evaluated with the scaled Bessel I so the large
  cancelling exponents combine analytically.
* ``delsarte_D`` -- the three-point kernel supported where the stretched
  radii s_i = (2/(2-beta)) x_i^((2-beta)/2) form a triangle.
* ``delsarte_integral`` -- single-variable integrals of D against power
  weights via a cosine substitution that turns the Heron-area factor into
  a Gauss-Jacobi weight (spectrally accurate, no endpoint singularity).
* ``sharp_convolve`` -- the convolution with product rule
  H(f # g) = eta^(beta-k) Hf Hg, computed spectrally, plus the direct
  double-integral form as a cross-check oracle.
* ``young_audit`` -- both sides of the convolution inequality
  ||f#g/x^k||_a <= Gamma(mu+1)^(-1) (2-beta)^(-mu) ||f/z^k||_b ||g/y^k||_c.
* ``watson_lhs``/``watson_rhs`` -- the Gaussian-weighted Bessel moment
  identity used as the quadrature-engine acceptance gate.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import roots_jacobi

from .grids import GridFunction, PHYSICAL, lp_norm_deta
from .specfun import DEFAULT_CONFIG, bessel_i_scaled, bessel_j, gamma_fn
from .transform import hankel_forward, hankel_inverse

# degenerate triangles (zero Heron area) within this relative tolerance of
# the boundary are mapped to 0 -- the closed form is a distributional limit
# there and quadrature never needs the exact boundary
DEGENERACY_RTOL = 1e-12


# ---------------------------------------------------------------------------
# single-point kernel

def kernel_K(r, t: float, params):
    """Closed-form evolution kernel; scalar or array in r."""
    if t <= 0:
        raise ValueError(f"need t > 0, got {t}")
    r = np.asarray(r, dtype=float)
    beta, k, mu = params.beta, params.k, params.mu
    ct = (2.0 - beta) * t
    log_pref = -(mu + 1.0) * math.log(ct)
    expo = -r ** (2.0 - beta) / ((2.0 - beta) ** 2 * t)
    if k == 0:
        out = np.exp(log_pref + expo)
    else:
        with np.errstate(divide="ignore"):
            logr = np.where(r > 0, np.log(np.where(r > 0, r, 1.0)), -np.inf)
        out = np.exp(log_pref + expo + k * logr)
    return out if out.ndim else float(out)


def kernel_norm_deta(m: float, t: float, params) -> float:
    """Exact ||K(.,t)/r^k||_{L^m_deta}; a pure power law t^(gamma(1/m-1))."""
    if t <= 0:
        raise ValueError(f"need t > 0, got {t}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    beta, mu, gamma = params.beta, params.mu, params.gamma
    ct = (2.0 - beta) * t
    if math.isinf(m):
        return ct ** (-(mu + 1.0))
    return (ct ** (-(mu + 1.0))
            * (gamma_fn(gamma) / (2.0 - beta)) ** (1.0 / m)
            * ((2.0 - beta) ** 2 * t / m) ** (gamma / m))


# ---------------------------------------------------------------------------
# two-point kernel

def semigroup_kernel(rho, r, t: float, params, cfg=None):
    """Two-point kernel of the linear flow; scalar or array arguments.

    The two large exponents (the Gaussian factor and the growth of the
    Bessel I) are combined analytically into the square of a difference of
    stretched radii, so the evaluation never overflows.
    """
    if t <= 0:
        raise ValueError(f"need t > 0, got {t}")
    rho = np.asarray(rho, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(rho <= 0) or np.any(r <= 0):
        raise ValueError("radii must be positive")
    beta, lam, mu = params.beta, params.lam, params.mu
    c2 = (2.0 - beta) ** 2 * t
    s_r = r ** ((2.0 - beta) / 2.0)
    s_rho = rho ** ((2.0 - beta) / 2.0)
    arg = 2.0 * s_r * s_rho / c2
    log_i = np.log(bessel_i_scaled(mu, arg, cfg or DEFAULT_CONFIG))
    log_k = (-lam * np.log(r) - (lam + beta) * np.log(rho)
             - math.log((2.0 - beta) * t)
             - (s_r - s_rho) ** 2 / c2 + log_i)
    out = np.exp(log_k)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# three-point kernel

def _stretch(x, beta):
    return (2.0 / (2.0 - beta)) * np.asarray(x, dtype=float) ** ((2.0 - beta) / 2.0)


def _unstretch(s, beta):
    return ((2.0 - beta) / 2.0 * np.asarray(s, dtype=float)) ** (2.0 / (2.0 - beta))


def _heron(s1, s2, s3) -> float:
    """Numerically stable Heron area; negative under-root clamps to 0."""
    a, b, c = sorted((s1, s2, s3), reverse=True)
    under = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    if under <= 0:
        return 0.0
    return 0.25 * math.sqrt(under)


def _log_d_prefactor(x, y, z, params):
    """log of D(x,y,z) / Delta^(2 mu - 1): everything except the area power."""
    beta, lam, mu = params.beta, params.lam, params.mu
    lx, ly, lz = np.log(x), np.log(y), np.log(z)
    lsum = lx + ly + lz
    return ((-lam - beta) * lsum + beta * lx - math.log(1.0 - beta / 2.0)
            - mu * (3.0 * math.log(2.0 / (2.0 - beta)) + (2.0 - beta) / 2.0 * lsum)
            + (mu - 1.0) * math.log(2.0)
            - math.lgamma(mu + 0.5) - 0.5 * math.log(math.pi))


def delsarte_D(x: float, y: float, z: float, params) -> float:
    """Three-point product kernel; zero off the triangle-support set."""
    if x <= 0 or y <= 0 or z <= 0:
        raise ValueError("delsarte_D needs positive arguments")
    beta, mu = params.beta, params.mu
    s1, s2, s3 = (float(_stretch(v, beta)) for v in (x, y, z))
    smax = max(s1, s2, s3)
    if s1 + s2 + s3 - 2.0 * smax <= DEGENERACY_RTOL * smax:
        # no triangle, or degenerate within tolerance
        return 0.0
    area = _heron(s1, s2, s3)
    if area <= 0.0:
        return 0.0
    return math.exp(_log_d_prefactor(x, y, z, params)
                    + (2.0 * mu - 1.0) * math.log(area))


def delsarte_integral(fn, fixed_a: float, fixed_b: float, params,
                      slot: str = "x", npts: int = 80) -> float:
    """Integral of fn(v) * D * v^(n-1) over one slot of D, the others fixed.

    slot "x" integrates the first argument with (y,z) = (fixed_a, fixed_b);
    slot "y" the second with (x,z) fixed; slot "z" the third with (x,y)
    fixed.  Substituting the triangle angle opposite the moving side maps
    the support interval onto u = cos(theta) in (-1,1) and converts the
    area power Delta^(2 mu - 1) into the Gauss-Jacobi weight
    (1-u^2)^(mu-1/2), so the rule converges spectrally.
    """
    if slot not in ("x", "y", "z"):
        raise ValueError(f"unknown slot {slot!r}")
    beta, mu, n = params.beta, params.mu, params.n
    sa = float(_stretch(fixed_a, beta))
    sb = float(_stretch(fixed_b, beta))
    u, w = roots_jacobi(npts, mu - 0.5, mu - 0.5)
    sv = np.sqrt(np.maximum(sa * sa + sb * sb - 2.0 * sa * sb * u, 0.0))
    v = _unstretch(sv, beta)
    if slot == "x":
        xa, ya, za = v, np.full_like(v, fixed_a), np.full_like(v, fixed_b)
    elif slot == "y":
        xa, ya, za = np.full_like(v, fixed_a), v, np.full_like(v, fixed_b)
    else:
        xa, ya, za = np.full_like(v, fixed_a), np.full_like(v, fixed_b), v
    log_pref = _log_d_prefactor(xa, ya, za, params)
    # measure: dv = v * (2/(2-beta)) ds_v / s_v and s_v ds_v = sa sb d(-u)
    jac = v * (2.0 / (2.0 - beta)) * sa * sb / sv ** 2
    area_const = (2.0 * mu - 1.0) * math.log(0.5 * sa * sb)
    vals = fn(v) * np.exp(log_pref + area_const) * v ** (n - 1) * jac
    return float(np.dot(w, vals))


def delsarte_identity_rhs(fixed_a: float, fixed_b: float, params,
                          slot: str = "x") -> float:
    """Closed form of the three weighted integrals of D.

    slot "x": integral of x^(k-beta) D -> c (yz)^(k-beta);
    slot "y": integral of y^k D -> c x^k z^(k-beta);
    slot "z": integral of z^k D -> c x^k y^(k-beta);
    with c = Gamma(mu+1)^(-1) (2-beta)^(-mu).
    """
    beta, k, mu = params.beta, params.k, params.mu
    c = (2.0 - beta) ** (-mu) / gamma_fn(mu + 1.0)
    if slot == "x":
        return c * (fixed_a * fixed_b) ** (k - beta)
    if slot in ("y", "z"):
        return c * fixed_a ** k * fixed_b ** (k - beta)
    raise ValueError(f"unknown slot {slot!r}")


# ---------------------------------------------------------------------------
# convolution

def sharp_convolve(f: GridFunction, g: GridFunction, plan) -> GridFunction:
    """Convolution defined by the product rule H(f#g) = eta^(beta-k) Hf Hg."""
    if f.space != PHYSICAL or g.space != PHYSICAL:
        raise ValueError("sharp_convolve expects physical-space inputs")
    if f.grid is not plan.physical_grid or g.grid is not plan.physical_grid:
        raise ValueError("inputs must live on the plan's physical grid")
    alpha = plan.params.alpha
    hf = hankel_forward(f, plan)
    hg = hankel_forward(g, plan)
    eta = plan.spectral_grid.nodes
    prod = GridFunction(plan.spectral_grid, eta ** alpha * hf.values * hg.values,
                        hf.space, plan.params)
    return hankel_inverse(prod, plan)


def sharp_convolve_direct(f_fn, g_fn, x: float, y_grid, params,
                          npts: int = 80) -> float:
    """Direct double-integral convolution at one output point.

    Inner integral: the translate f*(x,y) = integral of f(z) D(x,y,z)
    z^(n-1) dz via the Gauss-Jacobi rule; outer integral over y on the
    supplied quadrature grid.  O(N * npts) per output point -- used only
    as a cross-check oracle for sharp_convolve.
    """
    y = y_grid.nodes
    inner = np.array([
        delsarte_integral(f_fn, x, yi, params, slot="z", npts=npts)
        for yi in y
    ])
    return float(np.dot(y_grid.weights, inner * g_fn(y) * y ** (params.n - 1)))


def young_audit(f: GridFunction, g: GridFunction, a: float, b: float,
                c: float, plan):
    """Both sides of the weighted convolution inequality; returns (lhs, rhs).

    Exponents must satisfy 1 + 1/a = 1/b + 1/c.  For nonnegative f, g the
    contract is lhs <= rhs (with equality at a = b = c = 1).
    """
    if min(a, b, c) < 1:
        raise ValueError("exponents must be >= 1")
    if abs(1.0 + 1.0 / a - 1.0 / b - 1.0 / c) > 1e-12:
        raise ValueError("exponent relation 1 + 1/a = 1/b + 1/c violated")
    params = plan.params
    conv = sharp_convolve(f, g, plan)
    lhs = lp_norm_deta(conv, a, params.k)
    const = (2.0 - params.beta) ** (-params.mu) / gamma_fn(params.mu + 1.0)
    rhs = const * lp_norm_deta(f, b, params.k) * lp_norm_deta(g, c, params.k)
    return lhs, rhs


# ---------------------------------------------------------------------------
# quadrature-engine gate

def watson_rhs(nu: float, a: float, p: float) -> float:
    """Closed form a^nu / (2 p^2)^(nu+1) * exp(-a^2 / (4 p^2))."""
    return a ** nu / (2.0 * p * p) ** (nu + 1.0) * math.exp(-a * a / (4.0 * p * p))


def watson_lhs(nu: float, a: float, p: float, panels: int = 60,
               order: int = 16, cfg=None) -> float:
    """Quadrature of the Gaussian-weighted Bessel moment.

    integral over t in (0, inf) of J_nu(a t) exp(-p^2 t^2) t^(nu+1) dt,
    truncated where the Gaussian factor reaches 1e-220 and covered by
    uniform Gauss-Legendre panels.
    """
    t_max = math.sqrt(220.0 * math.log(10.0)) / p
    edges = np.linspace(0.0, t_max, panels + 1)
    gl_n, gl_w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * gl_n[None, :]).ravel()
    w = (half[:, None] * gl_w[None, :]).ravel()
    vals = (bessel_j(nu, a * t, cfg or DEFAULT_CONFIG)
            * np.exp(-p * p * t * t) * t ** (nu + 1.0))
    return float(np.dot(w, vals))
