"""Model parameters, derived exponents, and exponent-triplet classification.

The radial equation d/dt u + r^beta * A_mu(k) u = F(u) is indexed by the
spatial dimension ``n``, the weight exponent ``beta`` and the harmonic
degree ``k``.  Everything downstream (transform order, kernel exponents,
norm weights) is a deterministic function of these three numbers, collected
once in :class:`ModelParams`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Guard against the beta -> 2 singularity: every constant in the calculus
# carries a 1/(2-beta) factor.
EPS_BETA = 1e-3

#: relative slack used for "strict inequality" comparisons on floats
_REL_SLACK = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Fixed (n, beta, k) plus all derived exponents."""

    n: int
    beta: float
    k: int
    lam: float      # (n-2)/2
    mu_k: float     # (n-2)/2 + k
    mu: float       # 2*mu_k/(2-beta), the transform order
    gamma: float    # (n-beta+2k)/(2-beta), the scaling exponent
    alpha: float    # beta-k, the convolution symbol power


def derive_params(n: int, beta: float, k: int) -> ModelParams:
    """Validate (n, beta, k) and populate every derived exponent."""
    if n < 2:
        raise ValueError(f"spatial dimension must satisfy n >= 2, got {n}")
    if not (0.0 <= beta <= 2.0 - EPS_BETA):
        raise ValueError(
            f"weight exponent must lie in [0, {2.0 - EPS_BETA}], got {beta}"
        )
    if k < 0:
        raise ValueError(f"harmonic degree must satisfy k >= 0, got {k}")
    lam = (n - 2) / 2.0
    mu_k = lam + k
    mu = 2.0 * mu_k / (2.0 - beta)
    if mu <= -0.5:
        raise ValueError(f"transform order mu={mu} <= -1/2 is outside validity")
    gamma = (n - beta + 2 * k) / (2.0 - beta)
    alpha = beta - k
    return ModelParams(n=n, beta=float(beta), k=k, lam=lam, mu_k=mu_k,
                       mu=mu, gamma=gamma, alpha=alpha)


@dataclass(frozen=True)
class Triplet:
    """Lebesgue exponent triplet (m, p, q) with its classification."""

    m: float
    p: float
    q: float
    kind: str  # 'admissible' | 'generalized' | 'neither'


@dataclass(frozen=True)
class NonlinearitySpec:
    """Power nonlinearity +/- |u|^b u and its critical exponent."""

    b: float
    sign: float  # +1 focusing, -1 defocusing
    q0: float    # gamma * b


def make_nonlinearity(b: float, sign: float, params: ModelParams) -> NonlinearitySpec:
    if b <= 0:
        raise ValueError(f"nonlinearity power must be positive, got {b}")
    if sign not in (+1.0, -1.0, 1, -1):
        raise ValueError("sign must be +1 (focusing) or -1 (defocusing)")
    return NonlinearitySpec(b=float(b), sign=float(sign), q0=params.gamma * b)


def _inv(x: float) -> float:
    """1/x with the convention 1/inf = 0."""
    return 0.0 if math.isinf(x) else 1.0 / x


def _strictly_less(a: float, b: float) -> bool:
    """a < b with a relative slack so that float boundary cases do not pass."""
    if math.isinf(b):
        return not math.isinf(a)
    return a < b and not math.isclose(a, b, rel_tol=_REL_SLACK)


def admissible_m(p: float, q: float, params: ModelParams) -> float:
    """Solve 1/m = gamma*(1/q - 1/p); returns inf when p == q."""
    if q <= 1.0:
        raise ValueError(f"need q > 1, got q={q}")
    if p < q:
        raise ValueError(f"need p >= q, got p={p} < q={q}")
    inv_m = params.gamma * (_inv(q) - _inv(p))
    if inv_m == 0.0:
        return math.inf
    return 1.0 / inv_m


def _admissible_bound(q: float, params: ModelParams) -> float:
    n, beta, k = params.n, params.beta, params.k
    if n > 2 - 2 * k:
        return q * (n - beta + 2 * k) / (n + 2 * k - 2)
    return math.inf


def _generalized_bound(q: float, params: ModelParams) -> float:
    n, beta, k = params.n, params.beta, params.k
    if math.isinf(q):
        # denominator n + 2k - 2q + (q-1)beta -> -inf for beta < 2
        return math.inf
    denom = n + 2 * k - 2 * q + (q - 1) * beta
    if n > 2 * q + (1 - q) * beta - 2 * k:
        return q * (n - beta + 2 * k) / denom
    return math.inf


def classify_triplet(m: float, p: float, q: float, params: ModelParams) -> Triplet:
    """Classify (m, p, q) as admissible, generalized admissible, or neither."""
    for name, e in (("m", m), ("p", p), ("q", q)):
        if not (e > 1.0):
            raise ValueError(f"exponent {name}={e} must lie in (1, inf]")
    relation = math.isclose(_inv(m), params.gamma * (_inv(q) - _inv(p)),
                            rel_tol=_REL_SLACK, abs_tol=1e-15)
    kind = "neither"
    if relation and q <= p:
        if _strictly_less(p, _admissible_bound(q, params)):
            kind = "admissible"
        elif _strictly_less(p, _generalized_bound(q, params)):
            kind = "generalized"
    return Triplet(m=m, p=p, q=q, kind=kind)
