"""Two-sided bounds on es_alpha.

Upper: the comonotonic risk measure R_phi(L) = int_0^1 phi'_+(t) q_t(L) dt.
Lower: sup over beta of (1 - gamma_beta) ES_beta(L) + gamma_beta E[L].
"""

from __future__ import annotations

import math

import numpy as np

from .distortion import gamma_beta, phi, phi_prime
from .distributions import FiniteLossModel, LossDistribution
from .errors import Divergent, DomainError
from .expectile import check_level
from .quadrature import integrate_to_zero
from .risk import expected_shortfall

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def r_phi(dist: LossDistribution, alpha: float) -> float:
    alpha = check_level(alpha)
    if isinstance(dist, FiniteLossModel):
        # q_t equals atom v_j for t in (P[L > v_j], P[L >= v_j]]
        at_or_above = np.cumsum(dist.probs[::-1])[::-1]
        above = np.append(at_or_above[1:], 0.0)
        hi = np.array([phi(alpha, min(t, 1.0)) for t in at_or_above])
        lo = np.array([phi(alpha, t) for t in above])
        return float(np.dot(dist.values, hi - lo))

    dist.mean()
    try:
        upper = integrate_to_zero(lambda t: phi_prime(alpha, t) * dist.upper_quantile(t), 0.5)
    except Divergent:
        return math.inf
    try:
        lower = integrate_to_zero(lambda s: phi_prime(alpha, 1.0 - s) * dist.quantile_level(s), 0.5)
    except Divergent:
        return -math.inf
    return upper + lower


def lower_bound_at(dist: LossDistribution, alpha: float, beta: float) -> float:
    g = gamma_beta(alpha, beta)
    return (1.0 - g) * expected_shortfall(dist, beta) + g * dist.mean()


def beta_grid(n: int = 64, smallest: float = 1e-6) -> np.ndarray:
    """n points on (0, 1), log-spaced towards both ends and symmetric about 1/2."""
    half = np.geomspace(smallest, 0.5, n // 2 + 1)[:-1]
    return np.concatenate([half, 1.0 - half[::-1]])


def r_alpha(dist: LossDistribution, alpha: float, *, tol: float = 1e-10) -> tuple[float, float]:
    """Return (sup_beta lower_bound_at, maximising beta)."""
    alpha = check_level(alpha)
    lo_b, hi_b = dist.essential_bounds()
    if lo_b == hi_b:
        return float(lo_b), 0.5
    mean = dist.mean()

    def objective(b):
        g = gamma_beta(alpha, b)
        return (1.0 - g) * expected_shortfall(dist, b) + g * mean

    grid = beta_grid()
    vals = np.array([objective(b) for b in grid])
    i = int(np.argmax(vals))
    best_b, best_v = float(grid[i]), float(vals[i])

    left = grid[i - 1] if i > 0 else grid[i] / 2.0
    right = grid[i + 1] if i + 1 < grid.size else (1.0 + grid[i]) / 2.0
    b, v = _golden_max(objective, float(left), float(right), tol)
    if v > best_v:
        best_b, best_v = b, v

    if isinstance(dist, FiniteLossModel):
        # ES_beta has kinks where beta is a tail probability; the sup may sit on one
        tails = np.cumsum(dist.probs[::-1])[::-1][1:]
        for b in tails[(tails > 0.0) & (tails < 1.0)]:
            v = objective(float(b))
            if v > best_v:
                best_b, best_v = float(b), v
    return best_v, best_b


def _golden_max(f, a, b, tol):
    if not a < b:
        raise DomainError("empty search interval")
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)
