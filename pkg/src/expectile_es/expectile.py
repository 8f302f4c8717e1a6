"""Expectiles as roots of the asymmetric first-order condition.

For a level u in (0, 1/2] the expectile e_u(L) is the unique root of

    h(x) = (1 - u) E[(L - x)^+] - u E[(L - x)^-]
         = (1 - 2u) E[(L - x)^+] - u (x - E[L]),

which is continuous and strictly decreasing with h(E[L]) >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .distributions import FiniteLossModel, LossDistribution
from .errors import DegenerateTail, DomainError, UnsupportedKind

_MAX_DOUBLINGS = 2100


def check_level(u, *, upper=0.5):
    u = float(u)
    if not (0.0 < u <= upper):
        raise DomainError(f"risk level must lie in (0, {upper}], got {u}")
    return u


def foc_residual(dist: LossDistribution, u: float, x: float, mean: float | None = None) -> float:
    """h(x); positive left of the expectile, negative right of it."""
    m = dist.mean() if mean is None else mean
    return (1.0 - 2.0 * u) * dist.upper_partial(x) - u * (x - m)


def expectile(dist: LossDistribution, u: float) -> float:
    u = check_level(u)
    return _solve(dist, u, dist.mean())


def _solve(dist, u, m, hi=None):
    lo_b, hi_b = dist.essential_bounds()
    if lo_b == hi_b:
        return float(lo_b)
    if u == 0.5:
        return m
    if isinstance(dist, FiniteLossModel):
        return _finite_root(dist, u, m)

    def h(x):
        return (1.0 - 2.0 * u) * dist.upper_partial(x) - u * (x - m)

    h_lo = h(m)
    if h_lo <= 0.0:
        return m
    if hi is None or not h(hi) < 0.0:
        if math.isfinite(hi_b):
            hi = hi_b
        else:
            offset = 1.0
            hi = m + offset
            for _ in range(_MAX_DOUBLINGS):
                if h(hi) < 0.0:
                    break
                offset *= 2.0
                hi = m + offset
            else:  # pragma: no cover - needs a tail heavier than any float
                raise DomainError(f"could not bracket the expectile at level {u}")
    if h(hi) >= 0.0:
        # only possible at the essential supremum, where h vanishes
        return float(hi)
    return brentq(h, m, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)


def _finite_root(model: FiniteLossModel, u, m):
    # h is piecewise linear with knots at the atoms; solve the linear piece
    v, p = model.values, model.probs
    s0 = np.cumsum(p[::-1])[::-1]          # mass at or above atom j
    s1 = np.cumsum((p * v)[::-1])[::-1]
    above0 = np.append(s0[1:], 0.0)        # mass strictly above atom j
    above1 = np.append(s1[1:], 0.0)
    h = (1.0 - 2.0 * u) * (above1 - v * above0) - u * (v - m)
    j = int(np.searchsorted(-h, 0.0, side="right")) - 1   # last atom with h >= 0
    j = min(max(j, 0), v.size - 1)
    if h[j] == 0.0 or j == v.size - 1:
        return float(v[j])
    a, b = above1[j], above0[j]
    x = ((1.0 - 2.0 * u) * a + u * m) / ((1.0 - 2.0 * u) * b + u)
    return float(min(max(x, v[j]), v[j + 1]))


def expectile_kinks(model: FiniteLossModel, alpha: float) -> np.ndarray:
    """Levels u in (0, alpha) at which e_u(model) crosses an atom."""
    m = model.mean()
    v = model.values
    up = np.array([model.upper_partial(x) for x in v])
    with np.errstate(divide="ignore", invalid="ignore"):
        u = up / (2.0 * up + v - m)
    u = u[np.isfinite(u) & (u > 0) & (u < alpha)]
    return np.unique(u)


@dataclass(frozen=True)
class ExpectileCurve:
    levels: np.ndarray
    values: np.ndarray
    residuals: np.ndarray

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0.0))

    def rows(self):
        return zip(self.levels.tolist(), self.values.tolist(), self.residuals.tolist())


def expectile_curve(dist: LossDistribution, grid) -> ExpectileCurve:
    levels = np.asarray(grid, dtype=float)
    if levels.ndim != 1 or levels.size == 0:
        raise DomainError("grid must be a nonempty 1-d sequence")
    if np.any(np.diff(levels) <= 0):
        raise DomainError("grid must be strictly increasing")
    for u in (levels[0], levels[-1]):
        check_level(u)
    m = dist.mean()
    values = np.empty(levels.size)
    residuals = np.empty(levels.size)
    prev = None
    for i, u in enumerate(levels):
        # e_u decreases in u, so the previous root bounds the next one
        values[i] = _solve(dist, float(u), m, hi=prev)
        residuals[i] = foc_residual(dist, float(u), values[i], m)
        prev = values[i]
    return ExpectileCurve(levels, values, residuals)


def exceedance_beta(dist: LossDistribution, alpha: float) -> float:
    """beta* = P[L > e_alpha(L)]."""
    e = expectile(dist, alpha)
    beta = dist.sf(e)
    if not beta > 0.0:
        raise DegenerateTail(f"no mass above the expectile at level {alpha}")
    return beta


def expectile_density(dist: LossDistribution, x: float) -> float:
    """Density g of the law whose quantiles are the expectiles of ``dist``.

        g(x) = (F(x) E[L] - E[L 1{L<=x}])
               / (2 (x F(x) - E[L 1{L<=x}]) + E[L] - x)^2
    """
    if dist.atomic:
        raise UnsupportedKind(f"expectile density undefined for atomic kind {dist.kind}")
    m = dist.mean()

    def parts(y):
        f = dist.cdf(y)
        up = dist.upper_partial(y)
        lower_mean = m - up - y * dist.sf(y)
        num = f * m - lower_mean
        # x F - E[L 1{L<=x}] = E[(x - L)^+] = x - m + E[(L - x)^+]
        den = 2.0 * (y - m + up) + m - y
        return num, den

    num, den = parts(x)
    if den == 0.0:
        lo, hi = dist.essential_bounds()
        scale = 1e-9 * max(1.0, abs(x))
        vals = []
        for y in (x - scale, x + scale):
            if lo <= y <= hi:
                n2, d2 = parts(y)
                if d2 != 0.0:
                    vals.append(n2 / d2**2)
        return 0.5 * sum(vals) if len(vals) == 2 else (vals[0] if vals else 0.0)
    return num / den**2
