"""Quantile- and expectile-based risk measures and per-level reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from scipy.optimize import brentq
from scipy.special import lambertw

from .distortion import phi
from .distributions import (
    Bernoulli,
    BetaPower,
    Exponential1,
    FiniteLossModel,
    Koenker,
    LossDistribution,
    Pareto,
    Uniform01,
)
from .errors import DegenerateTail, Divergent, DomainError, RiskError, UnsupportedKind
from .expectile import check_level, exceedance_beta, expectile, expectile_kinks
from .quadrature import integrate_interval, integrate_to_zero


def _check_prob_level(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {alpha}")
    return alpha


def value_at_risk(dist: LossDistribution, alpha: float) -> float:
    return dist.upper_quantile(_check_prob_level(alpha))


def expected_shortfall(dist: LossDistribution, alpha: float) -> float:
    # (1/alpha) int_0^alpha q_u du = q_alpha + E[(L - q_alpha)^+] / alpha
    alpha = _check_prob_level(alpha)
    q = dist.upper_quantile(alpha)
    return q + dist.upper_partial(q) / alpha


def tail_conditional_expectation(dist: LossDistribution, alpha: float) -> float:
    """E[L | L > q_alpha], with strict exceedance at atoms."""
    q = value_at_risk(dist, alpha)
    tail = dist.sf(q)
    if not tail > 0.0:
        raise DegenerateTail(f"P[L > q_alpha] = 0 at level {alpha}")
    return q + dist.upper_partial(q) / tail


def expectile_tce(dist: LossDistribution, alpha: float) -> float:
    """E[L | L > e_alpha], computed as ES at the exceedance level beta*."""
    return expected_shortfall(dist, exceedance_beta(dist, alpha))


def expectile_es(dist: LossDistribution, alpha: float, method: str = "auto") -> float:
    """(1/alpha) int_0^alpha e_u du; may be +inf.

    ``method`` is "auto" (closed form for uniform, bernoulli, pareto(2),
    koenker and finite laws, quadrature otherwise), "quadrature" or
    "closed_form".
    """
    alpha = check_level(alpha)
    if method not in ("auto", "quadrature", "closed_form"):
        raise ValueError(f"unknown method {method!r}")
    if method != "quadrature":
        if method == "closed_form" or _has_elementary_form(dist):
            value = closed_form_es(dist, alpha)
            if value is not None:
                return value
            if method == "closed_form":
                raise UnsupportedKind(f"no closed form registered for {dist.describe()}")
    return _es_quadrature(dist, alpha)


def _has_elementary_form(dist):
    if isinstance(dist, Pareto):
        return dist.a == 2.0
    return isinstance(dist, (Uniform01, FiniteLossModel, Koenker))


def _es_quadrature(dist, alpha):
    lo, hi = dist.essential_bounds()
    if lo == hi:
        return float(lo)
    dist.mean()  # surface NonIntegrable before integrating
    kinks = expectile_kinks(dist, alpha) if isinstance(dist, FiniteLossModel) else None
    try:
        total = integrate_to_zero(lambda u: expectile(dist, u), alpha, kinks=kinks)
    except Divergent:
        return math.inf
    return total / alpha


def closed_form_es(dist: LossDistribution, alpha: float) -> float | None:
    """es_alpha from the explicit family formulas, or None if unregistered.

    Beta and exponential laws have only an integral representation (the
    tail mean of the expectile-density law); it is evaluated by quadrature.
    """
    alpha = check_level(alpha)
    if isinstance(dist, Bernoulli):
        return phi(alpha, dist.p)
    if isinstance(dist, FiniteLossModel):
        return _finite_es(dist, alpha)
    if isinstance(dist, Uniform01):
        s = math.sqrt(alpha * (1.0 - alpha))
        # (1 - 2a) sqrt((1 + 2s)/(1 - 2s)) simplifies to 1 + 2s since 1 - 4s^2 = (1 - 2a)^2
        return 0.5 - math.log1p(2.0 * s) / (4.0 * alpha) + s / (2.0 * alpha)
    if isinstance(dist, Koenker):
        return 2.0 * math.sqrt((1.0 - alpha) / alpha)
    if isinstance(dist, Pareto) and dist.a == 2.0:
        e = math.sqrt((1.0 - alpha) / alpha)
        return e + math.asin(math.sqrt(alpha)) / alpha
    if isinstance(dist, Exponential1):
        lower = 1.0 + lambertw((1.0 - 2.0 * alpha) / (alpha * math.e)).real

        def integrand(x):
            return x * x * math.exp(-x) / (1.0 - x - 2.0 * math.exp(-x)) ** 2

        return integrate_interval(integrand, lower, math.inf) / alpha
    if isinstance(dist, BetaPower):
        a = dist.a

        def excess(b):
            return (1.0 - b) ** (1.0 / a) * (
                1.0 + b / a + alpha * (a + 1.0) / (a * (1.0 - 2.0 * alpha))
            ) - (1.0 - alpha) / (1.0 - 2.0 * alpha)

        if alpha == 0.5:
            lower = dist.mean()
        else:
            b_star = brentq(excess, 1e-300, 1.0, xtol=1e-300, rtol=1e-15)
            lower = (1.0 - b_star) ** (1.0 / a)

        def integrand(x):
            return x ** (a + 1.0) * (1.0 - x) / (2.0 * x ** (a + 1.0) - (a + 1.0) * x + a) ** 2

        return a * (a + 1.0) / alpha * integrate_interval(integrand, lower, 1.0)
    return None


def _finite_es(model: FiniteLossModel, alpha: float) -> float:
    """Exact es for a finite law.

    While e_u stays between consecutive atoms v_j <= x <= v_(j+1) the
    first-order condition is linear in x and
        e_u = (a + b u) / (c + d u),   a = S1, b = m - 2 S1, c = S0, d = 1 - 2 S0,
    with S0, S1 the mass and first moment above v_j.  Over [lo, lo + w]
        int e_u du = w e_lo + (a d - b c) w^2 h(r) / K^2,
    K = c + d lo, r = d w / K, h(r) = (log1p(r) - r) / r^2, which stays
    accurate as d -> 0.
    """
    v, p = model.values, model.probs
    if v.size == 1:
        return float(v[0])
    m = model.mean()
    s0 = np.append(np.cumsum(p[::-1])[::-1][1:], 0.0)
    s1 = np.append(np.cumsum((v * p)[::-1])[::-1][1:], 0.0)
    up = s1 - v * s0
    den = 2.0 * up + v - m
    level = np.where(den > 0.0, up / np.where(den > 0.0, den, 1.0), 0.5)
    level[-1] = 0.0                       # e_u reaches the largest atom only as u -> 0

    lo = level[1:]
    hi = np.minimum(level[:-1], alpha)
    keep = hi > lo
    lo, w = lo[keep], (hi - lo)[keep]
    a, c = s1[:-1][keep], s0[:-1][keep]
    b, d = m - 2.0 * a, 1.0 - 2.0 * c
    k = c + d * lo
    r = d * w / k
    return float(np.sum(w * (a + b * lo) / k + (a * d - b * c) * w**2 * _h(r) / k**2) / alpha)


def _h(r):
    """(log1p(r) - r) / r^2 with a series near 0."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 1e-2
    safe = np.where(small, 1.0, r)
    out = (np.log1p(safe) - safe) / safe**2
    # -1/2 + r/3 - r^2/4 + ...
    series = np.zeros_like(r)
    for n in range(13, 1, -1):
        series = series * r + (-1.0) ** (n + 1) / n
    return np.where(small, series, out)


@dataclass(frozen=True)
class Failed:
    """Placeholder for a measure that could not be computed."""

    code: str

    def to_json(self):
        return {"error": self.code}


def _attempt(fn, *args):
    try:
        return fn(*args)
    except RiskError as exc:
        return Failed(exc.code)


@dataclass(frozen=True)
class RiskReport:
    alpha: float
    mean: float
    var: float
    es_quantile: float
    tce_quantile: float | Failed
    expectile: float
    tce_expectile: float | Failed
    es_expectile: float | Failed
    beta_star: float | Failed

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            out[f.name] = encode_value(getattr(self, f.name))
        return out


def encode_value(v):
    if isinstance(v, Failed):
        return v.to_json()
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def risk_report(dist: LossDistribution, alpha: float) -> RiskReport:
    alpha = check_level(alpha)
    return RiskReport(
        alpha=alpha,
        mean=_attempt(dist.mean),
        var=_attempt(value_at_risk, dist, alpha),
        es_quantile=_attempt(expected_shortfall, dist, alpha),
        tce_quantile=_attempt(tail_conditional_expectation, dist, alpha),
        expectile=_attempt(expectile, dist, alpha),
        tce_expectile=_attempt(expectile_tce, dist, alpha),
        es_expectile=_attempt(expectile_es, dist, alpha),
        beta_star=_attempt(exceedance_beta, dist, alpha),
    )
