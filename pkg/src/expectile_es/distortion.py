"""Concave distortion dominating es_alpha and related closed forms.

phi(t) is es_alpha of an indicator with success probability t, i.e. the level
average of the Bernoulli expectile

    phi(t) = (1/alpha) int_0^alpha (1 - u) t / ((1 - 2u) t + u) du.

Its right derivative phi'_+ and the lower-bound weight gamma_beta are level
averages of rational functions of the same shape.  All three closed forms
have a removable singularity at t = 1/2 (resp. beta = 1/2).  Near that point
they are evaluated from the convergent expansion in eps = 1 - 2t:

    (1 - u) t / ((1 - 2u) t + u) = (1 - u)(1 - eps) sum_k eps^k (1 - 2u)^k

whose level averages have exact moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, WitnessNotFound
from .expectile import check_level

# |1 - 2t| below this uses the series; 0.05**24 ~ 6e-32
SERIES_RADIUS = 0.05
_N_TERMS = 24


def _one_minus_c_pow(alpha, n):
    """1 - (1 - 2 alpha)**n without cancellation."""
    if alpha == 0.5:
        return 1.0
    return -math.expm1(n * math.log1p(-2.0 * alpha))


def _moments(alpha):
    """M_k = avg (1-u)(1-2u)^k and G_k = avg 2u(1-2u)^k over u in (0, alpha]."""
    m = np.empty(_N_TERMS + 1)
    g = np.empty(_N_TERMS + 1)
    for k in range(_N_TERMS + 1):
        a1 = _one_minus_c_pow(alpha, k + 1) / (k + 1)
        a2 = _one_minus_c_pow(alpha, k + 2) / (k + 2)
        m[k] = (a1 + a2) / (4.0 * alpha)
        g[k] = (a1 - a2) / (2.0 * alpha)
    return m, g


def _phi_series(alpha, eps):
    m, _ = _moments(alpha)
    return (1.0 - eps) * np.polynomial.polynomial.polyval(eps, m)


def _phi_prime_series(alpha, eps):
    m, _ = _moments(alpha)
    d = np.diff(m, prepend=0.0)            # coefficients of phi in eps
    dphi_deps = np.polynomial.polynomial.polyval(eps, d[1:] * np.arange(1, d.size))
    return -2.0 * dphi_deps


def _gamma_series(alpha, eps):
    _, g = _moments(alpha)
    return np.polynomial.polynomial.polyval(eps, g)


def _check_t(t, *, open_left=False):
    t = float(t)
    if not (0.0 <= t <= 1.0) or (open_left and t == 0.0):
        raise DomainError(f"argument must lie in {'(0' if open_left else '[0'}, 1], got {t}")
    return t


def phi(alpha: float, t: float) -> float:
    alpha = check_level(alpha)
    t = _check_t(t)
    if t == 0.0:
        return 0.0
    if t == 0.5:
        return 1.0 - alpha / 2.0
    eps = 1.0 - 2.0 * t
    if abs(eps) < SERIES_RADIUS:
        return float(_phi_series(alpha, eps))
    log_term = math.log1p(alpha * eps / t)     # ln(1 - 2 alpha + alpha / t)
    return -t / eps * (1.0 - (1.0 - t) / (alpha * eps) * log_term)


def phi_prime(alpha: float, t: float) -> float:
    """Right derivative of phi; diverges at t = 0."""
    alpha = check_level(alpha)
    t = _check_t(t, open_left=True)
    if t == 0.5:
        return 2.0 * alpha * (1.0 - 2.0 * alpha / 3.0)
    eps = 1.0 - 2.0 * t
    if abs(eps) < SERIES_RADIUS:
        return float(_phi_prime_series(alpha, eps))
    log_term = math.log1p(alpha * eps / t)
    bracket = (1.0 + eps * alpha) / (t + eps * alpha) - log_term / (alpha * eps)
    return -bracket / eps**2


def gamma_beta(alpha: float, beta: float) -> float:
    """Weight of the mean in the lower bound (1 - g) ES_beta + g E[L]."""
    alpha = check_level(alpha)
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if beta == 0.5:
        return alpha
    eps = 1.0 - 2.0 * beta
    if abs(eps) < SERIES_RADIUS:
        return float(_gamma_series(alpha, eps))
    log_term = math.log1p(alpha * eps / beta)
    return 1.0 / eps - beta / (alpha * eps**2) * log_term


@dataclass(frozen=True)
class DistortionCurve:
    alpha: float
    knots: np.ndarray
    phi_values: np.ndarray
    phi_prime_values: np.ndarray

    def rows(self):
        return zip(self.knots.tolist(), self.phi_values.tolist(), self.phi_prime_values.tolist())


def distortion_curve(alpha: float, n_knots: int = 101) -> DistortionCurve:
    """phi and phi'_+ on an even grid of [0, 1]; phi'_+(0) is reported as inf."""
    if n_knots < 2:
        raise DomainError("need at least two knots")
    knots = np.linspace(0.0, 1.0, n_knots)
    values = np.array([phi(alpha, t) for t in knots])
    slopes = np.array([math.inf if t == 0.0 else phi_prime(alpha, t) for t in knots])
    return DistortionCurve(alpha, knots, values, slopes)


def mixture_distortion(lam: float, beta: float, delta: float, t: float) -> float:
    """Distortion of (1 - lam) ES_beta + lam ES_delta."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    if not (0.0 < beta <= 1.0 and 0.0 < delta <= 1.0):
        raise DomainError("beta and delta must lie in (0, 1]")
    t = _check_t(t)
    return (1.0 - lam) * min(t / beta, 1.0) + lam * min(t / delta, 1.0)


def non_domination_witness(alpha, lam, beta, delta, *, start=1, max_k=1000, margin=1e-12):
    """First t = 2**-k, k >= start, at which phi exceeds the mixture distortion.

    phi has infinite slope at the origin, so such a t exists for every
    mixture.  ``margin`` is relative, since both sides shrink like t.
    """
    for k in range(start, max_k + 1):
        t = 2.0**-k
        if phi(alpha, t) > mixture_distortion(lam, beta, delta, t) * (1.0 + margin):
            return t
    raise WitnessNotFound(f"no t = 2^-k, {start} <= k <= {max_k}, beats the mixture")
