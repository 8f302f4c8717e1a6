"""Integration over (0, a] for integrands that may blow up at the origin.

The substitution u = a * exp(-s) maps (0, a] onto [0, inf) and turns a power
singularity u**(-k), k < 1, into the decaying exponential exp(-(1 - k) s).
The s-axis is covered by panels of doubling width [0, 1], [1, 2], [2, 4], ...
each integrated by adaptive Gauss-Kronrod (QUADPACK through scipy).
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import Divergent

# last panel ends at s = 512, i.e. u = a * 4e-223
PANEL_EDGES = (0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0)
REL_TOL = 1e-12
# at most this many interior kinks are handed to QUADPACK per panel
MAX_BREAKPOINTS = 64


def integrate_to_zero(f, a, *, rel_tol=REL_TOL, kinks=None):
    """Return the integral of ``f`` over (0, a].

    ``kinks`` are optional u-locations where ``f`` is not smooth.  Raises
    Divergent when the panel contributions stop shrinking before the last
    panel is reached.
    """
    if a <= 0:
        raise ValueError("upper limit must be positive")

    def g(s):
        u = a * math.exp(-s)
        return f(u) * u

    s_kinks = np.array([])
    if kinks is not None and len(kinks):
        k = np.asarray(kinks, dtype=float)
        k = k[(k > 0) & (k < a)]
        s_kinks = np.sort(np.log(a / k))

    total = 0.0
    abs_total = 0.0
    contributions = []
    for lo, hi in zip(PANEL_EDGES[:-1], PANEL_EDGES[1:]):
        inner = s_kinks[(s_kinks > lo) & (s_kinks < hi)]
        try:
            c = _panel(g, lo, hi, inner, rel_tol, abs_total)
        except OverflowError as exc:
            raise Divergent("integrand overflows near the origin") from exc
        if not math.isfinite(c):
            raise Divergent("integrand is not finite near the origin")
        contributions.append(c)
        total += c
        abs_total += abs(c)
        if abs(c) <= rel_tol * abs_total:
            return total

    tail = [abs(c) for c in contributions[-3:]]
    if tail[0] <= tail[1] <= tail[2]:
        raise Divergent("integrand does not decay at the origin")
    r = tail[2] / tail[1]
    extra = contributions[-1] * r / (1.0 - r)
    warnings.warn(
        f"slow decay near the origin; geometric tail estimate {extra:.3g} added",
        RuntimeWarning,
        stacklevel=2,
    )
    return total + extra


def _panel(g, lo, hi, inner, rel_tol, scale):
    epsabs = max(rel_tol * scale * 1e-2, 1e-300)
    if inner.size > MAX_BREAKPOINTS:
        # too many to pass individually; keep an evenly thinned subset
        inner = inner[np.linspace(0, inner.size - 1, MAX_BREAKPOINTS).astype(int)]
    pts = [lo, *inner.tolist(), hi]
    out = 0.0
    for x0, x1 in zip(pts[:-1], pts[1:]):
        if x1 <= x0:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(g, x0, x1, epsabs=epsabs, epsrel=rel_tol, limit=200)
        out += val
    return out


def integrate_interval(f, a, b, *, rel_tol=REL_TOL, points=None):
    """Plain adaptive Gauss-Kronrod on a finite interval."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=1e-300, epsrel=rel_tol, limit=400, points=points)
    return val
