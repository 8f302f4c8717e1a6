"""Dual representations on finite probability spaces.

At level u the expectile is the largest E[L Y] over densities Y with
E[Y] = 1 and gamma <= Y <= (1 - u) gamma / u for some gamma in
[u / (1 - u), 1].  For fixed gamma this is a box-constrained linear program
with one equality, solved exactly by water-filling: every atom starts at the
lower bound gamma and the remaining mass 1 - gamma is poured into the largest
losses up to the upper bound.  The optimal value is piecewise linear and
concave in gamma, with breakpoints where another atom saturates, so the
maximum is found by evaluating every breakpoint.

es_alpha is approached from below by step families constant on the cells
(k alpha / n, (k + 1) alpha / n], each cell using the optimal density of the
expectile at its right end point.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .distributions import FiniteLossModel
from .errors import DomainError, InfeasibleDensity
from .expectile import check_level
from .risk import expectile_es

FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class DualDensity:
    """Density over the atoms of a model (ascending value order)."""

    weights: np.ndarray
    gamma: float

    def expectation(self, model: FiniteLossModel, values=None) -> float:
        x = model.values if values is None else values
        return float(np.dot(model.probs, self.weights * x))

    def violations(self, model: FiniteLossModel, u: float) -> list[str]:
        out = []
        tol = FEASIBILITY_TOL
        if abs(float(np.dot(model.probs, self.weights)) - 1.0) > tol:
            out.append("E[Y] != 1")
        if self.gamma < u / (1.0 - u) - tol or self.gamma > 1.0 + tol:
            out.append("gamma outside [u/(1-u), 1]")
        if np.any(self.weights < self.gamma - tol):
            out.append("weight below gamma")
        if np.any(self.weights > (1.0 - u) * self.gamma / u + tol):
            out.append("weight above (1-u) gamma / u")
        return out


def _water_fill(model: FiniteLossModel, levels: np.ndarray):
    """Optimal (value, gamma, weights) for each level; vectorised over levels."""
    v = model.values[::-1]                 # largest loss first
    p = model.probs[::-1]
    mean = model.mean()
    u = levels[:, None]
    excess = (1.0 - 2.0 * u) / u           # upper / lower bound ratio minus one

    top_mass = np.concatenate([[0.0], np.cumsum(p)])          # mass of the k largest atoms
    gammas = 1.0 / (1.0 + excess * top_mass[None, :])         # (levels, m + 1)
    gammas = np.clip(gammas, levels[:, None] / (1.0 - levels[:, None]), 1.0)

    cap = p[None, None, :] * (gammas * excess)[:, :, None]     # extra room per atom
    budget = (1.0 - gammas)[:, :, None]
    filled_before = np.cumsum(cap, axis=2) - cap
    extra = np.clip(budget - filled_before, 0.0, cap)
    values = gammas * mean + np.einsum("lkm,m->lk", extra, v)

    best = np.argmax(values, axis=1)
    idx = np.arange(levels.size)
    g = gammas[idx, best]
    # per-atom density: gamma plus extra / p, back in ascending order
    w = g[:, None] + extra[idx, best, :] / p[None, :]
    return values[idx, best], g, w[:, ::-1]


def expectile_dual_max(model: FiniteLossModel, u: float) -> tuple[float, DualDensity]:
    u = check_level(u)
    value, gamma, weights = _water_fill(model, np.array([u]))
    density = DualDensity(weights[0], float(gamma[0]))
    bad = density.violations(model, u)
    if bad:
        raise InfeasibleDensity("; ".join(bad))
    return float(value[0]), density


def step_levels(alpha: float, n: int) -> np.ndarray:
    """Right end points t_{k+1} = (k + 1) alpha / n of the cells."""
    if n < 1:
        raise DomainError("partition count must be at least 1")
    return alpha * np.arange(1, n + 1) / n


def es_dual_discretized(model: FiniteLossModel, alpha: float, n: int) -> float:
    alpha = check_level(alpha)
    values, _, _ = _water_fill(model, step_levels(alpha, n))
    return float(values.mean())


def model_hash(model: FiniteLossModel) -> str:
    payload = json.dumps([model.values.tolist(), model.probs.tolist()])
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class DualityReport:
    model_hash: str
    alpha: float
    n_values: list
    dual_values: list
    primal_value: float
    monotone: bool
    final_gap: float
    tol: float
    passed: bool
    cells: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = asdict(self)
        if math.isinf(out["primal_value"]):
            out["primal_value"] = "inf"
        return out


def verify_duality(model: FiniteLossModel, alpha: float, n_max: int, tol: float) -> DualityReport:
    """Compare the step-family dual values for n = 1, 2, 4, ..., n_max with es."""
    alpha = check_level(alpha)
    if n_max < 1 or n_max & (n_max - 1):
        raise DomainError(f"n_max must be a power of two, got {n_max}")
    levels = step_levels(alpha, n_max)
    cell_values, gammas, weights = _water_fill(model, levels)

    n_values, dual_values = [], []
    n = 1
    while n <= n_max:
        stride = n_max // n
        # the cells of the coarse partition end at every stride-th fine level
        dual_values.append(float(cell_values[stride - 1 :: stride].mean()))
        n_values.append(n)
        n *= 2

    primal = expectile_es(model, alpha, method="quadrature")
    monotone = all(b >= a - 1e-12 for a, b in zip(dual_values, dual_values[1:]))
    gap = primal - dual_values[-1]
    feasible = all(
        not DualDensity(w, float(g)).violations(model, float(t))
        for w, g, t in zip(weights, gammas, levels)
    )
    cells = [
        {
            "level": float(t),
            "value": float(val),
            "gamma": float(g),
            "upper_atoms": int(np.sum(w > g * (1.0 + 1e-12))),
        }
        for t, val, g, w in zip(levels, cell_values, gammas, weights)
    ]
    return DualityReport(
        model_hash=model_hash(model),
        alpha=alpha,
        n_values=n_values,
        dual_values=dual_values,
        primal_value=primal,
        monotone=monotone,
        final_gap=gap,
        tol=tol,
        passed=bool(monotone and feasible and abs(gap) <= tol),
        cells=cells,
    )
