"""Small-alpha ratios between the risk measures and their extreme-value limits.

The domain of attraction is declared by the caller (MdaSpec); nothing here
estimates tail indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distributions import LossDistribution
from .errors import ClassMismatch, DomainError, RiskError
from .expectile import check_level, expectile
from .risk import (
    Failed,
    encode_value,
    expectile_es,
    expectile_tce,
    expected_shortfall,
    value_at_risk,
)

ES_OVER_ES = "es/ES"
TCE_OVER_E = "tce/e"
ES_OVER_Q = "ES/q"
TCE_OVER_ES = "tce/es"
TCE_OVER_ESQ = "tce/ES"
GAP_ES_ES = "(xhat-ES)/(xhat-es)"
GAP_TCE_E = "(xhat-tce)/(xhat-e)"
GAP_ES_Q = "(xhat-ES)/(xhat-q)"

PLAIN_COLUMNS = (ES_OVER_ES, TCE_OVER_E, ES_OVER_Q, TCE_OVER_ES, TCE_OVER_ESQ)
ENDPOINT_COLUMNS = (GAP_ES_ES, GAP_TCE_E, GAP_ES_Q)

NOT_ASSERTED = "not asserted"


@dataclass(frozen=True)
class MdaSpec:
    """Declared maximum domain of attraction.

    kind is "frechet" (eta > 1), "weibull" (eta > 0, finite xhat) or
    "gumbel" (xhat finite or inf).  ``weibull_tail`` asserts that the
    survival function is exp(-x^tau r(x)) with a regular slowly varying r;
    it is taken on trust.
    """

    kind: str
    eta: float | None = None
    xhat: float = math.inf
    weibull_tail: bool = False

    def __post_init__(self):
        if self.kind == "frechet":
            if self.eta is None or not self.eta > 1.0:
                raise DomainError(f"frechet class needs eta > 1, got {self.eta}")
        elif self.kind == "weibull":
            if self.eta is None or not self.eta > 0.0:
                raise DomainError(f"weibull class needs eta > 0, got {self.eta}")
            if not math.isfinite(self.xhat):
                raise DomainError("weibull class needs a finite right endpoint")
        elif self.kind != "gumbel":
            raise DomainError(f"unknown attraction class {self.kind!r}")


def theoretical_limits(mda: MdaSpec) -> dict[str, float]:
    if mda.kind == "frechet":
        eta = mda.eta
        shared = eta / (eta - 1.0)
        return {
            ES_OVER_ES: (eta - 1.0) ** (-1.0 / eta),
            TCE_OVER_ES: 1.0,
            TCE_OVER_E: shared,
            ES_OVER_Q: shared,
        }
    if mda.kind == "weibull":
        ratio = mda.eta / (mda.eta + 1.0)
        return {GAP_ES_ES: 0.0, GAP_TCE_E: ratio, GAP_ES_Q: ratio}
    if math.isinf(mda.xhat):
        limits = {TCE_OVER_E: 1.0, ES_OVER_Q: 1.0}
        if mda.weibull_tail:
            limits.update({ES_OVER_ES: 1.0, TCE_OVER_ESQ: 1.0, TCE_OVER_ES: 1.0})
        return limits
    return {GAP_TCE_E: 1.0, GAP_ES_Q: 1.0}


@dataclass
class RatioTable:
    alphas: list
    columns: dict = field(default_factory=dict)

    def header(self):
        return ["alpha", *self.columns]

    def rows(self):
        for i, a in enumerate(self.alphas):
            yield [a, *(col[i] for col in self.columns.values())]

    def last(self, name):
        return self.columns[name][-1]


def _ratio(num, den):
    if isinstance(num, Failed):
        return num
    if isinstance(den, Failed):
        return den
    if den == 0.0 or not (math.isfinite(num) and math.isfinite(den)):
        return Failed("Undefined")
    return num / den


def _measure(fn, *args):
    try:
        return fn(*args)
    except RiskError as exc:
        return Failed(exc.code)


def _minus(x, y):
    if isinstance(y, Failed):
        return y
    return x - y


def ratio_curve(dist: LossDistribution, alphas) -> RatioTable:
    alphas = [check_level(a) for a in alphas]
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise DomainError("alpha grid must be strictly decreasing")
    xhat = dist.essential_bounds()[1]
    names = PLAIN_COLUMNS + (ENDPOINT_COLUMNS if math.isfinite(xhat) else ())
    table = RatioTable(alphas, {n: [] for n in names})
    for a in alphas:
        q = _measure(value_at_risk, dist, a)
        big_es = _measure(expected_shortfall, dist, a)
        e = _measure(expectile, dist, a)
        tce = _measure(expectile_tce, dist, a)
        es = _measure(expectile_es, dist, a)
        cells = {
            ES_OVER_ES: _ratio(es, big_es),
            TCE_OVER_E: _ratio(tce, e),
            ES_OVER_Q: _ratio(big_es, q),
            TCE_OVER_ES: _ratio(tce, es),
            TCE_OVER_ESQ: _ratio(tce, big_es),
        }
        if math.isfinite(xhat):
            cells[GAP_ES_ES] = _ratio(_minus(xhat, big_es), _minus(xhat, es))
            cells[GAP_TCE_E] = _ratio(_minus(xhat, tce), _minus(xhat, e))
            cells[GAP_ES_Q] = _ratio(_minus(xhat, big_es), _minus(xhat, q))
        for n in names:
            table.columns[n].append(cells[n])
    return table


@dataclass
class ConvergenceReport:
    mda: MdaSpec
    alpha: float
    tolerance: float
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values() if c["passed"] != NOT_ASSERTED)

    def to_json(self) -> dict:
        return {
            "mda": {
                "kind": self.mda.kind,
                "eta": self.mda.eta,
                "xhat": encode_value(float(self.mda.xhat)),
                "weibull_tail": self.mda.weibull_tail,
            },
            "alpha": self.alpha,
            "tolerance": self.tolerance,
            "checks": {
                k: {kk: encode_value(vv) for kk, vv in v.items()} for k, v in self.checks.items()
            },
            "passed": self.passed,
        }


def convergence_report(dist, mda: MdaSpec, alphas, tolerance: float) -> ConvergenceReport:
    """Compare each column at the smallest alpha with its declared limit."""
    xhat = dist.essential_bounds()[1]
    if mda.kind == "frechet" and math.isfinite(xhat):
        raise ClassMismatch("frechet class needs an unbounded loss")
    if mda.kind in ("weibull", "gumbel") and math.isfinite(mda.xhat) != math.isfinite(xhat):
        raise ClassMismatch(f"declared endpoint {mda.xhat} but the loss has {xhat}")
    if math.isfinite(mda.xhat) and abs(mda.xhat - xhat) > 1e-12 * max(1.0, abs(xhat)):
        raise ClassMismatch(f"declared endpoint {mda.xhat} but the loss has {xhat}")

    table = ratio_curve(dist, alphas)
    limits = theoretical_limits(mda)
    checks = {}
    for name, limit in limits.items():
        observed = table.last(name)
        if isinstance(observed, Failed):
            raise ClassMismatch(f"column {name} undefined at alpha={table.alphas[-1]}")
        checks[name] = {
            "limit": limit,
            "observed": observed,
            "passed": abs(observed - limit) <= tolerance,
        }
    if mda.kind == "gumbel" and math.isfinite(mda.xhat) and ES_OVER_ES in table.columns:
        checks[ES_OVER_ES] = {
            "limit": None,
            "observed": table.last(ES_OVER_ES),
            "passed": NOT_ASSERTED,
        }
    return ConvergenceReport(mda, table.alphas[-1], tolerance, checks)
