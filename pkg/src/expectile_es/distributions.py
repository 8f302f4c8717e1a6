"""Loss distributions used throughout the package.

Every distribution exposes the same small set of primitives (cdf, survival,
quantiles, mean, upper partial moment, essential bounds).  Parametric
families are fixed to their standard normalisations; finite and empirical
laws share one exact piecewise implementation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptySample, NonIntegrable, ValidationError

# slack used when locating a probability level inside the cumulative sums
_CUM_TOL = 1e-12


class LossDistribution:
    """Common interface.  Subclasses are immutable."""

    kind: str = "abstract"
    atomic: bool = False

    def cdf(self, x: float) -> float:
        raise NotImplementedError

    def sf(self, x: float) -> float:
        """P[L > x]."""
        return 1.0 - self.cdf(x)

    def quantile_level(self, p: float) -> float:
        """Left-continuous inverse inf{m : F(m) >= p}."""
        raise NotImplementedError

    def upper_quantile(self, alpha: float) -> float:
        """``quantile_level(1 - alpha)``, evaluated without forming 1 - alpha
        where the family allows it."""
        return self.quantile_level(1.0 - alpha)

    def mean(self) -> float:
        raise NotImplementedError

    def upper_partial(self, x: float) -> float:
        """E[(L - x)^+]."""
        raise NotImplementedError

    def essential_bounds(self) -> tuple[float, float]:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def describe(self) -> str:
        p = self.params()
        if not p:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in p.items())

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


# ---------------------------------------------------------------------------
# parametric families
# ---------------------------------------------------------------------------


class Uniform01(LossDistribution):
    kind = "uniform01"

    def cdf(self, x):
        return min(max(x, 0.0), 1.0)

    def sf(self, x):
        return min(max(1.0 - x, 0.0), 1.0)

    def quantile_level(self, p):
        return p

    def upper_quantile(self, alpha):
        return 1.0 - alpha

    def mean(self):
        return 0.5

    def upper_partial(self, x):
        if x <= 0.0:
            return 0.5 - x
        if x >= 1.0:
            return 0.0
        return 0.5 * (1.0 - x) ** 2

    def essential_bounds(self):
        return (0.0, 1.0)


@dataclass(frozen=True, repr=False)
class BetaPower(LossDistribution):
    """F(x) = x**a on [0, 1]."""

    a: float
    kind = "beta_power"

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValidationError(f"beta_power needs a > 0, got {self.a}")

    def params(self):
        return {"a": self.a}

    def cdf(self, x):
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        return x**self.a

    def sf(self, x):
        if x <= 0.0:
            return 1.0
        if x >= 1.0:
            return 0.0
        return -math.expm1(self.a * math.log(x))

    def quantile_level(self, p):
        return p ** (1.0 / self.a)

    def upper_quantile(self, alpha):
        return math.exp(math.log1p(-alpha) / self.a)

    def mean(self):
        return self.a / (self.a + 1.0)

    def upper_partial(self, x):
        if x <= 0.0:
            return self.mean() - x
        if x >= 1.0:
            return 0.0
        d = 1.0 - x
        # (1 - x) - (1 - x^(a+1)) / (a+1), kept accurate as x -> 1
        tail = -math.expm1((self.a + 1.0) * math.log1p(-d)) / (self.a + 1.0)
        return max(d - tail, 0.0)

    def essential_bounds(self):
        return (0.0, 1.0)


class Exponential1(LossDistribution):
    kind = "exponential1"

    def cdf(self, x):
        return 0.0 if x <= 0.0 else -math.expm1(-x)

    def sf(self, x):
        return 1.0 if x <= 0.0 else math.exp(-x)

    def quantile_level(self, p):
        return -math.log1p(-p)

    def upper_quantile(self, alpha):
        return -math.log(alpha)

    def mean(self):
        return 1.0

    def upper_partial(self, x):
        return 1.0 - x if x <= 0.0 else math.exp(-x)

    def essential_bounds(self):
        return (0.0, math.inf)


class Koenker(LossDistribution):
    """F(x) = (4 + x^2 + x sqrt(x^2 + 4)) / (2 (x^2 + 4)) on the real line.

    Its expectile and value at risk coincide at every level.
    """

    kind = "koenker"

    def cdf(self, x):
        # symmetric about 0; avoids cancellation in 1 - sf for x << 0
        return self.sf(-x)

    def sf(self, x):
        r = math.sqrt(x * x + 4.0)
        if x > 0.0:
            return 2.0 / (r * (r + x))
        return 0.5 - x / (2.0 * r)

    def quantile_level(self, p):
        return (2.0 * p - 1.0) / math.sqrt(p * (1.0 - p))

    def upper_quantile(self, alpha):
        return (1.0 - 2.0 * alpha) / math.sqrt(alpha * (1.0 - alpha))

    def mean(self):
        return 0.0

    def upper_partial(self, x):
        r = math.sqrt(x * x + 4.0)
        if x > 0.0:
            return 2.0 / (r + x)
        return 0.5 * (r - x)

    def essential_bounds(self):
        return (-math.inf, math.inf)


@dataclass(frozen=True, repr=False)
class Pareto(LossDistribution):
    """F(x) = 1 - (x + 1)**(-a) for x >= 0."""

    a: float
    kind = "pareto"

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValidationError(f"pareto needs a > 0, got {self.a}")

    def params(self):
        return {"a": self.a}

    def _check_mean(self):
        if self.a <= 1.0:
            raise NonIntegrable(f"pareto with a={self.a} <= 1 has infinite mean")

    def cdf(self, x):
        return 0.0 if x <= 0.0 else -math.expm1(-self.a * math.log1p(x))

    def sf(self, x):
        return 1.0 if x <= 0.0 else (x + 1.0) ** (-self.a)

    def quantile_level(self, p):
        return math.expm1(-math.log1p(-p) / self.a)

    def upper_quantile(self, alpha):
        return math.expm1(-math.log(alpha) / self.a)

    def mean(self):
        self._check_mean()
        return 1.0 / (self.a - 1.0)

    def upper_partial(self, x):
        self._check_mean()
        if x <= 0.0:
            return self.mean() - x
        return (x + 1.0) ** (1.0 - self.a) / (self.a - 1.0)

    def essential_bounds(self):
        return (0.0, math.inf)


# ---------------------------------------------------------------------------
# atomic laws
# ---------------------------------------------------------------------------


def _canonical_atoms(values, probs):
    values = np.asarray(values, dtype=float).ravel()
    probs = np.asarray(probs, dtype=float).ravel()
    if values.size == 0:
        raise EmptySample("a finite model needs at least one atom")
    if values.shape != probs.shape:
        raise ValidationError("values and probabilities differ in length")
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise ValidationError(f"non-finite value in row {bad}")
    if not np.all(np.isfinite(probs)) or np.any(probs <= 0) or np.any(probs > 1):
        bad = int(np.flatnonzero(~(np.isfinite(probs) & (probs > 0) & (probs <= 1)))[0])
        raise ValidationError(f"probability outside (0, 1] in row {bad}")
    total = math.fsum(probs)
    if abs(total - 1.0) > 1e-12:
        raise ValidationError(f"probabilities sum to {total!r}, not 1")
    uniq, inverse = np.unique(values, return_inverse=True)
    merged = np.zeros(uniq.size)
    np.add.at(merged, inverse, probs)
    return uniq, merged / merged.sum()


@dataclass(frozen=True, eq=False, repr=False)
class FiniteLossModel(LossDistribution):
    """Loss taking finitely many values.

    Atoms are canonicalised on construction: values strictly increasing,
    duplicates merged by summing their probabilities.
    """

    values: np.ndarray
    probs: np.ndarray
    _cum: np.ndarray = field(init=False)
    kind = "finite"
    atomic = True

    def __post_init__(self):
        v, p = _canonical_atoms(self.values, self.probs)
        cum = np.cumsum(p)
        cum[-1] = 1.0
        v.flags.writeable = False
        p.flags.writeable = False
        cum.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def from_atoms(cls, atoms):
        atoms = list(atoms)
        if not atoms:
            raise EmptySample("a finite model needs at least one atom")
        values, probs = zip(*atoms)
        return cls(values, probs)

    @property
    def atoms(self):
        return list(zip(self.values.tolist(), self.probs.tolist()))

    @property
    def size(self):
        return self.values.size

    def params(self):
        return {"atoms": self.size}

    def cdf(self, x):
        idx = int(np.searchsorted(self.values, x, side="right"))
        return 0.0 if idx == 0 else float(self._cum[idx - 1])

    def sf(self, x):
        idx = int(np.searchsorted(self.values, x, side="right"))
        return float(self.probs[idx:].sum())

    def quantile_level(self, p):
        idx = int(np.searchsorted(self._cum, p - _CUM_TOL, side="left"))
        return float(self.values[min(idx, self.size - 1)])

    def mean(self):
        return float(np.dot(self.probs, self.values))

    def upper_partial(self, x):
        idx = int(np.searchsorted(self.values, x, side="right"))
        if idx == self.size:
            return 0.0
        return float(np.dot(self.probs[idx:], self.values[idx:] - x))

    def essential_bounds(self):
        return (float(self.values[0]), float(self.values[-1]))

    def shifted(self, m):
        return FiniteLossModel(self.values + m, self.probs)

    def scaled(self, lam):
        return FiniteLossModel(self.values * lam, self.probs)


class Empirical(FiniteLossModel):
    """Equal-weight law of an observed sample."""

    kind = "empirical"

    def __init__(self, sample):
        sample = np.asarray(sample, dtype=float).ravel()
        if sample.size == 0:
            raise EmptySample("empirical distribution needs a nonempty sample")
        super().__init__(sample, np.full(sample.size, 1.0 / sample.size))
        object.__setattr__(self, "n_obs", sample.size)

    def params(self):
        return {"n": self.n_obs}


class Bernoulli(FiniteLossModel):
    """Indicator loss with P[L = 1] = p."""

    kind = "bernoulli"

    def __init__(self, p):
        if not 0.0 < p < 1.0:
            raise ValidationError(f"bernoulli needs 0 < p < 1, got {p}")
        super().__init__([0.0, 1.0], [1.0 - p, p])
        object.__setattr__(self, "p", float(p))

    def params(self):
        return {"p": self.p}


def from_sample(values) -> Empirical:
    return Empirical(values)


def read_finite_csv(path) -> FiniteLossModel:
    """Read a ``value,prob`` file."""
    rows = _read_rows(path, ("value", "prob"))
    return FiniteLossModel([r[0] for r in rows], [r[1] for r in rows])


def read_empirical_csv(path) -> Empirical:
    """Read the ``value`` column of a CSV file; other columns are ignored."""
    rows = _read_rows(path, ("value",))
    return Empirical([r[0] for r in rows])


def _read_rows(path, columns):
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in columns if c not in header]
        if missing:
            raise ValidationError(f"{path}: header lacks column(s) {', '.join(missing)}")
        reader.fieldnames = header
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append(tuple(float(row[c]) for c in columns))
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{path}: bad number in row {lineno}") from exc
    if not rows:
        raise EmptySample(f"{path}: no data rows")
    return rows
