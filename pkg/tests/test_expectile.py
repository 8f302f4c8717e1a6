import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import finite_models, levels
from expectile_es import (
    Bernoulli,
    BetaPower,
    DegenerateTail,
    DomainError,
    Exponential1,
    FiniteLossModel,
    Koenker,
    Pareto,
    Uniform01,
    UnsupportedKind,
    exceedance_beta,
    expectile,
    expectile_curve,
    expectile_density,
)
from expectile_es.expectile import foc_residual

FAMILY_OBJECTS = {
    "uniform01": Uniform01(),
    "exponential1": Exponential1(),
    "beta_power2": BetaPower(2.0),
    "pareto2": Pareto(2.0),
    "pareto3": Pareto(3.0),
    "koenker": Koenker(),
}


@pytest.mark.parametrize("family", sorted(FAMILY_OBJECTS))
@pytest.mark.parametrize("u", [1e-10, 1e-4, 0.01, 0.1, 0.34, 0.5])
def test_expectile_matches_mp_root(family, u):
    ref = float(oracles.mp_expectile(family, u))
    assert expectile(FAMILY_OBJECTS[family], u) == pytest.approx(ref, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("u", [0.01, 0.1, 0.25, 0.49])
def test_printed_expectiles(u):
    s = math.sqrt(u * (1 - u))
    assert expectile(Uniform01(), u) == pytest.approx(1 - (s - u) / (1 - 2 * u), rel=1e-13)
    assert expectile(Koenker(), u) == pytest.approx((1 - 2 * u) / s, rel=1e-13)
    assert expectile(Pareto(2.0), u) == pytest.approx(math.sqrt((1 - u) / u), rel=1e-13)
    w = float(oracles.mp.lambertw((1 - 2 * u) / (u * oracles.mp.e)))
    assert expectile(Exponential1(), u) == pytest.approx(1 + w, rel=1e-13)
    p = 0.3
    assert expectile(Bernoulli(p), u) == pytest.approx((1 - u) * p / ((1 - 2 * u) * p + u), rel=1e-14)


def test_anchor_values():
    assert expectile(Bernoulli(0.5), 0.1) == pytest.approx(0.9, abs=1e-15)
    assert expectile(Uniform01(), 0.34) == pytest.approx(0.5821600897, abs=1e-10)


def test_half_level_is_mean():
    for d in FAMILY_OBJECTS.values():
        assert expectile(d, 0.5) == pytest.approx(d.mean(), abs=1e-15)


def test_level_domain():
    for bad in (0.0, -0.1, 0.6, float("nan")):
        with pytest.raises(DomainError):
            expectile(Uniform01(), bad)


@given(finite_models(), levels)
def test_finite_expectile_exact(model, u):
    ref = float(oracles.finite_expectile(model.values, model.probs, u))
    assert expectile(model, u) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@given(finite_models(), levels)
def test_first_order_condition(model, u):
    x = expectile(model, u)
    scale = max(1.0, float(np.max(np.abs(model.values))))
    assert abs(foc_residual(model, u, x)) <= 1e-12 * scale


@given(finite_models(), levels, levels)
def test_decreasing_in_level(model, u, v):
    u, v = sorted((u, v))
    assert expectile(model, u) >= expectile(model, v) - 1e-12


@given(finite_models(), levels, st.floats(-4, 4), st.floats(0.1, 5))
def test_translation_and_scaling(model, u, c, lam):
    e = expectile(model, u)
    assert expectile(model.shifted(c), u) == pytest.approx(e + c, abs=1e-10)
    assert expectile(model.scaled(lam), u) == pytest.approx(lam * e, abs=1e-10)


@given(finite_models(), levels)
def test_between_mean_and_max(model, u):
    e = expectile(model, u)
    assert model.mean() - 1e-12 <= e <= model.values.max() + 1e-12


def test_curve_monotone_and_residuals():
    grid = np.linspace(0.01, 0.5, 40)
    for d in FAMILY_OBJECTS.values():
        c = expectile_curve(d, grid)
        assert c.monotone
        assert np.all(np.abs(c.residuals) <= 1e-10 * np.maximum(1.0, np.abs(c.values)))
        singles = [expectile(d, u) for u in grid]
        np.testing.assert_allclose(c.values, singles, rtol=1e-12)


def test_curve_grid_validation():
    with pytest.raises(DomainError):
        expectile_curve(Uniform01(), [0.3, 0.2])
    with pytest.raises(DomainError):
        expectile_curve(Uniform01(), [0.1, 0.7])


def test_exceedance_beta():
    for u in (0.01, 0.1, 0.3):
        s = math.sqrt(u * (1 - u))
        assert exceedance_beta(Uniform01(), u) == pytest.approx((s - u) / (1 - 2 * u), rel=1e-12)
        assert exceedance_beta(Pareto(2.0), u) == pytest.approx(u / (1 + 2 * s), rel=1e-12)
    with pytest.raises(DegenerateTail):
        exceedance_beta(FiniteLossModel([5.0], [1.0]), 0.1)


def test_density_examples():
    # beta law F(x) = x^2 at x = 1/2: a (a + 1) x^a (1 - x) / (2 x^(a+1) - (a+1) x + a)^2
    assert expectile_density(BetaPower(2.0), 0.5) == pytest.approx(4.0 / 3.0, rel=1e-12)
    assert expectile_density(Exponential1(), 0.0) == 0.0
    x = 2.0
    ref = x * math.exp(-x) / (1 - x - 2 * math.exp(-x)) ** 2
    assert expectile_density(Exponential1(), x) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(UnsupportedKind):
        expectile_density(Bernoulli(0.3), 0.5)


@pytest.mark.parametrize("family", ["uniform01", "exponential1", "beta_power2", "pareto3"])
def test_density_is_derivative_of_level_map(family):
    # e_u = x  <=>  u = UP(x) / (2 UP(x) + x - m); the density is -du/dx
    d = FAMILY_OBJECTS[family]
    m = d.mean()

    def level(x):
        up = d.upper_partial(x)
        return up / (2 * up + x - m)

    for u in (0.05, 0.2, 0.4):
        x = expectile(d, u)
        h = 1e-5 * max(1.0, x)
        fd = -(level(x + h) - level(x - h)) / (2 * h)
        assert expectile_density(d, x) == pytest.approx(fd, rel=1e-6)


def test_density_integrates_to_half_above_mean():
    # the level map runs from 1/2 at the mean to 0 at the right end point
    from scipy.integrate import quad

    for d in (Uniform01(), BetaPower(2.0)):
        total, _ = quad(lambda x: expectile_density(d, x), d.mean(), 1.0)
        assert total == pytest.approx(0.5, abs=1e-10)
