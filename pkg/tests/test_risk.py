import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given

import oracles
from conftest import PARAMETRIC, finite_models, levels
from expectile_es import (
    Bernoulli,
    BetaPower,
    DegenerateTail,
    Divergent,
    Exponential1,
    FiniteLossModel,
    Koenker,
    Pareto,
    Uniform01,
    UnsupportedKind,
    closed_form_es,
    expectile,
    expectile_es,
    expectile_tce,
    expected_shortfall,
    risk_report,
    tail_conditional_expectation,
    value_at_risk,
)
from expectile_es.quadrature import integrate_to_zero

ALPHAS = [0.01, 0.05, 0.1, 0.25, 0.5]


@pytest.mark.parametrize("alpha", [0.001, 0.05, 0.34, 0.5, 0.9])
def test_expected_shortfall_is_quantile_average(parametric, alpha):
    _, d = parametric
    ref = mp.quad(lambda u: d.upper_quantile(float(u)), [0, alpha / 2, alpha]) / alpha
    assert expected_shortfall(d, alpha) == pytest.approx(float(ref), rel=1e-8)


def test_printed_quantile_measures():
    for a in (0.01, 0.2):
        assert value_at_risk(Uniform01(), a) == pytest.approx(1 - a)
        assert expected_shortfall(Uniform01(), a) == pytest.approx(1 - a / 2)
        assert value_at_risk(Pareto(2.0), a) == pytest.approx(1 / math.sqrt(a) - 1)
        assert expected_shortfall(Pareto(2.0), a) == pytest.approx(2 / math.sqrt(a) - 1)
        assert expected_shortfall(Exponential1(), a) == pytest.approx(1 - math.log(a))
        b = 3.0
        ref = b * (1 - (1 - a) ** (1 / b + 1)) / (a * (b + 1))
        assert expected_shortfall(BetaPower(b), a) == pytest.approx(ref, rel=1e-12)


def test_tce_for_continuous_laws_equals_es():
    for d in PARAMETRIC.values():
        for a in (0.01, 0.3):
            assert tail_conditional_expectation(d, a) == pytest.approx(expected_shortfall(d, a), rel=1e-12)


def test_tce_strict_exceedance_on_atoms():
    d = FiniteLossModel([0.0, 1.0, 2.0], [0.5, 0.3, 0.2])
    # q_0.3 = 1 and the strict tail above it is the atom at 2
    assert tail_conditional_expectation(d, 0.3) == pytest.approx(2.0)
    with pytest.raises(DegenerateTail):
        tail_conditional_expectation(FiniteLossModel([0.0, 1.0], [0.9, 0.1]), 0.05)


def test_expectile_tce_printed():
    for a in (0.01, 0.2):
        e = expectile(Pareto(2.0), a)
        assert expectile_tce(Pareto(2.0), a) == pytest.approx(1 + 2 * e, rel=1e-12)
        s = math.sqrt(a * (1 - a))
        beta = (s - a) / (1 - 2 * a)
        assert expectile_tce(Uniform01(), a) == pytest.approx(1 - beta / 2, rel=1e-12)


CLOSED = {
    "bernoulli(0.3)": (Bernoulli(0.3), lambda a: oracles.printed_es_bernoulli(a, 0.3)),
    "bernoulli(0.5)": (Bernoulli(0.5), lambda a: oracles.printed_es_bernoulli(a, 0.5)),
    "uniform01": (Uniform01(), oracles.printed_es_uniform),
    "pareto(2)": (Pareto(2.0), oracles.printed_es_pareto2),
    "koenker": (Koenker(), oracles.printed_es_koenker),
}


@pytest.mark.parametrize("name", sorted(CLOSED))
@pytest.mark.parametrize("alpha", ALPHAS[:-1] + [0.4999])
def test_quadrature_matches_printed_forms(name, alpha):
    d, printed = CLOSED[name]
    ref = float(printed(alpha))
    assert expectile_es(d, alpha, method="quadrature") == pytest.approx(ref, rel=1e-10)
    assert expectile_es(d, alpha, method="closed_form") == pytest.approx(ref, rel=1e-12)


def test_closed_forms_at_half():
    # the printed uniform form is 0 * inf at 1/2; the library form is finite
    assert closed_form_es(Uniform01(), 0.5) == pytest.approx(
        expectile_es(Uniform01(), 0.5, method="quadrature"), rel=1e-12
    )
    assert closed_form_es(Bernoulli(0.5), 0.5) == pytest.approx(0.75, rel=1e-14)


@pytest.mark.parametrize("alpha", [1e-5, 0.01, 0.1, 0.34, 0.5])
def test_exponential_integral_form(alpha):
    ref = float(oracles.es_exponential_oracle(alpha))
    assert expectile_es(Exponential1(), alpha, method="quadrature") == pytest.approx(ref, rel=1e-10)
    assert closed_form_es(Exponential1(), alpha) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("a", [0.5, 2.0, 5.0])
@pytest.mark.parametrize("alpha", [0.01, 0.1, 0.34])
def test_beta_integral_form(a, alpha):
    q = expectile_es(BetaPower(a), alpha, method="quadrature")
    assert closed_form_es(BetaPower(a), alpha) == pytest.approx(q, rel=1e-10)


def test_closed_form_unregistered():
    assert closed_form_es(Pareto(3.0), 0.1) is None
    with pytest.raises(UnsupportedKind):
        expectile_es(Pareto(3.0), 0.1, method="closed_form")


@given(finite_models(), levels)
def test_finite_es_matches_exact_integral(model, alpha):
    ref = float(oracles.finite_es(model.values, model.probs, alpha))
    assert expectile_es(model, alpha) == pytest.approx(ref, rel=1e-12, abs=1e-12)
    assert expectile_es(model, alpha, method="quadrature") == pytest.approx(ref, rel=1e-10, abs=1e-10)


def test_finite_es_with_half_tail_mass():
    # S0 = 1/2 makes the affine denominator constant on one piece
    m = FiniteLossModel([0.0, 1.0, 2.0, 3.0], [0.25] * 4)
    for a in (0.05, 0.3, 0.5):
        ref = float(oracles.finite_es(m.values, m.probs, a))
        assert expectile_es(m, a) == pytest.approx(ref, rel=1e-14)


@given(finite_models(), levels)
def test_expectile_below_es(model, alpha):
    assert expectile(model, alpha) <= expectile_es(model, alpha) + 1e-10


def test_es_can_fall_on_either_side_of_ES():
    a = 0.05
    assert expectile_es(Exponential1(), a) < expected_shortfall(Exponential1(), a)
    assert expectile_es(Pareto(2.0), a) > expected_shortfall(Pareto(2.0), a)


def test_divergent_integrand_detected():
    with pytest.raises(Divergent):
        integrate_to_zero(lambda u: 1.0 / u, 0.1)
    with pytest.raises(Divergent):
        integrate_to_zero(lambda u: u**-1.5, 0.1)
    assert integrate_to_zero(lambda u: u**-0.5, 0.25) == pytest.approx(1.0, rel=1e-12)


def test_report_keys_and_encoding():
    r = risk_report(Uniform01(), 0.34)
    js = r.to_json()
    assert list(js) == [
        "alpha", "mean", "var", "es_quantile", "tce_quantile",
        "expectile", "tce_expectile", "es_expectile", "beta_star",
    ]
    assert js["es_expectile"] == pytest.approx(0.706554, abs=1e-6)
    json.dumps(js)


def test_report_does_not_cascade_failures():
    r = risk_report(FiniteLossModel([5.0], [1.0]), 0.1)
    js = r.to_json()
    assert js["tce_quantile"] == {"error": "DegenerateTail"}
    assert js["beta_star"] == {"error": "DegenerateTail"}
    for key in ("mean", "var", "es_quantile", "expectile", "es_expectile"):
        assert js[key] == 5.0
    r = risk_report(Pareto(0.8), 0.1)
    assert r.to_json()["mean"] == {"error": "NonIntegrable"}
    assert np.isfinite(r.var)
