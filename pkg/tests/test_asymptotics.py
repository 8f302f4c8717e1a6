import math

import mpmath as mp
import numpy as np
import pytest

import oracles
from expectile_es import (
    BetaPower,
    ClassMismatch,
    DomainError,
    Exponential1,
    FiniteLossModel,
    Koenker,
    MdaSpec,
    Pareto,
    Uniform01,
    convergence_report,
    ratio_curve,
    theoretical_limits,
)
from expectile_es.asymptotics import (
    ES_OVER_ES,
    ES_OVER_Q,
    GAP_ES_ES,
    GAP_ES_Q,
    GAP_TCE_E,
    NOT_ASSERTED,
    TCE_OVER_E,
    TCE_OVER_ES,
)

SMALL = [1e-2, 1e-3, 1e-4, 1e-5]


def test_limits_table():
    assert theoretical_limits(MdaSpec("frechet", eta=2.0)) == {
        ES_OVER_ES: 1.0, TCE_OVER_ES: 1.0, TCE_OVER_E: 2.0, ES_OVER_Q: 2.0,
    }
    lim = theoretical_limits(MdaSpec("frechet", eta=3.0))
    assert lim[ES_OVER_ES] == pytest.approx(2 ** (-1 / 3))
    assert lim[TCE_OVER_E] == pytest.approx(1.5)
    assert theoretical_limits(MdaSpec("weibull", eta=1.0, xhat=1.0)) == {
        GAP_ES_ES: 0.0, GAP_TCE_E: 0.5, GAP_ES_Q: 0.5,
    }
    assert set(theoretical_limits(MdaSpec("gumbel"))) == {TCE_OVER_E, ES_OVER_Q}
    assert ES_OVER_ES in theoretical_limits(MdaSpec("gumbel", weibull_tail=True))


def test_mda_validation():
    with pytest.raises(DomainError):
        MdaSpec("frechet", eta=1.0)
    with pytest.raises(DomainError):
        MdaSpec("weibull", eta=1.0)
    with pytest.raises(DomainError):
        MdaSpec("hill")


def test_pareto_frechet_limits():
    rep = convergence_report(Pareto(2.0), MdaSpec("frechet", eta=2.0), SMALL, 0.02)
    assert rep.passed
    assert rep.checks[ES_OVER_ES]["observed"] == pytest.approx(1.0, abs=0.02)


def test_pareto_three_approaches_its_limit():
    table = ratio_curve(Pareto(3.0), [1e-2, 1e-4, 1e-6, 1e-8])
    target = 2 ** (-1 / 3)
    errs = [abs(x - target) for x in table.columns[ES_OVER_ES]]
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 5e-3


def test_koenker_ratios_are_exact():
    table = ratio_curve(Koenker(), SMALL)
    np.testing.assert_allclose(table.columns[ES_OVER_ES], 1.0, atol=1e-9)
    np.testing.assert_allclose(table.columns[TCE_OVER_E], table.columns[ES_OVER_Q], rtol=1e-9)


def test_uniform_weibull():
    rep = convergence_report(Uniform01(), MdaSpec("weibull", eta=1.0, xhat=1.0), SMALL, 0.05)
    assert rep.passed
    table = ratio_curve(Uniform01(), SMALL)
    assert table.last(GAP_ES_ES) <= 0.05
    np.testing.assert_allclose(table.columns[GAP_TCE_E], 0.5, atol=1e-6)
    np.testing.assert_allclose(table.columns[GAP_ES_Q], 0.5, atol=1e-6)


def test_beta_weibull():
    rep = convergence_report(BetaPower(2.0), MdaSpec("weibull", eta=1.0, xhat=1.0), SMALL, 0.05)
    assert rep.passed


def test_exponential_ratio_value():
    # es/ES tends to 1 only logarithmically: about 0.822 at 1e-5
    es = oracles.es_exponential_oracle(1e-5)
    ref = float(es / (1 - mp.log(mp.mpf("1e-5"))))
    table = ratio_curve(Exponential1(), SMALL)
    assert table.last(ES_OVER_ES) == pytest.approx(ref, rel=1e-9)
    assert table.last(ES_OVER_ES) == pytest.approx(0.822226, abs=1e-6)
    col = table.columns[ES_OVER_ES]
    assert col == sorted(col)


def test_exponential_gumbel_quantile_ratios():
    rep = convergence_report(Exponential1(), MdaSpec("gumbel"), [1e-3, 1e-5, 1e-8], 0.1)
    assert rep.checks[TCE_OVER_E]["passed"] and rep.checks[ES_OVER_Q]["passed"]


def test_finite_endpoint_gumbel_marks_es_column():
    rep = convergence_report(Uniform01(), MdaSpec("gumbel", xhat=1.0), SMALL, 0.05)
    assert rep.checks[ES_OVER_ES]["passed"] == NOT_ASSERTED
    assert rep.to_json()["checks"][ES_OVER_ES]["passed"] == NOT_ASSERTED


def test_class_mismatch():
    with pytest.raises(ClassMismatch):
        convergence_report(Uniform01(), MdaSpec("frechet", eta=2.0), SMALL, 0.05)
    with pytest.raises(ClassMismatch):
        convergence_report(Exponential1(), MdaSpec("weibull", eta=1.0, xhat=1.0), SMALL, 0.05)
    with pytest.raises(ClassMismatch):
        convergence_report(BetaPower(2.0), MdaSpec("weibull", eta=1.0, xhat=2.0), SMALL, 0.05)


def test_ratio_curve_layout():
    t = ratio_curve(Uniform01(), [0.1, 0.01])
    assert t.header()[0] == "alpha"
    assert len(t.header()) == 9
    assert len(list(t.rows())) == 2
    assert len(ratio_curve(Pareto(2.0), [0.1]).header()) == 6
    with pytest.raises(DomainError):
        ratio_curve(Uniform01(), [0.01, 0.1])


def test_degenerate_cells_are_marked():
    t = ratio_curve(FiniteLossModel([5.0], [1.0]), [0.05])
    cell = t.last(TCE_OVER_E)
    assert getattr(cell, "code", None) == "DegenerateTail"


def test_report_json_encodes_infinity():
    rep = convergence_report(Pareto(2.0), MdaSpec("frechet", eta=2.0), [1e-3], 0.05)
    js = rep.to_json()
    assert js["mda"]["xhat"] == "inf"
    assert math.isfinite(js["checks"][ES_OVER_ES]["observed"])
