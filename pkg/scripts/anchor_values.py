"""Print the headline numbers: uniform anchor, bounds and small-alpha ratios."""

import argparse
from dataclasses import dataclass

from expectile_es import (
    Exponential1,
    Pareto,
    Uniform01,
    expected_shortfall,
    expectile,
    expectile_es,
    expectile_tce,
    r_alpha,
    r_phi,
    risk_report,
)


@dataclass
class AnchorConfig:
    alpha: float = 0.34
    small_alpha: float = 1e-5


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha", type=float, default=AnchorConfig.alpha)
    p.add_argument("--small-alpha", type=float, default=AnchorConfig.small_alpha)
    ns = p.parse_args()
    cfg = AnchorConfig(ns.alpha, ns.small_alpha)

    u = Uniform01()
    print(f"uniform01 at alpha={cfg.alpha}")
    for k, v in risk_report(u, cfg.alpha).to_json().items():
        print(f"  {k:14s} {v}")
    low, beta = r_alpha(u, cfg.alpha)
    print(f"  {'r_alpha':14s} {low} (beta={beta:.6f})")
    print(f"  {'r_phi':14s} {r_phi(u, cfg.alpha)}")
    print(f"  {'es quadrature':14s} {expectile_es(u, cfg.alpha, method='quadrature')}")

    a = cfg.small_alpha
    print(f"\nratios at alpha={a:g}")
    par, exp_ = Pareto(2.0), Exponential1()
    print(f"  pareto(2)   es/ES          {expectile_es(par, a) / expected_shortfall(par, a):.6f}")
    print(f"  exponential es/ES          {expectile_es(exp_, a) / expected_shortfall(exp_, a):.6f}")
    print(f"  uniform     (1-ES)/(1-es)  {(1 - expected_shortfall(u, a)) / (1 - expectile_es(u, a)):.6f}")
    print(f"  uniform     (1-tce)/(1-e)  {(1 - expectile_tce(u, a)) / (1 - expectile(u, a)):.6f}")


if __name__ == "__main__":
    main()
