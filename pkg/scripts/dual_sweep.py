"""Gap between es and its discretized dual over random finite models.

Reports the gap at each n next to the bound (max L - e_alpha) / n, which
the step family always satisfies.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from expectile_es import FiniteLossModel, es_dual_discretized, expectile, expectile_es


@dataclass
class SweepConfig:
    models: int = 200
    max_atoms: int = 12
    alpha: float = 0.1
    n_max: int = 1024
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for field, default in vars(SweepConfig()).items():
        p.add_argument("--" + field.replace("_", "-"), type=type(default), default=default)
    cfg = SweepConfig(**vars(p.parse_args()))

    rng = np.random.default_rng(cfg.seed)
    ns = [2**k for k in range(int(np.log2(cfg.n_max)) + 1)]
    gaps = np.empty((cfg.models, len(ns)))
    ratios = np.empty_like(gaps)
    for i in range(cfg.models):
        k = int(rng.integers(1, cfg.max_atoms + 1))
        m = FiniteLossModel(rng.uniform(0.0, 1.0, k), rng.dirichlet(np.ones(k)))
        es = expectile_es(m, cfg.alpha)
        span = m.values.max() - expectile(m, cfg.alpha)
        for j, n in enumerate(ns):
            gaps[i, j] = es - es_dual_discretized(m, cfg.alpha, n)
            ratios[i, j] = gaps[i, j] / (span / n) if span > 0 else 0.0
    print(f"{'n':>6} {'max gap':>11} {'median gap':>11} {'max gap/bound':>14}")
    for j, n in enumerate(ns):
        print(f"{n:6d} {gaps[:, j].max():11.3e} {np.median(gaps[:, j]):11.3e} {ratios[:, j].max():14.4f}")


if __name__ == "__main__":
    main()
