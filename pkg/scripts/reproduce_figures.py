"""Write the two ratio-plot tables (fig1, fig3) to CSV."""

import argparse
from dataclasses import dataclass
from pathlib import Path

from expectile_es.cli import run


@dataclass
class FigureConfig:
    out_dir: Path = Path("figures")
    presets: tuple = ("fig1", "fig3")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", type=Path, default=FigureConfig.out_dir)
    cfg = FigureConfig(out_dir=p.parse_args().out_dir)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for preset in cfg.presets:
        path = cfg.out_dir / f"{preset}.csv"
        code = run(["curve", "--preset", preset, "--out", str(path)])
        print(f"{preset}: {path} (exit {code})")


if __name__ == "__main__":
    main()
