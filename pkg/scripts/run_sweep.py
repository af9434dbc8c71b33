"""Randomized sweep of the bivariation maximal inequality, written as CSV."""
import argparse
from dataclasses import dataclass, field
from pathlib import Path

from young2d.cli import DEFAULT_SEED
from young2d.io import CsvTable
from young2d.sweep import SWEEP_COLUMNS, run_sweep, summarize


@dataclass
class SweepConfig:
    n_cases: int = 100
    seed: int = DEFAULT_SEED
    threads: int = 1
    misscale: list[int] = field(default_factory=list)
    output: Path = Path("sweep.csv")


def main(cfg: SweepConfig) -> None:
    rows = run_sweep(cfg.n_cases, cfg.seed, cfg.threads, cfg.misscale)
    summary = summarize(rows)
    comments = [f"seed={cfg.seed}"] + [f"{k}={v}" for k, v in summary.items()]
    CsvTable.from_dicts(rows, SWEEP_COLUMNS, comments).write(cfg.output)
    for k, v in summary.items():
        print(f"{k:>18}: {v}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-cases", type=int, default=SweepConfig.n_cases)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--threads", type=int, default=SweepConfig.threads)
    ap.add_argument("--misscale", type=int, nargs="*", default=[])
    ap.add_argument("--output", type=Path, default=SweepConfig.output)
    main(SweepConfig(**vars(ap.parse_args())))
