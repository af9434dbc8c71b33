"""Upcrossing approximation of Brownian local time: convergence and moment tables."""
import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from young2d.cli import DEFAULT_SEED
from young2d.io import CsvTable
from young2d.localtime import (CONVERGENCE_COLUMNS, MOMENT_COLUMNS, bivariation_moments,
                               convergence_experiment)


@dataclass
class LocalTimeConfig:
    ks: list[int] = field(default_factory=lambda: [3, 4, 5, 6])
    n_paths: int = 200
    seed: int = DEFAULT_SEED
    m: int = 2
    delta: float = 0.5
    method: str = "young"
    threads: int = 1
    out_dir: Path = Path(".")


def main(cfg: LocalTimeConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    comments = [f"seed={cfg.seed}", f"m={cfg.m}", f"n_paths={cfg.n_paths}"]
    t0 = time.perf_counter()
    conv = convergence_experiment(cfg.ks, cfg.n_paths, cfg.seed, cfg.m, delta=cfg.delta,
                                  method=cfg.method, threads=cfg.threads)
    CsvTable.from_dicts(conv, CONVERGENCE_COLUMNS, comments).write(cfg.out_dir / "convergence.csv")
    print(f"convergence table: {time.perf_counter() - t0:.0f}s")
    for r in conv:
        print(f"  k={r['k']}  sup {r['mean_sup_error']:.4f} +- {r['se_sup_error']:.4f}"
              f"  L1 {r['mean_integral_L1_error']:.4f} +- {r['se_integral_L1_error']:.4f}")
    t0 = time.perf_counter()
    mom = bivariation_moments(cfg.ks, cfg.n_paths, cfg.seed, cfg.m, cfg.delta, threads=cfg.threads)
    CsvTable.from_dicts(mom, MOMENT_COLUMNS, comments).write(cfg.out_dir / "moments.csv")
    print(f"moment table: {time.perf_counter() - t0:.0f}s")
    for r in mom:
        print(f"  k={r['k']}  norm_1 {r['mean_norm_1']:.4f}  norm_2 {r['mean_norm_2']:.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ks", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--n-paths", type=int, default=LocalTimeConfig.n_paths)
    ap.add_argument("--seed", type=int, default=LocalTimeConfig.seed)
    ap.add_argument("--m", type=int, default=LocalTimeConfig.m)
    ap.add_argument("--delta", type=float, default=LocalTimeConfig.delta)
    ap.add_argument("--method", choices=["young", "exact"], default=LocalTimeConfig.method)
    ap.add_argument("--threads", type=int, default=LocalTimeConfig.threads)
    ap.add_argument("--out-dir", type=Path, default=LocalTimeConfig.out_dir)
    main(LocalTimeConfig(**vars(ap.parse_args())))
