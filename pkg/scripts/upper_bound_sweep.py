#!/usr/bin/env python3
"""Sweep each deterministic policy over random instances of its model.

Writes one CSV per policy plus an aggregate table of the worst observed
ratio against the proven guarantee.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from multistage.harness import grid, reports_to_csv, sweep

MODELS = {
    "greedy": ("ssfs", "hamming", "mixed", "linear", range(1, 7)),
    "mp_algo": ("ssfs", "intersection", "mixed", "linear", range(4, 9)),
    "best_or_nothing": ("ge", "hamming", "mixed", "table", range(2, 9)),
    "three_part": ("ge", "hamming", "closed", "submodular", range(2, 9)),
    "balance": ("ge", "intersection", "mixed", "table", range(1, 9)),
}


@dataclass
class Config:
    out: Path = Path("results")
    seeds: int = 20
    max_n: int = 5
    workers: int = 1


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=Config.out)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    p.add_argument("--max-n", type=int, default=Config.max_n)
    p.add_argument("--workers", type=int, default=Config.workers)
    cfg = Config(**{k.replace("-", "_"): v for k, v in vars(p.parse_args(argv)).items()})

    cfg.out.mkdir(parents=True, exist_ok=True)
    violated = False
    for policy, (evolution, bonus, family, profit, horizons) in MODELS.items():
        specs = grid(evolution, bonus, range(1, cfg.max_n + 1), horizons, range(cfg.seeds), family, profit)
        res = sweep(policy, specs, workers=cfg.workers)
        (cfg.out / f"{policy}.csv").write_text(reports_to_csv(res.reports))
        for row in res.aggregate:
            row["errors"] = len(res.errors)
            print(json.dumps(row, sort_keys=True))
            violated |= row["all_within"] is False
    return 1 if violated else 0


if __name__ == "__main__":
    sys.exit(main())
