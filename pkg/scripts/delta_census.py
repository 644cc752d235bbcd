"""Histogram of the delta statistic over all census quadruplets in {1..R}^4."""

import argparse
import os
import time
from dataclasses import dataclass

from bwcurves.families import delta_table

REFERENCE_20 = (79, 27, 51, 72, 26, 309, 388, 320, 807, 1127, 1464)


@dataclass
class CensusConfig:
    range_max: int = 20
    workers: int = os.cpu_count() or 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max", type=int, default=CensusConfig.range_max)
    ap.add_argument("--workers", type=int, default=CensusConfig.workers)
    args = ap.parse_args()
    cfg = CensusConfig(range_max=args.max, workers=args.workers)

    t0 = time.perf_counter()
    table = delta_table(cfg.range_max, workers=cfg.workers)
    print(f"{'delta':>6} {'count':>6}")
    for b, c in enumerate(table.counts):
        ref = f"  (reference {REFERENCE_20[b]})" if cfg.range_max == 20 else ""
        print(f"{b / 10:>6.1f} {c:>6}{ref}")
    print(f"total {table.total}; share with delta >= 0.8: {table.fraction_at_least(8):.4f}")
    print(f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
