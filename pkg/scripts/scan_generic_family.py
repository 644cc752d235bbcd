"""Scan the D=3, k=9 (e=1, f=4) family over an x interval and summarise the hits.

Writes one parameter record per hit, then reports how many hits survive
various bounds on the stripped cofactor of r(x), the Bateman-Horn estimate
for (p, r/3) both prime, and the share of hits whose y(x) has a prime factor
usable as n.  The full [2^27, 2^28] run takes about an hour per core.
"""

import argparse
import os
import time
from dataclasses import dataclass
from pathlib import Path

from bwcurves.families import family_density, generic_construction, log_integral
from bwcurves.search import NoCandidateError, SearchConfig, format_record, parse_record, scan, select_n


@dataclass
class ScanConfig:
    x_from: int = 2**27
    x_to: int = 2**28
    max_cofactor: int = 10**4
    workers: int = os.cpu_count() or 1
    out: Path = Path("generic_hits.txt")
    cofactor_bounds: tuple = (3, 57, 100, 300, 1000, 3000, 10**4)


def summarise(records, cfg: ScanConfig):
    print(f"hits with cofactor <= {cfg.max_cofactor}: {len(records)}")
    for bound in cfg.cofactor_bounds:
        sub = [r for r in records if r.cofactor_r <= bound]
        usable = 0
        for r in sub:
            try:
                select_n(r.y)
                usable += 1
            except NoCandidateError:
                pass
        share = usable / len(sub) if sub else 0.0
        print(f"  cofactor <= {bound:>6}: {len(sub):>7} hits, {usable:>6} with n in [1e4, 1e6] ({share:.4f})")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--from", dest="x_from", type=int, default=ScanConfig.x_from)
    ap.add_argument("--to", dest="x_to", type=int, default=ScanConfig.x_to)
    ap.add_argument("--max-cofactor", type=int, default=ScanConfig.max_cofactor)
    ap.add_argument("--workers", type=int, default=ScanConfig.workers)
    ap.add_argument("--out", type=Path, default=ScanConfig.out)
    ap.add_argument("--reuse", action="store_true", help="summarise an existing --out file instead of scanning")
    a = ap.parse_args()
    cfg = ScanConfig(a.x_from, a.x_to, a.max_cofactor, a.workers, a.out)

    fam = generic_construction(3, 9, 1, 4)
    if a.reuse:
        records = [parse_record(line) for line in cfg.out.read_text().splitlines() if line.strip()]
        records = [r for r in records if cfg.x_from <= r.x_seed <= cfg.x_to]
    else:
        t0 = time.perf_counter()
        search_cfg = SearchConfig(min_r_bits=0, min_kp_bits=0, max_cofactor_r=cfg.max_cofactor)
        records = scan(fam, cfg.x_from, cfg.x_to, search_cfg, workers=cfg.workers, chunk=1 << 22)
        cfg.out.write_text("".join(format_record(r) + "\n" for r in records))
        print(f"scanned [{cfg.x_from}, {cfg.x_to}] in {time.perf_counter() - t0:.0f}s -> {cfg.out}")

    summarise(records, cfg)
    est = family_density([fam.p, fam.r], cfg.x_from, cfg.x_to)
    print(f"Bateman-Horn estimate for p and r/3 both prime: {est.expected_count:.0f}")
    print(f"independent pair integral: {log_integral(cfg.x_from, cfg.x_to, 2):.0f}")


if __name__ == "__main__":
    main()
