"""Rebuild the toy curve by CM and verify the three explicit curve equations in data/curves."""

import argparse
import time
from pathlib import Path

from bwcurves import cm
from bwcurves.families import toy_family
from bwcurves.search import SearchConfig, apply_improvement, format_record, instantiate

CURVES = Path(__file__).resolve().parent.parent / "data" / "curves"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=8)
    args = ap.parse_args()

    params = apply_improvement(instantiate(toy_family(), 137, SearchConfig(min_r_bits=0, min_kp_bits=0)), 17)
    print("toy record:", format_record(params))
    t0 = time.perf_counter()
    curve = cm.build_curve(params)
    print(f"CM curve (D = {params.D_eff}, built in {time.perf_counter() - t0:.2f}s):")
    print(f"  a = {curve.a}\n  b = {curve.b}")
    print("  verify:", cm.verify_curve(curve, args.samples).reason)

    for path in sorted(CURVES.glob("*.curve")):
        c = cm.read_curve(path.read_text())
        t0 = time.perf_counter()
        v = cm.verify_curve(c, args.samples)
        print(f"{path.name}: {v.reason} ({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
