"""Scan k' for the complementarity-ignoring methods and write per-point and boundary CSVs.

    python scripts/scan_regions.py --out scan_out [--workers 4] [--step 0.01]
"""

import argparse
import csv
import time
from pathlib import Path

from mifwd.gaussian_setting import FEATURES, scan_kprime
from mifwd.selection import MethodSpec

METHODS = ("MIFS", "mRMR", "maxMIFS")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("scan_out"))
    ap.add_argument("--start", type=float, default=0.01)
    ap.add_argument("--end", type=float, default=3.0)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    others = FEATURES[1:]
    bounds = []
    for name in METHODS:
        t0 = time.perf_counter()
        res = scan_kprime(MethodSpec.parse(name), args.start, args.step, args.end,
                          workers=args.workers)
        with open(args.out / f"points_{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kprime", "k", "region", "ordering", *[f"of_{f.value}" for f in others],
                        "mbr2"])
            for pt in res.points:
                w.writerow([pt.kprime, f"{pt.k:.6f}", pt.region,
                            " ".join(f.value for f in pt.ordering),
                            *[f"{pt.step2[f]:.6g}" for f in others], f"{pt.mbr2:.6f}"])
        for b in res.boundaries:
            bounds.append((name, b.kprime, " ".join(f.value for f in b.left),
                           " ".join(f.value for f in b.right)))
        found = ", ".join(f"{b.kprime:.4f}" for b in res.boundaries)
        print(f"{name:8s} boundaries at k' = {found}  ({time.perf_counter() - t0:.1f} s)")

    with open(args.out / "boundaries.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "kprime", "left", "right"])
        w.writerows(bounds)
    print(f"wrote {args.out}/")


if __name__ == "__main__":
    main()
