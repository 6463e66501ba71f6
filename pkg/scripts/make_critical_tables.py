"""Regenerate the shipped Lilliefors, Anderson-Darling and Jarque-Bera 0.95 critical values.

    python scripts/make_critical_tables.py [--tests LL,AD,JB] [--workers 1]

Writes src/ecfnorm/data/{ll,ad,jb}_critical.csv.
"""
import argparse
import time
from pathlib import Path

from ecfnorm.harness import estimate_null_percentile, percentile_table

SIZES = (4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 25, 30, 40, 50, 75, 100, 150, 200, 250,
         300, 400, 500, 750, 1000, 1500, 2000, 3000, 5000)
SEEDS = {"LL": 19670601, "AD": 19540901, "JB": 19870801}
MIN_N = {"LL": 4, "AD": 8, "JB": 8}
# The JB density is flat near its 0.95 quantile, so it needs more replications.
REPS = {"LL": 100000, "AD": 100000, "JB": 500000}
DATA = Path(__file__).resolve().parents[1] / "src" / "ecfnorm" / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, help="override the per-test replication count")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--tests", default="LL,AD,JB")
    args = ap.parse_args()
    for name in args.tests.split(","):
        ests = []
        for n in SIZES:
            if n < MIN_N[name]:
                continue
            t0 = time.perf_counter()
            est = estimate_null_percentile(name, n, 0.95, args.reps or REPS[name], SEEDS[name], args.workers)
            ests.append(est)
            print(f"{name} n={n}: q95={est.value:.5f} ({time.perf_counter() - t0:.1f}s)", flush=True)
        table = percentile_table(ests)
        (DATA / f"{name.lower()}_critical.csv").write_text(table.to_csv(), encoding="utf-8")


if __name__ == "__main__":
    main()
