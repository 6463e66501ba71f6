"""Regenerate the full size, power and percentile tables plus the curve data.

    python scripts/reproduce_tables.py --out-dir results [--reps 5000] [--percentile-reps 200000]

Each study is written as CSV next to a wide text layout (one row per n, one
column per test). Expect ten to fifteen minutes on one core at the defaults;
``--quick`` runs everything at reduced replication counts.
"""
import argparse
import time
from pathlib import Path

from ecfnorm.classical import TEST_NAMES
from ecfnorm.distributions import Normal, parse_spec_list
from ecfnorm.harness import (
    SimulationConfig,
    bias_curve,
    curve_csv,
    estimate_null_percentile,
    estimate_power,
    estimate_type1,
    null_statistics,
    percentile_table,
    variance_curve,
)

SIZES = (50, 100, 250, 500, 750, 1000)
POWER_STUDIES = {
    "power_t": ("t:4,t:10,t:15", SIZES),
    "power_symmetric_small": ("uniform,laplace", (50, 100, 250, 500)),
    "power_logistic": ("logistic", SIZES),
    "power_mixture": ("mix:2.0:0.2,mix:0.5:0.2,mix:2.0:0.5", SIZES),
}


def write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text, encoding="utf-8")
    print(f"wrote {out / name}", flush=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--reps", type=int, default=5000)
    ap.add_argument("--percentile-reps", type=int, default=200000)
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--quick", action="store_true", help="500 reps per cell, 10000 for percentiles")
    args = ap.parse_args()
    if args.quick:
        args.reps, args.percentile_reps = 500, 10000
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    ests = [estimate_null_percentile("EP", n, 0.95, args.percentile_reps, args.seed, args.workers) for n in SIZES]
    write(out, "ep_percentiles.csv", percentile_table(ests).to_csv())

    type1 = estimate_type1(SimulationConfig(TEST_NAMES, (Normal(),), (30,) + SIZES, args.reps,
                                            master_seed=args.seed), args.workers)
    write(out, "type1.csv", type1.to_csv())
    write(out, "type1.txt", type1.wide("normal") + "\n")

    for name, (dists, sizes) in POWER_STUDIES.items():
        cfg = SimulationConfig(TEST_NAMES, tuple(parse_spec_list(dists)), sizes, args.reps, master_seed=args.seed)
        table = estimate_power(cfg, args.workers)
        write(out, f"{name}.csv", table.to_csv())
        write(out, f"{name}.txt", "\n\n".join(f"{d.label}\n{table.wide(d.label)}" for d in cfg.dists) + "\n")

    curve_sizes = (10, 20, 30, 50, 75, 100, 250, 500, 1000)
    curve_reps = max(args.reps, 1000)  # the bias curve needs at least 1000
    write(out, "bias_curve.csv", curve_csv(bias_curve(curve_sizes, curve_reps, seed=args.seed,
                                                      workers=args.workers), ("studentized", "raw")))
    write(out, "variance_curve.csv", curve_csv(variance_curve(curve_sizes, curve_reps, seed=args.seed,
                                                              workers=args.workers), ("empirical", "asymptotic")))
    hist = null_statistics("ECFT", 1000, args.reps, args.seed, args.workers)
    write(out, "ecft_null_n1000.csv", "n_1000\n" + "\n".join(repr(float(v)) for v in hist) + "\n")
    print(f"done in {time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
