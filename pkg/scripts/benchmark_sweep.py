#!/usr/bin/env python3
"""Benchmark zonalization sweep: sup|fast|^2 and sup|grad fast|^2 vs epsilon.

Runs the mixed-forcing benchmark (zonal mode (0,1) amplitude 1, tilted mode
(1,1) amplitude 0.5) at mu = 0.5 over a decreasing epsilon list, plus a
three-seed ensemble at one epsilon for the initial-data-independence and
enstrophy-bound checks.  Writes per-run diagnostics and a summary CSV.
"""

import argparse
from pathlib import Path

from zns.forcing import ForcingSpec
from zns.harness import ExperimentConfig, run_epsilon_sweep, write_sweep_summary_csv
from zns.lattice import Domain

BENCHMARK = ForcingSpec(modes=((0, 1, 1.0), (1, 1, 0.5)))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/benchmark_sweep"))
    ap.add_argument("--resolution", type=int, default=64)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--quick", action="store_true", help="smaller, faster setup")
    args = ap.parse_args()

    n = 32 if args.quick else args.resolution
    t_end = 24.0 if args.quick else 30.0
    config = ExperimentConfig(
        domain=Domain(N1=n, N2=n),
        mu=0.5,
        epsilons=(0.1, 0.05, 0.025, 0.0125),
        forcing=BENCHMARK,
        h=0.008,
        t_end=t_end,
        seed=args.seed,
    )
    record = run_epsilon_sweep(config, out_dir=args.out)
    print(f"{'epsilon':>10} {'sup_fast_sq':>13} {'ratio':>11} {'ratio_h1':>11}")
    for row in record.summary["per_epsilon"]:
        print(
            f"{row['epsilon']:>10g} {row['sup_fast_sq']:>13.4e} "
            f"{row['ratio']:>11.4e} {row['ratio_h1']:>11.4e}"
        )
    print(f"slopes: |fast|^2 {record.summary['slope']:.3f}, "
          f"|grad fast|^2 {record.summary['slope_h1']:.3f}")

    ensemble_cfg = ExperimentConfig(
        domain=config.domain,
        mu=config.mu,
        epsilons=(0.05,),
        forcing=BENCHMARK,
        h=config.h,
        t_end=t_end,
        seed=args.seed,
    )
    ensemble = run_epsilon_sweep(ensemble_cfg, n_seeds=3)
    row = ensemble.summary["per_epsilon"][0]
    constants = [row[f"seed{s}"]["bound_constant"] for s in ensemble.summary["seeds"]]
    print(f"enstrophy-bound constant per seed at eps=0.05: "
          f"{', '.join(f'{c:.4f}' for c in constants)}")
    write_sweep_summary_csv(args.out / "ensemble_summary.csv", ensemble.summary)

    violations = record.violations + ensemble.violations
    for v in violations:
        print(v)
    return 3 if violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
