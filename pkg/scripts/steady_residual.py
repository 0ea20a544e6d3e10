#!/usr/bin/env python3
"""First-order steady-flow check: residual and end-state distance vs epsilon."""

import argparse
import csv
from pathlib import Path

from zns.forcing import ForcingSpec
from zns.harness import ExperimentConfig, run_steady_residual_sweep
from zns.lattice import Domain

BENCHMARK = ForcingSpec(modes=((0, 1, 1.0), (1, 1, 0.5)))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/steady_residual"))
    ap.add_argument("--resolution", type=int, default=32)
    ap.add_argument("--t-end", type=float, default=45.0)
    args = ap.parse_args()

    config = ExperimentConfig(
        domain=Domain(N1=args.resolution, N2=args.resolution),
        mu=0.5,
        epsilons=(0.1, 0.05, 0.025, 0.0125),
        forcing=BENCHMARK,
        h=0.008,
        t_end=args.t_end,
        seed=5,
    )
    record = run_steady_residual_sweep(config)
    print(f"{'epsilon':>10} {'residual':>12} {'distance':>12} {'end_rhs':>12}")
    rows = record.summary["per_epsilon"]
    for row in rows:
        print(
            f"{row['epsilon']:>10g} {row['residual']:>12.4e} "
            f"{row['distance']:>12.4e} {row['end_rhs_norm']:>12.4e}"
        )
    print(f"residual slope: {record.summary['residual_slope']:.3f}, "
          f"distance slope: {record.summary['distance_slope']:.3f}")

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "steady_residual.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epsilon", "residual", "distance", "end_rhs_norm"])
        for row in rows:
            writer.writerow([repr(row["epsilon"]), repr(row["residual"]),
                             repr(row["distance"]), repr(row["end_rhs_norm"])])

    for v in record.violations:
        print(v)
    return 3 if record.violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
