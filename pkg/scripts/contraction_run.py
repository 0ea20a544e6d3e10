#!/usr/bin/env python3
"""Attractor-collapse check: distance and tangent decay rates vs nu = c0^2 mu."""

import argparse
import csv
from pathlib import Path

from zns.forcing import ForcingSpec
from zns.harness import ExperimentConfig, run_contraction_test
from zns.lattice import Domain

BENCHMARK = ForcingSpec(modes=((0, 1, 1.0), (1, 1, 0.5)))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/contraction"))
    ap.add_argument("--epsilon", type=float, default=0.01)
    ap.add_argument("--resolution", type=int, default=64)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--t-end", type=float, default=40.0)
    args = ap.parse_args()

    config = ExperimentConfig(
        domain=Domain(N1=args.resolution, N2=args.resolution),
        mu=0.5,
        epsilons=(args.epsilon,),
        forcing=BENCHMARK,
        h=0.008,
        t_end=args.t_end,
        seed=args.seed,
    )
    record = run_contraction_test(config)
    s = record.summary
    print(f"nu = {s['nu']:g}")
    print(f"trajectory distance rate: {s['rate_distance']:.4f}")
    print(f"tangent field rate:       {s['rate_tangent']:.4f}")
    print(f"distance monotone on tail: {s['monotone_distance_tail']}")

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "contraction.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "distance", "tangent_norm"])
        for (t, d), (_, p) in zip(record.curves["distance"], record.curves["tangent"]):
            writer.writerow([repr(t), repr(d), repr(p)])

    for v in record.violations:
        print(v)
    return 3 if record.violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
