"""Logical error of RSSC memories at d = 3 and 5 against the input rate.

    python demos/threshold_scan.py [--shots 4000]

The curves cross near p_in = 3.5e-3: below the crossing the larger code wins.
"""

import argparse

from heavyhex.harness import ExperimentSpec, run_sweep

ap = argparse.ArgumentParser()
ap.add_argument("--shots", type=int, default=4000)
ap.add_argument("--seed", type=int, default=1)
args = ap.parse_args()

ps = (1e-3, 2e-3, 3e-3, 4e-3, 5e-3)
spec = ExperimentSpec(name="threshold-demo", distances=(3, 5), p_in=ps, instances=1,
                      shots=args.shots, seed=args.seed)
totals = {}
for rec in run_sweep(spec):
    totals[rec.coords["d"], rec.coords["p_in"]] = rec.recompute_total()

print(f"{'p_in':>8} {'d=3':>16} {'d=5':>16}")
for p in ps:
    cells = [f"{totals[d, p][0]:.4f}+-{totals[d, p][1]:.4f}" for d in (3, 5)]
    print(f"{p:8.1e} {cells[0]:>16} {cells[1]:>16}")
