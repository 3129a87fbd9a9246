"""One bad data qubit in an RSSC d = 3 memory.

    python demos/bad_site.py [--shots 5000]

The gates on the corner qubit of the logical-Z path are raised to p_bad while
everything else stays at 1e-3. The X-basis error rises in an S-curve: flat
while the background dominates, then saturating once the qubit is
effectively erased, since the code still corrects the rest.
"""

import argparse

from heavyhex.harness import ExperimentSpec, run_sweep

ap = argparse.ArgumentParser()
ap.add_argument("--shots", type=int, default=5000)
args = ap.parse_args()

grid = (1e-3, 5e-3, 2e-2, 0.1, 0.5)
spec = ExperimentSpec(name="badsite-demo", sweep="badsite", noise="location", bases=("X",),
                      p_bad=grid, sites=(0,), instances=1, shots=args.shots, seed=4)
for rec in run_sweep(spec):
    b = rec.bases["X"]
    print(f"p_bad {rec.coords['p_bad']:7.1e}: X-basis error {b['rate']:.4f}+-{b['se']:.4f}")
