"""Repeat a refine_density study over several lattice seeds.

Prints the Linf column per seed and whether it decreases; useful to check
that a monotone table is not an artifact of one farthest-point start.

    python scripts/seed_sweep.py configs/hemisphere_inversion.json --seeds 0 1 2 3
"""

import argparse
import json
from dataclasses import replace

from manispline import harness
from manispline.cli import convergence_spec


def sweep(doc: dict, seeds, threads: int = 1):
    base = convergence_spec(doc, 0)
    if base.mode != "refine_density":
        raise SystemExit("seed sweep needs a refine_density config")
    for seed in seeds:
        table = harness.run_convergence_rho(replace(base, seed=seed), threads=threads)
        linf = [r.errors["Linf"] for r in table.rows]
        leaks = [r.parity_leak for r in table.rows if r.parity_leak is not None]
        yield seed, linf, table.monotone_decrease, max(leaks, default=None)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="refine_density over lattice seeds")
    ap.add_argument("config")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3])
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    with open(args.config) as fh:
        doc = json.load(fh)
    for seed, linf, mono, leak in sweep(doc, args.seeds, args.threads):
        cols = " ".join(f"{e:.3e}" for e in linf)
        print(f"seed={seed} Linf=[{cols}] monotone={mono} parity_leak={leak}")
