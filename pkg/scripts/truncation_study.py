"""Raise-order study on a fixed circle lattice at several truncation degrees.

With the default tail rule the degree chosen for large orders can fall below
the lattice's aliasing partners (degrees N +- k), so the truncated spline is
not the true one. This prints the Linf errors per order for each degree.

    python scripts/truncation_study.py --degrees 18 32 64 128
"""

import argparse
import json
from dataclasses import replace
from pathlib import Path

from manispline import harness
from manispline.cli import convergence_spec

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="raise_order errors versus truncation degree")
    ap.add_argument("--config", default=str(ROOT / "configs" / "circle_sampling.json"))
    ap.add_argument("--degrees", type=int, nargs="+", default=[18, 32, 64, 128])
    args = ap.parse_args()
    base = convergence_spec(json.loads(Path(args.config).read_text()), 0)
    for J in [None] + args.degrees:
        table = harness.run_convergence_order(replace(base, degree=J))
        row = " ".join(f"m{r.key}:J={r.degree}:{r.errors['Linf']:.2e}" for r in table.rows)
        print(f"degree={J} monotone={table.monotone_decrease} {row}")
