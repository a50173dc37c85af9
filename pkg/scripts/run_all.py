"""Run every config in configs/ through the CLI and collect the artifacts.

    python scripts/run_all.py --out results/
"""

import argparse
import json
import sys
from pathlib import Path

from manispline.cli import main

ROOT = Path(__file__).resolve().parents[1]

# config file -> CLI command (audits take the kind as positional)
COMMANDS = {
    "circle_dirac_closed_form": ["solve"],
    "circle_dirac_truncated": ["solve"],
    "sphere_hemisphere_solve": ["solve"],
    "circle_density": ["convergence"],
    "circle_sampling": ["convergence"],
    "circle_aliasing": ["convergence"],
    "hemisphere_inversion": ["convergence"],
    "radon_parity": ["convergence"],
    "multiplier": ["audit", "multiplier"],
    "sphere_optimality": ["audit", "optimality"],
    "transform_audit": ["audit", "transform"],
    "lattice_fps": ["lattice"],
}
SUFFIX = {"solve": ".json", "convergence": ".csv", "audit": ".json", "lattice": ".json"}


def run(out_dir: Path, threads: int) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    codes = {}
    for name, cmd in COMMANDS.items():
        target = out_dir / (name + SUFFIX[cmd[0]])
        argv = cmd + ["--config", str(ROOT / "configs" / f"{name}.json"), "--out", str(target)]
        argv += ["--threads", str(threads)]
        codes[name] = main(argv)
        print(f"{name:28s} exit={codes[name]} -> {target}")
    return codes


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    codes = run(Path(args.out), args.threads)
    (Path(args.out) / "exit_codes.json").write_text(json.dumps(codes, indent=1) + "\n")
    sys.exit(max(codes.values()) > 1)
