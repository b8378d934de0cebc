"""Write the CSV tables behind every figure into one directory.

    python scripts/reproduce_figures.py [outdir]

Each run goes through the ``dcf`` command line, so the files carry the
usual metadata header and can be regenerated one at a time.
"""
import sys
from pathlib import Path

from dcf.cli import main

RUNS = {
    "trajectories.csv": ["classical"],
    "spectrum.csv": ["spectrum"],
    "density_eigen.csv": ["density", "--levels", "0,1,2"],
    "density_collapse.csv": ["density", "--levels", "0,1,2", "--beta", "0.75,0.9,0.99"],
    "density_coherent.csv": ["density", "--mode", "coherent"],
    "hur_plane.csv": ["hur", "--beta", "0,0.25,0.5,0.75,0.9,0.99"],
    "hur_phase_window.csv": ["hur", "--beta", "0.5,0.75,0.9", "--alpha-sweep", "0:4:41",
                             "--phase-sweep", "-0.39269908169872414:0.39269908169872414:9"],
    "energy_plane.csv": ["energy"],
    "velocity_plane.csv": ["velocity"],
    "verify.csv": ["verify"],
}


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name, args in RUNS.items():
        code = main([*args, "--out", str(outdir / name)])
        print(f"{name:24s} exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1] if len(sys.argv) > 1 else "figures")))
