"""
Monte Carlo consistency curves
==============================

Estimate the probability of strong screening consistency over a grid of
sample sizes for both screeners, print the table next to the sample-size
bounds, and write a CSV plus a gnuplot script for plotting.

Run with an optional output directory: ``python consistency_curves.py out/``.
"""

import sys
import tempfile
from pathlib import Path

from linscreen.experiments import ExperimentConfig, gnuplot_script, sweep, write_summary_csv

##############################################################################
# Configuration
# -------------
# Everything that determines the output lives in the config, including the
# master seed. Each (n, trial) cell draws from its own seed path, so the
# table does not depend on the number of worker threads.

config = ExperimentConfig(
    p=300,
    n_grid=(25, 50, 100, 200),
    s=4,
    rho=2.0,
    tau=1.0,
    sigma=1.0,
    replications=60,
    seed=42,
)
summary, trials = sweep(config, threads=2)

##############################################################################
# Success rates
# -------------

print(f"{'n':>5} {'method':>6} {'rate':>6} {'se':>6}")
for cell in summary.cells:
    print(f"{cell.n:5d} {cell.method:>6} {cell.rate:6.3f} {cell.se:6.3f}")

##############################################################################
# Bounds
# ------
# The bounds carry unknown absolute constants (set here to 1), so they are
# only comparable across parameters, not with the observed curves.

print("SIS bound :", summary.bound_sis)
print("HOLP bound:", summary.bound_holp)

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
out.mkdir(parents=True, exist_ok=True)
write_summary_csv(summary, out / "summary.csv")
(out / "summary.gp").write_text(gnuplot_script(summary, "summary.csv"))
print("wrote", out / "summary.csv", "and", out / "summary.gp")
