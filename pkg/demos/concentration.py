"""
How the screening matrices concentrate
======================================

For SIS the screening matrix X^T X / n approaches the covariance at rate
sqrt(log p / n). For HOLP it is a random projection whose diagonal sits near
n / p and whose off-diagonal entries are of order sqrt(n) / p.
"""

import math

from linscreen.experiments import concentration_probe
from linscreen.randomdesign import CovarianceSpec

##############################################################################
# SIS deviation from Sigma
# ------------------------

rows = concentration_probe(CovarianceSpec("identity", 200), [50, 100, 200, 400], replications=20, seed=1)
for r in rows:
    print(f"n={r['n']:4d}  median max|Phi - Sigma| = {r['sis_max_dev']:.3f}  "
          f"* sqrt(n / log p) = {r['sis_max_dev'] * math.sqrt(r['n'] / math.log(200)):.3f}")

##############################################################################
# HOLP entry sizes
# ----------------

p = 1000
rows = concentration_probe(CovarianceSpec("identity", p), [25, 50, 100, 200], replications=10, seed=2)
for r in rows:
    print(f"n={r['n']:4d}  diag * p / n = {r['holp_diag'] * p / r['n']:.3f}  "
          f"offdiag * p / sqrt(n) = {r['holp_offdiag'] * p / math.sqrt(r['n']):.3f}  "
          f"diag / offdiag = {r['holp_diag'] / r['holp_offdiag']:.1f}")
