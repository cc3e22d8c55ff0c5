"""
Sample-size bounds
==================

Evaluate the two sample-size formulas and see how they react to the
parameters. The absolute constants have no known numeric value, so only
ratios between evaluations carry meaning.
"""

import math

from linscreen import holp_sample_bound, sis_sample_bound
from linscreen.errors import HypothesisViolated

##############################################################################
# SIS
# ---
# The SIS bound needs the largest off-diagonal covariance r to stay below
# 1 / (2 rho s), and it diverges as r approaches that limit.

print("unit example:", sis_sample_bound(K=1, rho=1, s=1, sigma=0, tau=1, r=0, p=3, delta=1),
      "=", 144 * 9 * math.log(9))
for r in (0.0, 0.4, 0.49, 0.499):
    print(f"  r = {r:5.3f}: {sis_sample_bound(rho=1, s=1, r=r):.4g}")
try:
    sis_sample_bound(rho=2, s=5, r=0.6)
except HypothesisViolated as exc:
    print("  equicorrelation 0.6:", exc)

##############################################################################
# HOLP
# ----
# HOLP has no such restriction; correlation enters only through the
# condition number kappa, to the fourth power.

for kappa in (1, 2, 4):
    print(f"kappa = {kappa}: {holp_sample_bound(kappa=kappa, rho=2, s=5, sigma=0.5, p=500, C=0):.4g}")
print("second branch when C is large:", holp_sample_bound(C=100, c0=2))
