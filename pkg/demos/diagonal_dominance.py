"""
Restricted diagonal dominance and the noiseless screening guarantee
===================================================================

A screening matrix Phi screens every coefficient vector of sparsity at most
s and magnitude ratio at most rho correctly, in the absence of noise, when
its diagonal dominates the worst sums of s - 1 off-diagonal entries.
"""

import numpy as np

from linscreen import (
    SparseCoefficients,
    adversarial_beta,
    consistency_check,
    rdd_brute_force,
    rdd_check,
    rdd_max_c0,
    signed_rdd_margin,
)

##############################################################################
# An equicorrelated matrix
# ------------------------
# With unit diagonal and off-diagonal r, the tightest constraint at s = 2 is
# 1 > C0 * 2r + r, so the largest admissible constant is (1 - r) / (2r).

p, r = 6, 0.1
phi = np.full((p, p), r) + (1 - r) * np.eye(p)
print("c0_max:", rdd_max_c0(phi, 2), " closed form:", (1 - r) / (2 * r))
report = rdd_check(phi, 2, c0=2.0)
print("holds at C0 = 2:", report.holds, " margin:", round(report.margin, 6))

##############################################################################
# The fast check against literal enumeration
# ------------------------------------------
# For a fixed pair (i, k) the hardest subset is just the s - 1 largest terms
# of each sum, so the check avoids enumerating subsets. The brute-force
# oracle enumerates them anyway.

rng = np.random.default_rng(0)
b = np.triu(rng.uniform(-1, 1, (9, 9)), 1)
m = np.eye(9) + 0.08 * (b + b.T)
for s in (2, 3, 4):
    fast, slow = rdd_check(m, s, 1.0), rdd_brute_force(m, s, 1.0)
    print(f"s={s}: fast c0_max={fast.c0_max:.12g}  brute={slow.c0_max:.12g}")

##############################################################################
# Breaking consistency at a violated constraint
# ---------------------------------------------
# When the check fails, the witness (i, k, I) tells us how to build a
# coefficient vector on I + {i} whose noiseless estimate misorders i and k.

phi = np.eye(p) + 0.35 * (np.full((p, p), 1.0) - np.eye(p))
rep = rdd_check(phi, 3, c0=2.0)
w = rep.witness
print("holds:", rep.holds, " witness:", w)
for beta in adversarial_beta(phi, w.i, w.k, w.I, rho=2.0):
    est = phi @ beta.dense()
    print("  beta =", np.round(beta.dense(), 2), " strong:", consistency_check(est, beta).strong)

##############################################################################
# Diagonal dominance is sufficient but not necessary
# --------------------------------------------------
# The condition charges |Phi_ik| against both sums. The construction above
# can only realize the minus sum together with +Phi_ik and the plus sum with
# -Phi_ik, so a matrix can fail the check while every vector in the class is
# still screened correctly. The sign-aware margin captures this exactly.

gap = np.array([[1.0, -0.5, 0.3], [-0.5, 10.0, -0.3], [0.3, -0.3, 10.0]])
print("holds:", rdd_check(gap, 2, 1.0).holds, " sign-aware margin:", round(signed_rdd_margin(gap, 2, 1.0), 3))
ok = all(
    consistency_check(gap @ v.dense(), v).strong
    for v in (
        SparseCoefficients(3, sup, vals)
        for sup in ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2))
        for vals in (
            [(a,) for a in (1.0, -1.0)] if len(sup) == 1 else [(a, b) for a in (1.0, -1.0) for b in (1.0, -1.0)]
        )
    )
)
print("every vertex of the class screened correctly:", ok)
