"""
Irrepresentability, sparse Riesz bounds and simple sufficient screens
=====================================================================

The irrepresentable condition governs sign recovery by the lasso. Here it
is computed for a fixed sign pattern and for the worst pattern, then set
beside the smallest sparse eigenvalue of the design and the two cheap
sufficient conditions for diagonal dominance.
"""

import itertools

import numpy as np

from linscreen import (
    Ar,
    Bounded,
    screen_constant,
    corollary1_sufficient,
    ic_check,
    ic_sign_enumeration,
    ic_worst_case,
    rdd_check,
    sparse_riesz,
    standardize,
)

##############################################################################
# A hand example
# --------------
# Two correlated support variables and one noise variable that loads on
# both. C_SS^{-1} (1, 1) = (2/3, 2/3), so the off-support row gives 1.2.

c = np.array([[1.0, 0.5, 0.9], [0.5, 1.0, 0.9], [0.9, 0.9, 1.0]])
print("fixed signs (+,+):", ic_check(c, [0, 1], [1, 1]).value)
print("fixed signs (+,-):", ic_check(c, [0, 1], [1, -1]).value)
print("worst case      :", ic_worst_case(c, [0, 1]).value)

##############################################################################
# Worst case equals sign enumeration
# ----------------------------------
# Maximizing over sign vectors picks, row by row, the signs that align with
# each coefficient, so the worst case is the largest absolute row sum.

rng = np.random.default_rng(3)
z = rng.standard_normal((50, 10))
gram = z.T @ z / 50
for s in (2, 4, 6):
    S = sorted(rng.choice(10, s, replace=False).tolist())
    print(f"s={s}: closed form {ic_worst_case(gram, S).value:.15f}  enumeration {ic_sign_enumeration(gram, S):.15f}")

##############################################################################
# Sparse Riesz constant
# ---------------------
# The smallest eigenvalue of every s-column normalized Gram submatrix.
# Adding columns can only lower it.

x = standardize(rng.standard_normal((200, 8)))
print("mu_s for s = 1..4:", [round(sparse_riesz(x, s), 4) for s in range(1, 5)])

##############################################################################
# Cheap sufficient conditions
# ---------------------------
# Off-diagonals below c / (2s) give diagonal dominance with C0 = 1/c.
# A geometric decay r^|i-j| gives C0 = (1 - r)^2 / (4r), which is a usable
# constant (at least 1) only for small r.

p, s = 10, 3
off = np.triu(rng.uniform(-1, 1, (p, p)), 1) * 0.5 / (2 * s) * 0.99
phi = np.eye(p) + off + off.T
print("bounded screen:", corollary1_sufficient(phi, s, Bounded(0.5)),
      " confirmed:", rdd_check(phi, s, screen_constant(Bounded(0.5))).holds)
for r in (0.1, 0.5):
    print(f"AR screen r={r}: constant {screen_constant(Ar(r)):.4f}")
lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
phi = 0.9 * 0.1**lag
np.fill_diagonal(phi, 1.0)
print("AR(0.1) structure passes:", corollary1_sufficient(phi, p - 1, Ar(0.1)),
      " confirmed:", rdd_check(phi, p - 1, screen_constant(Ar(0.1))).holds)

# largest IC value over supports of size 2 on the same matrix
print("max IC over pairs:", round(max(ic_worst_case(phi, S).value for S in itertools.combinations(range(p), 2)), 4))
