"""Deterministic conditions on screening and Gram matrices.

Restricted diagonal dominance (RDD) with sparsity ``s`` and constant ``C0``
asks, for every ``I`` with ``|I| <= s - 1`` and every pair ``i != k`` outside
``I``::

    Phi_ii > C0 * max(sum_{j in I} |Phi_ij + Phi_kj|,
                      sum_{j in I} |Phi_ij - Phi_kj|) + |Phi_ik|

Both sums have nonnegative terms, so for a fixed pair the hardest ``I`` is
simply the ``s - 1`` largest terms of each array taken separately.
:func:`rdd_check` uses that reduction; :func:`rdd_brute_force` enumerates
every ``I`` literally and exists as an oracle for it.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import (
    AsymmetricInput,
    BadDiagonal,
    BadSigns,
    BadSparsity,
    DimensionMismatch,
    IndexOverlap,
    SingularSubmatrix,
    TooLarge,
    ValidationError,
)
from .model import SparseCoefficients, as_design
from .screeners import ScreeningMatrix

SYMMETRY_TOL = 1e-8
PIVOT_TOL = 1e-12
BRUTE_FORCE_LIMIT = 10**8
RIESZ_LIMIT = 10**6


class Witness(NamedTuple):
    """Constraint location: row ``i``, competitor ``k`` and the subset ``I``."""

    i: int
    k: int
    I: tuple


@dataclass(frozen=True)
class RddReport:
    holds: bool
    sparsity: int
    c0_required: float
    c0_max: float
    witness: Witness | None
    margin: float

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = {"i": self.witness.i + 1, "k": self.witness.k + 1, "I": [j + 1 for j in self.witness.I]}
        return {
            "holds": self.holds,
            "sparsity": self.sparsity,
            "c0_required": self.c0_required,
            "c0_max": self.c0_max,
            "margin": self.margin,
            "witness": w,
        }


@dataclass(frozen=True)
class IcReport:
    value: float
    theta_max: float
    sign_mode: str  # "fixed" or "worst_case"
    support: tuple
    signs: tuple | None = None
    theta: float | None = None

    @property
    def holds(self) -> bool | None:
        if self.theta is None:
            return None
        return self.holds_at(self.theta)

    def holds_at(self, theta: float) -> bool:
        return self.value <= 1.0 - theta

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "theta_max": self.theta_max,
            "sign_mode": self.sign_mode,
            "support": [j + 1 for j in self.support],
            "signs": None if self.signs is None else list(self.signs),
            "theta": self.theta,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class ConsistencyVerdict:
    ordering_ok: bool
    signs_ok: bool
    separation: float

    @property
    def strong(self) -> bool:
        return self.ordering_ok and self.signs_ok


def effective_matrix(phi) -> np.ndarray:
    """Symmetrized ``Phi - shift * I`` from a :class:`ScreeningMatrix` or array."""
    if isinstance(phi, ScreeningMatrix):
        m = np.asarray(phi.effective, dtype=np.float64)
    else:
        m = np.asarray(phi, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.T), initial=0.0))
    if asym > SYMMETRY_TOL:
        raise AsymmetricInput(f"matrix asymmetric by {asym:.3e} > {SYMMETRY_TOL:g}")
    if asym > 0.0:
        m = 0.5 * (m + m.T)
    return m


def _check_sparsity(s: int, p: int) -> None:
    if not (1 <= s <= p - 1):
        raise BadSparsity(f"sparsity must satisfy 1 <= s <= p-1 = {p - 1}, got {s}")


def _check_c0(c0: float) -> None:
    if not c0 >= 1.0:
        raise ValidationError(f"C0 must be at least 1, got {c0}")


def _top_sum(a: np.ndarray, t: int) -> np.ndarray:
    """Row-wise sum of the ``t`` largest entries of a nonnegative array."""
    if t <= 0:
        return np.zeros(a.shape[0])
    if t >= a.shape[1]:
        return a.sum(axis=1)
    return np.partition(a, a.shape[1] - t, axis=1)[:, a.shape[1] - t :].sum(axis=1)


def _top_indices(row: np.ndarray, t: int, exclude) -> tuple:
    cand = np.array([j for j in range(row.size) if j not in exclude], dtype=int)
    if t <= 0 or cand.size == 0:
        return ()
    order = np.lexsort((cand, -row[cand]))
    return tuple(sorted(int(j) for j in cand[order[:t]]))


def _pair_arrays(m: np.ndarray, i: int):
    """``|Phi_i. + Phi_k.|`` and ``|Phi_i. - Phi_k.|`` for all k, with j in {i, k} zeroed."""
    plus = np.abs(m[i] + m)
    minus = np.abs(m[i] - m)
    plus[:, i] = 0.0
    minus[:, i] = 0.0
    np.fill_diagonal(plus, 0.0)
    np.fill_diagonal(minus, 0.0)
    return plus, minus


def rdd_worst_sums(phi, s: int):
    """Hardest-subset sums for every ordered pair.

    Returns ``(m, plus, minus)`` where ``plus[i, k]`` is the top-``(s-1)`` sum
    of ``|Phi_ij + Phi_kj|`` over ``j not in {i, k}`` and ``minus`` likewise;
    the diagonal of both is zero and meaningless.
    """
    m = effective_matrix(phi)
    p = m.shape[0]
    _check_sparsity(s, p)
    plus_top = np.zeros((p, p))
    minus_top = np.zeros((p, p))
    for i in range(p):
        plus, minus = _pair_arrays(m, i)
        plus_top[i] = _top_sum(plus, s - 1)
        minus_top[i] = _top_sum(minus, s - 1)
    return m, plus_top, minus_top


def _c0_max_table(diag_gap: np.ndarray, worst: np.ndarray) -> np.ndarray:
    out = np.full(worst.shape, np.inf)
    pos = worst > 0
    np.divide(diag_gap, worst, out=out, where=pos)
    out[diag_gap <= 0] = -np.inf
    return out


def _signed_tables(m, plus_top, minus_top, c0):
    """Margins of the two constraints the adversarial construction can realize.

    ``minus``: ``Phi_ii - C0 * S_minus - Phi_ik``; ``plus``:
    ``Phi_ii - C0 * S_plus + Phi_ik``. Each is at least the RDD margin and
    coincides with it when the sign of ``Phi_ik`` matches the larger sum.
    """
    diag = np.diag(m)[:, None]
    minus = diag - c0 * minus_top - m
    plus = diag - c0 * plus_top + m
    np.fill_diagonal(minus, np.inf)
    np.fill_diagonal(plus, np.inf)
    return minus, plus


def _report_from_tables(m, plus_top, minus_top, s, c0) -> RddReport:
    p = m.shape[0]
    worst = np.maximum(plus_top, minus_top)
    absm = np.abs(m)
    diag = np.diag(m)
    margin = diag[:, None] - c0 * worst - absm
    np.fill_diagonal(margin, np.inf)
    gap = diag[:, None] - absm
    c0tab = _c0_max_table(gap, worst)
    np.fill_diagonal(c0tab, np.inf)

    flat = int(np.argmin(margin))
    min_margin = float(margin.flat[flat])
    use_plus = None
    if min_margin <= 0.0:
        # prefer a violated constraint that also fails in its signed form
        sm, sp = _signed_tables(m, plus_top, minus_top, c0)
        signed = np.minimum(sm, sp)
        sflat = int(np.argmin(signed))
        if signed.flat[sflat] <= 0.0:
            flat = sflat
            use_plus = bool(sp.flat[sflat] < sm.flat[sflat])
    i, k = divmod(flat, p)
    if use_plus is None:
        use_plus = bool(plus_top[i, k] >= minus_top[i, k])
    if s > 1:
        plus, minus = _pair_arrays(m, i)
        I = _top_indices(plus[k] if use_plus else minus[k], s - 1, {i, k})
    else:
        I = ()
    return RddReport(
        holds=bool(min_margin > 0.0),
        sparsity=s,
        c0_required=float(c0),
        c0_max=float(np.min(c0tab)),
        witness=Witness(i, k, I),
        margin=min_margin,
    )


def signed_rdd_margin(phi, s: int, c0: float) -> float:
    """Smallest margin of the sign-aware form of the RDD constraints.

    The sign-aware constraints pair the minus-sum with ``+Phi_ik`` and the
    plus-sum with ``-Phi_ik`` instead of charging ``|Phi_ik|`` to both. A
    positive value is exactly the condition for every ``beta`` in
    ``B(s, C0)`` to be screened consistently in the noiseless case; RDD
    (``rdd_check``) is sufficient for it but not necessary.
    """
    _check_c0(c0)
    m, plus_top, minus_top = rdd_worst_sums(phi, s)
    sm, sp = _signed_tables(m, plus_top, minus_top, c0)
    return float(min(np.min(sm), np.min(sp)))


def rdd_check(phi, s: int, c0: float) -> RddReport:
    """Decide restricted diagonal dominance exactly.

    Runs in ``O(p^2 (p + s))``. When the check holds the witness is the
    tightest constraint. When it fails the witness is a violated constraint,
    chosen where possible so that one of the :func:`adversarial_beta`
    vectors built from it breaks consistency. ``c0_max`` is a
    supremum: the check holds for every ``C0 < c0_max`` (subject to
    ``C0 >= 1``) and fails at ``c0_max`` itself.
    """
    _check_c0(c0)
    m, plus_top, minus_top = rdd_worst_sums(phi, s)
    return _report_from_tables(m, plus_top, minus_top, s, c0)


def rdd_max_c0(phi, s: int) -> float:
    m, plus_top, minus_top = rdd_worst_sums(phi, s)
    worst = np.maximum(plus_top, minus_top)
    diag = np.diag(m)
    c0tab = _c0_max_table(diag[:, None] - np.abs(m), worst)
    np.fill_diagonal(c0tab, np.inf)
    return float(np.min(c0tab))


def rdd_brute_force(phi, s: int, c0: float) -> RddReport:
    """Literal enumeration of every subset ``I`` with ``|I| <= s - 1``.

    Test oracle for :func:`rdd_check`; refuses inputs needing more than
    ``1e8`` constraint evaluations.
    """
    _check_c0(c0)
    m = effective_matrix(phi)
    p = m.shape[0]
    _check_sparsity(s, p)
    n_subsets = sum(math.comb(p, t) for t in range(s))
    if n_subsets * p * p > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{n_subsets} subsets x {p * p} pairs exceeds {BRUTE_FORCE_LIMIT:g}")

    diag = np.diag(m)
    absm = np.abs(m)
    gap = diag[:, None] - absm
    best_margin = math.inf
    best_witness = None
    c0_max = math.inf
    for t in range(s):
        for I in itertools.combinations(range(p), t):
            idx = list(I)
            if idx:
                rows = m[:, idx]
                plus = np.abs(rows[:, None, :] + rows[None, :, :]).sum(axis=2)
                minus = np.abs(rows[:, None, :] - rows[None, :, :]).sum(axis=2)
            else:
                plus = minus = np.zeros((p, p))
            worst = np.maximum(plus, minus)
            valid = ~np.eye(p, dtype=bool)
            valid[idx, :] = False
            valid[:, idx] = False
            if not valid.any():
                continue
            margin = np.where(valid, diag[:, None] - c0 * worst - absm, np.inf)
            flat = int(np.argmin(margin))
            if margin.flat[flat] < best_margin:
                best_margin = float(margin.flat[flat])
                best_witness = Witness(*divmod(flat, p), tuple(I))
            c0tab = np.where(valid, _c0_max_table(gap, worst), np.inf)
            c0_max = min(c0_max, float(np.min(c0tab)))
    return RddReport(
        holds=bool(best_margin > 0.0),
        sparsity=s,
        c0_required=float(c0),
        c0_max=c0_max,
        witness=best_witness,
        margin=best_margin,
    )


def dom_necessary_check(phi, s: int, c0: float) -> bool:
    """Row-wise consequence of RDD: ``Phi_ii >= C0 * (s-1 largest |Phi_ij|, j != i)``."""
    _check_c0(c0)
    m = effective_matrix(phi)
    _check_sparsity(s, m.shape[0])
    off = np.abs(m)
    np.fill_diagonal(off, 0.0)
    return bool(np.all(np.diag(m) >= c0 * _top_sum(off, s - 1)))


def consistency_check(est, beta: SparseCoefficients) -> ConsistencyVerdict:
    """Strong screening consistency of an estimate against the true ``beta``.

    Ordering requires every support magnitude to strictly exceed every
    off-support magnitude; a zero estimate never matches a nonzero sign.
    """
    b = np.asarray(est, dtype=np.float64).ravel()
    if b.size != beta.p:
        raise DimensionMismatch(f"estimate has length {b.size}, expected p={beta.p}")
    on = np.zeros(b.size, dtype=bool)
    on[list(beta.support)] = True
    mags = np.abs(b)
    lo = float(np.min(mags[on], initial=np.inf))
    hi = float(np.max(mags[~on], initial=-np.inf))
    if not np.any(~on) or not np.any(on):
        separation = math.inf
        ordering_ok = True
    else:
        separation = lo - hi
        ordering_ok = lo > hi
    signs_ok = bool(np.all(np.sign(b[on]) == np.sign(np.asarray(beta.values))))
    return ConsistencyVerdict(bool(ordering_ok), signs_ok, separation)


def _lu_guarded(a: np.ndarray):
    if a.size == 0:
        return None
    with warnings.catch_warnings():
        # singularity is reported by the pivot test below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    u = np.abs(np.diag(lu))
    if np.max(u) == 0.0 or np.min(u) < PIVOT_TOL * np.max(u):
        raise SingularSubmatrix("C_SS is singular to working precision")
    return lu, piv


def irrepresentable_matrix(gram, support: Sequence[int]) -> np.ndarray:
    """``C_{S^c,S} C_{S,S}^{-1}`` with rows ordered by increasing index in ``S^c``."""
    c = np.asarray(gram, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {c.shape}")
    p = c.shape[0]
    S = sorted(set(int(j) for j in support))
    if len(S) != len(support) or not S or S[0] < 0 or S[-1] >= p:
        raise ValidationError("support must be distinct, nonempty indices in range")
    Sc = [j for j in range(p) if j not in set(S)]
    factor = _lu_guarded(c[np.ix_(S, S)])
    if not Sc:
        return np.zeros((0, len(S)))
    # R = C_{Sc,S} C_SS^{-1}, so R^T solves C_SS^T R^T = C_{Sc,S}^T
    rt = sla.lu_solve(factor, c[np.ix_(Sc, S)].T, trans=1, check_finite=False)
    return rt.T


def _support_order(support):
    S = tuple(sorted(int(j) for j in support))
    if len(set(S)) != len(S):
        raise ValidationError("support has repeated indices")
    return S


def ic_check(gram, support: Sequence[int], signs: Sequence[float], theta: float | None = None) -> IcReport:
    """Irrepresentable-condition value ``||C_{S^c,S} C_SS^{-1} signs||_inf``.

    ``signs`` are matched to ``support`` in increasing index order.
    """
    S = _support_order(support)
    sg = np.asarray(signs, dtype=np.float64).ravel()
    if sg.size != len(S) or not np.all(np.abs(sg) == 1.0):
        raise BadSigns(f"need {len(S)} signs, each +1 or -1")
    # reorder signs alongside the sorted support
    order = np.argsort(np.asarray(support), kind="stable")
    sg = sg[order]
    r = irrepresentable_matrix(gram, S)
    value = float(np.max(np.abs(r @ sg), initial=0.0))
    return IcReport(value, 1.0 - value, "fixed", S, tuple(int(v) for v in sg), theta)


def ic_worst_case(gram, support: Sequence[int], theta: float | None = None) -> IcReport:
    """IC value maximized over all sign patterns: the largest absolute row sum."""
    S = _support_order(support)
    r = irrepresentable_matrix(gram, S)
    value = float(np.max(np.abs(r).sum(axis=1), initial=0.0))
    return IcReport(value, 1.0 - value, "worst_case", S, None, theta)


def ic_sign_enumeration(gram, support: Sequence[int]) -> float:
    """Worst-case IC value by enumerating all ``2^s`` sign vectors (oracle)."""
    S = _support_order(support)
    r = irrepresentable_matrix(gram, S)
    best = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=len(S)):
        best = max(best, float(np.max(np.abs(r @ np.asarray(signs)), initial=0.0)))
    return best


def sparse_riesz(design, s: int, chunk: int = 4096) -> float:
    """Smallest eigenvalue of ``X_pi^T X_pi / n`` over all column subsets of size ``s``.

    Smaller subsets need not be visited: by eigenvalue interlacing adding a
    column never raises the minimum eigenvalue.
    """
    x = as_design(design).values
    n, p = x.shape
    if not (1 <= s <= p):
        raise BadSparsity(f"need 1 <= s <= p = {p}, got {s}")
    if math.comb(p, s) > RIESZ_LIMIT:
        raise TooLarge(f"C({p}, {s}) = {math.comb(p, s)} subsets exceeds {RIESZ_LIMIT:g}")
    g = x.T @ x / n
    best = math.inf
    combos = itertools.combinations(range(p), s)
    while True:
        batch = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if batch.size == 0:
            break
        sub = g[batch[:, :, None], batch[:, None, :]]
        best = min(best, float(np.min(np.linalg.eigvalsh(sub)[:, 0])))
    return best


@dataclass(frozen=True)
class Bounded:
    c: float


@dataclass(frozen=True)
class Ar:
    r: float


def screen_constant(mode) -> float:
    """The RDD constant guaranteed by :func:`corollary1_sufficient`.

    ``Bounded(c)`` gives ``1/c``; ``Ar(r)`` gives ``(1-r)^2 / (4r)``, which
    drops below 1 once ``r > 3 - 2*sqrt(2)``.
    """
    if isinstance(mode, Bounded):
        if not 0 < mode.c < 1:
            raise ValidationError("c must lie in (0, 1)")
        return 1.0 / mode.c
    if isinstance(mode, Ar):
        if not 0 < mode.r < 1:
            raise ValidationError("r must lie in (0, 1)")
        return (1.0 - mode.r) ** 2 / (4.0 * mode.r)
    raise ValidationError(f"unknown mode {mode!r}")


def corollary1_sufficient(phi, s: int, mode) -> bool:
    m = effective_matrix(phi)
    p = m.shape[0]
    if np.max(np.abs(np.diag(m) - 1.0)) > 1e-8:
        raise BadDiagonal("Corollary screens need a unit diagonal")
    screen_constant(mode)  # validates mode parameters
    off = np.abs(m)
    np.fill_diagonal(off, 0.0)
    if isinstance(mode, Bounded):
        return bool(np.max(off, initial=0.0) < mode.c / (2.0 * s))
    lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    cap = mode.r ** lag.astype(float)
    mask = lag > 0
    return bool(np.all(off[mask] < cap[mask]))


def _sign_plus(v: float) -> float:
    return 1.0 if v >= 0 else -1.0


def adversarial_beta(phi, i: int, k: int, I: Sequence[int], rho: float):
    """Coefficient vectors that break consistency when constraint ``(i, k, I)`` fails.

    Returns ``(minus_variant, plus_variant)``. Both set ``beta_i = 1``; on
    ``I`` the minus variant uses ``-rho * sign(Phi_ij - Phi_kj)`` and the plus
    variant ``-rho * sign(Phi_ij + Phi_kj)``, with ``sign(0) = +1`` so the
    support stays ``I + {i}``.
    """
    m = effective_matrix(phi)
    p = m.shape[0]
    I = tuple(int(j) for j in I)
    if i == k or i in I or k in I:
        raise IndexOverlap("need i != k and neither in I")
    if not all(0 <= j < p for j in (i, k, *I)) or len(set(I)) != len(I):
        raise ValidationError("indices out of range or repeated")
    if rho < 1:
        raise ValidationError("rho must be at least 1")
    support = (i, *I)
    minus = [1.0] + [-rho * _sign_plus(m[i, j] - m[k, j]) for j in I]
    plus = [1.0] + [-rho * _sign_plus(m[i, j] + m[k, j]) for j in I]
    return SparseCoefficients(p, support, minus), SparseCoefficients(p, support, plus)
