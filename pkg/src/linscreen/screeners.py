"""Linear screeners ``beta_hat = A @ Y``.

Two ancillary matrices are provided: SIS uses ``A = X.T / n`` (scaled marginal
correlations) and HOLP uses ``A = X.T (X X.T)^{-1}`` (the minimum-norm
interpolating solution). The ``p x p`` screening matrix ``Phi = A @ X`` is
only formed on request via :func:`screening_matrix`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionMismatch,
    FingerprintMismatch,
    NonpositiveTau,
    SingularGram,
    ValidationError,
)
from .model import as_design

PIVOT_TOL = 1e-12


class Method(str, Enum):
    SIS = "sis"
    HOLP = "holp"


@dataclass(frozen=True, eq=False)
class AncillaryMatrix:
    method: Method
    values: np.ndarray  # p x n
    source_hash: str

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True, eq=False)
class ScreeningMatrix:
    """``Phi = A @ X`` together with the diagonal shift used by condition checks."""

    values: np.ndarray
    diag_shift: float = 0.0
    method: Method | None = None

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def effective(self) -> np.ndarray:
        """``values - diag_shift * I``, the matrix the conditions are tested on."""
        if self.diag_shift == 0.0:
            return self.values
        return self.values - self.diag_shift * np.eye(self.p)


@dataclass(frozen=True)
class TopD:
    d: int


@dataclass(frozen=True)
class Threshold:
    gamma: float


@dataclass(frozen=True)
class Submodel:
    indices: tuple
    rule: TopD | Threshold


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def build_sis(design) -> AncillaryMatrix:
    design = as_design(design)
    a = design.values.T / design.n
    return AncillaryMatrix(Method.SIS, _frozen(np.ascontiguousarray(a)), design.fingerprint)


def gram_factor(x: np.ndarray):
    """Cholesky factor of ``X X.T`` with the rank-deficiency guard.

    Raises :class:`SingularGram` when a pivot drops below ``1e-12`` times the
    largest diagonal entry of the Gram matrix.
    """
    g = x @ x.T
    scale = float(np.max(np.diag(g))) if g.size else 0.0
    if scale <= 0.0:
        raise SingularGram("Gram matrix X X^T is zero")
    try:
        c, lower = sla.cho_factor(g, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularGram(f"X X^T is not positive definite: {exc}") from None
    pivots = np.diag(c) ** 2
    if np.min(pivots) < PIVOT_TOL * scale:
        raise SingularGram(
            f"X X^T pivot {np.min(pivots):.3e} below {PIVOT_TOL:g} x max diagonal; rows are linearly dependent"
        )
    return c, lower


def build_holp(design) -> AncillaryMatrix:
    design = as_design(design)
    x = design.values
    factor = gram_factor(x)
    # A.T = (X X^T)^{-1} X, one factorization reused for all p columns
    at = sla.cho_solve(factor, x, check_finite=False)
    return AncillaryMatrix(Method.HOLP, _frozen(np.ascontiguousarray(at.T)), design.fingerprint)


def build(method, design) -> AncillaryMatrix:
    method = Method(method)
    if method is Method.SIS:
        return build_sis(design)
    return build_holp(design)


def estimate(a: AncillaryMatrix, response) -> np.ndarray:
    y = np.asarray(response, dtype=np.float64).ravel()
    if y.size != a.values.shape[1]:
        raise DimensionMismatch(f"response has length {y.size}, expected n={a.values.shape[1]}")
    return a.values @ y


def screening_matrix(a: AncillaryMatrix, design, shift: float = 0.0) -> ScreeningMatrix:
    design = as_design(design)
    if design.fingerprint != a.source_hash:
        raise FingerprintMismatch("ancillary matrix was built from a different design")
    if not shift >= 0.0:
        raise ValidationError("shift must be nonnegative")
    phi = a.values @ design.values
    return ScreeningMatrix(_frozen(phi), float(shift), a.method)


def noise_shift(a: AncillaryMatrix, noise, tau: float) -> float:
    """Diagonal shift ``2 * ||A eps||_inf / tau`` absorbing the noise term."""
    if not tau > 0:
        raise NonpositiveTau(f"tau must be positive, got {tau}")
    eps = np.asarray(noise, dtype=np.float64).ravel()
    if eps.size != a.values.shape[1]:
        raise DimensionMismatch(f"noise has length {eps.size}, expected n={a.values.shape[1]}")
    return 2.0 * float(np.max(np.abs(a.values @ eps), initial=0.0)) / tau


def select(est, rule) -> Submodel:
    """Pick a submodel from the estimate.

    ``TopD(d)`` keeps the ``d`` largest magnitudes, breaking ties toward the
    smaller index; ``Threshold(g)`` keeps every index with ``|b| > g``.
    """
    b = np.abs(np.asarray(est, dtype=np.float64).ravel())
    if isinstance(rule, TopD):
        if rule.d < 0:
            raise ValidationError("d must be nonnegative")
        order = np.lexsort((np.arange(b.size), -b))
        chosen = order[: min(rule.d, b.size)]
    elif isinstance(rule, Threshold):
        if rule.gamma < 0:
            raise ValidationError("gamma must be nonnegative")
        chosen = np.flatnonzero(b > rule.gamma)
    else:
        raise ValidationError(f"unknown selection rule {rule!r}")
    return Submodel(tuple(sorted(int(i) for i in chosen)), rule)


def screen(design, response, method="holp", rule=None):
    """Convenience wrapper: build ``A``, estimate, and select.

    Returns ``(submodel, estimate)``. The default rule keeps ``n`` variables.
    """
    design = as_design(design)
    a = build(method, design)
    est = estimate(a, response)
    if rule is None:
        rule = TopD(design.n)
    return select(est, rule), est
