"""Core regression objects for ``Y = X beta + eps``.

Indices are 0-based throughout the Python API. File formats and the CLI
translate to 1-based indices at the boundary (see :mod:`linscreen.io`).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConstantColumn, DimensionMismatch, ValidationError


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """An ``n x p`` matrix of predictors, one observation per row.

    The array is copied and marked read-only on construction.
    """

    values: np.ndarray
    fingerprint: str = field(init=False, repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"design must be a non-empty 2-d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("design contains non-finite entries")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "fingerprint", _fingerprint(arr))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)


def _fingerprint(arr: np.ndarray) -> str:
    h = hashlib.blake2b(digest_size=16)
    h.update(np.asarray(arr.shape, dtype=np.int64).tobytes())
    h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def as_design(x) -> DesignMatrix:
    """Return ``x`` as a :class:`DesignMatrix`, wrapping arrays as needed."""
    if isinstance(x, DesignMatrix):
        return x
    return DesignMatrix(x)


@dataclass(frozen=True)
class SparseCoefficients:
    """Support-indexed coefficient vector.

    ``support`` is a sorted tuple of 0-based indices and ``values`` holds the
    matching nonzero coefficients.
    """

    p: int
    support: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        values = tuple(float(v) for v in self.values)
        if self.p < 1:
            raise ValidationError("p must be positive")
        if len(support) != len(values):
            raise ValidationError("support and values differ in length")
        if len(set(support)) != len(support):
            raise ValidationError("support has repeated indices")
        if any(i < 0 or i >= self.p for i in support):
            raise ValidationError(f"support index out of range 0..{self.p - 1}")
        if any(v == 0.0 or not math.isfinite(v) for v in values):
            raise ValidationError("support values must be finite and nonzero")
        order = sorted(range(len(support)), key=support.__getitem__)
        object.__setattr__(self, "support", tuple(support[k] for k in order))
        object.__setattr__(self, "values", tuple(values[k] for k in order))

    @classmethod
    def from_dense(cls, beta: Sequence[float]) -> "SparseCoefficients":
        beta = np.asarray(beta, dtype=np.float64).ravel()
        idx = np.flatnonzero(beta)
        return cls(beta.size, tuple(idx.tolist()), tuple(beta[idx].tolist()))

    @property
    def s(self) -> int:
        return len(self.support)

    @property
    def tau(self) -> float:
        """Smallest magnitude on the support (``inf`` for an empty support)."""
        if not self.values:
            return math.inf
        return min(abs(v) for v in self.values)

    @property
    def rho(self) -> float:
        """Ratio of largest to smallest magnitude (1 for an empty support)."""
        if not self.values:
            return 1.0
        mags = [abs(v) for v in self.values]
        return max(mags) / min(mags)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.p)
        if self.support:
            out[list(self.support)] = self.values
        return out

    def signs(self) -> np.ndarray:
        return np.sign(np.asarray(self.values))


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float = 0.0

    def __post_init__(self):
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise ValidationError("sigma must be finite and nonnegative")


@dataclass(frozen=True, eq=False)
class RegressionInstance:
    design: DesignMatrix
    beta: SparseCoefficients
    noise: np.ndarray
    response: np.ndarray


def standardize(design) -> DesignMatrix:
    """Center each column and scale it to unit variance (divisor ``n``).

    With the ``1/n`` convention the standardized design satisfies
    ``diag(X.T @ X / n) == 1``.

    Raises
    ------
    ConstantColumn
        If some column has zero variance.
    """
    x = as_design(design).values
    centered = x - x.mean(axis=0)
    sd = np.sqrt(np.mean(centered**2, axis=0))
    for j in range(x.shape[1]):
        # relative test: the mean of a constant column can carry roundoff
        if sd[j] <= 1e-13 * float(np.max(np.abs(x[:, j]))):
            raise ConstantColumn(j)
    return DesignMatrix(centered / sd)


def _response(x: np.ndarray, beta: SparseCoefficients, noise: np.ndarray) -> np.ndarray:
    y = np.zeros(x.shape[0])
    for j, b in zip(beta.support, beta.values):
        y = y + x[:, j] * b
    return y + noise


def assemble(design, beta: SparseCoefficients, noise) -> RegressionInstance:
    """Form ``Y = X beta + eps``.

    The signal part is accumulated column by column in increasing support
    order, so recomputation with :func:`response_of` is bit-identical.
    """
    design = as_design(design)
    noise = np.asarray(noise, dtype=np.float64).ravel()
    if noise.size != design.n:
        raise DimensionMismatch(f"noise has length {noise.size}, expected n={design.n}")
    if beta.p != design.p:
        raise DimensionMismatch(f"beta has p={beta.p}, design has p={design.p}")
    y = _response(design.values, beta, noise)
    noise = noise.copy()
    noise.flags.writeable = False
    y.flags.writeable = False
    return RegressionInstance(design, beta, noise, y)


def response_of(instance: RegressionInstance) -> np.ndarray:
    """Recompute the response of ``instance`` with the same accumulation order."""
    return _response(instance.design.values, instance.beta, instance.noise)


def membership(beta: SparseCoefficients, s: int, rho: float, tau: float = 0.0) -> bool:
    """Test ``beta`` for membership in the class with sparsity at most ``s``,
    magnitude ratio at most ``rho`` and minimum magnitude at least ``tau``.

    The ratio condition is evaluated as ``max|b| <= rho * min|b|`` so that a
    magnitude clipped to exactly ``rho * tau`` passes.
    """
    if s < 0 or rho < 1 or tau < 0:
        raise ValidationError("need s >= 0, rho >= 1, tau >= 0")
    if beta.s == 0:
        return True
    mags = [abs(v) for v in beta.values]
    lo, hi = min(mags), max(mags)
    return beta.s <= s and hi <= rho * lo and lo >= tau
