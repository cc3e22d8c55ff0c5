"""Seeded Gaussian designs, coefficient vectors and noise.

Every sampler is a pure function of its parameters and a :class:`SeedPath`.
A seed path is a master seed plus a tuple of nonnegative integers, and it is
hashed into an independent stream by :class:`numpy.random.SeedSequence`
(``spawn_key=path``). Any substream can therefore be produced directly,
in any order and on any thread.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, NotPositiveDefinite, ValidationError
from .model import DesignMatrix, SparseCoefficients

GENERATOR = (
    f"numpy {np.__version__} PCG64 seeded by SeedSequence(master, spawn_key=path); "
    "normals by Generator.standard_normal (ziggurat)"
)


@dataclass(frozen=True)
class SeedPath:
    master: int
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= int(self.master) < 2**64:
            raise ValidationError("master seed must be a 64-bit unsigned integer")
        path = tuple(int(v) for v in self.path)
        if any(v < 0 for v in path):
            raise ValidationError("seed path components must be nonnegative")
        object.__setattr__(self, "master", int(self.master))
        object.__setattr__(self, "path", path)

    def child(self, *components: int) -> "SeedPath":
        return SeedPath(self.master, self.path + tuple(components))

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.master, spawn_key=self.path)))

    def to_dict(self) -> dict:
        return {"master": self.master, "path": list(self.path)}


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, SeedPath):
        return seed.rng()
    if isinstance(seed, np.random.Generator):
        return seed
    return SeedPath(int(seed)).rng()


@dataclass(frozen=True, eq=False)
class CovarianceSpec:
    """Design covariance: ``identity``, ``equicorrelated``, ``ar1`` or ``custom``."""

    kind: str
    p: int
    r: float = 0.0
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("identity", "equicorrelated", "ar1", "custom"):
            raise ValidationError(f"unknown covariance kind {self.kind!r}")
        if self.p < 1:
            raise ValidationError("p must be positive")
        if self.kind == "custom":
            if self.matrix is None:
                raise ValidationError("custom covariance needs a matrix")
            m = np.array(self.matrix, dtype=np.float64)
            if m.shape != (self.p, self.p):
                raise ValidationError(f"custom covariance must be {self.p}x{self.p}, got {m.shape}")
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)

    @classmethod
    def parse(cls, text: str, p: int, loader=None) -> "CovarianceSpec":
        """Parse ``identity``, ``equi:R``, ``ar1:R`` or ``custom:path.csv``."""
        name, _, arg = str(text).partition(":")
        name = name.strip().lower()
        if name == "identity":
            return cls("identity", p)
        if name in ("equi", "equicorrelated"):
            return cls("equicorrelated", p, float(arg))
        if name == "ar1":
            return cls("ar1", p, float(arg))
        if name == "custom":
            if loader is None:
                from .io import read_matrix as loader
            return cls("custom", p, matrix=loader(arg))
        raise ValidationError(f"cannot parse covariance {text!r}")

    def describe(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "equicorrelated":
            return f"equi:{self.r!r}"
        if self.kind == "ar1":
            return f"ar1:{self.r!r}"
        return "custom"

    def max_offdiag(self) -> float:
        """Largest off-diagonal magnitude of the (unit-diagonal) covariance."""
        if self.p == 1 or self.kind == "identity":
            return 0.0
        if self.kind in ("equicorrelated", "ar1"):
            return abs(self.r)
        return float(np.max(np.abs(materialize(self).sigma - np.eye(self.p))))


@dataclass(frozen=True, eq=False)
class Covariance:
    spec: CovarianceSpec
    sigma: np.ndarray
    chol: np.ndarray
    lambda_min: float
    lambda_max: float

    @property
    def kappa(self) -> float:
        return self.lambda_max / self.lambda_min

    @property
    def p(self) -> int:
        return self.spec.p


def _build_sigma(spec: CovarianceSpec) -> np.ndarray:
    p = spec.p
    if spec.kind == "identity":
        return np.eye(p)
    if spec.kind == "equicorrelated":
        if not (p == 1 or -1.0 / (p - 1) < spec.r < 1.0):
            raise NotPositiveDefinite(f"equicorrelated r must lie in (-1/(p-1), 1), got {spec.r}")
        return np.full((p, p), spec.r) + (1.0 - spec.r) * np.eye(p)
    if spec.kind == "ar1":
        if not abs(spec.r) < 1.0:
            raise NotPositiveDefinite(f"AR(1) needs |r| < 1, got {spec.r}")
        lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        return spec.r ** lag.astype(float)
    m = np.array(spec.matrix)
    if np.max(np.abs(m - m.T)) > 1e-8:
        raise ValidationError("custom covariance is not symmetric")
    m = 0.5 * (m + m.T)
    d = np.diag(m)
    if np.any(d <= 0):
        raise NotPositiveDefinite("custom covariance has a nonpositive diagonal entry")
    if np.max(np.abs(d - 1.0)) > 1e-8:
        warnings.warn("custom covariance rescaled to unit diagonal", stacklevel=3)
        s = 1.0 / np.sqrt(d)
        m = m * s[:, None] * s[None, :]
    np.fill_diagonal(m, 1.0)
    return m


def materialize(spec: CovarianceSpec) -> Covariance:
    """Build the covariance, its lower Cholesky factor and extreme eigenvalues."""
    if isinstance(spec, Covariance):
        return spec
    sigma = _build_sigma(spec)
    if spec.kind == "identity":
        chol = np.eye(spec.p)
    else:
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite("covariance is not positive definite") from None
        if np.min(np.diag(chol)) ** 2 < 1e-12:
            raise NotPositiveDefinite("Cholesky pivot below 1e-12")
    eig = np.linalg.eigvalsh(sigma)
    if eig[0] <= 0:
        raise NotPositiveDefinite(f"smallest eigenvalue {eig[0]:.3e} is not positive")
    for a in (sigma, chol):
        a.flags.writeable = False
    return Covariance(spec, sigma, chol, float(eig[0]), float(eig[-1]))


def sample_design(cov, n: int, seed) -> DesignMatrix:
    """``n`` i.i.d. rows from ``N(0, Sigma)`` computed as ``Z @ L.T``."""
    cov = materialize(cov)
    if n < 1:
        raise BadParams("n must be positive")
    z = _as_rng(seed).standard_normal((n, cov.p))
    if cov.spec.kind == "identity":
        return DesignMatrix(z)
    return DesignMatrix(z @ cov.chol.T)


def sample_beta(p: int, s: int, tau: float, rho: float, seed) -> SparseCoefficients:
    """Random member of the class with sparsity ``s``, ratio ``rho`` and floor ``tau``.

    The support is uniform without replacement, magnitudes are uniform on
    ``[tau, rho * tau]`` and signs are fair coin flips.
    """
    if not (0 <= s <= p) or not tau > 0 or not rho >= 1:
        raise BadParams(f"need 0 <= s <= p, tau > 0, rho >= 1 (got s={s}, p={p}, tau={tau}, rho={rho})")
    rng = _as_rng(seed)
    support = np.sort(rng.choice(p, size=s, replace=False))
    hi = rho * tau
    mags = np.clip(rng.uniform(tau, hi, size=s), tau, hi)
    signs = np.where(rng.random(s) < 0.5, -1.0, 1.0)
    return SparseCoefficients(p, tuple(support.tolist()), tuple((signs * mags).tolist()))


def sample_noise(n: int, sigma: float, seed) -> np.ndarray:
    if not sigma >= 0 or not math.isfinite(sigma):
        raise BadParams("sigma must be finite and nonnegative")
    if sigma == 0:
        return np.zeros(n)
    return sigma * _as_rng(seed).standard_normal(n)
