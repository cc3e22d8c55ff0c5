"""Sample-size bounds for SIS and HOLP consistency under Gaussian designs.

The absolute constants (``K``, ``C``, ``C'``) are existence constants with no
published numeric value, so every one is an explicit argument. ``K`` is the
sub-exponential norm of a centred chi-square(1) variable; 1.0 is only a
placeholder default.
"""

from __future__ import annotations

import math

from .errors import BadC0, HypothesisViolated, NonpositiveTau, ValidationError


def _check_common(s, sigma, tau, p, delta):
    if not tau > 0:
        raise NonpositiveTau(f"tau must be positive, got {tau}")
    if sigma < 0:
        raise ValidationError("sigma must be nonnegative")
    if not 0 < delta <= 1:
        raise ValidationError(f"delta must lie in (0, 1], got {delta}")
    if p < 1 or s < 0:
        raise ValidationError("need p >= 1 and s >= 0")


def sis_sample_bound(K=1.0, rho=1.0, s=1, sigma=0.0, tau=1.0, r=0.0, p=3, delta=0.05) -> float:
    """Sample size above which SIS is strongly consistent with probability ``1 - delta``.

    ``144 K ((1 + 2 rho s + 2 sigma/tau) / (1 - 2 rho s r))^2 log(3p/delta)``,
    valid only when the largest off-diagonal covariance ``r`` is below
    ``1 / (2 rho s)``.
    """
    _check_common(s, sigma, tau, p, delta)
    if K <= 0 or rho < 1:
        raise ValidationError("need K > 0 and rho >= 1")
    if not 2.0 * rho * s * r < 1.0:
        raise HypothesisViolated(
            f"SIS bound needs r < 1/(2 rho s) = {1.0 / (2.0 * rho * s):.6g}, got r = {r}"
        )
    ratio = (1.0 + 2.0 * rho * s + 2.0 * sigma / tau) / (1.0 - 2.0 * rho * s * r)
    return 144.0 * K * ratio**2 * math.log(3.0 * p / delta)


def holp_sample_bound(
    Cprime=1.0, kappa=1.0, rho=1.0, s=1, sigma=0.0, tau=1.0, p=3, delta=0.05, c0=2.0, C=1.0
) -> float:
    """Sample size above which HOLP is strongly consistent with probability ``1 - delta``.

    ``max(2 C' kappa^4 (rho s + sigma/tau)^2 log(3p/delta), 8 C / (c0 - 1)^2)``
    where ``p > c0 n`` and ``kappa`` is the condition number of the design
    covariance.
    """
    _check_common(s, sigma, tau, p, delta)
    if not c0 > 1:
        raise BadC0(f"HOLP bound needs c0 > 1, got {c0}")
    if kappa < 1 or Cprime <= 0 or C < 0:
        raise ValidationError("need kappa >= 1, C' > 0, C >= 0")
    first = 2.0 * Cprime * kappa**4 * (rho * s + sigma / tau) ** 2 * math.log(3.0 * p / delta)
    second = 8.0 * C / (c0 - 1.0) ** 2
    return max(first, second)


SIS_PARAMS = ("K", "rho", "s", "sigma", "tau", "r", "p", "delta")
HOLP_PARAMS = ("Cprime", "kappa", "rho", "s", "sigma", "tau", "p", "delta", "c0", "C")


def bound_from_params(method: str, params: dict) -> float:
    """Evaluate a bound from a parameter dict (the ``bounds`` CLI file format)."""
    allowed = SIS_PARAMS if method == "sis" else HOLP_PARAMS if method == "holp" else None
    if allowed is None:
        raise ValidationError(f"unknown method {method!r}")
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ValidationError(f"unknown {method} bound parameters: {', '.join(unknown)}")
    fn = sis_sample_bound if method == "sis" else holp_sample_bound
    return fn(**params)
