"""
Covariance and semivariogram model families.

Structural families are characteristic functions of higher-order kernels and
take the value 1 at lag 0:

* ``gaussian_ho_cov``: exp(-h^2/2) sum_{k<r} h^(2k) / (2^k k!)
* ``bessel_c1``: (3/2)_s (2/h)^s j_s(h)
* ``muller_c2``: (2/sqrt(pi)) (2/h)^s sum_{m<r} alpha_s(m) j_{s+2m}(h)

A ``CovarianceModel`` rescales a family as sigma^2 rho(h / eta) and puts the
nugget at lag 0 only, so its semivariogram jumps to sigma_e^2 at the origin.
``hole_effect``, ``sine_cosine`` and ``cosine_exponential`` return the
nugget-inclusive parametric displays sigma_e^2 + sigma^2 rho(h).
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import LinAlgError, eigvalsh
from scipy.spatial.distance import pdist, squareform
from scipy.special import gamma

from hocov.core.config import settings
from hocov.core.errors import DomainError, NumericalError
from hocov.schemas.kernels import KernelFamily, KernelSpec
from hocov.schemas.models import (
    CovarianceModel,
    ModelFamily,
    ParameterVector,
    SpatioTemporalModel,
)
from hocov.services.specfun import ArrayOrFloat, pochhammer, sph_bessel

logger = logging.getLogger(__name__)

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _lags(h: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split lags into |h|, the near-zero mask and a zero-free copy of |h|."""
    hs = np.asarray(h, dtype=float)
    ah = np.abs(np.atleast_1d(hs))
    small = ah < settings.LAG_ZERO_THRESHOLD
    safe = np.where(small, 1.0, ah)
    return hs, ah, small, safe


def _as_output(values: np.ndarray, like: np.ndarray) -> ArrayOrFloat:
    if like.ndim == 0:
        return float(values.reshape(-1)[0])
    return values.reshape(like.shape)


def _check_structural(r: Optional[int] = None, s: Optional[int] = None) -> None:
    if r is not None and (int(r) != r or not 1 <= r <= settings.KERNEL_MAX_R):
        raise DomainError(f"r must be an integer in [1, {settings.KERNEL_MAX_R}], got {r}")
    if s is not None and (int(s) != s or not 0 <= s <= settings.KERNEL_MAX_S):
        raise DomainError(f"s must be an integer in [0, {settings.KERNEL_MAX_S}], got {s}")


def _scaled_bessel(n: int, s: int, h: np.ndarray) -> np.ndarray:
    """(2/h)^s j_n(h) for strictly positive h."""
    return (2.0 / h) ** s * np.asarray(sph_bessel(n, h))


def gaussian_ho_cov(r: int, h: ArrayLike) -> ArrayOrFloat:
    """Higher-order Gaussian covariance; the classical Gaussian model for r = 1."""
    _check_structural(r=r)
    hs = np.asarray(h, dtype=float)
    half_sq = 0.5 * np.atleast_1d(hs) ** 2
    total = np.zeros_like(half_sq)
    term = np.ones_like(half_sq)
    for k in range(int(r)):
        if k:
            term = term * half_sq / k
        total = total + term
    return _as_output(np.exp(-half_sq) * total, hs)


def bessel_c1(s: int, h: ArrayLike) -> ArrayOrFloat:
    """Bessel-type covariance (3/2)_s (2/h)^s j_s(h), equal to 1 at h = 0."""
    _check_structural(s=s)
    hs, _, small, safe = _lags(h)
    values = pochhammer(1.5, int(s)) * _scaled_bessel(int(s), int(s), safe)
    return _as_output(np.where(small, 1.0, values), hs)


def _alpha(s: int, m: int) -> float:
    return float(gamma(0.5 + m + s) * (0.5 + 2 * m + s) / math.factorial(m))


def muller_c2(r: int, s: int, h: ArrayLike) -> ArrayOrFloat:
    """Characteristic function of the Müller kernel M_{2r,s}; reduces to bessel_c1 at r = 1."""
    _check_structural(r=r, s=s)
    hs, _, small, safe = _lags(h)
    total = np.zeros_like(safe)
    for m in range(int(r)):
        total = total + _alpha(int(s), m) * _scaled_bessel(int(s) + 2 * m, int(s), safe)
    values = _TWO_OVER_SQRT_PI * total
    return _as_output(np.where(small, 1.0, values), hs)


def hole_effect(theta: ParameterVector, h: ArrayLike) -> ArrayOrFloat:
    """sigma_e^2 + sigma^2 (eta/h) sin(h/eta); sigma_e^2 + sigma^2 at h = 0."""
    hs = np.asarray(h, dtype=float)
    return theta.nugget + theta.sill * bessel_c1(0, hs / theta.range)


def sine_cosine(theta: ParameterVector, h: ArrayLike) -> ArrayOrFloat:
    """Sine-cosine wave: sigma_e^2 + sigma^2 3 j_1(h/eta) / (h/eta)."""
    hs = np.asarray(h, dtype=float)
    return theta.nugget + theta.sill * bessel_c1(1, hs / theta.range)


def _cosine_exponential_unit(theta: ParameterVector, h: ArrayLike) -> ArrayOrFloat:
    if theta.decay is None:
        raise DomainError("cosine_exponential requires a decay parameter")
    ah = np.abs(np.asarray(h, dtype=float))
    values = np.exp(-3.0 * ah / theta.decay) * np.cos(ah / theta.range)
    return float(values) if values.ndim == 0 else values


def cosine_exponential(theta: ParameterVector, h: ArrayLike) -> ArrayOrFloat:
    """Cosine-exponential composite: sigma_e^2 + sigma^2 exp(-3h/nu) cos(h/eta)."""
    return theta.nugget + theta.sill * _cosine_exponential_unit(theta, h)


def correlation(model: CovarianceModel, h: ArrayLike) -> ArrayOrFloat:
    """Unit-sill family value at the lag scaled by the range parameter."""
    family = model.family
    theta = model.theta
    if family is ModelFamily.COSINE_EXPONENTIAL:
        return _cosine_exponential_unit(theta, h)

    u = np.abs(np.asarray(h, dtype=float)) / theta.range
    if family is ModelFamily.GAUSSIAN_HO:
        return gaussian_ho_cov(model.r, u)
    if family is ModelFamily.BESSEL_C1:
        return bessel_c1(model.s, u)
    if family is ModelFamily.MULLER_C2:
        return muller_c2(model.r, model.s, u)
    if family is ModelFamily.HOLE_EFFECT:
        return bessel_c1(0, u)
    if family is ModelFamily.SINE_COSINE:
        return bessel_c1(1, u)
    raise DomainError(f"unknown covariance family {family}")


def covariance(model: CovarianceModel, h: ArrayLike) -> ArrayOrFloat:
    """C(h) = sigma^2 rho(h/eta) for h != 0 and sigma_e^2 + sigma^2 at h = 0."""
    hs = np.asarray(h, dtype=float)
    values = model.theta.sill * np.atleast_1d(np.asarray(correlation(model, hs)))
    values = np.where(np.atleast_1d(hs) == 0.0, model.theta.total_sill, values)
    return _as_output(values, hs)


def semivariogram_of(model: CovarianceModel, h: ArrayLike) -> ArrayOrFloat:
    """gamma(h) = C(0) - C(h), with gamma(0) = 0 and a nugget jump at the origin."""
    hs = np.asarray(h, dtype=float)
    values = model.theta.total_sill - np.atleast_1d(np.asarray(covariance(model, hs)))
    values = np.where(np.atleast_1d(hs) == 0.0, 0.0, values)
    return _as_output(values, hs)


def spacetime_eval(model: SpatioTemporalModel, h: ArrayLike, t: ArrayLike) -> ArrayOrFloat:
    """C(h; t) = C_S(|h + beta t|) for any spatial family."""
    shifted = np.asarray(h, dtype=float) + model.beta * np.asarray(t, dtype=float)
    return covariance(model.spatial, np.abs(shifted))


def covariance_matrix(model: CovarianceModel, coordinates: ArrayLike) -> np.ndarray:
    """
    Covariance matrix of a point configuration.

    Built from the condensed pair distances and mirrored, so it is exactly
    symmetric; the diagonal carries sigma_e^2 + sigma^2.
    """
    points = np.asarray(coordinates, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    distances = squareform(pdist(points))
    return np.asarray(covariance(model, distances), dtype=float)


def pd_diagnostic(model: CovarianceModel, dim: int, n: int, seed: int) -> float:
    """
    Minimum eigenvalue of the covariance matrix at n seeded uniform points in [0, 10]^dim.

    A numerical surrogate for positive definiteness.
    """
    if dim not in (1, 2, 3):
        raise DomainError(f"dim must be 1, 2 or 3, got {dim}")
    if n < 1 or n > settings.MAX_PD_POINTS:
        raise DomainError(f"n must be in [1, {settings.MAX_PD_POINTS}], got {n}")

    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, 10.0, size=(n, dim))
    matrix = covariance_matrix(model, points)
    try:
        eigenvalues = eigvalsh(matrix)
    except LinAlgError as exc:
        raise NumericalError(
            f"symmetric eigensolve failed: {exc}",
            context={"family": model.family.value, "dim": dim, "n": n, "seed": seed},
        ) from exc

    minimum = float(eigenvalues[0])
    logger.debug(
        "PD diagnostic %s dim=%d n=%d seed=%d: min eigenvalue %.3e",
        model.family.value, dim, n, seed, minimum,
    )
    return minimum


def generating_kernel(model: CovarianceModel) -> KernelSpec:
    """The kernel whose characteristic function is the model's unit family."""
    family = model.family
    if family is ModelFamily.GAUSSIAN_HO:
        return KernelSpec(family=KernelFamily.GAUSSIAN_HO, r=model.r)
    if family is ModelFamily.BESSEL_C1:
        return KernelSpec(family=KernelFamily.MULLER, r=1, s=model.s)
    if family is ModelFamily.MULLER_C2:
        return KernelSpec(family=KernelFamily.MULLER, r=model.r, s=model.s)
    if family is ModelFamily.HOLE_EFFECT:
        return KernelSpec(family=KernelFamily.MULLER, r=1, s=0)
    if family is ModelFamily.SINE_COSINE:
        return KernelSpec(family=KernelFamily.MULLER, r=1, s=1)
    raise DomainError(f"{family.value} is not generated by a higher-order kernel")
