"""
Higher-order kernels on the real line.

Müller's s-smooth kernels of order 2r on [-1, 1],

    M_{2r,s}(x) = B_{r,s}(x) M_s(x),

and the higher-order Gaussian kernels G_{2r} they converge to after scaling.
Both families are symmetric with unit mass and vanishing moments below 2r.
"""

import logging
import math
import warnings
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import hermite_e
from numpy.polynomial import polynomial as P
from numpy.typing import ArrayLike
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gammaln

from hocov.core.config import settings
from hocov.core.errors import AccuracyError, DomainError
from hocov.schemas.kernels import KernelFamily, KernelSpec
from hocov.services.specfun import ArrayOrFloat, log_pochhammer, pochhammer

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _as_output(values: np.ndarray, like: np.ndarray) -> ArrayOrFloat:
    if like.ndim == 0:
        return float(values.reshape(-1)[0])
    return values.reshape(like.shape)


@lru_cache(maxsize=256)
def _muller_coefficients(r: int, s: int) -> Tuple[float, ...]:
    """Power coefficients in x^2 of B_{r,s}(x) times the M_s normalizing constant."""
    lead = (
        pochhammer(1.5, r - 1)
        * pochhammer(1.5 + s, r - 1)
        / pochhammer(s + 1.0, r - 1)
        * pochhammer(0.5, s + 1)
        / math.factorial(s)
    )
    coefficients = []
    for k in range(r):
        term = pochhammer(0.5 + s + r, k) / (
            math.factorial(k) * math.factorial(r - 1 - k) * pochhammer(1.5, k)
        )
        coefficients.append((-1) ** k * lead * term)
    return tuple(coefficients)


@lru_cache(maxsize=256)
def _muller_coefficients_log(r: int, s: int) -> Tuple[float, ...]:
    """Same coefficients assembled in log space, for s beyond the kernel caps."""
    log_lead = (
        log_pochhammer(1.5, r - 1)
        + log_pochhammer(1.5 + s, r - 1)
        - log_pochhammer(s + 1.0, r - 1)
        + log_pochhammer(0.5, s + 1)
        - gammaln(s + 1)
    )
    coefficients = []
    for k in range(r):
        log_term = (
            log_pochhammer(0.5 + s + r, k)
            - gammaln(k + 1)
            - gammaln(r - k)
            - log_pochhammer(1.5, k)
        )
        coefficients.append((-1) ** k * math.exp(log_lead + log_term))
    return tuple(coefficients)


def _muller(r: int, s: int, x: ArrayLike, coefficients: Tuple[float, ...] = ()) -> ArrayOrFloat:
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs)
    x_sq = flat * flat
    polynomial = P.polyval(x_sq, coefficients or _muller_coefficients(r, s))
    base = np.clip(1.0 - x_sq, 0.0, None)
    values = np.where(np.abs(flat) <= 1.0, polynomial * base**s, 0.0)
    return _as_output(values, xs)


def muller_kernel(spec: KernelSpec, x: ArrayLike) -> ArrayOrFloat:
    """Müller kernel M_{2r,s}(x); exactly zero for |x| > 1."""
    if spec.family is not KernelFamily.MULLER:
        raise DomainError(f"muller_kernel needs a muller spec, got {spec.family.value}")
    return _muller(spec.r, spec.s, x)


@lru_cache(maxsize=64)
def _gaussian_ho_coefficients(r: int) -> Tuple[float, ...]:
    """
    Power coefficients of the polynomial P with G_{2r}(x) = P(x) phi(x).

    phi^(n)(x) = (-1)^n He_n(x) phi(x), and He_{2r-1} is odd, so dividing it
    by x leaves a polynomial and the x = 0 limit needs no special case.
    """
    degree = 2 * r - 1
    hermite = hermite_e.herme2poly([0.0] * degree + [1.0])
    reduced = hermite[1:]
    scale = (-1) ** (r + 1) / (2 ** (r - 1) * math.factorial(r - 1))
    return tuple(float(c) * scale for c in reduced)


def gaussian_ho_kernel(r: int, x: ArrayLike) -> ArrayOrFloat:
    """Higher-order Gaussian kernel G_{2r}(x); equals the normal density for r = 1."""
    if int(r) != r or r < 1:
        raise DomainError(f"r must be a positive integer, got {r}")
    if r > settings.KERNEL_MAX_R:
        raise DomainError(f"r must be at most {settings.KERNEL_MAX_R}")
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs)
    values = P.polyval(flat, _gaussian_ho_coefficients(int(r)))
    values = values * np.exp(-0.5 * flat * flat) * _INV_SQRT_2PI
    return _as_output(values, xs)


def evaluate_kernel(spec: KernelSpec, x: ArrayLike) -> ArrayOrFloat:
    """Evaluate the kernel described by ``spec``."""
    if spec.family is KernelFamily.MULLER:
        return muller_kernel(spec, x)
    return gaussian_ho_kernel(spec.r, x)


def _support(spec: KernelSpec) -> float:
    return 1.0 if spec.compact else settings.GAUSSIAN_TRUNCATION


def _integrate(func, half_width: float, what: str, **kwargs) -> float:
    tol = settings.QUADRATURE_ABS_TOL
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, abserr = quad(
                func, -half_width, half_width, epsabs=tol, epsrel=1e-12, limit=200, **kwargs
            )
        except IntegrationWarning as exc:
            raise AccuracyError(f"quadrature for {what} did not converge: {exc}") from exc
    if abserr > tol:
        raise AccuracyError(
            f"quadrature for {what} reached error {abserr:.3g} > {tol:.3g}",
            context={"value": value, "abserr": abserr},
        )
    return float(value)


def kernel_moment(spec: KernelSpec, j: int) -> float:
    """mu_j(K): integral of x^j K(x) over the kernel's support."""
    if int(j) != j or j < 0:
        raise DomainError(f"moment index must be a non-negative integer, got {j}")
    return _integrate(
        lambda t: t**j * evaluate_kernel(spec, t),
        _support(spec),
        f"moment {j} of {spec.family.value}(r={spec.r}, s={spec.s})",
    )


def kernel_fourier_transform(spec: KernelSpec, h: float) -> float:
    """Characteristic function of the kernel at h, by oscillatory quadrature."""
    return _integrate(
        lambda t: evaluate_kernel(spec, t),
        _support(spec),
        f"cosine transform of {spec.family.value}(r={spec.r}, s={spec.s}) at h={h}",
        weight="cos",
        wvar=float(h),
    )


def muller_gaussian_limit_check(r: int, s: int, x: ArrayLike) -> ArrayOrFloat:
    """
    Scaled Müller kernel (1/sqrt(2s)) M_{2r,s}(x / sqrt(2s)).

    Converges to G_{2r}(x) as s grows. Coefficients are built in log space,
    so s is not bound by the kernel caps here.
    """
    if int(r) != r or r < 1:
        raise DomainError(f"r must be a positive integer, got {r}")
    if int(s) != s or s < 1:
        raise DomainError(f"s must be a positive integer, got {s}")
    scale = math.sqrt(2.0 * s)
    coefficients = _muller_coefficients_log(int(r), int(s))
    values = _muller(int(r), int(s), np.asarray(x, dtype=float) / scale, coefficients)
    return values / scale
