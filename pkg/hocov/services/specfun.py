"""
Special functions behind every covariance formula.

Spherical Bessel functions of the first kind are evaluated in double
precision on two regimes: upward recurrence from j_0 and j_1 when |x| >= m,
and the power series

    j_m(x) = sum_k (-1)^k (x/2)^(m+2k) / ((3/2)_(m+k) k!)

when |x| < m, where upward recurrence is unstable. Tiny arguments return the
leading series term. ``sph_bessel_series`` sums the same series in
multiprecision and serves as the reference oracle.
"""

import logging
import math
from typing import Tuple, Union

import numpy as np
from mpmath.ctx_mp import MPContext
from numpy.typing import ArrayLike
from scipy.special import gammaln

from hocov.core.config import settings
from hocov.core.errors import DomainError, RangeError
from hocov.schemas.numeric import BesselEvalReport, BesselPath

logger = logging.getLogger(__name__)

MAX_ORDER = 64

ArrayOrFloat = Union[float, np.ndarray]


def pochhammer(alpha: float, n: int) -> float:
    """Rising factorial alpha (alpha+1) ... (alpha+n-1); 1 for n = 0."""
    if n < 0 or int(n) != n:
        raise DomainError(f"Pochhammer length must be a non-negative integer, got {n}")
    value = float(math.prod(alpha + j for j in range(int(n))))
    if not math.isfinite(value):
        raise RangeError(
            f"Pochhammer symbol ({alpha})_{n} overflows double precision",
            context={"alpha": alpha, "n": n},
        )
    return value


def log_pochhammer(alpha: float, n: int) -> float:
    """log((alpha)_n) for alpha > 0 via log-gamma; stays finite for large n."""
    if alpha <= 0:
        raise DomainError("log_pochhammer requires alpha > 0")
    if n < 0:
        raise DomainError(f"Pochhammer length must be non-negative, got {n}")
    return float(gammaln(alpha + n) - gammaln(alpha))


def _check_order(m: int) -> int:
    if int(m) != m or m < 0:
        raise DomainError(f"Bessel order must be a non-negative integer, got {m}")
    if m > MAX_ORDER:
        raise DomainError(f"Bessel orders above {MAX_ORDER} are not supported")
    return int(m)


def sph_bessel_series(m: int, x: float, tol: float = 1e-15) -> float:
    """
    Reference value of j_m(x) from the power series.

    Terms are accumulated in a private multiprecision context until the
    absolute term drops below ``tol`` times the running sum. Working precision
    grows with |x| to absorb the cancellation between the alternating terms.

    Raises:
        DomainError: invalid order or tol <= 0
        RangeError: no convergence within the term cap
    """
    m = _check_order(m)
    if tol <= 0:
        raise DomainError("series tolerance must be positive")
    x = float(x)
    if x == 0.0:
        return 1.0 if m == 0 else 0.0

    ctx = MPContext()
    ctx.dps = min(
        1000,
        20 + math.ceil(abs(x) / math.log(10)) + max(0, math.ceil(-math.log10(tol))),
    )
    half = ctx.mpf(x) / 2
    half_sq = half * half
    term = half**m / ctx.rf(ctx.mpf(3) / 2, m)
    total = term

    for k in range(1, settings.BESSEL_MAX_TERMS + 1):
        term = -term * half_sq / (k * (m + k + ctx.mpf(1) / 2))
        total += term
        if abs(term) < tol * abs(total):
            return float(total)

    raise RangeError(
        f"series for j_{m}({x}) did not converge in {settings.BESSEL_MAX_TERMS} terms",
        context={"m": m, "x": x},
    )


def _leading_term(m: int, ax: np.ndarray) -> np.ndarray:
    return (ax / 2.0) ** m / pochhammer(1.5, m)


def _upward(m: int, ax: np.ndarray) -> np.ndarray:
    sin, cos = np.sin(ax), np.cos(ax)
    j_prev = sin / ax
    if m == 0:
        return j_prev
    j_cur = (sin / ax - cos) / ax
    for n in range(1, m):
        j_prev, j_cur = j_cur, (2 * n + 1) / ax * j_cur - j_prev
    return j_cur


def _series(m: int, ax: np.ndarray) -> np.ndarray:
    half = ax / 2.0
    half_sq = half * half
    term = half**m / pochhammer(1.5, m)
    total = term.copy()
    active = np.ones(ax.shape, dtype=bool)
    tol = settings.BESSEL_SERIES_TOL

    for k in range(1, settings.BESSEL_MAX_TERMS + 1):
        term = -term * half_sq / (k * (m + k + 0.5))
        total = np.where(active, total + term, total)
        active &= np.abs(term) > tol * np.abs(total)
        if not active.any():
            return total

    raise RangeError(
        f"series for j_{m} did not converge in {settings.BESSEL_MAX_TERMS} terms",
        context={"m": m, "max_abs_x": float(ax.max())},
    )


def _regimes(m: int, ax: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    small = ax < settings.BESSEL_SMALL_ARG
    upward = ~small & (ax >= m)
    series = ~small & ~upward
    return small, upward, series


def sph_bessel(m: int, x: ArrayLike) -> ArrayOrFloat:
    """
    Spherical Bessel function j_m evaluated elementwise.

    Parity is exact: j_m(-x) = (-1)^m j_m(x). Returns a float for scalar input.
    """
    m = _check_order(m)
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs)
    ax = np.abs(flat)
    out = np.empty_like(ax)

    small, upward, series = _regimes(m, ax)
    if small.any():
        out[small] = _leading_term(m, ax[small])
    if upward.any():
        out[upward] = _upward(m, ax[upward])
    if series.any():
        out[series] = _series(m, ax[series])

    if m % 2 == 1:
        out = np.where(flat < 0, -out, out)

    if xs.ndim == 0:
        return float(out[0])
    return out.reshape(xs.shape)


def sph_bessel_report(m: int, x: float) -> BesselEvalReport:
    """Evaluate j_m(x) and record which evaluation path produced it."""
    m = _check_order(m)
    ax = np.atleast_1d(abs(float(x)))
    small, upward, _ = _regimes(m, ax)
    if small[0]:
        path = BesselPath.LIMIT_AT_ZERO
    elif upward[0]:
        path = BesselPath.RECURRENCE
    else:
        path = BesselPath.SERIES
    return BesselEvalReport(order=m, argument=float(x), value=sph_bessel(m, x), path=path)
