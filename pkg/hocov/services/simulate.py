"""
Unconditional Gaussian random-field simulation and variogram envelopes.

Fields are drawn as mean + L z, where L L^T is the Cholesky factorization of
the model covariance matrix at the locations and z comes from numpy's PCG64
bit generator seeded with the given integer, via ``Generator.standard_normal``.
Draws are therefore reproducible across platforms for a fixed numpy version.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from numpy.random import PCG64, Generator
from numpy.typing import ArrayLike
from scipy.linalg import LinAlgError, cholesky
from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
)

from hocov.core.config import settings
from hocov.core.errors import DomainError, NotPositiveDefiniteError
from hocov.core.logging import LoggerMixin
from hocov.schemas.data import Dataset, EnvelopeResult
from hocov.schemas.models import CovarianceModel
from hocov.services.covmodels import covariance_matrix
from hocov.services.variogram import PairBinning

logger = logging.getLogger(__name__)


def jitter_schedule(scale: float) -> List[float]:
    """Diagonal jitters tried in turn: 0, then JITTER_START..JITTER_MAX times scale, x10 each."""
    schedule = [0.0]
    level = settings.JITTER_START
    while level <= settings.JITTER_MAX * (1 + 1e-9):
        schedule.append(level * scale)
        level *= 10.0
    return schedule


def factorize_covariance(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Lower Cholesky factor of a covariance matrix, with escalating jitter.

    Returns:
        (L, jitter) where L L^T = matrix + jitter I

    Raises:
        NotPositiveDefiniteError: factorization failed at the largest jitter
    """
    scale = float(np.max(np.diag(matrix)))
    schedule = jitter_schedule(scale)
    identity = np.eye(len(matrix))
    result: Tuple[np.ndarray, float] = (identity, 0.0)

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(len(schedule)),
            retry=retry_if_exception_type(LinAlgError),
            before_sleep=before_sleep_log(logger, logging.WARNING),
            reraise=True,
        ):
            with attempt:
                jitter = schedule[attempt.retry_state.attempt_number - 1]
                factor = cholesky(matrix + jitter * identity, lower=True)
                result = (factor, jitter)
    except LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"covariance matrix is not positive definite even with jitter {schedule[-1]:.3g}",
            context={"n": len(matrix), "c0": scale},
        ) from exc

    if result[1] > 0:
        logger.warning("Cholesky succeeded with diagonal jitter %.3g", result[1])
    return result


class FieldSampler(LoggerMixin):
    """
    Gaussian field sampler at fixed locations.

    The covariance factorization happens once; each draw only costs a
    matrix-vector product.
    """

    def __init__(self, model: CovarianceModel, locations: ArrayLike):
        points = np.asarray(locations, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        n = len(points)
        if n < 1:
            raise DomainError("at least one location is required")
        if n > settings.MAX_SIMULATION_POINTS:
            raise DomainError(
                f"simulation supports at most {settings.MAX_SIMULATION_POINTS} locations, got {n}"
            )

        self.n = n
        self.model = model
        self.constant = model.theta.total_sill == 0.0
        if self.constant:
            self.factor = np.zeros((n, n))
            self.jitter = 0.0
        else:
            self.factor, self.jitter = factorize_covariance(covariance_matrix(model, points))
        self.logger.debug("sampler ready: n=%d, jitter=%.3g", n, self.jitter)

    def draw(self, mean: float, seed: int) -> np.ndarray:
        """One field realization for the given seed."""
        if self.constant:
            return np.full(self.n, float(mean))
        z = Generator(PCG64(seed)).standard_normal(self.n)
        return float(mean) + self.factor @ z


def simulate_field(
    model: CovarianceModel, locations: ArrayLike, mean: float, seed: int
) -> np.ndarray:
    """
    Unconditional simulation of a Gaussian field at the given locations.

    Raises:
        DomainError: no locations or more than MAX_SIMULATION_POINTS
        NotPositiveDefiniteError: factorization failed after maximum jitter
    """
    return FieldSampler(model, locations).draw(mean, seed)


def envelope_test(
    model: CovarianceModel,
    data: Dataset,
    n_bins: Optional[int] = None,
    max_lag: Optional[float] = None,
    n_sim: Optional[int] = None,
    seed: int = 0,
) -> EnvelopeResult:
    """
    Pointwise min/max envelope of replicate empirical variograms.

    Replicate k is simulated with seed + k and mean equal to the sample mean
    of the data, and is binned exactly like the observed variogram.
    """
    n_bins = n_bins or settings.DEFAULT_N_BINS
    n_sim = settings.DEFAULT_N_SIM if n_sim is None else n_sim
    if n_sim < 1:
        raise DomainError(f"n_sim must be positive, got {n_sim}")

    binning = PairBinning(data.coordinates, n_bins, max_lag)
    observed = binning.estimate(data.observations)
    sampler = FieldSampler(model, data.coordinates)
    mean = float(np.mean(data.observations))

    replicates = np.array(
        [binning.estimate(sampler.draw(mean, seed + k)).estimates for k in range(n_sim)]
    )
    lower = replicates.min(axis=0)
    upper = replicates.max(axis=0)
    gamma = observed.gamma
    contained = [bool(lo <= g <= hi) for lo, g, hi in zip(lower, gamma, upper)]

    logger.info(
        "Envelope (%s, %d simulations): %d of %d bins contained",
        model.family.value, n_sim, sum(contained), len(contained),
    )
    return EnvelopeResult(
        bin_centers=observed.bin_centers,
        lower=lower.tolist(),
        upper=upper.tolist(),
        observed=observed.estimates,
        n_sim=n_sim,
        contained=contained,
        overall=all(contained),
        jitter=sampler.jitter,
    )
