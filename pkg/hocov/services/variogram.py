"""
Empirical semivariogram estimation.

Classical moment estimator over equal-width lag bins:

    gamma_hat(h_i) = 1 / (2 N(h_i)) * sum_{pairs in bin i} (Z(u_a) - Z(u_b))^2

Bins are right-closed intervals (lower, upper], so max_lag itself falls in
the last bin and a pair exactly on a bin edge belongs to the lower bin.
A bin's center is the mean distance of its pairs. Empty bins are dropped.
"""

import logging
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial.distance import pdist

from hocov.core.errors import DataError, DomainError
from hocov.core.logging import LoggerMixin
from hocov.schemas.data import Dataset, EmpiricalVariogram

logger = logging.getLogger(__name__)


class PairBinning(LoggerMixin):
    """
    Assignment of point pairs to lag bins, computed once per configuration.

    Observed and replicate variograms at the same locations share one
    instance, so their binning is bitwise identical.
    """

    def __init__(self, coordinates: ArrayLike, n_bins: int, max_lag: Optional[float] = None):
        if int(n_bins) != n_bins or n_bins < 1:
            raise DomainError(f"n_bins must be a positive integer, got {n_bins}")
        points = np.asarray(coordinates, dtype=float)
        if points.ndim == 1:
            points = points[:, None]

        distances = pdist(points)
        if max_lag is None:
            max_lag = 0.5 * float(distances.max())
        if not max_lag > 0:
            raise DomainError(f"max_lag must be positive, got {max_lag}")

        # condensed pair indices (i < j) in pdist order
        rows, cols = np.triu_indices(len(points), k=1)
        within = distances <= max_lag
        if not within.any():
            raise DataError(
                f"no point pairs within max_lag={max_lag}",
                context={"min_distance": float(distances.min())},
            )

        width = max_lag / n_bins
        bins = np.ceil(distances[within] / width).astype(np.int64) - 1
        bins = np.clip(bins, 0, n_bins - 1)

        self.n_bins = int(n_bins)
        self.max_lag = float(max_lag)
        self.first = rows[within]
        self.second = cols[within]
        self.distances = distances[within]
        self.bins = bins
        self.counts = np.bincount(bins, minlength=self.n_bins)
        self.logger.debug(
            "binned %d of %d pairs into %d bins (max_lag=%g)",
            len(bins), len(distances), self.n_bins, self.max_lag,
        )

    @property
    def n_pairs(self) -> int:
        return int(len(self.bins))

    def estimate(self, values: ArrayLike) -> EmpiricalVariogram:
        """Classical estimator for one set of values at the binned locations."""
        z = np.asarray(values, dtype=float)
        squared = (z[self.first] - z[self.second]) ** 2

        # sums taken in a canonical pair order so point order cannot change a bit
        order = np.lexsort((squared, self.distances, self.bins))
        bins = self.bins[order]
        sq_sums = np.bincount(bins, weights=squared[order], minlength=self.n_bins)
        distance_sums = np.bincount(bins, weights=self.distances[order], minlength=self.n_bins)

        kept = self.counts > 0
        counts = self.counts[kept]
        return EmpiricalVariogram(
            bin_centers=(distance_sums[kept] / counts).tolist(),
            estimates=(sq_sums[kept] / (2.0 * counts)).tolist(),
            counts=counts.astype(int).tolist(),
            max_lag=self.max_lag,
            n_bins=self.n_bins,
        )


def empirical_variogram(
    data: Dataset,
    n_bins: int,
    max_lag: Optional[float] = None,
) -> EmpiricalVariogram:
    """
    Empirical semivariogram of a dataset.

    Args:
        data: Point dataset
        n_bins: Number of equal-width bins on [0, max_lag]
        max_lag: Largest pair distance used; half the maximum pair distance if None

    Returns:
        EmpiricalVariogram with empty bins dropped
    """
    binning = PairBinning(data.coordinates, n_bins, max_lag)
    result = binning.estimate(data.observations)
    logger.info(
        "Empirical variogram: %d points, %d pairs, %d of %d bins retained",
        data.n, binning.n_pairs, len(result.counts), n_bins,
    )
    return result
