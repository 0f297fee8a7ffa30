"""
Schemas for point datasets, empirical variograms and envelope results.
"""

import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial import cKDTree

from hocov.core.config import settings


class Dataset(BaseModel):
    """Point locations in R^dim with one scalar observation each."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    dim: int = Field(2, ge=1, le=3, description="Spatial dimension")
    locations: List[Tuple[float, ...]] = Field(..., description="Coordinates")
    values: List[float] = Field(..., description="Observations")

    @model_validator(mode="after")
    def validate_points(self) -> "Dataset":
        """Check sizes, coordinate dimension and duplicate locations."""
        if len(self.locations) != len(self.values):
            raise ValueError(
                f"{len(self.locations)} locations but {len(self.values)} values"
            )
        if len(self.locations) < 2:
            raise ValueError("at least 2 points are required")
        for index, location in enumerate(self.locations):
            if len(location) != self.dim:
                raise ValueError(
                    f"location {index} has {len(location)} coordinates, expected {self.dim}"
                )
            if not all(math.isfinite(c) for c in location):
                raise ValueError(f"location {index} has a non-finite coordinate")

        pairs = sorted(cKDTree(self.coordinates).query_pairs(r=settings.DUPLICATE_TOL))
        if pairs:
            listed = ", ".join(f"({i}, {j})" for i, j in pairs[:10])
            raise ValueError(f"duplicate locations at point pairs {listed}")
        return self

    @property
    def n(self) -> int:
        """Number of points."""
        return len(self.values)

    @property
    def coordinates(self) -> np.ndarray:
        """Locations as an (n, dim) array."""
        return np.asarray(self.locations, dtype=float).reshape(len(self.locations), self.dim)

    @property
    def observations(self) -> np.ndarray:
        """Values as a length-n array."""
        return np.asarray(self.values, dtype=float)


class EmpiricalVariogram(BaseModel):
    """Binned classical semivariogram estimates with pair counts."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    bin_centers: List[float] = Field(..., description="Mean pair distance per bin")
    estimates: List[float] = Field(..., description="gamma_hat per bin")
    counts: List[int] = Field(..., description="Pair count N(h) per bin")
    max_lag: float = Field(..., gt=0)
    n_bins: int = Field(..., ge=1)

    @model_validator(mode="after")
    def validate_bins(self) -> "EmpiricalVariogram":
        """Retained bins are nonempty, nonnegative and ordered."""
        k = len(self.bin_centers)
        if len(self.estimates) != k or len(self.counts) != k:
            raise ValueError("bin_centers, estimates and counts differ in length")
        if k > self.n_bins:
            raise ValueError("more retained bins than n_bins")
        if any(c <= 0 for c in self.counts):
            raise ValueError("empty bins must be dropped")
        if any(e < 0 for e in self.estimates):
            raise ValueError("estimates must be nonnegative")
        if any(b <= a for a, b in zip(self.bin_centers, self.bin_centers[1:])):
            raise ValueError("bin centers must be strictly increasing")
        return self

    @property
    def lags(self) -> np.ndarray:
        return np.asarray(self.bin_centers, dtype=float)

    @property
    def gamma(self) -> np.ndarray:
        return np.asarray(self.estimates, dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)


class EnvelopeResult(BaseModel):
    """Pointwise min/max envelope of replicate variograms around the observed one."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    bin_centers: List[float]
    lower: List[float]
    upper: List[float]
    observed: List[float]
    n_sim: int = Field(..., ge=1)
    contained: List[bool]
    overall: bool
    jitter: float = Field(0.0, ge=0, description="Diagonal jitter used in factorization")

    @model_validator(mode="after")
    def validate_envelope(self) -> "EnvelopeResult":
        """Bounds are ordered and the containment flags agree with them."""
        k = len(self.bin_centers)
        if not all(len(v) == k for v in (self.lower, self.upper, self.observed, self.contained)):
            raise ValueError("envelope arrays differ in length")
        for i, (lo, hi, obs, flag) in enumerate(
            zip(self.lower, self.upper, self.observed, self.contained)
        ):
            if lo > hi:
                raise ValueError(f"lower exceeds upper in bin {i}")
            if flag != (lo <= obs <= hi):
                raise ValueError(f"containment flag of bin {i} is inconsistent")
        if self.overall != all(self.contained):
            raise ValueError("overall flag is inconsistent")
        return self
