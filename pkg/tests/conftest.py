"""
Pytest configuration and fixtures for hocov tests.
"""

from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import pytest

from hocov.schemas.data import Dataset, EmpiricalVariogram
from hocov.schemas.models import CovarianceModel, ModelFamily, ParameterVector
from hocov.services.covmodels import semivariogram_of
from hocov.services.simulate import simulate_field


@pytest.fixture
def collinear_dataset() -> Dataset:
    """Three points on a line at 0, 1, 2 with values 0, 1, 0."""
    return Dataset(dim=1, locations=[(0.0,), (1.0,), (2.0,)], values=[0.0, 1.0, 0.0])


@pytest.fixture
def sine_cosine_model() -> CovarianceModel:
    """Unit-sill sine-cosine wave with range 2."""
    return CovarianceModel(
        family=ModelFamily.SINE_COSINE,
        theta=ParameterVector(nugget=0.0, sill=1.0, range=2.0),
    )


@pytest.fixture
def simulated_dataset(sine_cosine_model) -> Dataset:
    """60 uniform points in [0, 20]^2 with a field drawn from the sine-cosine model."""
    rng = np.random.default_rng(7)
    points = rng.uniform(0.0, 20.0, size=(60, 2))
    values = simulate_field(sine_cosine_model, points, mean=5.0, seed=11)
    return Dataset(dim=2, locations=[tuple(p) for p in points], values=values.tolist())


@pytest.fixture
def synthetic_variogram() -> Callable[..., EmpiricalVariogram]:
    """Noise-free empirical variogram built from a model at given bin centers."""

    def build(
        model: CovarianceModel,
        centers: Sequence[float],
        counts: Sequence[int] = (),
        max_lag: float = 0.0,
    ) -> EmpiricalVariogram:
        lags = np.asarray(centers, dtype=float)
        gamma = np.asarray(semivariogram_of(model, lags), dtype=float)
        return EmpiricalVariogram(
            bin_centers=lags.tolist(),
            estimates=gamma.tolist(),
            counts=list(counts) or [20] * len(lags),
            max_lag=max_lag or float(lags[-1]) * 1.05,
            n_bins=len(lags),
        )

    return build


@pytest.fixture
def write_points(tmp_path: Path) -> Callable[..., Path]:
    """Write a delimited points file and return its path."""

    def write(text: str, name: str = "points.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
