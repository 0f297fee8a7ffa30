"""
Static SVG figures for the envelope and curve outputs.
"""

import logging
from pathlib import Path
from typing import Dict, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from hocov.schemas.data import EnvelopeResult  # noqa: E402
from hocov.schemas.models import CovarianceModel  # noqa: E402
from hocov.services.covmodels import semivariogram_of  # noqa: E402

logger = logging.getLogger(__name__)


def plot_envelope(result: EnvelopeResult, model: CovarianceModel, path: Path) -> Path:
    """Shaded min/max band, observed estimates and the model semivariogram."""
    centers = np.asarray(result.bin_centers)
    grid = np.linspace(0.0, float(centers.max()) * 1.05, 400)[1:]

    fig, ax = plt.subplots(figsize=(8, 5))
    ax.fill_between(
        centers, result.lower, result.upper,
        color="lightgray", alpha=0.8, label=f"envelope ({result.n_sim} simulations)",
    )
    ax.plot(grid, semivariogram_of(model, grid), color="black", lw=1.5, label=model.family.value)
    ax.plot(centers, result.observed, "o", color="tab:blue", ms=4, label="empirical")
    ax.set_xlim(0.0, grid[-1])
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("lag distance h")
    ax.set_ylabel("semivariance")
    ax.legend(loc="lower right", frameon=False)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.debug("Wrote %s", path)
    return path


def plot_curves(
    lags: Sequence[float], curves: Dict[str, Sequence[float]], path: Path, ylabel: str
) -> Path:
    """Line plot of several curves over a common lag grid."""
    fig, ax = plt.subplots(figsize=(8, 5))
    for label, values in curves.items():
        ax.plot(lags, values, lw=1.2, label=label)
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel("lag distance h")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    return path
