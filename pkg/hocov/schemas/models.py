"""
Pydantic schemas for covariance models and their parameters.
"""

from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hocov.core.config import settings


class ModelFamily(str, Enum):
    """Stationary isotropic covariance families."""
    GAUSSIAN_HO = "gaussian_ho"
    BESSEL_C1 = "bessel_c1"
    MULLER_C2 = "muller_c2"
    HOLE_EFFECT = "hole_effect"
    SINE_COSINE = "sine_cosine"
    COSINE_EXPONENTIAL = "cosine_exponential"


PARAMETER_NAMES: Tuple[str, ...] = ("nugget", "sill", "range", "decay")


def family_parameters(family: ModelFamily) -> Tuple[str, ...]:
    """Names of the parameters a family uses, in canonical order."""
    if family is ModelFamily.COSINE_EXPONENTIAL:
        return PARAMETER_NAMES
    return PARAMETER_NAMES[:3]


class ParameterVector(BaseModel):
    """
    Parameter vector theta = (nugget, sill, range[, decay]).

    nugget and sill are in variance units, range and decay in distance units.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    nugget: float = Field(0.0, ge=0, description="Nugget effect sigma_e^2")
    sill: float = Field(1.0, ge=0, description="Partial sill sigma^2")
    range: float = Field(1.0, gt=0, description="Range / smoothing parameter eta")
    decay: Optional[float] = Field(
        None, gt=0, description="Exponential decay nu (cosine_exponential only)"
    )

    @property
    def total_sill(self) -> float:
        """sigma_e^2 + sigma^2, the covariance at lag zero."""
        return self.nugget + self.sill

    def get(self, name: str) -> float:
        """Look up a parameter by name; unset decay is an error."""
        if name not in PARAMETER_NAMES:
            raise KeyError(name)
        value = getattr(self, name)
        if value is None:
            raise KeyError(f"parameter '{name}' is not set")
        return float(value)

    def updated(self, **values: float) -> "ParameterVector":
        """Validated copy with some entries replaced."""
        return ParameterVector(**{**self.model_dump(), **values})


class CovarianceModel(BaseModel):
    """
    A parametrized stationary isotropic covariance model.

    The structural constants r and s are read only by the families that use
    them: r by gaussian_ho and muller_c2, s by bessel_c1 and muller_c2.
    """

    model_config = ConfigDict(frozen=True)

    family: ModelFamily
    r: int = Field(1, ge=1)
    s: int = Field(0, ge=0)
    theta: ParameterVector = Field(default_factory=ParameterVector)

    @model_validator(mode="after")
    def validate_structure(self) -> "CovarianceModel":
        """Check structural caps and family-specific parameters."""
        if self.r > settings.KERNEL_MAX_R:
            raise ValueError(f"r must be at most {settings.KERNEL_MAX_R}")
        if self.s > settings.KERNEL_MAX_S:
            raise ValueError(f"s must be at most {settings.KERNEL_MAX_S}")
        if self.family is ModelFamily.COSINE_EXPONENTIAL and self.theta.decay is None:
            raise ValueError("cosine_exponential requires a decay parameter")
        return self

    def with_theta(self, theta: ParameterVector) -> "CovarianceModel":
        """Same family and structure with new parameters."""
        return CovarianceModel(family=self.family, r=self.r, s=self.s, theta=theta)

    def parameters(self) -> Dict[str, float]:
        """Parameters used by this family, by name."""
        return {name: self.theta.get(name) for name in family_parameters(self.family)}


class SpatioTemporalModel(BaseModel):
    """Space-time covariance C(h; t) = C_S(|h + beta t|) built on a spatial model."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    spatial: CovarianceModel
    beta: float = Field(1.0, description="Space-time shift (distance per time unit)")
