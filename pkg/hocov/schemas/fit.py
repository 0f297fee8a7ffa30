"""
Schemas for weighted-least-squares fitting problems and their results.
"""

import math
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hocov.schemas.data import EmpiricalVariogram
from hocov.schemas.models import ModelFamily, ParameterVector, family_parameters

POSITIVE_PARAMETERS = ("range", "decay")


class FitProblem(BaseModel):
    """
    A WLS fitting problem: a family, an empirical variogram and a box.

    Each parameter the family uses is either free (estimated inside its
    bounds) or fixed at a given value.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    family: ModelFamily
    r: int = Field(1, ge=1)
    s: int = Field(0, ge=0)
    empirical: EmpiricalVariogram
    free_params: List[str] = Field(default_factory=list)
    fixed_params: Dict[str, float] = Field(default_factory=dict)
    bounds: Dict[str, Tuple[float, float]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_partition(self) -> "FitProblem":
        """Every family parameter is exactly one of free or fixed, with a valid box."""
        expected = set(family_parameters(self.family))
        free = set(self.free_params)
        fixed = set(self.fixed_params)

        if len(free) != len(self.free_params):
            raise ValueError("free_params contains duplicates")
        if free & fixed:
            raise ValueError(f"parameters both free and fixed: {sorted(free & fixed)}")
        if free | fixed != expected:
            missing = sorted(expected - free - fixed)
            extra = sorted((free | fixed) - expected)
            raise ValueError(
                f"{self.family.value} needs {sorted(expected)}; missing {missing}, unknown {extra}"
            )

        for name in self.free_params:
            if name not in self.bounds:
                raise ValueError(f"no bounds for free parameter '{name}'")
            low, high = self.bounds[name]
            if not (math.isfinite(low) and math.isfinite(high)) or low >= high:
                raise ValueError(f"bounds for '{name}' must be finite with low < high")
            if name in POSITIVE_PARAMETERS and low <= 0:
                raise ValueError(f"lower bound for '{name}' must be positive")
            if low < 0:
                raise ValueError(f"lower bound for '{name}' must be nonnegative")
        return self

    @property
    def n_free(self) -> int:
        return len(self.free_params)


class TraceEntry(BaseModel):
    """An optimizer milestone: a new best point in one stage."""

    model_config = ConfigDict(frozen=True)

    stage: str
    theta: ParameterVector
    value: float


class FitResult(BaseModel):
    """Outcome of the global-then-local fitting pipeline."""

    model_config = ConfigDict(frozen=True)

    theta_hat: ParameterVector
    objective: float = Field(..., ge=0, description="Q(theta_hat)")
    global_stage_value: float = Field(..., ge=0, description="Q(theta_bar)")
    evaluations: int = Field(..., ge=0)
    global_evaluations: int = Field(0, ge=0)
    local_evaluations: int = Field(0, ge=0)
    excluded_bins: int = Field(0, ge=0, description="Bins excluded at theta_hat")
    trace: List[TraceEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_monotone(self) -> "FitResult":
        """Local polish never worsens the global stage."""
        if self.objective > self.global_stage_value:
            raise ValueError("local stage worsened the global optimum")
        return self

    @property
    def sigma(self) -> float:
        """Square root of the fitted partial sill."""
        return math.sqrt(self.theta_hat.sill)
