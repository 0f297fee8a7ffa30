"""
Schemas describing special-function evaluations.
"""

from enum import Enum
from pydantic import BaseModel, ConfigDict, Field


class BesselPath(str, Enum):
    """Evaluation path taken for a spherical Bessel value."""
    SERIES = "series"
    RECURRENCE = "recurrence"
    LIMIT_AT_ZERO = "limit-at-zero"


class BesselEvalReport(BaseModel):
    """A single j_m(x) evaluation together with the path that produced it."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    order: int = Field(..., ge=0, description="Order m")
    argument: float = Field(..., description="Argument x")
    value: float = Field(..., description="j_m(x)")
    path: BesselPath
