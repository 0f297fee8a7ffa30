"""
Per-run configuration and serialized model records.

Both are flat key=value documents; values arrive as strings (from a file or
the command line) and are coerced by pydantic.
"""

from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hocov.core.config import settings
from hocov.schemas.models import (
    CovarianceModel,
    ModelFamily,
    ParameterVector,
    SpatioTemporalModel,
    family_parameters,
)

BOUND_FIELDS = {
    "nugget": "nugget_bounds",
    "sill": "sill_bounds",
    "range": "range_bounds",
    "decay": "decay_bounds",
}


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _format(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, ModelFamily):
        return value.value
    if isinstance(value, (list, tuple)):
        return ",".join(_format(item) for item in value)
    return str(value)


class FlatRecord(BaseModel):
    """A model that reads from and writes to flat key=value text."""

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[str]]):
        """Build from string values; empty or missing values fall back to defaults."""
        cleaned = {key: value for key, value in values.items() if value not in (None, "")}
        return cls.model_validate(cleaned)

    def to_mapping(self) -> Dict[str, str]:
        """String form of every set field, in declaration order."""
        return {
            name: _format(value)
            for name, value in self.model_dump().items()
            if value is not None and value != []
        }

    def to_text(self) -> str:
        """key=value lines that ``from_mapping`` reads back to an equal object."""
        return "".join(f"{key}={value}\n" for key, value in self.to_mapping().items())


class RunConfig(FlatRecord):
    """Configuration of one command-line run."""

    # Data
    input: Optional[str] = Field(None, description="Delimited input file")
    dim: int = Field(2, ge=1, le=3)
    x_column: str = "x"
    y_column: str = "y"
    z_column: str = "z"
    value_column: str = "value"

    # Model
    family: ModelFamily = ModelFamily.SINE_COSINE
    r: int = Field(1, ge=1)
    s: int = Field(0, ge=0)
    nugget: float = Field(0.0, ge=0)
    sill: float = Field(1.0, ge=0)
    range: float = Field(1.0, gt=0)
    decay: Optional[float] = Field(None, gt=0)
    beta: float = 1.0
    model: Optional[str] = Field(None, description="Model record written by fit")

    # Fitting
    free: List[str] = Field(default_factory=list)
    nugget_bounds: Optional[Tuple[float, float]] = None
    sill_bounds: Optional[Tuple[float, float]] = None
    range_bounds: Optional[Tuple[float, float]] = None
    decay_bounds: Optional[Tuple[float, float]] = None
    global_budget: Optional[int] = Field(None, ge=1)
    local_tol: float = Field(settings.LOCAL_TOL, gt=0)
    local_max_evals: int = Field(settings.LOCAL_MAX_EVALS, ge=1)

    # Variogram, simulation, envelope
    n_bins: int = Field(settings.DEFAULT_N_BINS, ge=1)
    max_lag: Optional[float] = Field(None, gt=0)
    n_sim: int = Field(settings.DEFAULT_N_SIM, ge=1)
    n_replicates: int = Field(1, ge=1)
    mean: Optional[float] = None
    seed: int = 0

    # Evaluation grid
    h_max: float = Field(20.0, gt=0)
    n_lags: int = Field(201, ge=2)
    t_max: Optional[float] = Field(None, gt=0)
    n_times: int = Field(21, ge=2)
    orders: List[int] = Field(default_factory=list)

    # Positive-definiteness check
    pd_dim: int = Field(3, ge=1, le=3)
    pd_n: int = Field(50, ge=1)
    pd_seeds: int = Field(5, ge=1)

    output_dir: str = "output"

    @field_validator("free", "orders", mode="before")
    @classmethod
    def split_lists(cls, v):
        """Accept comma-separated strings for list fields."""
        if isinstance(v, str):
            return _split(v)
        return v

    @field_validator("nugget_bounds", "sill_bounds", "range_bounds", "decay_bounds", mode="before")
    @classmethod
    def split_bounds(cls, v):
        """Accept 'low,high' strings for bounds."""
        if isinstance(v, str):
            parts = _split(v)
            if len(parts) != 2:
                raise ValueError(f"bounds must be 'low,high', got '{v}'")
            return tuple(parts)
        return v

    @model_validator(mode="after")
    def validate_run(self) -> "RunConfig":
        """Free parameters belong to the family and bounds are ordered."""
        allowed = family_parameters(self.family)
        unknown = [name for name in self.free if name not in allowed]
        if unknown:
            raise ValueError(f"{self.family.value} has no parameters {unknown}")
        if len(set(self.free)) != len(self.free):
            raise ValueError("free contains duplicates")
        if self.family is ModelFamily.COSINE_EXPONENTIAL and self.decay is None:
            raise ValueError("cosine_exponential requires decay")
        if self.r > settings.KERNEL_MAX_R or self.s > settings.KERNEL_MAX_S:
            raise ValueError("r or s exceeds the supported kernel caps")
        if any(not 1 <= order <= settings.KERNEL_MAX_R for order in self.orders):
            raise ValueError(f"orders must lie in [1, {settings.KERNEL_MAX_R}]")
        for field_name in BOUND_FIELDS.values():
            box = getattr(self, field_name)
            if box is not None and not box[0] < box[1]:
                raise ValueError(f"{field_name} must satisfy low < high")
        return self

    def theta(self) -> ParameterVector:
        """Parameter vector from the configured values."""
        decay = self.decay if self.family is ModelFamily.COSINE_EXPONENTIAL else None
        return ParameterVector(nugget=self.nugget, sill=self.sill, range=self.range, decay=decay)

    def covariance_model(self) -> CovarianceModel:
        return CovarianceModel(family=self.family, r=self.r, s=self.s, theta=self.theta())

    def fixed_params(self) -> Dict[str, float]:
        """Configured values of the family parameters that are not free."""
        theta = self.theta()
        return {
            name: theta.get(name)
            for name in family_parameters(self.family)
            if name not in self.free
        }

    def bound_overrides(self) -> Dict[str, Tuple[float, float]]:
        """Bounds given explicitly for free parameters."""
        overrides = {}
        for name in self.free:
            box = getattr(self, BOUND_FIELDS[name])
            if box is not None:
                overrides[name] = box
        return overrides


class ModelRecord(FlatRecord):
    """A fitted model as written by the fit command."""

    family: ModelFamily
    r: int = Field(1, ge=1)
    s: int = Field(0, ge=0)
    nugget: float = Field(0.0, ge=0)
    sill: float = Field(1.0, ge=0)
    range: float = Field(1.0, gt=0)
    decay: Optional[float] = Field(None, gt=0)
    beta: float = 1.0
    Q: Optional[float] = Field(None, ge=0, description="WLS objective at the fit")
    evaluations: Optional[int] = Field(None, ge=0)
    n_bins: Optional[int] = Field(None, ge=1)
    max_lag: Optional[float] = Field(None, gt=0)

    @classmethod
    def from_model(
        cls, model: CovarianceModel, beta: float = 1.0, **extra: Any
    ) -> "ModelRecord":
        theta = model.theta
        return cls(
            family=model.family,
            r=model.r,
            s=model.s,
            nugget=theta.nugget,
            sill=theta.sill,
            range=theta.range,
            decay=theta.decay,
            beta=beta,
            **extra,
        )

    def covariance_model(self) -> CovarianceModel:
        theta = ParameterVector(
            nugget=self.nugget, sill=self.sill, range=self.range, decay=self.decay
        )
        return CovarianceModel(family=self.family, r=self.r, s=self.s, theta=theta)

    def spacetime_model(self) -> SpatioTemporalModel:
        return SpatioTemporalModel(spatial=self.covariance_model(), beta=self.beta)
