"""
Schemas for higher-order kernel specifications.
"""

from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, field_validator

from hocov.core.config import settings


class KernelFamily(str, Enum):
    """Supported higher-order kernel families."""
    MULLER = "muller"
    GAUSSIAN_HO = "gaussian_higher_order"


class KernelSpec(BaseModel):
    """
    A symmetric kernel of order 2r.

    Müller kernels are s-smooth with support [-1, 1]; higher-order Gaussian
    kernels have unbounded support and ignore s.
    """

    model_config = ConfigDict(frozen=True)

    family: KernelFamily
    r: int = Field(1, ge=1, description="Half the kernel order 2r")
    s: int = Field(0, ge=0, description="Smoothness (Müller family only)")

    @field_validator("r")
    @classmethod
    def validate_r(cls, v: int) -> int:
        """Cap r where Pochhammer ratios stay representable."""
        if v > settings.KERNEL_MAX_R:
            raise ValueError(f"r must be at most {settings.KERNEL_MAX_R}")
        return v

    @field_validator("s")
    @classmethod
    def validate_s(cls, v: int) -> int:
        """Cap s where Pochhammer ratios stay representable."""
        if v > settings.KERNEL_MAX_S:
            raise ValueError(f"s must be at most {settings.KERNEL_MAX_S}")
        return v

    @property
    def order(self) -> int:
        """Kernel order 2r."""
        return 2 * self.r

    @property
    def compact(self) -> bool:
        """Whether the kernel vanishes outside [-1, 1]."""
        return self.family is KernelFamily.MULLER
