"""
Pydantic Schemas for Bound Queries and Results
"""
import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class BoundQuery(BaseModel):
    """Parameters of a Bernstein-type tail query on a stationary chain"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., description="Chain length", ge=1)
    eps: float = Field(..., description="Deviation threshold (units of f)", gt=0.0)
    sigma2: float = Field(..., description="Stationary variance pi(f^2)", ge=0.0)
    c: float = Field(..., description="Uniform bound |f| <= c", gt=0.0)
    lam: Optional[float] = Field(
        None, description="lambda = |||P - Pi|||_pi (time-dependent bound)", ge=0.0, le=1.0
    )
    lam_plus: Optional[float] = Field(
        None, description="lambda_+ of the additive reversiblization (time-independent bound)", ge=-1.0, le=1.0
    )

    @model_validator(mode="after")
    def _variance_within_range(self):
        # sigma2 = pi(f^2) <= c^2 for any |f| <= c
        if self.sigma2 > self.c * self.c * (1.0 + 1e-12):
            raise ValueError(f"sigma2={self.sigma2} exceeds c^2={self.c * self.c}")
        return self


class BoundValue(BaseModel):
    """A probability bound exp(-n * exponent)"""

    model_config = ConfigDict(frozen=True)

    probability_bound: float = Field(..., description="Upper bound on the tail probability", ge=0.0, le=1.0)
    exponent: float = Field(..., description="-log(probability_bound) / n", ge=0.0)
    n: int = Field(..., description="Chain length", ge=1)
    kind: str = Field(..., description="Inequality identifier")

    @model_validator(mode="after")
    def _consistent(self):
        expected = math.exp(-self.n * self.exponent)
        if abs(expected - self.probability_bound) > 1e-12 * max(expected, 1e-300):
            raise ValueError(
                f"probability_bound {self.probability_bound} inconsistent with exponent {self.exponent}"
            )
        return self

    @classmethod
    def from_exponent(cls, exponent: float, n: int, kind: str) -> "BoundValue":
        return cls(
            probability_bound=math.exp(-n * exponent),
            exponent=exponent,
            n=n,
            kind=kind,
        )
