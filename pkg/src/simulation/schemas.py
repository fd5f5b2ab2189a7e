"""
Pydantic Schemas for Monte Carlo Runs
"""
from pydantic import BaseModel, ConfigDict, Field, model_validator


class TrialPlan(BaseModel):
    """Seeded plan for independent stationary trials of length n"""

    model_config = ConfigDict(frozen=True)

    base_seed: int = Field(..., description="64-bit base seed", ge=0, lt=2**64)
    trials: int = Field(..., description="Number of independent trials", ge=1)
    n: int = Field(..., description="Path length", ge=1)


class TailEstimate(BaseModel):
    """Empirical exceedance frequency with a Clopper-Pearson interval"""

    model_config = ConfigDict(frozen=True)

    successes: int = Field(..., description="Trials with (1/n) sum f > eps", ge=0)
    trials: int = Field(..., description="Number of trials", ge=1)
    point: float = Field(..., description="successes / trials", ge=0.0, le=1.0)
    cp_low: float = Field(..., description="Lower end of the 99% interval", ge=0.0, le=1.0)
    cp_high: float = Field(..., description="Upper end of the 99% interval", ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.successes > self.trials:
            raise ValueError("successes cannot exceed trials")
        if not (self.cp_low <= self.point <= self.cp_high):
            raise ValueError(
                f"interval [{self.cp_low}, {self.cp_high}] does not contain point {self.point}"
            )
        return self
