"""Pydantic models for Whittle-Matérn model parameters."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class BoundaryMode(str, Enum):
    """Condition imposed at a degree-1 vertex."""

    KIRCHHOFF = "kirchhoff"
    STATIONARY = "stationary"


class ModelParams(BaseModel):
    """Smoothness, range, precision scale and measurement noise of the model."""

    alpha: int = Field(..., ge=1, le=2, description="Smoothness; 1 or 2")
    kappa: float = Field(..., gt=0, allow_inf_nan=False, description="Range parameter, 1/length")
    tau: float = Field(..., gt=0, allow_inf_nan=False, description="Precision scale")
    sigma: float = Field(0.0, ge=0, allow_inf_nan=False, description="Measurement noise std")
    boundary: BoundaryMode = BoundaryMode.KIRCHHOFF
    boundary_overrides: dict[str, BoundaryMode] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    @property
    def nu(self) -> float:
        """Matérn smoothness of the stationary kernel."""
        return self.alpha - 0.5

    def boundary_at(self, vertex_id: str) -> BoundaryMode:
        """Boundary mode requested for a vertex (meaningful at degree-1 vertices)."""
        return self.boundary_overrides.get(vertex_id, self.boundary)

    def with_values(self, **values: float) -> "ModelParams":
        """Copy with some numeric fields replaced, re-validated."""
        return ModelParams.model_validate(self.model_dump() | values)


class CandidateModel(BaseModel):
    """A model entered into cross-validation: fitted by maximum likelihood on each fold."""

    name: str = Field(..., min_length=1)
    alpha: int = Field(..., ge=1, le=2)
    boundary: BoundaryMode = BoundaryMode.KIRCHHOFF

    model_config = ConfigDict(frozen=True)
