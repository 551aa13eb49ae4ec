"""Row schemas of the CSV files read and written by the command line."""

from pydantic import BaseModel, ConfigDict, Field, field_validator


class _Row(BaseModel):
    model_config = ConfigDict(frozen=True, str_strip_whitespace=True)


class LocationRecord(_Row):
    """`edge_id,t`"""

    edge_id: str = Field(..., min_length=1)
    t: float = Field(..., allow_inf_nan=False)

    @field_validator("t")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError("t must be non-negative")
        return value


class ObservationRecord(LocationRecord):
    """`edge_id,t,value`"""

    value: float = Field(..., allow_inf_nan=False)


class PredictionRecord(LocationRecord):
    """`edge_id,t,mean,var`"""

    mean: float
    var: float = Field(..., ge=0)
