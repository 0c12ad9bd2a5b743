from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator

from qprcert.utils import to_jsonable


class CheckReport(BaseModel):
    """Outcome of a single property check; a failed check is data, never an exception."""

    model_config = ConfigDict(frozen=True, validate_by_name=True, validate_by_alias=True, serialize_by_alias=True)

    name: str
    passed: bool = Field(alias="pass")
    worst_defect: float
    tolerance: float
    witness: dict[str, Any] | None = None

    @field_validator("witness", mode="before")
    @classmethod
    def _jsonable_witness(cls, value: object) -> object:
        return to_jsonable(value)

    @classmethod
    def from_defect(
        cls,
        name: str,
        *,
        defect: float,
        tol: float,
        witness: dict[str, Any] | None = None,
    ) -> CheckReport:
        return cls(name=name, passed=defect <= tol, worst_defect=float(defect), tolerance=tol, witness=witness)


__all__ = ["CheckReport"]
