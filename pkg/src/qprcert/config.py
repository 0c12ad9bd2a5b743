from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Final, Literal

if TYPE_CHECKING:
    from collections.abc import Iterator

type OutputFormat = Literal["json", "table"]

DEFAULT_TOL: Final[float] = 1e-9
OUTPUT_FORMATS: Final[tuple[OutputFormat, ...]] = ("json", "table")

_TOLERANCE: Final[ContextVar[float]] = ContextVar("qprcert_tolerance", default=DEFAULT_TOL)


def _require_positive(tol: float) -> None:
    if not tol > 0:
        msg = f"The tolerance must be positive (got {tol})"
        raise ValueError(msg)


def current_tolerance() -> float:
    """The tolerance used by type validation and catalog lookups."""
    return _TOLERANCE.get()


@contextmanager
def tolerance_scope(tol: float) -> Iterator[float]:
    """Set the tolerance seen by :func:`current_tolerance` for the duration of the block."""
    _require_positive(tol)
    token = _TOLERANCE.set(tol)
    try:
        yield tol
    finally:
        _TOLERANCE.reset(token)


@dataclass(slots=True, kw_only=True, frozen=True)
class RunConfig:
    tolerance: float = DEFAULT_TOL
    seed: int = 0
    output_format: OutputFormat = "json"
    trials: int = 1000
    out_dir: Path | None = None

    def __post_init__(self) -> None:
        _require_positive(self.tolerance)

        if not 0 <= self.seed < 2**64:
            msg = f"The seed must be a 64-bit unsigned integer (got {self.seed})"
            raise ValueError(msg)

        if self.output_format not in OUTPUT_FORMATS:
            msg = f"The output format must be one of {', '.join(OUTPUT_FORMATS)} (got {self.output_format!r})"
            raise ValueError(msg)

        if self.trials < 0:
            msg = f"The trial count must not be negative (got {self.trials})"
            raise ValueError(msg)

        if self.out_dir is not None:
            object.__setattr__(self, "out_dir", Path(self.out_dir))


__all__ = ["DEFAULT_TOL", "OUTPUT_FORMATS", "OutputFormat", "RunConfig", "current_tolerance", "tolerance_scope"]
