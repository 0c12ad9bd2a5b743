from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from qprcert.errors import InvalidOperatorError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

type FloatArray = NDArray[np.float64]
type ComplexArray = NDArray[np.complex128]


def frozen_array(value: ArrayLike, *, shape: tuple[int | None, ...], name: str) -> FloatArray:
    array = np.array(value, dtype=np.float64)
    if array.ndim != len(shape) or any(
        expected is not None and actual != expected for actual, expected in zip(array.shape, shape, strict=True)
    ):
        msg = f"The {name} must have shape {_format_shape(shape)} (got {array.shape})"
        raise InvalidOperatorError(msg)

    if not np.all(np.isfinite(array)):
        msg = f"The {name} must contain only finite values"
        raise InvalidOperatorError(msg)

    array.setflags(write=False)
    return array


def frozen_complex(value: ArrayLike, *, name: str) -> ComplexArray:
    array = np.array(value, dtype=np.complex128)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:  # noqa: PLR2004
        msg = f"The {name} must be a square matrix (got shape {array.shape})"
        raise InvalidOperatorError(msg)

    array.setflags(write=False)
    return array


def canonical_sign(rows: FloatArray) -> FloatArray:
    """Flip each row so that its largest-magnitude entry is positive."""
    if rows.size == 0:
        return rows

    pivots = rows[np.arange(rows.shape[0]), np.argmax(np.abs(rows), axis=1)]
    return rows * np.where(pivots < 0, -1.0, 1.0)[:, None]


def to_jsonable(value: object) -> Any:  # noqa: ANN401
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())

    if isinstance(value, np.generic):
        return value.item()

    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}

    if isinstance(value, list | tuple):
        return [to_jsonable(item) for item in value]

    return value


def _format_shape(shape: tuple[int | None, ...]) -> str:
    return "(" + ", ".join("n" if size is None else str(size) for size in shape) + ")"
