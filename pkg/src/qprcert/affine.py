"""Affine hulls and the extension of convex-linear maps to translated-linear ones.

A map defined on a finite point set extends to a translated-linear map ``v -> w0 + h(v - u0)`` on the
affine hull exactly when every affine dependency among the points is respected by the values. A
purely linear extension is a strictly stronger demand that fails, for instance, for the constant map.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy import linalg

from qprcert.config import DEFAULT_TOL
from qprcert.errors import ExtensionImpossibleError, InvalidOperatorError, OutsideHullError
from qprcert.report import CheckReport
from qprcert.utils import canonical_sign, frozen_array

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from qprcert.utils import FloatArray

logger = logging.getLogger(__name__)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class PointValueSet:
    """Sample points ``s_i`` (rows of ``points``) with values ``f(s_i)`` (rows of ``values``)."""

    points: FloatArray
    values: FloatArray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]

        points = frozen_array(points, shape=(None, None), name="point array")
        values = frozen_array(values, shape=(None, None), name="value array")
        if points.shape[0] == 0 or points.shape[1] == 0 or values.shape[1] == 0:
            msg = f"A point/value set needs at least one point of dimension >= 1 (got {points.shape})"
            raise InvalidOperatorError(msg)

        if points.shape[0] != values.shape[0]:
            msg = f"Got {points.shape[0]} points but {values.shape[0]} values"
            raise InvalidOperatorError(msg)

        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def domain_dim(self) -> int:
        return self.points.shape[1]

    @property
    def codomain_dim(self) -> int:
        return self.values.shape[1]


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class AffineSubspace:
    """The flat ``base + span(basis)``; the rows of ``basis`` are orthonormal."""

    base: FloatArray
    basis: FloatArray

    def __post_init__(self) -> None:
        base = frozen_array(self.base, shape=(None,), name="hull base point")
        basis = np.asarray(self.basis, dtype=np.float64).reshape(-1, base.shape[0])
        basis = frozen_array(basis, shape=(None, base.shape[0]), name="hull basis")
        gram_defect = np.abs(basis @ basis.T - np.eye(basis.shape[0]))
        if (defect := float(np.max(gram_defect, initial=0.0))) > 1e-8:  # noqa: PLR2004
            msg = f"The hull basis must be orthonormal (defect {defect})"
            raise InvalidOperatorError(msg)

        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.base.shape[0]

    def coordinates(self, v: ArrayLike) -> FloatArray:
        return self.basis @ (np.asarray(v, dtype=np.float64) - self.base)

    def residual(self, v: ArrayLike) -> float:
        offset = np.asarray(v, dtype=np.float64) - self.base
        return float(np.linalg.norm(offset - self.basis.T @ (self.basis @ offset)))

    def contains(self, v: ArrayLike, *, tol: float = DEFAULT_TOL) -> bool:
        scale = max(1.0, float(np.linalg.norm(np.asarray(v, dtype=np.float64) - self.base)))
        return self.residual(v) <= tol * scale


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class TranslatedLinearMap:
    """``f(v) = offset + linear_part @ coordinates(v)`` on the affine subspace ``base + span(basis)``."""

    base: FloatArray
    offset: FloatArray
    basis: FloatArray
    linear_part: FloatArray

    def __post_init__(self) -> None:
        hull = AffineSubspace(base=self.base, basis=self.basis)
        offset = frozen_array(self.offset, shape=(None,), name="map offset")
        linear_part = np.asarray(self.linear_part, dtype=np.float64).reshape(offset.shape[0], hull.dim)
        object.__setattr__(self, "base", hull.base)
        object.__setattr__(self, "basis", hull.basis)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(
            self,
            "linear_part",
            frozen_array(linear_part, shape=(offset.shape[0], hull.dim), name="map linear part"),
        )

    @property
    def domain(self) -> AffineSubspace:
        return AffineSubspace(base=self.base, basis=self.basis)

    def evaluate(self, v: ArrayLike, *, tol: float = DEFAULT_TOL) -> FloatArray:
        domain = self.domain
        if not domain.contains(v, tol=tol):
            msg = f"The point lies off the affine hull (residual {domain.residual(v)})"
            raise OutsideHullError(msg)

        return self.offset + self.linear_part @ domain.coordinates(v)

    def __call__(self, v: ArrayLike) -> FloatArray:
        return self.evaluate(v)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class LinearExtension:
    exists: bool
    residual: float
    matrix: FloatArray | None = None
    witness: dict[str, Any] | None = None


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class AmbientExtension:
    """``v -> offset + matrix @ v`` on the whole ambient space; ``unique`` iff the hull is the whole space."""

    matrix: FloatArray
    offset: FloatArray
    unique: bool

    def evaluate(self, v: ArrayLike) -> FloatArray:
        return self.offset + self.matrix @ np.asarray(v, dtype=np.float64)


def _value_scale(values: FloatArray) -> float:
    return max(1.0, float(np.max(np.abs(values))))


def _dedupe(points: FloatArray, *, tol: float) -> FloatArray:
    kept: list[FloatArray] = []
    for point in points:
        if all(np.linalg.norm(point - other) > tol for other in kept):
            kept.append(point)

    return np.array(kept)


def affine_hull(points: ArrayLike, *, tol: float = DEFAULT_TOL) -> AffineSubspace:
    array = frozen_array(np.atleast_2d(np.asarray(points, dtype=np.float64)), shape=(None, None), name="point array")
    if array.shape[0] == 0:
        msg = "The affine hull of an empty set is undefined"
        raise InvalidOperatorError(msg)

    unique = _dedupe(array, tol=tol)
    base = unique[0]
    differences = unique[1:] - base
    if differences.shape[0] == 0:
        return AffineSubspace(base=base, basis=np.zeros((0, base.shape[0])))

    _, singular, vt = np.linalg.svd(differences, full_matrices=False)
    rank = int(np.sum(singular > tol * max(1.0, float(singular[0]))))
    return AffineSubspace(base=base, basis=canonical_sign(vt[:rank]))


def _dependency_witness(
    null_basis: FloatArray,
    points: FloatArray,
    values: FloatArray,
) -> tuple[float, dict[str, Any] | None]:
    """Pick the dependency ``c`` (a column combination of ``null_basis``) that a value column breaks most."""
    if null_basis.shape[1] == 0:
        return 0.0, None

    projected = null_basis @ (null_basis.T @ values)
    column = int(np.argmax(np.max(np.abs(projected), axis=0)))
    coefficients = projected[:, column]
    if (peak := float(np.max(np.abs(coefficients)))) == 0.0:
        return 0.0, None

    coefficients = coefficients / peak
    combination = coefficients @ values
    defect = float(np.max(np.abs(projected)))
    return defect, {
        "coefficients": coefficients,
        "points": points,
        "value_combination": combination,
        "component": column,
    }


def affine_dependency(pvs: PointValueSet, *, tol: float = DEFAULT_TOL) -> dict[str, Any] | None:
    """Return an affine dependency ``sum c_i s_i = 0, sum c_i = 0`` with ``sum c_i f(s_i) != 0``, if any."""
    system = np.vstack((pvs.points.T, np.ones(len(pvs))))
    defect, witness = _dependency_witness(linalg.null_space(system, rcond=tol), pvs.points, pvs.values)
    if witness is None or defect <= tol * _value_scale(pvs.values):
        return None

    return witness


def convex_linearity_check(pvs: PointValueSet, *, tol: float = DEFAULT_TOL) -> CheckReport:
    """Pass iff the values are the restriction of some translated-linear map.

    The least-squares residual of the best affine fit is the projection of the values onto the affine
    dependencies of the points, so the worst residual entry is the defect and the dependency that carries
    it is the witness.
    """
    system = np.vstack((pvs.points.T, np.ones(len(pvs))))
    defect, witness = _dependency_witness(linalg.null_space(system, rcond=tol), pvs.points, pvs.values)
    report = CheckReport.from_defect(
        "convex_linearity",
        defect=defect,
        tol=tol * _value_scale(pvs.values),
        witness=witness,
    )
    logger.debug("Affine consistency of %d points: passed=%s defect=%g", len(pvs), report.passed, defect)
    return report


def translated_linear_extend(pvs: PointValueSet, *, tol: float = DEFAULT_TOL) -> TranslatedLinearMap:
    if not (report := convex_linearity_check(pvs, tol=tol)).passed:
        msg = f"The values are not convex-linear on the points (defect {report.worst_defect})"
        raise ExtensionImpossibleError(msg, witness=report.witness or {})

    hull = affine_hull(pvs.points, tol=tol)
    coordinates = (pvs.points - hull.base) @ hull.basis.T
    design = np.hstack((np.ones((len(pvs), 1)), coordinates))
    solution, *_ = np.linalg.lstsq(design, pvs.values, rcond=None)
    return TranslatedLinearMap(
        base=hull.base,
        offset=solution[0],
        basis=hull.basis,
        linear_part=solution[1:].T,
    )


def linear_extension_exists(pvs: PointValueSet, *, tol: float = DEFAULT_TOL) -> LinearExtension:
    """Decide whether one linear map ``G`` satisfies ``G s_i = f(s_i)`` for every pair."""
    solution, *_ = np.linalg.lstsq(pvs.points, pvs.values, rcond=None)
    residual = float(np.max(np.abs(pvs.values - pvs.points @ solution)))
    if residual <= tol * _value_scale(pvs.values):
        return LinearExtension(exists=True, residual=residual, matrix=solution.T)

    _, witness = _dependency_witness(linalg.null_space(pvs.points.T, rcond=tol), pvs.points, pvs.values)
    logger.debug("No linear extension (residual %g)", residual)
    return LinearExtension(exists=False, residual=residual, witness=witness)


def extend_to_ambient(f: TranslatedLinearMap) -> AmbientExtension:
    """Extend ``f`` to the ambient space by making it constant along the orthogonal complement of the hull."""
    matrix = f.linear_part @ f.basis
    return AmbientExtension(
        matrix=matrix,
        offset=f.offset - matrix @ f.base,
        unique=f.basis.shape[0] == f.base.shape[0],
    )


__all__ = [
    "AffineSubspace",
    "AmbientExtension",
    "LinearExtension",
    "PointValueSet",
    "TranslatedLinearMap",
    "affine_dependency",
    "affine_hull",
    "convex_linearity_check",
    "extend_to_ambient",
    "linear_extension_exists",
    "translated_linear_extend",
]
