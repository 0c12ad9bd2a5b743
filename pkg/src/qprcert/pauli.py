"""Exact qubit operator algebra in the Pauli coefficient basis.

Operators are stored as coefficients: ``w I + x . (X, Y, Z)``. Dense 2x2 matrices are only a derived
view, used for the brute-force oracle and for interchange with the d-dimensional reduction code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Final, overload

import numpy as np

from qprcert.config import DEFAULT_TOL, current_tolerance
from qprcert.errors import InvalidOperatorError
from qprcert.utils import frozen_array

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from numpy.typing import ArrayLike

    from qprcert.utils import ComplexArray, FloatArray

IDENTITY: Final = np.eye(2, dtype=np.complex128)
PAULI_X: Final = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y: Final = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z: Final = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI_VECTOR: Final = np.stack((PAULI_X, PAULI_Y, PAULI_Z))

for _matrix in (IDENTITY, PAULI_X, PAULI_Y, PAULI_Z, PAULI_VECTOR):
    _matrix.setflags(write=False)


def _vector3(value: ArrayLike, *, name: str) -> FloatArray:
    return frozen_array(value, shape=(3,), name=name)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class HermitianOp:
    w: float
    x: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", float(self.w))
        object.__setattr__(self, "x", _vector3(self.x, name="Pauli coefficient vector"))

    @property
    def trace(self) -> float:
        return 2.0 * self.w

    def matrix(self) -> ComplexArray:
        return self.w * IDENTITY + np.tensordot(self.x, PAULI_VECTOR, axes=1)

    def eigenvalues(self) -> tuple[float, float]:
        return eigenvalues(self)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class DensityOp:
    """The qubit state ``(I + bloch . X) / 2`` with ``|bloch| <= 1``."""

    bloch: FloatArray

    def __post_init__(self) -> None:
        bloch = _vector3(self.bloch, name="Bloch vector")
        if (norm := float(np.linalg.norm(bloch))) > 1.0 + current_tolerance():
            msg = f"The Bloch vector must lie in the unit ball (norm {norm})"
            raise InvalidOperatorError(msg)

        object.__setattr__(self, "bloch", bloch)

    def as_hermitian(self) -> HermitianOp:
        return HermitianOp(w=0.5, x=self.bloch / 2.0)

    def matrix(self) -> ComplexArray:
        return self.as_hermitian().matrix()


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class PovmElement:
    """The effect ``m I + p . X``; valid iff ``|p| <= m <= 1 - |p|``."""

    m: float
    p: FloatArray

    def __post_init__(self) -> None:
        m = float(self.m)
        p = _vector3(self.p, name="effect vector")
        if (defect := _cone_defect(m, p)) > current_tolerance():
            msg = f"The effect E(m={m}, p={p.tolist()}) lies outside the double cone |p| <= m <= 1 - |p|"
            msg = f"{msg} (defect {defect})"
            raise InvalidOperatorError(msg)

        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)

    @property
    def coefficients(self) -> FloatArray:
        return np.concatenate(([self.m], self.p))

    def as_hermitian(self) -> HermitianOp:
        return HermitianOp(w=self.m, x=self.p)

    def complement(self) -> PovmElement:
        return PovmElement(m=1.0 - self.m, p=-self.p)

    def matrix(self) -> ComplexArray:
        return self.as_hermitian().matrix()


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class Povm:
    elements: tuple[PovmElement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))

    def __iter__(self) -> Iterator[PovmElement]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def _cone_defect(m: float, p: FloatArray) -> float:
    norm = float(np.linalg.norm(p))
    return max(norm - m, norm - (1.0 - m), 0.0)


def pauli_decompose(matrix: ArrayLike, *, tol: float = DEFAULT_TOL) -> HermitianOp:
    dense = np.asarray(matrix, dtype=np.complex128)
    if dense.shape != (2, 2):
        msg = f"Expected a 2x2 matrix, got shape {dense.shape}"
        raise InvalidOperatorError(msg)

    if (asymmetry := float(np.max(np.abs(dense - dense.conj().T)))) > tol:
        msg = f"The matrix is not Hermitian (max asymmetry {asymmetry})"
        raise InvalidOperatorError(msg)

    w = float(np.trace(dense).real) / 2.0
    x = np.einsum("ij,kji->k", dense, PAULI_VECTOR).real / 2.0
    return HermitianOp(w=w, x=x)


def eigenvalues(op: HermitianOp) -> tuple[float, float]:
    norm = float(np.linalg.norm(op.x))
    return op.w + norm, op.w - norm


def born_probability(rho: DensityOp, e: PovmElement) -> float:
    return e.m + float(rho.bloch @ e.p)


def validate_povm(povm: Povm | Sequence[PovmElement], *, tol: float = DEFAULT_TOL) -> None:
    elements = tuple(povm)
    if not elements:
        msg = "A POVM must contain at least one element"
        raise InvalidOperatorError(msg)

    for index, element in enumerate(elements):
        if (defect := _cone_defect(element.m, element.p)) > tol:
            msg = f"POVM element {index} is not an effect (cone defect {defect})"
            raise InvalidOperatorError(msg)

    if (m_defect := abs(sum(element.m for element in elements) - 1.0)) > tol:
        msg = f"The POVM identity coefficients do not sum to 1 (defect {m_defect})"
        raise InvalidOperatorError(msg)

    p_sum = np.sum([element.p for element in elements], axis=0)
    if (p_defect := float(np.max(np.abs(p_sum)))) > tol:
        msg = f"The POVM Pauli coefficients do not sum to zero (sum {p_sum.tolist()}, defect {p_defect})"
        raise InvalidOperatorError(msg)


@overload
def mix(items: Sequence[tuple[float, DensityOp]], *, tol: float = ...) -> DensityOp: ...


@overload
def mix(items: Sequence[tuple[float, PovmElement]], *, tol: float = ...) -> PovmElement: ...


def mix(
    items: Sequence[tuple[float, DensityOp]] | Sequence[tuple[float, PovmElement]],
    *,
    tol: float = DEFAULT_TOL,
) -> DensityOp | PovmElement:
    if not items:
        msg = "A mixture needs at least one component"
        raise InvalidOperatorError(msg)

    weights = np.array([weight for weight, _ in items], dtype=np.float64)
    if np.any(weights < -tol):
        msg = f"Mixture weights must be nonnegative (got {weights.tolist()})"
        raise InvalidOperatorError(msg)

    if (defect := abs(float(weights.sum()) - 1.0)) > tol:
        msg = f"Mixture weights must sum to 1 (defect {defect})"
        raise InvalidOperatorError(msg)

    operands = [operand for _, operand in items]
    if densities := [operand for operand in operands if isinstance(operand, DensityOp)]:
        if len(densities) == len(operands):
            return DensityOp(bloch=weights @ np.array([rho.bloch for rho in densities]))
    elif effects := [operand for operand in operands if isinstance(operand, PovmElement)]:
        if len(effects) == len(operands):
            coefficients = weights @ np.array([e.coefficients for e in effects])
            return PovmElement(m=coefficients[0], p=coefficients[1:])

    msg = "A mixture must combine only density operators or only POVM elements"
    raise InvalidOperatorError(msg)


def random_bloch_ball(rng: np.random.Generator, *, radius: float = 1.0) -> FloatArray:
    while True:
        candidate = rng.uniform(-1.0, 1.0, size=3)
        if candidate @ candidate <= 1.0:
            return radius * candidate


def random_density(rng: np.random.Generator) -> DensityOp:
    return DensityOp(bloch=random_bloch_ball(rng))


def random_effect(rng: np.random.Generator) -> PovmElement:
    p = random_bloch_ball(rng, radius=0.5)
    norm = float(np.linalg.norm(p))
    return PovmElement(m=rng.uniform(norm, 1.0 - norm), p=p)


def binary_povm(e: PovmElement) -> Povm:
    return Povm(elements=(e, e.complement()))


def projective_povm(direction: ArrayLike) -> Povm:
    axis = _vector3(direction, name="measurement axis")
    axis = axis / np.linalg.norm(axis)
    return binary_povm(PovmElement(m=0.5, p=axis / 2.0))


ZERO_EFFECT: Final[PovmElement] = PovmElement(m=0.0, p=(0.0, 0.0, 0.0))
UNIT_EFFECT: Final[PovmElement] = PovmElement(m=1.0, p=(0.0, 0.0, 0.0))
MAXIMALLY_MIXED: Final[DensityOp] = DensityOp(bloch=(0.0, 0.0, 0.0))

__all__ = [
    "IDENTITY",
    "MAXIMALLY_MIXED",
    "PAULI_VECTOR",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "UNIT_EFFECT",
    "ZERO_EFFECT",
    "DensityOp",
    "HermitianOp",
    "Povm",
    "PovmElement",
    "binary_povm",
    "born_probability",
    "eigenvalues",
    "mix",
    "pauli_decompose",
    "projective_povm",
    "random_density",
    "random_effect",
    "validate_povm",
]
