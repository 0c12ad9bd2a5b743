"""Fixtures that justify the hypotheses of the no-go theorem.

- the SIC-tetrahedron representation: valid, nonnegative on effects, negative on some states;
- ontic-space duplication plus a sigma perturbation: valid, yet not convex-linear;
- a constant map on a spanning set without the origin: convex-linear, yet not linear.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Final

import numpy as np

from qprcert.affine import PointValueSet
from qprcert.errors import InvalidOperatorError
from qprcert.ontic import (
    AffineEffectRep,
    AffineStateRep,
    OnticFunction,
    OnticSpace,
    TabulatedStateRep,
    require_same_space,
)
from qprcert.pauli import DensityOp, Povm, PovmElement, pauli_decompose
from qprcert.reduction import MatrixOp
from qprcert.utils import frozen_array

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from numpy.typing import ArrayLike

    from qprcert.utils import FloatArray

TETRAHEDRON: Final = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=np.float64) / np.sqrt(3.0)
TETRAHEDRON.setflags(write=False)

_NORTH: Final = np.array([0.0, 0.0, 1.0])
PERTURBATION_CATALOG: Final[tuple[DensityOp, ...]] = (
    DensityOp(bloch=_NORTH),
    DensityOp(bloch=-_NORTH),
    DensityOp(bloch=np.zeros(3)),
)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class SicFrame:
    """Four unit Bloch vectors forming a regular tetrahedron."""

    bloch_vectors: FloatArray

    def __post_init__(self) -> None:
        vectors = frozen_array(self.bloch_vectors, shape=(4, 3), name="tetrahedron")
        gram = vectors @ vectors.T
        expected = np.full((4, 4), -1.0 / 3.0) + np.eye(4) * (4.0 / 3.0)
        if (defect := float(np.max(np.abs(gram - expected)))) > 1e-12:  # noqa: PLR2004
            msg = f"The Bloch vectors do not form a regular tetrahedron (Gram defect {defect})"
            raise InvalidOperatorError(msg)

        object.__setattr__(self, "bloch_vectors", vectors)

    @classmethod
    def pinned(cls) -> SicFrame:
        return cls(bloch_vectors=TETRAHEDRON)

    def povm(self) -> Povm:
        return Povm(elements=tuple(PovmElement(m=0.25, p=a / 4.0) for a in self.bloch_vectors))

    def matrices(self) -> tuple[MatrixOp, ...]:
        return tuple(MatrixOp.from_qubit(element) for element in self.povm())


def sic_povm() -> Povm:
    return SicFrame.pinned().povm()


def sic_baseline(frame: SicFrame | None = None) -> tuple[AffineStateRep, AffineEffectRep]:
    """``mu_k = (1 + 3 x . a_k) / 4`` and ``xi_k = m + p . a_k`` on four unit-weight points."""
    vectors = (frame or SicFrame.pinned()).bloch_vectors
    space = OnticSpace.uniform(4, prefix="a")
    srep = AffineStateRep(space=space, a=0.75 * vectors.T, c=np.full(4, 0.25))
    erep = AffineEffectRep(space=space, b=vectors.T, d=np.ones(4), f=np.zeros(4))
    return srep, erep


def state_independent_candidate(frame: SicFrame | None = None) -> tuple[AffineStateRep, AffineEffectRep]:
    """The SIC effects paired with the flat state rep ``A = 0, C = 1/4``: nonnegative, so the Born rule must fail."""
    srep, erep = sic_baseline(frame)
    return AffineStateRep(space=srep.space, a=np.zeros((3, 4)), c=srep.c), erep


def duplicate_ontic_space(
    srep: AffineStateRep,
    erep: AffineEffectRep,
) -> tuple[AffineStateRep, AffineEffectRep, OnticFunction]:
    """Replace the space by two half-weight copies and return ``sigma = +1`` on the first, ``-1`` on the second."""
    require_same_space(srep.space, erep.space)
    original = srep.space
    space = OnticSpace(
        labels=(*(f"{label}.1" for label in original.labels), *(f"{label}.2" for label in original.labels)),
        weights=np.concatenate((original.weights, original.weights)) / 2.0,
    )

    def doubled(values: FloatArray) -> FloatArray:
        return np.concatenate((values, values), axis=-1)

    sigma = OnticFunction(space=space, values=np.concatenate((np.ones(original.size), -np.ones(original.size))))
    return (
        AffineStateRep(space=space, a=doubled(srep.a), c=doubled(srep.c)),
        AffineEffectRep(space=space, b=doubled(erep.b), d=doubled(erep.d), f=doubled(erep.f)),
        sigma,
    )


def squared_bloch_norm(rho: DensityOp) -> float:
    return float(rho.bloch @ rho.bloch)


def perturb_mu(
    srep: AffineStateRep,
    sigma: OnticFunction,
    *,
    assignment: Callable[[DensityOp], float] = squared_bloch_norm,
    catalog: Sequence[DensityOp] = PERTURBATION_CATALOG,
) -> TabulatedStateRep:
    """Tabulate ``mu'_rho = mu_rho + c_rho sigma`` over ``catalog`` for the rule ``c = assignment``."""
    require_same_space(srep.space, sigma.space)
    return TabulatedStateRep(
        space=srep.space,
        catalog=tuple(
            (rho, OnticFunction(space=srep.space, values=srep.mu(rho).values + assignment(rho) * sigma.values))
            for rho in catalog
        ),
    )


def _pauli_vector(matrix: ArrayLike) -> FloatArray:
    op = pauli_decompose(matrix)
    return np.concatenate(([op.w], op.x))


def constant_one_example() -> PointValueSet:
    """``f = 1`` on ``{|0><0|, |1><1|, I, (I + X)/2, (I + Y)/2}`` as Pauli 4-vectors ``(w, x)``."""
    half = 0.5 * np.eye(2)
    matrices = (
        np.diag([1.0, 0.0]),
        np.diag([0.0, 1.0]),
        np.eye(2),
        half + 0.5 * np.array([[0, 1], [1, 0]]),
        half + 0.5 * np.array([[0, -1j], [1j, 0]]),
    )
    return PointValueSet(points=np.array([_pauli_vector(matrix) for matrix in matrices]), values=np.ones(5))


__all__ = [
    "PERTURBATION_CATALOG",
    "TETRAHEDRON",
    "SicFrame",
    "constant_one_example",
    "duplicate_ontic_space",
    "perturb_mu",
    "sic_baseline",
    "sic_povm",
    "squared_bloch_norm",
    "state_independent_candidate",
]
