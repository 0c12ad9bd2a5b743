"""Lifting qubit operators into a larger Hilbert space and restricting representations back down.

Given an isometry ``V: H' -> H`` and an anchor ``|alpha>`` in ``H'``, densities lift as ``V rho V^dag`` and
effects as ``V E V^dag + <alpha|E|alpha> (I - V V^dag)``. Both lifts respect mixtures and Born
probabilities, so a representation of ``H`` restricts to one of ``H'`` over the same ontic space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Protocol

import numpy as np
from scipy import linalg

from qprcert.config import DEFAULT_TOL, current_tolerance
from qprcert.errors import InvalidOperatorError, RankDeficientFrameError
from qprcert.ontic import OnticFunction, OnticSpace, require_same_space
from qprcert.pauli import DensityOp, HermitianOp, PovmElement
from qprcert.report import CheckReport
from qprcert.utils import frozen_complex

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from numpy.typing import ArrayLike

    from qprcert.utils import ComplexArray, FloatArray

logger = logging.getLogger(__name__)

type QubitOp = DensityOp | PovmElement | HermitianOp


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class MatrixOp:
    """A Hermitian ``d x d`` operator, ``d >= 2``."""

    entries: ComplexArray

    def __post_init__(self) -> None:
        entries = frozen_complex(self.entries, name="operator")
        if entries.shape[0] < 2:  # noqa: PLR2004
            msg = f"Operators need dimension >= 2 (got {entries.shape[0]})"
            raise InvalidOperatorError(msg)

        if not np.all(np.isfinite(entries)):
            msg = "The operator must contain only finite entries"
            raise InvalidOperatorError(msg)

        scale = max(1.0, float(np.max(np.abs(entries))))
        if (asymmetry := float(np.max(np.abs(entries - entries.conj().T)))) > current_tolerance() * scale:
            msg = f"The operator is not Hermitian (max asymmetry {asymmetry})"
            raise InvalidOperatorError(msg)

        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_qubit(cls, op: QubitOp) -> MatrixOp:
        return cls(entries=op.matrix())

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def eigenvalues(self) -> FloatArray:
        return linalg.eigvalsh(self.entries)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class Embedding:
    """An isometric inclusion ``V`` of ``H'`` (dim k) into ``H`` (dim d) plus an anchor ``|alpha>`` in ``H'``."""

    isometry: ComplexArray
    anchor: ComplexArray | None = None

    def __post_init__(self) -> None:
        isometry = np.array(self.isometry, dtype=np.complex128)
        if isometry.ndim != 2 or not 2 <= isometry.shape[1] <= isometry.shape[0]:  # noqa: PLR2004
            msg = f"The isometry must be a d x k matrix with 2 <= k <= d (got shape {isometry.shape})"
            raise InvalidOperatorError(msg)

        small = isometry.shape[1]
        if (defect := float(np.max(np.abs(isometry.conj().T @ isometry - np.eye(small))))) > current_tolerance():
            msg = f"The isometry columns are not orthonormal (defect {defect})"
            raise InvalidOperatorError(msg)

        anchor = np.eye(small, dtype=np.complex128)[0] if self.anchor is None else np.array(self.anchor, np.complex128)
        if anchor.shape != (small,):
            msg = f"The anchor must be a vector of length {small} (got shape {anchor.shape})"
            raise InvalidOperatorError(msg)

        if (norm_defect := abs(float(np.linalg.norm(anchor)) - 1.0)) > current_tolerance():
            msg = f"The anchor must be a unit vector (norm defect {norm_defect})"
            raise InvalidOperatorError(msg)

        isometry.setflags(write=False)
        anchor.setflags(write=False)
        object.__setattr__(self, "isometry", isometry)
        object.__setattr__(self, "anchor", anchor)

    @classmethod
    def coordinate(cls, big_dim: int, indices: Sequence[int], *, anchor: ArrayLike | None = None) -> Embedding:
        """Embed ``H'`` as the span of the standard basis vectors ``e_i`` of ``H`` for ``i`` in ``indices``."""
        if len(set(indices)) != len(indices) or any(not 0 <= index < big_dim for index in indices):
            msg = f"Subspace indices must be distinct and lie in [0, {big_dim}) (got {list(indices)})"
            raise InvalidOperatorError(msg)

        isometry = np.eye(big_dim, dtype=np.complex128)[:, list(indices)]
        return cls(isometry=isometry, anchor=None if anchor is None else np.asarray(anchor, np.complex128))

    @property
    def big_dim(self) -> int:
        return self.isometry.shape[0]

    @property
    def small_dim(self) -> int:
        return self.isometry.shape[1]

    @property
    def complement_projector(self) -> ComplexArray:
        return np.eye(self.big_dim) - self.isometry @ self.isometry.conj().T


class OperatorStateRep(Protocol):
    @property
    def space(self) -> OnticSpace: ...

    def mu(self, rho: MatrixOp) -> OnticFunction: ...


class OperatorEffectRep(Protocol):
    @property
    def space(self) -> OnticSpace: ...

    def xi(self, e: MatrixOp) -> OnticFunction: ...


class OperatorRep(OperatorStateRep, OperatorEffectRep, Protocol):
    """Answers ``mu`` and ``xi`` queries for arbitrary d-dimensional densities and effects."""


def as_matrix_op(op: MatrixOp | QubitOp) -> MatrixOp:
    return op if isinstance(op, MatrixOp) else MatrixOp.from_qubit(op)


def operator_born(rho: MatrixOp, e: MatrixOp) -> float:
    return float(np.trace(rho.entries @ e.entries).real)


def require_density(op: MatrixOp, *, tol: float = DEFAULT_TOL) -> None:
    if (trace_defect := abs(op.trace - 1.0)) > tol:
        msg = f"A density operator must have unit trace (defect {trace_defect})"
        raise InvalidOperatorError(msg)

    if (lowest := float(op.eigenvalues()[0])) < -tol:
        msg = f"A density operator must be positive (min eigenvalue {lowest})"
        raise InvalidOperatorError(msg)


def require_effect(op: MatrixOp, *, tol: float = DEFAULT_TOL) -> None:
    spectrum = op.eigenvalues()
    if spectrum[0] < -tol or spectrum[-1] > 1.0 + tol:
        msg = f"An effect must have its spectrum in [0, 1] (got [{spectrum[0]}, {spectrum[-1]}])"
        raise InvalidOperatorError(msg)


def _require_small(op: MatrixOp, emb: Embedding) -> None:
    if op.dim != emb.small_dim:
        msg = f"The operator has dimension {op.dim} but the embedded subspace has dimension {emb.small_dim}"
        raise InvalidOperatorError(msg)


def lift_density(rho: MatrixOp | QubitOp, emb: Embedding) -> MatrixOp:
    small = as_matrix_op(rho)
    _require_small(small, emb)
    v = emb.isometry
    return MatrixOp(entries=v @ small.entries @ v.conj().T)


def lift_effect(e: MatrixOp | QubitOp, emb: Embedding) -> MatrixOp:
    small = as_matrix_op(e)
    _require_small(small, emb)
    v = emb.isometry
    anchor = emb.anchor if emb.anchor is not None else np.eye(emb.small_dim)[0]
    multiplier = complex(anchor.conj() @ small.entries @ anchor).real
    return MatrixOp(entries=v @ small.entries @ v.conj().T + multiplier * emb.complement_projector)


def lift_povm(povm: Iterable[MatrixOp | QubitOp], emb: Embedding) -> tuple[MatrixOp, ...]:
    return tuple(lift_effect(element, emb) for element in povm)


def check_povm(ops: Sequence[MatrixOp], *, tol: float = DEFAULT_TOL) -> CheckReport:
    """Check that every element is an effect and that the elements sum to the identity."""
    if not ops:
        msg = "A POVM must contain at least one element"
        raise InvalidOperatorError(msg)

    worst = 0.0
    witness: dict[str, Any] = {}
    for index, op in enumerate(ops):
        spectrum = op.eigenvalues()
        if (defect := max(-float(spectrum[0]), float(spectrum[-1]) - 1.0, 0.0)) > worst:
            worst = defect
            witness = {"element": index, "spectrum": spectrum}

    total = np.sum([op.entries for op in ops], axis=0)
    if (sum_defect := float(np.max(np.abs(total - np.eye(total.shape[0]))))) > worst:
        worst = sum_defect
        witness = {"element": None, "sum_defect": sum_defect}

    return CheckReport.from_defect("povm", defect=worst, tol=tol, witness=witness or None)


def trace_preservation_check(
    rho: MatrixOp | QubitOp,
    e: MatrixOp | QubitOp,
    emb: Embedding,
    *,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    small_rho, small_e = as_matrix_op(rho), as_matrix_op(e)
    before = operator_born(small_rho, small_e)
    after = operator_born(lift_density(small_rho, emb), lift_effect(small_e, emb))
    return CheckReport.from_defect(
        "trace_preservation",
        defect=abs(after - before),
        tol=tol,
        witness={"small": before, "lifted": after},
    )


def random_density_matrix(k: int, rng: np.random.Generator) -> MatrixOp:
    ginibre = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    product = ginibre @ ginibre.conj().T
    return MatrixOp(entries=(product + product.conj().T) / (2.0 * np.trace(product).real))


def random_effect_matrix(k: int, rng: np.random.Generator) -> MatrixOp:
    hermitian = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    _, unitary = linalg.eigh(hermitian + hermitian.conj().T)
    spectrum = rng.uniform(0.0, 1.0, size=k)
    entries = (unitary * spectrum) @ unitary.conj().T
    return MatrixOp(entries=(entries + entries.conj().T) / 2.0)


def hermitian_coordinates(op: MatrixOp) -> FloatArray:
    """Real coordinates ``r`` with ``Tr(A B) = r(A) . r(B)`` for Hermitian ``A, B``."""
    rows, cols = np.triu_indices(op.dim, k=1)
    upper = op.entries[rows, cols]
    return np.concatenate((np.diag(op.entries).real, np.sqrt(2.0) * upper.real, np.sqrt(2.0) * upper.imag))


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class FrameRepresentation:
    """``mu_rho(k) = Tr(rho F_k)`` and ``xi_E(k) = Tr(G_k E)`` over unit-weight points, one per frame element."""

    space: OnticSpace
    dim: int
    frame: FloatArray
    dual: FloatArray

    def mu(self, rho: MatrixOp | DensityOp) -> OnticFunction:
        return OnticFunction(space=self.space, values=self.frame @ hermitian_coordinates(self._operator(rho)))

    def xi(self, e: MatrixOp | PovmElement) -> OnticFunction:
        return OnticFunction(space=self.space, values=self.dual @ hermitian_coordinates(self._operator(e)))

    def _operator(self, op: MatrixOp | QubitOp) -> MatrixOp:
        matrix = as_matrix_op(op)
        if matrix.dim != self.dim:
            msg = f"The frame representation acts on dimension {self.dim}, got an operator of dimension {matrix.dim}"
            raise InvalidOperatorError(msg)

        return matrix


def frame_representation(frame: Sequence[MatrixOp], *, tol: float = DEFAULT_TOL) -> FrameRepresentation:
    """Build the frame/dual-frame representation of an informationally complete POVM.

    The dual is the canonical (pseudoinverse) dual corrected along the complement of the frame's range so
    that ``xi_I`` is identically 1 even for overcomplete frames.
    """
    if not frame:
        msg = "A frame needs at least one element"
        raise InvalidOperatorError(msg)

    dim = frame[0].dim
    if any(element.dim != dim for element in frame):
        msg = "Every frame element must have the same dimension"
        raise InvalidOperatorError(msg)

    if not (report := check_povm(frame, tol=tol)).passed:
        msg = f"The frame elements do not form a POVM (defect {report.worst_defect})"
        raise InvalidOperatorError(msg)

    analysis = np.array([hermitian_coordinates(element) for element in frame])
    if (rank := int(np.linalg.matrix_rank(analysis, tol=tol))) < dim * dim:
        msg = f"The frame spans a space of dimension {rank}, not all {dim * dim} Hermitian dimensions"
        raise RankDeficientFrameError(msg)

    canonical = np.linalg.pinv(analysis).T
    unit = hermitian_coordinates(MatrixOp(entries=np.eye(dim)))
    ones = np.ones(len(frame))
    defect = ones - canonical @ unit
    dual = canonical + np.outer(defect, unit) / dim
    logger.debug("Built a %d-element frame representation in dimension %d", len(frame), dim)
    return FrameRepresentation(
        space=OnticSpace.uniform(len(frame), prefix="k"),
        dim=dim,
        frame=analysis,
        dual=dual,
    )


def informationally_complete_povm(d: int, *, seed: int = 0) -> tuple[MatrixOp, ...]:
    """``d^2`` random rank-one projectors ``P_k``, rescaled to ``S^-1/2 P_k S^-1/2`` with ``S = sum P_k``."""
    rng = np.random.default_rng(seed)
    vectors = rng.normal(size=(d * d, d)) + 1j * rng.normal(size=(d * d, d))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    projectors = np.einsum("ki,kj->kij", vectors, vectors.conj())
    spectrum, basis = linalg.eigh(projectors.sum(axis=0))
    inverse_root = (basis / np.sqrt(spectrum)) @ basis.conj().T
    elements = inverse_root @ projectors @ inverse_root
    return tuple(MatrixOp(entries=(element + element.conj().T) / 2.0) for element in elements)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class RestrictedStateRep:
    """``mu'_rho = mu_{lift(rho)}``."""

    big: OperatorRep
    embedding: Embedding

    @property
    def space(self) -> OnticSpace:
        return self.big.space

    def mu(self, rho: MatrixOp | DensityOp) -> OnticFunction:
        return self.big.mu(lift_density(rho, self.embedding))


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class RestrictedEffectRep:
    """``xi'_E = xi_{lift(E)}``."""

    big: OperatorRep
    embedding: Embedding

    @property
    def space(self) -> OnticSpace:
        return self.big.space

    def xi(self, e: MatrixOp | PovmElement) -> OnticFunction:
        return self.big.xi(lift_effect(e, self.embedding))


def restrict_representation(big: OperatorRep, emb: Embedding) -> tuple[RestrictedStateRep, RestrictedEffectRep]:
    return RestrictedStateRep(big=big, embedding=emb), RestrictedEffectRep(big=big, embedding=emb)


def check_operator_qpr3(
    srep: OperatorStateRep,
    erep: OperatorEffectRep,
    samples: Iterable[tuple[MatrixOp, MatrixOp]],
    *,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    """``int mu_rho xi_E dlambda = Tr(rho E)`` on d-dimensional samples."""
    require_same_space(srep.space, erep.space)
    worst = 0.0
    witness: dict[str, Any] | None = None
    for index, (rho, e) in enumerate(samples):
        integral = srep.space.inner(srep.mu(rho).values, erep.xi(e).values)
        born = operator_born(rho, e)
        if (defect := abs(integral - born)) > worst or witness is None:
            worst = max(worst, defect)
            witness = {"index": index, "integral": integral, "born": born}

    return CheckReport.from_defect("qpr3", defect=worst, tol=tol, witness=witness)


__all__ = [
    "Embedding",
    "FrameRepresentation",
    "MatrixOp",
    "OperatorEffectRep",
    "OperatorRep",
    "OperatorStateRep",
    "RestrictedEffectRep",
    "RestrictedStateRep",
    "as_matrix_op",
    "check_operator_qpr3",
    "check_povm",
    "frame_representation",
    "hermitian_coordinates",
    "informationally_complete_povm",
    "lift_density",
    "lift_effect",
    "lift_povm",
    "operator_born",
    "random_density_matrix",
    "random_effect_matrix",
    "require_density",
    "require_effect",
    "restrict_representation",
    "trace_preservation_check",
]
