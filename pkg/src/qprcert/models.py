"""JSON wire formats for representations, point/value data and embeddings."""

from __future__ import annotations

from typing import TYPE_CHECKING, Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from qprcert.affine import PointValueSet, TranslatedLinearMap
from qprcert.errors import InvalidOperatorError
from qprcert.ontic import (
    AffineEffectRep,
    AffineStateRep,
    OnticFunction,
    OnticSpace,
    TabulatedEffectRep,
    TabulatedStateRep,
)
from qprcert.pauli import DensityOp, HermitianOp, PovmElement
from qprcert.reduction import Embedding, MatrixOp

if TYPE_CHECKING:
    from qprcert.utils import ComplexArray

type Vector = list[float]
type Matrix = list[list[float]]
type ComplexMatrix = list[list[tuple[float, float]]]


class _WireModel(BaseModel):
    model_config = ConfigDict(
        frozen=True,
        validate_by_name=True,
        validate_by_alias=True,
        serialize_by_alias=True,
        extra="forbid",
    )


class HermitianOpModel(_WireModel):
    w: float
    x: Vector

    def to_domain(self) -> HermitianOp:
        return HermitianOp(w=self.w, x=self.x)

    @classmethod
    def from_domain(cls, op: HermitianOp) -> HermitianOpModel:
        return cls(w=op.w, x=op.x.tolist())


class DensityOpModel(_WireModel):
    bloch: Vector

    def to_domain(self) -> DensityOp:
        return DensityOp(bloch=self.bloch)

    @classmethod
    def from_domain(cls, rho: DensityOp) -> DensityOpModel:
        return cls(bloch=rho.bloch.tolist())


class PovmElementModel(_WireModel):
    m: float
    p: Vector

    def to_domain(self) -> PovmElement:
        return PovmElement(m=self.m, p=self.p)

    @classmethod
    def from_domain(cls, e: PovmElement) -> PovmElementModel:
        return cls(m=e.m, p=e.p.tolist())


class OnticSpaceModel(_WireModel):
    labels: list[str]
    weights: Vector

    def to_domain(self) -> OnticSpace:
        return OnticSpace(labels=tuple(self.labels), weights=self.weights)

    @classmethod
    def from_domain(cls, space: OnticSpace) -> OnticSpaceModel:
        return cls(labels=list(space.labels), weights=space.weights.tolist())


class AffineStateModel(_WireModel):
    kind: Literal["affine-state"] = "affine-state"
    space: OnticSpaceModel
    a: Matrix = Field(alias="A")
    c: Vector = Field(alias="C")

    def to_domain(self) -> AffineStateRep:
        return AffineStateRep(space=self.space.to_domain(), a=self.a, c=self.c)

    @classmethod
    def from_domain(cls, rep: AffineStateRep) -> AffineStateModel:
        return cls(space=OnticSpaceModel.from_domain(rep.space), a=rep.a.tolist(), c=rep.c.tolist())


class AffineEffectModel(_WireModel):
    kind: Literal["affine-effect"] = "affine-effect"
    space: OnticSpaceModel
    b: Matrix = Field(alias="B")
    d: Vector = Field(alias="D")
    f: Vector = Field(alias="F")

    def to_domain(self) -> AffineEffectRep:
        return AffineEffectRep(space=self.space.to_domain(), b=self.b, d=self.d, f=self.f)

    @classmethod
    def from_domain(cls, rep: AffineEffectRep) -> AffineEffectModel:
        return cls(
            space=OnticSpaceModel.from_domain(rep.space),
            b=rep.b.tolist(),
            d=rep.d.tolist(),
            f=rep.f.tolist(),
        )


class StateEntryModel(DensityOpModel):
    values: Vector


class EffectEntryModel(PovmElementModel):
    values: Vector


class TabulatedStateModel(_WireModel):
    kind: Literal["tabulated-state"] = "tabulated-state"
    space: OnticSpaceModel
    catalog: list[StateEntryModel]

    def to_domain(self) -> TabulatedStateRep:
        space = self.space.to_domain()
        return TabulatedStateRep(
            space=space,
            catalog=tuple(
                (entry.to_domain(), OnticFunction(space=space, values=entry.values))
                for entry in self.catalog
            ),
        )

    @classmethod
    def from_domain(cls, rep: TabulatedStateRep) -> TabulatedStateModel:
        return cls(
            space=OnticSpaceModel.from_domain(rep.space),
            catalog=[
                StateEntryModel(bloch=rho.bloch.tolist(), values=function.values.tolist())
                for rho, function in rep.catalog
            ],
        )


class TabulatedEffectModel(_WireModel):
    kind: Literal["tabulated-effect"] = "tabulated-effect"
    space: OnticSpaceModel
    catalog: list[EffectEntryModel]

    def to_domain(self) -> TabulatedEffectRep:
        space = self.space.to_domain()
        return TabulatedEffectRep(
            space=space,
            catalog=tuple(
                (entry.to_domain(), OnticFunction(space=space, values=entry.values))
                for entry in self.catalog
            ),
        )

    @classmethod
    def from_domain(cls, rep: TabulatedEffectRep) -> TabulatedEffectModel:
        return cls(
            space=OnticSpaceModel.from_domain(rep.space),
            catalog=[
                EffectEntryModel(m=e.m, p=e.p.tolist(), values=function.values.tolist())
                for e, function in rep.catalog
            ],
        )


class PointValueModel(_WireModel):
    points: Matrix
    values: Matrix

    def to_domain(self) -> PointValueSet:
        return PointValueSet(points=self.points, values=self.values)

    @classmethod
    def from_domain(cls, pvs: PointValueSet) -> PointValueModel:
        return cls(points=pvs.points.tolist(), values=pvs.values.tolist())


class TranslatedLinearModel(_WireModel):
    u0: Vector
    w0: Vector
    basis: Matrix
    h: Matrix

    def to_domain(self) -> TranslatedLinearMap:
        return TranslatedLinearMap(base=self.u0, offset=self.w0, basis=self.basis, linear_part=self.h)

    @classmethod
    def from_domain(cls, f: TranslatedLinearMap) -> TranslatedLinearModel:
        return cls(u0=f.base.tolist(), w0=f.offset.tolist(), basis=f.basis.tolist(), h=f.linear_part.tolist())


def _complex_from_wire(matrix: ComplexMatrix | list[tuple[float, float]]) -> ComplexArray:
    pairs = np.asarray(matrix, dtype=np.float64)
    return pairs[..., 0] + 1j * pairs[..., 1]


def _complex_to_wire(matrix: ComplexArray) -> list[Any]:
    return np.stack((matrix.real, matrix.imag), axis=-1).tolist()


class EmbeddingModel(_WireModel):
    v: ComplexMatrix = Field(alias="V")
    alpha: list[tuple[float, float]] | None = None

    def to_domain(self) -> Embedding:
        anchor = None if self.alpha is None else _complex_from_wire(self.alpha)
        return Embedding(isometry=_complex_from_wire(self.v), anchor=anchor)

    @classmethod
    def from_domain(cls, emb: Embedding) -> EmbeddingModel:
        alpha = None if emb.anchor is None else _complex_to_wire(emb.anchor)
        return cls(v=_complex_to_wire(emb.isometry), alpha=alpha)


class FrameModel(_WireModel):
    """An informationally complete POVM whose frame/dual-frame representation is to be restricted."""

    kind: Literal["frame"] = "frame"
    frame: list[ComplexMatrix]

    def to_domain(self) -> tuple[MatrixOp, ...]:
        return tuple(MatrixOp(entries=_complex_from_wire(element)) for element in self.frame)

    @classmethod
    def from_domain(cls, frame: tuple[MatrixOp, ...]) -> FrameModel:
        return cls(frame=[_complex_to_wire(element.entries) for element in frame])


type StateRepModel = Annotated[AffineStateModel | TabulatedStateModel, Field(discriminator="kind")]
type EffectRepModel = Annotated[AffineEffectModel | TabulatedEffectModel, Field(discriminator="kind")]

_STATE_ADAPTER: TypeAdapter[AffineStateModel | TabulatedStateModel] = TypeAdapter(StateRepModel)
_EFFECT_ADAPTER: TypeAdapter[AffineEffectModel | TabulatedEffectModel] = TypeAdapter(EffectRepModel)


def _parse[T](adapter: TypeAdapter[T], text: str | bytes, *, what: str) -> T:
    try:
        return adapter.validate_json(text)
    except ValidationError as e:
        msg = f"Invalid {what} document: {e.error_count()} validation error(s)\n{e}"
        raise InvalidOperatorError(msg) from e


def load_state_rep(text: str | bytes) -> AffineStateRep | TabulatedStateRep:
    return _parse(_STATE_ADAPTER, text, what="state representation").to_domain()


def load_effect_rep(text: str | bytes) -> AffineEffectRep | TabulatedEffectRep:
    return _parse(_EFFECT_ADAPTER, text, what="effect representation").to_domain()


def load_point_values(text: str | bytes) -> PointValueSet:
    return _parse(TypeAdapter(PointValueModel), text, what="point/value").to_domain()


def load_embedding(text: str | bytes) -> Embedding:
    return _parse(TypeAdapter(EmbeddingModel), text, what="embedding").to_domain()


def load_frame(text: str | bytes) -> tuple[MatrixOp, ...]:
    return _parse(TypeAdapter(FrameModel), text, what="frame").to_domain()


def dump_state_rep(rep: AffineStateRep | TabulatedStateRep) -> str:
    if isinstance(rep, AffineStateRep):
        return AffineStateModel.from_domain(rep).model_dump_json(indent=2)
    return TabulatedStateModel.from_domain(rep).model_dump_json(indent=2)


def dump_effect_rep(rep: AffineEffectRep | TabulatedEffectRep) -> str:
    if isinstance(rep, AffineEffectRep):
        return AffineEffectModel.from_domain(rep).model_dump_json(indent=2)
    return TabulatedEffectModel.from_domain(rep).model_dump_json(indent=2)


__all__ = [
    "AffineEffectModel",
    "AffineStateModel",
    "DensityOpModel",
    "EffectRepModel",
    "EmbeddingModel",
    "FrameModel",
    "HermitianOpModel",
    "OnticSpaceModel",
    "PointValueModel",
    "PovmElementModel",
    "StateRepModel",
    "TabulatedEffectModel",
    "TabulatedStateModel",
    "TranslatedLinearModel",
    "dump_effect_rep",
    "dump_state_rep",
    "load_effect_rep",
    "load_embedding",
    "load_frame",
    "load_point_values",
    "load_state_rep",
]
