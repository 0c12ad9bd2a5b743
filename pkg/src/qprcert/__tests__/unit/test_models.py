from __future__ import annotations

import json

import numpy as np
import pytest

from qprcert.affine import translated_linear_extend
from qprcert.counterexamples import duplicate_ontic_space, perturb_mu
from qprcert.errors import InvalidOperatorError
from qprcert.models import (
    DensityOpModel,
    EmbeddingModel,
    FrameModel,
    HermitianOpModel,
    PointValueModel,
    PovmElementModel,
    TranslatedLinearModel,
    dump_effect_rep,
    dump_state_rep,
    load_effect_rep,
    load_embedding,
    load_frame,
    load_point_values,
    load_state_rep,
)
from qprcert.ontic import AffineEffectRep, AffineStateRep, TabulatedStateRep
from qprcert.pauli import DensityOp, HermitianOp, PovmElement
from qprcert.reduction import Embedding, informationally_complete_povm


def test_affine_state_document_uses_upper_case_keys(sic_pair):
    srep, _ = sic_pair

    document = json.loads(dump_state_rep(srep))

    assert document["kind"] == "affine-state"
    assert set(document) == {"kind", "space", "A", "C"}
    assert document["space"]["labels"] == ["a0", "a1", "a2", "a3"]


def test_affine_documents_load_back(sic_pair):
    srep, erep = sic_pair

    loaded_srep = load_state_rep(dump_state_rep(srep))
    loaded_erep = load_effect_rep(dump_effect_rep(erep))

    assert isinstance(loaded_srep, AffineStateRep)
    assert isinstance(loaded_erep, AffineEffectRep)
    np.testing.assert_allclose(loaded_srep.a, srep.a)
    np.testing.assert_allclose(loaded_erep.b, erep.b)
    assert loaded_srep.space.matches(srep.space)


def test_tabulated_state_document_loads_back(sic_pair):
    srep, erep = sic_pair
    dup_srep, _, sigma = duplicate_ontic_space(srep, erep)
    perturbed = perturb_mu(dup_srep, sigma)

    loaded = load_state_rep(dump_state_rep(perturbed))

    assert isinstance(loaded, TabulatedStateRep)
    rho = DensityOp(bloch=(0.0, 0.0, -1.0))
    np.testing.assert_allclose(loaded.mu(rho).values, perturbed.mu(rho).values)


def test_missing_kind_is_rejected():
    document = {"space": {"labels": ["l0"], "weights": [1.0]}, "A": [[0.0], [0.0], [0.0]], "C": [1.0]}

    with pytest.raises(InvalidOperatorError, match="Invalid state representation document"):
        load_state_rep(json.dumps(document))


def test_truncated_document_is_rejected(sic_pair):
    srep, _ = sic_pair
    text = dump_state_rep(srep)

    with pytest.raises(InvalidOperatorError, match="validation error"):
        load_state_rep(text[: len(text) // 2])


def test_unknown_fields_are_rejected():
    document = {"points": [[0.0]], "values": [[1.0]], "extra": 1}

    with pytest.raises(InvalidOperatorError):
        load_point_values(json.dumps(document))


def test_domain_errors_surface_from_loaders():
    document = {"kind": "affine-state", "space": {"labels": ["l0"], "weights": [-1.0]}, "A": [[0], [0], [0]], "C": [1]}

    with pytest.raises(InvalidOperatorError, match="strictly positive"):
        load_state_rep(json.dumps(document))


def test_point_values_and_maps_use_named_fields():
    pvs = load_point_values(json.dumps({"points": [[0.0, 1.0], [1.0, 0.0]], "values": [[5.0], [7.0]]}))

    f = translated_linear_extend(pvs)
    document = TranslatedLinearModel.from_domain(f).model_dump(mode="json")

    assert set(document) == {"u0", "w0", "basis", "h"}
    assert PointValueModel.from_domain(pvs).model_dump(mode="json")["values"] == [[5.0], [7.0]]
    assert TranslatedLinearModel.model_validate(document).to_domain()([-1.0, 2.0]) == pytest.approx([3.0])


def test_embedding_document_uses_complex_pairs():
    emb = Embedding.coordinate(3, [0, 2], anchor=[0.0, 1j])

    document = EmbeddingModel.from_domain(emb).model_dump(mode="json", by_alias=True)
    loaded = load_embedding(json.dumps(document))

    assert document["V"][2] == [[0.0, 0.0], [1.0, 0.0]]
    assert document["alpha"] == [[0.0, 0.0], [0.0, 1.0]]
    np.testing.assert_allclose(loaded.isometry, emb.isometry)
    np.testing.assert_allclose(loaded.anchor, emb.anchor)


def test_non_orthonormal_embedding_document_is_rejected():
    document = {"V": [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}

    with pytest.raises(InvalidOperatorError, match="orthonormal"):
        load_embedding(json.dumps(document))


def test_frame_document_loads_back():
    frame = informationally_complete_povm(2, seed=4)

    loaded = load_frame(FrameModel.from_domain(frame).model_dump_json())

    assert len(loaded) == 4
    for original, element in zip(frame, loaded, strict=True):
        np.testing.assert_allclose(element.entries, original.entries)


def test_qubit_operator_documents_use_pauli_coordinates():
    op = HermitianOp(w=0.25, x=(0.5, -0.5, 0.0))
    rho = DensityOp(bloch=(0.0, 0.6, 0.8))
    e = PovmElement(m=0.5, p=(0.0, 0.0, -0.5))

    assert HermitianOpModel.from_domain(op).model_dump(mode="json") == {"w": 0.25, "x": [0.5, -0.5, 0.0]}
    assert DensityOpModel.from_domain(rho).model_dump(mode="json") == {"bloch": [0.0, 0.6, 0.8]}
    assert PovmElementModel.from_domain(e).model_dump(mode="json") == {"m": 0.5, "p": [0.0, 0.0, -0.5]}


def test_qubit_operator_documents_load_back():
    op = HermitianOpModel.model_validate_json('{"w": -1.0, "x": [0.0, 2.0, 0.0]}').to_domain()
    rho = DensityOpModel.model_validate_json('{"bloch": [0.0, 0.0, -1.0]}').to_domain()
    e = PovmElementModel.model_validate_json('{"m": 0.75, "p": [0.25, 0.0, 0.0]}').to_domain()

    assert op.eigenvalues() == pytest.approx((1.0, -3.0))
    np.testing.assert_allclose(rho.matrix(), [[0.0, 0.0], [0.0, 1.0]])
    assert e.complement().m == pytest.approx(0.25)


def test_invalid_effect_document_raises_the_domain_error():
    model = PovmElementModel.model_validate({"m": 0.1, "p": [0.5, 0.0, 0.0]})

    with pytest.raises(InvalidOperatorError, match="double cone"):
        model.to_domain()
