from __future__ import annotations

import numpy as np
import pytest

from qprcert.ontic import check_qpr3
from qprcert.pauli import random_density, random_effect
from qprcert.reduction import (
    Embedding,
    MatrixOp,
    check_povm,
    frame_representation,
    informationally_complete_povm,
    lift_povm,
    random_density_matrix,
    random_effect_matrix,
    restrict_representation,
    trace_preservation_check,
)


def random_embedding(d: int, rng: np.random.Generator) -> Embedding:
    k = int(rng.integers(2, d + 1))
    basis, _ = np.linalg.qr(rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k)))
    anchor = rng.normal(size=k) + 1j * rng.normal(size=k)
    return Embedding(isometry=basis, anchor=anchor / np.linalg.norm(anchor))


@pytest.mark.integration
@pytest.mark.parametrize("d", [3, 4, 5])
def test_lifts_preserve_born_probabilities(d):
    rng = np.random.default_rng(d)
    worst = 0.0
    for _ in range(500):
        emb = random_embedding(d, rng)
        k = emb.small_dim
        report = trace_preservation_check(random_density_matrix(k, rng), random_effect_matrix(k, rng), emb)
        worst = max(worst, report.worst_defect)

    assert worst <= 1e-12


@pytest.mark.integration
@pytest.mark.parametrize("d", [3, 4, 5])
def test_lifted_povms_sum_to_identity(d):
    rng = np.random.default_rng(10 + d)
    for _ in range(50):
        emb = random_embedding(d, rng)
        effect = random_effect_matrix(emb.small_dim, rng)
        complement = MatrixOp(entries=np.eye(emb.small_dim) - effect.entries)
        assert check_povm(lift_povm((effect, complement), emb), tol=1e-12).passed


@pytest.mark.integration
def test_frame_rep_restricted_to_a_qubit_passes_qpr3():
    rng = np.random.default_rng(3)
    big = frame_representation(informationally_complete_povm(3, seed=3))
    srep, erep = restrict_representation(big, Embedding.coordinate(3, [0, 1]))
    samples = [(random_density(rng), random_effect(rng)) for _ in range(500)]

    assert check_qpr3(srep, erep, samples, tol=1e-9).passed
