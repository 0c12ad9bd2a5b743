from __future__ import annotations

import numpy as np
import pytest
from hypothesis import assume, given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qprcert.affine import (
    AffineSubspace,
    PointValueSet,
    affine_dependency,
    affine_hull,
    convex_linearity_check,
    extend_to_ambient,
    linear_extension_exists,
    translated_linear_extend,
)
from qprcert.counterexamples import constant_one_example
from qprcert.errors import ExtensionImpossibleError, InvalidOperatorError, OutsideHullError

LINE = PointValueSet(points=[[0.0, 1.0], [1.0, 0.0]], values=[5.0, 7.0])


@st.composite
def integer_point_values(draw: st.DrawFn, *, extra: int) -> tuple[np.ndarray, np.ndarray]:
    dim = draw(st.integers(min_value=1, max_value=5))
    count = draw(st.integers(min_value=1, max_value=dim + extra))
    points = draw(arrays(np.int64, (count, dim), elements=st.integers(min_value=-3, max_value=3)))
    values = draw(arrays(np.int64, (count, 2), elements=st.integers(min_value=-5, max_value=5)))
    return points.astype(np.float64), values.astype(np.float64)


def test_point_value_set_reshapes_scalar_values():
    assert LINE.values.shape == (2, 1)
    assert len(LINE) == 2
    assert LINE.domain_dim == 2
    assert LINE.codomain_dim == 1


def test_point_value_set_rejects_count_mismatch():
    with pytest.raises(InvalidOperatorError, match="2 points but 3 values"):
        PointValueSet(points=[[0.0], [1.0]], values=[1.0, 2.0, 3.0])


def test_point_value_set_rejects_empty():
    with pytest.raises(InvalidOperatorError):
        PointValueSet(points=np.zeros((0, 2)), values=np.zeros((0, 1)))


def test_affine_subspace_requires_orthonormal_basis():
    with pytest.raises(InvalidOperatorError, match="orthonormal"):
        AffineSubspace(base=[0.0, 0.0], basis=[[1.0, 1.0]])


def test_affine_hull_of_a_segment_is_a_line():
    hull = affine_hull([[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]])

    assert hull.dim == 1
    assert hull.ambient_dim == 2
    assert hull.contains([-1.0, 2.0])
    assert not hull.contains([0.0, 0.0])


def test_affine_hull_of_one_point_is_the_point():
    hull = affine_hull([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])

    assert hull.dim == 0
    assert hull.contains([1.0, 2.0, 3.0])
    assert hull.residual([1.0, 2.0, 4.0]) == pytest.approx(1.0)


def test_line_example_extends_to_three():
    f = translated_linear_extend(LINE)

    assert f([-1.0, 2.0]) == pytest.approx([3.0])
    assert f([0.0, 1.0]) == pytest.approx([5.0])
    assert f([1.0, 0.0]) == pytest.approx([7.0])


def test_evaluating_off_the_hull_raises():
    f = translated_linear_extend(LINE)

    with pytest.raises(OutsideHullError, match="off the affine hull"):
        f.evaluate([0.0, 0.0])


def test_inconsistent_values_raise_with_a_dependency_witness():
    pvs = PointValueSet(points=[[0.0], [1.0], [2.0]], values=[0.0, 1.0, 5.0])

    with pytest.raises(ExtensionImpossibleError) as excinfo:
        translated_linear_extend(pvs)

    witness = excinfo.value.witness
    coefficients = np.asarray(witness["coefficients"])
    assert coefficients.sum() == pytest.approx(0.0, abs=1e-12)
    assert coefficients @ pvs.points[:, 0] == pytest.approx(0.0, abs=1e-12)
    assert abs(coefficients @ pvs.values[:, 0]) > 1.0


def test_affine_dependency_is_none_for_consistent_data():
    pvs = PointValueSet(points=[[0.0], [1.0], [2.0]], values=[1.0, 3.0, 5.0])

    assert affine_dependency(pvs) is None
    assert convex_linearity_check(pvs).passed


def test_affine_dependency_found_for_inconsistent_data():
    pvs = PointValueSet(points=[[0.0], [1.0], [2.0]], values=[1.0, 3.0, 4.0])

    witness = affine_dependency(pvs)

    assert witness is not None
    assert abs(np.asarray(witness["value_combination"])[0]) > 0.1


def test_constant_one_has_no_linear_extension():
    pvs = constant_one_example()

    linear = linear_extension_exists(pvs)

    assert not linear.exists
    assert linear.witness is not None
    coefficients = np.asarray(linear.witness["coefficients"])
    expected = np.array([1.0, 1.0, -1.0, 0.0, 0.0])
    assert np.allclose(coefficients, expected, atol=1e-9) or np.allclose(coefficients, -expected, atol=1e-9)
    np.testing.assert_allclose(coefficients @ pvs.points, np.zeros(4), atol=1e-12)
    assert abs(coefficients @ pvs.values[:, 0]) == pytest.approx(1.0)


def test_constant_one_has_a_translated_linear_extension():
    pvs = constant_one_example()

    f = translated_linear_extend(pvs)

    assert convex_linearity_check(pvs).passed
    for point in pvs.points:
        assert f(point) == pytest.approx([1.0])


def test_linear_extension_exists_through_the_origin():
    pvs = PointValueSet(points=[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], values=[[2.0], [3.0], [5.0]])

    linear = linear_extension_exists(pvs)

    assert linear.exists
    assert linear.matrix is not None
    np.testing.assert_allclose(linear.matrix, [[2.0, 3.0]], atol=1e-12)


def test_random_maps_are_recovered_from_their_samples(rng):
    for _ in range(20):
        domain = int(rng.integers(1, 9))
        codomain = int(rng.integers(1, 4))
        hull_dim = int(rng.integers(0, domain + 1))
        base = rng.normal(size=domain)
        directions = rng.normal(size=(hull_dim, domain))
        h = rng.normal(size=(codomain, domain))
        w0 = rng.normal(size=codomain)
        points = base + rng.normal(size=(hull_dim + 3, hull_dim)) @ directions
        values = w0 + (points - base) @ h.T

        f = translated_linear_extend(PointValueSet(points=points, values=values), tol=1e-8)

        queries = base + rng.normal(size=(10, hull_dim)) @ directions
        for query in queries:
            np.testing.assert_allclose(f.evaluate(query, tol=1e-8), w0 + h @ (query - base), atol=1e-8)


def test_extend_to_ambient_is_constant_off_the_hull():
    ambient = extend_to_ambient(translated_linear_extend(LINE))

    assert not ambient.unique
    assert ambient.evaluate([-1.0, 2.0]) == pytest.approx([3.0])
    normal = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert ambient.evaluate(np.array([-1.0, 2.0]) + 0.7 * normal) == pytest.approx([3.0])


def test_extend_to_ambient_is_unique_for_spanning_hulls():
    pvs = PointValueSet(points=[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], values=[1.0, 2.0, 4.0])

    ambient = extend_to_ambient(translated_linear_extend(pvs))

    assert ambient.unique
    assert ambient.evaluate([1.0, 1.0]) == pytest.approx([5.0])


@seed(5)
@settings(max_examples=200, deadline=None)
@given(
    points=arrays(
        np.float64,
        st.tuples(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=5)),
        elements=st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_subnormal=False),
    ),
    weight_seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_affine_hull_contains_convex_combinations(points, weight_seed):
    hull = affine_hull(points)
    weights = np.random.default_rng(weight_seed).dirichlet(np.ones(points.shape[0]), size=20)

    for combination in weights @ points:
        assert hull.contains(combination, tol=1e-6)


@seed(6)
@settings(max_examples=200, deadline=None)
@given(data=integer_point_values(extra=1))
def test_convex_linear_data_through_the_origin_extend_linearly(data):
    points, values = data
    pvs = PointValueSet(
        points=np.vstack((np.zeros(points.shape[1]), points)),
        values=np.vstack((np.zeros(values.shape[1]), values)),
    )
    assume(convex_linearity_check(pvs).passed)

    assert linear_extension_exists(pvs).exists


@seed(7)
@settings(max_examples=200, deadline=None)
@given(data=integer_point_values(extra=1))
def test_linear_extension_implies_convex_linearity(data):
    points, values = data
    pvs = PointValueSet(points=points, values=values)
    assume(linear_extension_exists(pvs).exists)

    assert convex_linearity_check(pvs).passed
