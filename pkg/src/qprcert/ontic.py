"""Finite ontic spaces and the quasiprobability representations defined over them.

An ontic space is a finite set of labelled points with strictly positive weights, so every integral
``int f dlambda`` is the weighted sum ``sum_l w_l f(l)`` and "almost everywhere" means "at every point".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Final, Protocol

import numpy as np
from scipy import linalg

from qprcert.affine import PointValueSet, convex_linearity_check
from qprcert.config import DEFAULT_TOL, current_tolerance
from qprcert.errors import InvalidOperatorError, SpaceMismatchError, UncatalogedStateError
from qprcert.pauli import (
    MAXIMALLY_MIXED,
    UNIT_EFFECT,
    ZERO_EFFECT,
    DensityOp,
    PovmElement,
    born_probability,
    mix,
    random_density,
    random_effect,
)
from qprcert.report import CheckReport
from qprcert.utils import canonical_sign, frozen_array

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from numpy.typing import ArrayLike

    from qprcert.utils import FloatArray

logger = logging.getLogger(__name__)

_AXES: Final = np.eye(3)

PROBE_STATES: Final[tuple[DensityOp, ...]] = (
    MAXIMALLY_MIXED,
    *(DensityOp(bloch=sign * axis) for axis in _AXES for sign in (1.0, -1.0)),
)
PROBE_EFFECTS: Final[tuple[PovmElement, ...]] = (
    ZERO_EFFECT,
    UNIT_EFFECT,
    *(PovmElement(m=0.5, p=sign * 0.5 * axis) for axis in _AXES for sign in (1.0, -1.0)),
)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class OnticSpace:
    labels: tuple[str, ...]
    weights: FloatArray

    def __post_init__(self) -> None:
        labels = tuple(str(label) for label in self.labels)
        if not labels:
            msg = "An ontic space must contain at least one point"
            raise InvalidOperatorError(msg)

        if len(set(labels)) != len(labels):
            msg = "The ontic space labels must be unique"
            raise InvalidOperatorError(msg)

        weights = frozen_array(self.weights, shape=(len(labels),), name="ontic weight vector")
        if np.any(weights <= 0):
            msg = f"The ontic weights must be strictly positive (min {float(weights.min())})"
            raise InvalidOperatorError(msg)

        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, size: int, *, weight: float = 1.0, prefix: str = "l") -> OnticSpace:
        return cls(labels=tuple(f"{prefix}{index}" for index in range(size)), weights=np.full(size, weight))

    @property
    def size(self) -> int:
        return len(self.labels)

    def matches(self, other: OnticSpace) -> bool:
        return self is other or (self.labels == other.labels and np.array_equal(self.weights, other.weights))

    def integrate(self, values: ArrayLike) -> float:
        return float(self.weights @ np.asarray(values, dtype=np.float64))

    def inner(self, f: ArrayLike, g: ArrayLike) -> float:
        return float(np.sum(self.weights * np.asarray(f, dtype=np.float64) * np.asarray(g, dtype=np.float64)))

    def function(self, values: ArrayLike) -> OnticFunction:
        return OnticFunction(space=self, values=values)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class OnticFunction:
    space: OnticSpace
    values: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "values",
            frozen_array(self.values, shape=(self.space.size,), name="ontic function"),
        )

    def integral(self) -> float:
        return self.space.integrate(self.values)

    def inner(self, other: OnticFunction) -> float:
        require_same_space(self.space, other.space)
        return self.space.inner(self.values, other.values)


class StateRep(Protocol):
    @property
    def space(self) -> OnticSpace: ...

    def mu(self, rho: DensityOp) -> OnticFunction: ...


class EffectRep(Protocol):
    @property
    def space(self) -> OnticSpace: ...

    def xi(self, e: PovmElement) -> OnticFunction: ...


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class AffineStateRep:
    """``mu_rho(x)(l) = x . A(l) + C(l)``; ``a`` has shape (3, n) and ``c`` shape (n,)."""

    space: OnticSpace
    a: FloatArray
    c: FloatArray

    def __post_init__(self) -> None:
        n = self.space.size
        object.__setattr__(self, "a", frozen_array(self.a, shape=(3, n), name="A coefficient array"))
        object.__setattr__(self, "c", frozen_array(self.c, shape=(n,), name="C coefficient array"))

    def mu(self, rho: DensityOp) -> OnticFunction:
        return OnticFunction(space=self.space, values=rho.bloch @ self.a + self.c)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class AffineEffectRep:
    """``xi_E(m,p)(l) = p . B(l) + m D(l) + F(l)``; ``b`` has shape (3, n)."""

    space: OnticSpace
    b: FloatArray
    d: FloatArray
    f: FloatArray

    def __post_init__(self) -> None:
        n = self.space.size
        object.__setattr__(self, "b", frozen_array(self.b, shape=(3, n), name="B coefficient array"))
        object.__setattr__(self, "d", frozen_array(self.d, shape=(n,), name="D coefficient array"))
        object.__setattr__(self, "f", frozen_array(self.f, shape=(n,), name="F coefficient array"))

    def xi(self, e: PovmElement) -> OnticFunction:
        return OnticFunction(space=self.space, values=e.p @ self.b + e.m * self.d + self.f)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class TabulatedStateRep:
    """A state representation known only on a finite catalog of states."""

    space: OnticSpace
    catalog: tuple[tuple[DensityOp, OnticFunction], ...]

    def __post_init__(self) -> None:
        catalog = tuple(self.catalog)
        for _, function in catalog:
            require_same_space(self.space, function.space)

        object.__setattr__(self, "catalog", catalog)

    @property
    def states(self) -> tuple[DensityOp, ...]:
        return tuple(rho for rho, _ in self.catalog)

    def mu(self, rho: DensityOp) -> OnticFunction:
        for state, function in self.catalog:
            if np.allclose(state.bloch, rho.bloch, rtol=0.0, atol=current_tolerance()):
                return function

        msg = f"The state with Bloch vector {rho.bloch.tolist()} is not in the catalog"
        raise UncatalogedStateError(msg)


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class TabulatedEffectRep:
    """An effect representation known only on a finite catalog of POVM elements."""

    space: OnticSpace
    catalog: tuple[tuple[PovmElement, OnticFunction], ...]

    def __post_init__(self) -> None:
        catalog = tuple(self.catalog)
        for _, function in catalog:
            require_same_space(self.space, function.space)

        object.__setattr__(self, "catalog", catalog)

    @property
    def effects(self) -> tuple[PovmElement, ...]:
        return tuple(e for e, _ in self.catalog)

    def xi(self, e: PovmElement) -> OnticFunction:
        for effect, function in self.catalog:
            if np.allclose(effect.coefficients, e.coefficients, rtol=0.0, atol=current_tolerance()):
                return function

        msg = f"The effect E(m={e.m}, p={e.p.tolist()}) is not in the catalog"
        raise UncatalogedStateError(msg)


@dataclass(slots=True, kw_only=True, frozen=True)
class StateNegativity:
    value: float
    state: DensityOp
    point: int
    label: str


@dataclass(slots=True, kw_only=True, frozen=True)
class EffectNegativity:
    value: float
    effect: PovmElement
    point: int
    label: str


def require_same_space(first: OnticSpace, second: OnticSpace) -> None:
    if not first.matches(second):
        msg = f"The ontic spaces differ ({first.size} points vs {second.size} points, or different labels/weights)"
        raise SpaceMismatchError(msg)


def mu_eval(rep: StateRep, rho: DensityOp) -> OnticFunction:
    return rep.mu(rho)


def xi_eval(rep: EffectRep, e: PovmElement) -> OnticFunction:
    return rep.xi(e)


def check_qpr3(
    srep: StateRep,
    erep: EffectRep,
    samples: Iterable[tuple[DensityOp, PovmElement]],
    *,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    require_same_space(srep.space, erep.space)
    space = srep.space
    worst = 0.0
    witness: dict[str, Any] | None = None
    for index, (rho, e) in enumerate(samples):
        integral = space.inner(srep.mu(rho).values, erep.xi(e).values)
        born = born_probability(rho, e)
        if (defect := abs(integral - born)) > worst or witness is None:
            worst = max(worst, defect)
            witness = {"index": index, "bloch": rho.bloch, "m": e.m, "p": e.p, "integral": integral, "born": born}

    report = CheckReport.from_defect("qpr3", defect=worst, tol=tol, witness=witness)
    logger.debug("QPR3 check: passed=%s worst=%g", report.passed, worst)
    return report


def check_normalization(srep: StateRep, states: Iterable[DensityOp], *, tol: float = DEFAULT_TOL) -> CheckReport:
    worst = 0.0
    witness: dict[str, Any] | None = None
    for index, rho in enumerate(states):
        total = srep.mu(rho).integral()
        if (defect := abs(total - 1.0)) > worst or witness is None:
            worst = max(worst, defect)
            witness = {"index": index, "bloch": rho.bloch, "integral": total}

    return CheckReport.from_defect("normalization", defect=worst, tol=tol, witness=witness)


def check_unit_sum(erep: EffectRep, povm: Iterable[PovmElement], *, tol: float = DEFAULT_TOL) -> CheckReport:
    total = np.zeros(erep.space.size)
    for element in povm:
        total = total + erep.xi(element).values

    gap = np.abs(total - 1.0)
    point = int(np.argmax(gap))
    witness = {"point": point, "label": erep.space.labels[point], "sum": float(total[point])}
    return CheckReport.from_defect("unit_sum", defect=float(gap[point]), tol=tol, witness=witness)


def _catalog_mixture_defect(
    points: Sequence[FloatArray],
    values: Sequence[FloatArray],
    *,
    tol: float,
) -> tuple[float, dict[str, Any] | None]:
    """Test every affine dependency among the catalog entries against their values.

    A broken dependency ``sum c_i s_i = 0, sum c_i = 0`` is split by sign into two convex decompositions
    of the same point, which is the ``left``/``right`` witness every mixture check reports.
    """
    if len(points) < 2:  # noqa: PLR2004
        return 0.0, None

    pvs = PointValueSet(points=np.array(points), values=np.array(values))
    if (report := convex_linearity_check(pvs, tol=tol)).passed or report.witness is None:
        return 0.0, None

    coefficients = np.asarray(report.witness["coefficients"], dtype=np.float64)
    positive = np.clip(coefficients, 0.0, None)
    negative = np.clip(-coefficients, 0.0, None)
    total = float(positive.sum())
    gap = (coefficients @ pvs.values) / total
    point = int(np.argmax(np.abs(gap)))
    witness = {
        "left": [[weight / total, pvs.points[i]] for i, weight in enumerate(positive) if weight > 0],
        "right": [[weight / total, pvs.points[i]] for i, weight in enumerate(negative) if weight > 0],
        "point": point,
        "defect_vector": gap,
        "coefficients": coefficients,
    }
    return float(abs(gap[point])), witness


def _random_mixture_defect[T: (DensityOp, PovmElement)](
    evaluate: Callable[[T], FloatArray],
    sample: Callable[[np.random.Generator], T],
    coordinates: Callable[[T], FloatArray],
    *,
    trials: int,
    seed: int,
) -> tuple[float, dict[str, Any] | None]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    witness: dict[str, Any] | None = None
    for _ in range(trials):
        size = int(rng.integers(2, 5))
        weights = rng.dirichlet(np.ones(size))
        components = [sample(rng) for _ in range(size)]
        target = mix(list(zip(weights.tolist(), components, strict=True)))
        gap = evaluate(target) - weights @ np.array([evaluate(component) for component in components])
        point = int(np.argmax(np.abs(gap)))
        if (defect := float(abs(gap[point]))) > worst or witness is None:
            worst = max(worst, defect)
            witness = {
                "left": [[1.0, coordinates(target)]],
                "right": [
                    [float(weight), coordinates(component)]
                    for weight, component in zip(weights, components, strict=True)
                ],
                "point": point,
                "defect_vector": gap,
            }

    return worst, witness


def check_convex_linearity(
    rep: StateRep,
    *,
    trials: int = 100,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    """Compare mu of a mixture with the mixture of the mu's.

    Tabulated reps have every affine dependency among their catalog states checked; other reps are tested
    with seeded random mixtures. The witness holds two decompositions ``left`` and ``right`` of the same state
    as ``[weight, bloch]`` pairs whose mixed values differ at ``point``.
    """
    if isinstance(rep, TabulatedStateRep):
        worst, witness = _catalog_mixture_defect(
            [rho.bloch for rho in rep.states],
            [function.values for _, function in rep.catalog],
            tol=tol,
        )
    else:
        worst, witness = _random_mixture_defect(
            lambda rho: rep.mu(rho).values,
            random_density,
            lambda rho: rho.bloch,
            trials=trials,
            seed=seed,
        )

    if witness is not None:
        witness["side"] = "state"
    report = CheckReport.from_defect("convex_linearity", defect=worst, tol=tol, witness=witness)
    logger.debug("State convex-linearity check: passed=%s worst=%g", report.passed, worst)
    return report


def check_effect_convex_linearity(
    rep: EffectRep,
    *,
    trials: int = 100,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    if isinstance(rep, TabulatedEffectRep):
        worst, witness = _catalog_mixture_defect(
            [e.coefficients for e in rep.effects],
            [function.values for _, function in rep.catalog],
            tol=tol,
        )
    else:
        worst, witness = _random_mixture_defect(
            lambda e: rep.xi(e).values,
            random_effect,
            lambda e: e.coefficients,
            trials=trials,
            seed=seed,
        )

    if witness is not None:
        witness["side"] = "effect"
    return CheckReport.from_defect("effect_convex_linearity", defect=worst, tol=tol, witness=witness)


def negativity(srep: AffineStateRep) -> StateNegativity:
    norms = np.linalg.norm(srep.a, axis=0)
    minima = srep.c - norms
    point = int(np.argmin(minima))
    if norms[point] > 0:
        bloch = -srep.a[:, point] / norms[point]
        bloch = bloch / max(1.0, float(np.linalg.norm(bloch)))
    else:
        bloch = np.zeros(3)

    return StateNegativity(
        value=float(minima[point]),
        state=DensityOp(bloch=bloch),
        point=point,
        label=srep.space.labels[point],
    )


def effect_negativity(erep: AffineEffectRep) -> EffectNegativity:
    """Minimize ``xi_E`` over the whole double cone of effects.

    The minimum of a linear function on the cone sits at an apex (``E = 0`` or ``E = I``) or on the rim
    ``m = 1/2, |p| = 1/2`` with ``p`` anti-parallel to ``B(l)``.
    """
    norms = np.linalg.norm(erep.b, axis=0)
    candidates = np.stack((erep.f, 0.5 * erep.d + erep.f - 0.5 * norms, erep.d + erep.f))
    kind, point = np.unravel_index(int(np.argmin(candidates)), candidates.shape)
    kind, point = int(kind), int(point)

    match kind:
        case 0:
            effect = ZERO_EFFECT
        case 1:
            p = -0.5 * erep.b[:, point] / norms[point] if norms[point] > 0 else np.zeros(3)
            effect = PovmElement(m=0.5, p=p / max(1.0, 2.0 * float(np.linalg.norm(p))))
        case _:
            effect = UNIT_EFFECT

    return EffectNegativity(
        value=float(candidates[kind, point]),
        effect=effect,
        point=point,
        label=erep.space.labels[point],
    )


def orthogonal_complement(erep: EffectRep, *, tol: float = DEFAULT_TOL) -> list[OnticFunction]:
    """Functions sigma with ``int sigma xi_E dlambda = 0`` for every probe effect.

    For convex-linear effect representations the probes span every ``xi_E``; an empty result means
    the ``xi`` functions span all functions on the space.
    """
    space = erep.space
    probes = np.array([space.weights * erep.xi(e).values for e in PROBE_EFFECTS])
    basis = linalg.null_space(probes, rcond=tol)
    return [OnticFunction(space=space, values=column) for column in canonical_sign(basis.T)]


__all__ = [
    "PROBE_EFFECTS",
    "PROBE_STATES",
    "AffineEffectRep",
    "AffineStateRep",
    "EffectNegativity",
    "EffectRep",
    "OnticFunction",
    "OnticSpace",
    "StateNegativity",
    "StateRep",
    "TabulatedEffectRep",
    "TabulatedStateRep",
    "check_convex_linearity",
    "check_effect_convex_linearity",
    "check_normalization",
    "check_qpr3",
    "check_unit_sum",
    "effect_negativity",
    "mu_eval",
    "negativity",
    "orthogonal_complement",
    "require_same_space",
    "xi_eval",
]
