"""The no-go pipeline: extract coefficient functions, check the necessary conditions, emit a certificate.

Any convex-linear representation of a qubit has the form ``mu = x . A + C`` and ``xi = p . B + m D + F``.
The Born rule then forces ``sum w B_i A_j = delta_ij`` while nonnegativity forces ``|B| <= 1`` and
``|A| <= C``, which cap the overlap ``sum w B . A`` at 1 instead of 3. A nonnegative candidate therefore
always trips a frame condition or the overlap gap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING, Any, Final, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from qprcert.config import DEFAULT_TOL
from qprcert.errors import InvalidOperatorError, UncatalogedStateError
from qprcert.ontic import (
    PROBE_EFFECTS,
    PROBE_STATES,
    AffineEffectRep,
    AffineStateRep,
    EffectRep,
    OnticSpace,
    StateRep,
    TabulatedEffectRep,
    TabulatedStateRep,
    check_convex_linearity,
    check_effect_convex_linearity,
    effect_negativity,
    negativity,
    require_same_space,
)
from qprcert.pauli import UNIT_EFFECT, ZERO_EFFECT, DensityOp, PovmElement, random_bloch_ball
from qprcert.render import render_template
from qprcert.report import CheckReport
from qprcert.utils import to_jsonable

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from qprcert.utils import FloatArray

logger = logging.getLogger(__name__)

type Stage = Literal["axioms", "negativity", "frame", "bounds", "overlap"]

DEFAULT_ORDER: Final[tuple[Stage, ...]] = ("axioms", "negativity", "frame", "bounds", "overlap")
FRAME_CONDITIONS: Final[tuple[str, ...]] = ("dual_basis", "offset_orthogonality", "mean_direction", "total_mass")
REQUIRED_OVERLAP: Final[float] = 3.0
MAX_CANDIDATE_POINTS: Final[int] = 64


class CertificateKind(StrEnum):
    STATE_NEGATIVITY = "StateNegativity"
    EFFECT_NEGATIVITY = "EffectNegativity"
    AXIOM_VIOLATION = "AxiomViolation"
    FRAME_CONDITION = "FrameCondition"
    NORM_BOUND = "NormBound"
    OVERLAP_GAP = "OverlapGap"
    CONVEX_LINEARITY_VIOLATION = "ConvexLinearityViolation"
    NO_VIOLATION = "NoViolation"


class ChainComponent(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    overlap: float
    absolute: float


class ChainReport(BaseModel):
    """The inequality chain of the no-go argument evaluated on one candidate."""

    model_config = ConfigDict(frozen=True)

    conclusion: Literal["mass_conflict", "norm_conflict", "premise_failure", "dual_basis_conflict", "no_conflict"]
    mass: float
    overlap: float
    cauchy_schwarz: float
    components: list[ChainComponent]
    space_size: int
    support_size: int
    unit_component_defect: float
    max_effect_norm: float
    dual_basis_defect: float
    nonnegative: bool
    narrative: str = ""


class NoGoCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: CertificateKind
    defect: float
    witness: dict[str, Any]
    chain: ChainReport | None = None

    @field_validator("witness", mode="before")
    @classmethod
    def _jsonable_witness(cls, value: object) -> object:
        return to_jsonable(value)


class BatchSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: int
    counts: dict[str, int]
    escapes: int
    max_overlap: float | None
    certificates: list[NoGoCertificate]


@dataclass(slots=True, kw_only=True, frozen=True, eq=False)
class CoefficientExtract:
    """The nine coefficient functions read off the probe states and effects; ``a`` and ``b`` are (3, n)."""

    space: OnticSpace
    a: FloatArray
    c: FloatArray
    b: FloatArray
    d: FloatArray
    f: FloatArray
    fit_residual: float
    residual_witness: dict[str, Any] | None = None

    def state_rep(self) -> AffineStateRep:
        return AffineStateRep(space=self.space, a=self.a, c=self.c)

    def effect_rep(self) -> AffineEffectRep:
        return AffineEffectRep(space=self.space, b=self.b, d=self.d, f=self.f)


def _mixture_gap(
    side: str,
    left: list[list[Any]],
    right: list[list[Any]],
    gap: FloatArray,
) -> tuple[float, dict[str, Any]]:
    point = int(np.argmax(np.abs(gap)))
    return float(abs(gap[point])), {"side": side, "left": left, "right": right, "point": point, "defect_vector": gap}


def extract_coefficients(srep: StateRep, erep: EffectRep) -> CoefficientExtract:
    """Read ``A, C, B, D, F`` off the probe set.

    The residual is the worst failure of the two mixture identities the probes contain: ``0`` is the even
    mixture of ``+e_i`` and ``-e_i``, and the even mixture of ``E(1/2, +e_i/2)`` and ``E(1/2, -e_i/2)`` is
    the even mixture of ``I`` and ``0``.
    """
    require_same_space(srep.space, erep.space)
    centre, *axes = (srep.mu(rho).values for rho in PROBE_STATES)
    zero, unit, *halves = (erep.xi(e).values for e in PROBE_EFFECTS)
    plus, minus = np.array(axes[0::2]), np.array(axes[1::2])
    up, down = np.array(halves[0::2]), np.array(halves[1::2])

    worst = 0.0
    witness: dict[str, Any] | None = None
    for axis in range(3):
        state_left = [[1.0, PROBE_STATES[0].bloch]]
        state_right = [[0.5, PROBE_STATES[1 + 2 * axis].bloch], [0.5, PROBE_STATES[2 + 2 * axis].bloch]]
        effect_left = [[0.5, UNIT_EFFECT.coefficients], [0.5, ZERO_EFFECT.coefficients]]
        effect_right = [
            [0.5, PROBE_EFFECTS[2 + 2 * axis].coefficients],
            [0.5, PROBE_EFFECTS[3 + 2 * axis].coefficients],
        ]
        for defect, details in (
            _mixture_gap("state", state_left, state_right, centre - (plus[axis] + minus[axis]) / 2.0),
            _mixture_gap("effect", effect_left, effect_right, (unit + zero) / 2.0 - (up[axis] + down[axis]) / 2.0),
        ):
            if defect > worst:
                worst, witness = defect, details

    extract = CoefficientExtract(
        space=srep.space,
        a=(plus - minus) / 2.0,
        c=centre,
        b=up - down,
        d=unit - zero,
        f=zero,
        fit_residual=worst,
        residual_witness=witness,
    )
    logger.debug("Extracted coefficients on %d points (residual %g)", srep.space.size, worst)
    return extract


def check_axioms(extract: CoefficientExtract, *, tol: float = DEFAULT_TOL) -> CheckReport:
    """``F = 0`` (zero effect) and ``D = 1`` (unit effect), checked in that order."""
    labels = extract.space.labels
    f_point = int(np.argmax(np.abs(extract.f)))
    d_point = int(np.argmax(np.abs(extract.d - 1.0)))
    f_defect = float(abs(extract.f[f_point]))
    d_defect = float(abs(extract.d[d_point] - 1.0))
    if f_defect > tol or d_defect <= f_defect:
        witness = {"coefficient": "F", "point": f_point, "label": labels[f_point], "value": extract.f[f_point]}
        return CheckReport.from_defect("axioms", defect=f_defect, tol=tol, witness=witness)

    witness = {"coefficient": "D", "point": d_point, "label": labels[d_point], "value": extract.d[d_point]}
    return CheckReport.from_defect("axioms", defect=d_defect, tol=tol, witness=witness)


def frame_defects(extract: CoefficientExtract) -> dict[str, float]:
    w = extract.space.weights
    return {
        "dual_basis": float(np.max(np.abs((extract.b * w) @ extract.a.T - np.eye(3)))),
        "offset_orthogonality": float(np.max(np.abs((extract.b * w) @ extract.c))),
        "mean_direction": float(np.max(np.abs(extract.a @ w))),
        "total_mass": float(abs(w @ extract.c - 1.0)),
    }


def check_frame_conditions(extract: CoefficientExtract, *, tol: float = DEFAULT_TOL) -> CheckReport:
    """The Born-rule identities on the coefficients.

    ``sum w B_i A_j = delta_ij``, ``sum w B_i C = 0``, ``sum w A_i = 0`` and ``sum w C = 1``; the first
    failing one, in that order, is named in the witness.
    """
    defects = frame_defects(extract)
    failing = next((name for name in FRAME_CONDITIONS if defects[name] > tol), None)
    witness: dict[str, Any] = {
        "condition": failing,
        "defects": defects,
        "overlap_matrix": (extract.b * extract.space.weights) @ extract.a.T,
    }
    defect = defects[failing] if failing is not None else max(defects.values())
    return CheckReport.from_defect("frame_conditions", defect=defect, tol=tol, witness=witness)


def check_norm_bounds(extract: CoefficientExtract, *, tol: float = DEFAULT_TOL) -> CheckReport:
    """``|B| <= 1`` then ``|A| <= C`` at every point."""
    labels = extract.space.labels
    b_excess = np.linalg.norm(extract.b, axis=0) - 1.0
    a_norms = np.linalg.norm(extract.a, axis=0)
    a_excess = a_norms - extract.c
    b_point = int(np.argmax(b_excess))
    a_point = int(np.argmax(a_excess))
    if b_excess[b_point] > tol or a_excess[a_point] <= b_excess[b_point]:
        witness = {"bound": "effect_norm", "point": b_point, "label": labels[b_point], "norm": b_excess[b_point] + 1}
        defect = max(float(b_excess[b_point]), 0.0)
        return CheckReport.from_defect("norm_bounds", defect=defect, tol=tol, witness=witness)

    bloch = -extract.a[:, a_point] / a_norms[a_point] if a_norms[a_point] > 0 else np.zeros(3)
    witness = {
        "bound": "state_norm",
        "point": a_point,
        "label": labels[a_point],
        "norm": a_norms[a_point],
        "c": extract.c[a_point],
        "bloch": bloch,
    }
    defect = max(float(a_excess[a_point]), 0.0)
    return CheckReport.from_defect("norm_bounds", defect=defect, tol=tol, witness=witness)


def overlap_score(extract: CoefficientExtract) -> float:
    """``T = sum_l w sum_i B_i A_i``; the Born rule needs 3, nonnegativity allows at most 1."""
    return float(extract.space.weights @ np.sum(extract.b * extract.a, axis=0))


def contradiction_chain_report(extract: CoefficientExtract, *, tol: float = DEFAULT_TOL) -> ChainReport:
    w = extract.space.weights
    a_norms = np.linalg.norm(extract.a, axis=0)
    b_norms = np.linalg.norm(extract.b, axis=0)
    support = extract.c > tol
    mass = float(w @ extract.c)
    nonnegative = (
        negativity(extract.state_rep()).value >= -tol and effect_negativity(extract.effect_rep()).value >= -tol
    )
    unit_component_defect = float(np.max(np.abs(np.abs(extract.b[:, support]) - 1.0), initial=0.0))
    dual_basis_defect = frame_defects(extract)["dual_basis"]

    if abs(mass) <= tol:
        conclusion = "mass_conflict"
    elif support.any() and unit_component_defect <= tol:
        conclusion = "norm_conflict"
    elif not nonnegative:
        conclusion = "premise_failure"
    elif dual_basis_defect > tol:
        conclusion = "dual_basis_conflict"
    else:
        conclusion = "no_conflict"

    fields: dict[str, Any] = {
        "conclusion": conclusion,
        "mass": mass,
        "overlap": overlap_score(extract),
        "cauchy_schwarz": float(w @ (a_norms * b_norms)),
        "components": [
            {
                "index": index + 1,
                "overlap": float(abs(w @ (extract.b[index] * extract.a[index]))),
                "absolute": float(w @ np.abs(extract.b[index] * extract.a[index])),
            }
            for index in range(3)
        ],
        "space_size": extract.space.size,
        "support_size": int(support.sum()),
        "unit_component_defect": unit_component_defect,
        "max_effect_norm": float(np.max(b_norms[support], initial=0.0)),
        "dual_basis_defect": dual_basis_defect,
        "nonnegative": bool(nonnegative),
    }
    return ChainReport(**fields, narrative=render_template("chain.txt", **fields))


def _certificate(kind: CertificateKind, report: CheckReport) -> NoGoCertificate:
    return NoGoCertificate(kind=kind, defect=report.worst_defect, witness=report.witness or {})


def _run_stage(stage: Stage, extract: CoefficientExtract, *, tol: float) -> NoGoCertificate | None:
    match stage:
        case "axioms":
            if not (report := check_axioms(extract, tol=tol)).passed:
                return _certificate(CertificateKind.AXIOM_VIOLATION, report)
        case "negativity":
            if (state := negativity(extract.state_rep())).value < -tol:
                return NoGoCertificate(
                    kind=CertificateKind.STATE_NEGATIVITY,
                    defect=-state.value,
                    witness={"point": state.point, "label": state.label, "bloch": state.state.bloch},
                )
            if (effect := effect_negativity(extract.effect_rep())).value < -tol:
                return NoGoCertificate(
                    kind=CertificateKind.EFFECT_NEGATIVITY,
                    defect=-effect.value,
                    witness={"point": effect.point, "label": effect.label, "m": effect.effect.m, "p": effect.effect.p},
                )
        case "frame":
            if not (report := check_frame_conditions(extract, tol=tol)).passed:
                return _certificate(CertificateKind.FRAME_CONDITION, report)
        case "bounds":
            if not (report := check_norm_bounds(extract, tol=tol)).passed:
                return _certificate(CertificateKind.NORM_BOUND, report)
        case "overlap":
            overlap = overlap_score(extract)
            if (gap := abs(overlap - REQUIRED_OVERLAP)) > tol:
                return NoGoCertificate(
                    kind=CertificateKind.OVERLAP_GAP,
                    defect=gap,
                    witness={"overlap": overlap, "required": REQUIRED_OVERLAP},
                )

    return None


def _certify(
    srep: StateRep,
    erep: EffectRep,
    *,
    tol: float,
    order: Sequence[Stage],
    chain: bool,
) -> tuple[NoGoCertificate, CoefficientExtract | None]:
    require_same_space(srep.space, erep.space)
    if unknown := sorted(set(order) - set(DEFAULT_ORDER)):
        msg = f"Unknown certification stages: {', '.join(unknown)}"
        raise InvalidOperatorError(msg)

    reports = []
    if isinstance(srep, TabulatedStateRep):
        reports.append(check_convex_linearity(srep, tol=tol))
    if isinstance(erep, TabulatedEffectRep):
        reports.append(check_effect_convex_linearity(erep, tol=tol))
    if failed := next((report for report in reports if not report.passed), None):
        return _certificate(CertificateKind.CONVEX_LINEARITY_VIOLATION, failed), None

    extract = extract_coefficients(srep, erep)
    if extract.fit_residual > tol:
        certificate = NoGoCertificate(
            kind=CertificateKind.CONVEX_LINEARITY_VIOLATION,
            defect=extract.fit_residual,
            witness=extract.residual_witness or {},
        )
        return certificate, extract

    certificate = next(
        (found for stage in order if (found := _run_stage(stage, extract, tol=tol)) is not None),
        NoGoCertificate(kind=CertificateKind.NO_VIOLATION, defect=0.0, witness={}),
    )
    if chain:
        certificate = certificate.model_copy(update={"chain": contradiction_chain_report(extract, tol=tol)})

    logger.debug("Certificate %s (defect %g)", certificate.kind, certificate.defect)
    return certificate, extract


def certify(
    srep: StateRep,
    erep: EffectRep,
    *,
    tol: float = DEFAULT_TOL,
    order: Sequence[Stage] = DEFAULT_ORDER,
    chain: bool = False,
) -> NoGoCertificate:
    """Return the first violated necessary condition.

    Tabulated reps are first checked for convex-linearity, then the coefficients are extracted and the
    stages run in ``order``. ``NoViolation`` means every check passed, which no nonnegative candidate can
    achieve.
    """
    certificate, _ = _certify(srep, erep, tol=tol, order=order, chain=chain)
    return certificate


def _mixture_value(terms: list[list[Any]], evaluate: Callable[[FloatArray], FloatArray], point: int) -> float:
    return sum(float(weight) * float(evaluate(np.asarray(coordinates))[point]) for weight, coordinates in terms)


def _state_values(srep: StateRep, erep: EffectRep, rho: DensityOp) -> FloatArray:
    """``mu_rho`` from ``srep``, or from the affine model fitted on the axis states when a catalog lacks ``rho``."""
    try:
        return srep.mu(rho).values
    except UncatalogedStateError:
        return extract_coefficients(srep, erep).state_rep().mu(rho).values


def _effect_values(srep: StateRep, erep: EffectRep, e: PovmElement) -> FloatArray:
    try:
        return erep.xi(e).values
    except UncatalogedStateError:
        return extract_coefficients(srep, erep).effect_rep().xi(e).values


def recheck(
    certificate: NoGoCertificate,
    srep: StateRep,
    erep: EffectRep,
    *,
    tol: float = DEFAULT_TOL,
) -> float:
    """Recompute a certificate's defect from the raw representations and its witness alone.

    A negativity witness outside a tabulated catalog is evaluated on the affine model fitted on the
    axis states, which is the only convex-linear extension of the catalog.
    """
    witness = certificate.witness
    match certificate.kind:
        case CertificateKind.STATE_NEGATIVITY:
            rho = DensityOp(bloch=witness["bloch"])
            return -float(_state_values(srep, erep, rho)[witness["point"]])
        case CertificateKind.EFFECT_NEGATIVITY:
            effect = PovmElement(m=witness["m"], p=witness["p"])
            return -float(_effect_values(srep, erep, effect)[witness["point"]])
        case CertificateKind.CONVEX_LINEARITY_VIOLATION:
            def evaluate(coordinates: FloatArray) -> FloatArray:
                if witness["side"] == "state":
                    return srep.mu(DensityOp(bloch=coordinates)).values
                return erep.xi(PovmElement(m=coordinates[0], p=coordinates[1:])).values

            point = witness["point"]
            left = _mixture_value(witness["left"], evaluate, point)
            return abs(left - _mixture_value(witness["right"], evaluate, point))
        case CertificateKind.NO_VIOLATION:
            return 0.0

    extract = extract_coefficients(srep, erep)
    match certificate.kind:
        case CertificateKind.AXIOM_VIOLATION:
            point = witness["point"]
            if witness["coefficient"] == "F":
                return float(abs(extract.f[point]))
            return float(abs(extract.d[point] - 1.0))
        case CertificateKind.FRAME_CONDITION:
            return frame_defects(extract)[witness["condition"]]
        case CertificateKind.NORM_BOUND:
            return check_norm_bounds(extract, tol=tol).worst_defect
        case _:
            return abs(overlap_score(extract) - REQUIRED_OVERLAP)


def random_nonnegative_candidate(rng: np.random.Generator) -> tuple[AffineStateRep, AffineEffectRep]:
    """A representation that is nonnegative by construction.

    ``C >= 0`` with ``sum w C = 1``, ``A`` in the ball of radius ``C``, ``B`` in the unit ball, ``D = 1`` and
    ``F = 0`` over 1 to 64 points with random positive weights.
    """
    size = int(rng.integers(1, MAX_CANDIDATE_POINTS + 1))
    weights = rng.uniform(0.1, 2.0, size=size)
    c = rng.exponential(size=size)
    c /= weights @ c
    a = np.column_stack([random_bloch_ball(rng, radius=float(radius)) for radius in c])
    b = np.column_stack([random_bloch_ball(rng) for _ in range(size)])
    space = OnticSpace(labels=tuple(f"l{index}" for index in range(size)), weights=weights)
    return (
        AffineStateRep(space=space, a=a, c=c),
        AffineEffectRep(space=space, b=b, d=np.ones(size), f=np.zeros(size)),
    )


def certify_batch(
    candidates: Iterable[tuple[StateRep, EffectRep]],
    *,
    tol: float = DEFAULT_TOL,
    order: Sequence[Stage] = DEFAULT_ORDER,
) -> BatchSummary:
    """Certify candidates in order and tally the certificate kinds; escapes count ``NoViolation`` outcomes."""
    certificates: list[NoGoCertificate] = []
    counts = dict.fromkeys((kind.value for kind in CertificateKind), 0)
    max_overlap: float | None = None
    for index, (srep, erep) in enumerate(candidates):
        certificate, extract = _certify(srep, erep, tol=tol, order=order, chain=False)
        certificates.append(certificate)
        counts[certificate.kind.value] += 1
        if extract is not None:
            overlap = overlap_score(extract)
            max_overlap = overlap if max_overlap is None else max(max_overlap, overlap)
        if index % 1000 == 999:  # noqa: PLR2004
            logger.debug("Certified %d candidates", index + 1)

    return BatchSummary(
        trials=len(certificates),
        counts=counts,
        escapes=counts[CertificateKind.NO_VIOLATION.value],
        max_overlap=max_overlap,
        certificates=certificates,
    )


def nonnegative_battery(
    trials: int,
    *,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    order: Sequence[Stage] = DEFAULT_ORDER,
) -> BatchSummary:
    rng = np.random.default_rng(seed)
    return certify_batch((random_nonnegative_candidate(rng) for _ in range(trials)), tol=tol, order=order)


__all__ = [
    "DEFAULT_ORDER",
    "FRAME_CONDITIONS",
    "REQUIRED_OVERLAP",
    "BatchSummary",
    "CertificateKind",
    "ChainComponent",
    "ChainReport",
    "CoefficientExtract",
    "NoGoCertificate",
    "Stage",
    "certify",
    "certify_batch",
    "check_axioms",
    "check_frame_conditions",
    "check_norm_bounds",
    "contradiction_chain_report",
    "extract_coefficients",
    "frame_defects",
    "nonnegative_battery",
    "overlap_score",
    "random_nonnegative_candidate",
    "recheck",
]
