"""Command-line entry point: certify, extend, reduce, counterexample and negativity."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final

import numpy as np

from qprcert.affine import (
    PointValueSet,
    convex_linearity_check,
    linear_extension_exists,
    translated_linear_extend,
)
from qprcert.certifier import (
    certify,
    extract_coefficients,
    nonnegative_battery,
)
from qprcert.config import DEFAULT_TOL, OUTPUT_FORMATS, RunConfig, tolerance_scope
from qprcert.counterexamples import (
    constant_one_example,
    duplicate_ontic_space,
    perturb_mu,
    sic_baseline,
    sic_povm,
    state_independent_candidate,
)
from qprcert.errors import ExtensionImpossibleError, InvalidOperatorError, QprError
from qprcert.models import (
    PointValueModel,
    TranslatedLinearModel,
    dump_effect_rep,
    dump_state_rep,
    load_effect_rep,
    load_embedding,
    load_frame,
    load_point_values,
    load_state_rep,
)
from qprcert.ontic import (
    PROBE_EFFECTS,
    AffineEffectRep,
    AffineStateRep,
    TabulatedEffectRep,
    TabulatedStateRep,
    check_convex_linearity,
    check_normalization,
    check_qpr3,
    check_unit_sum,
    effect_negativity,
    negativity,
    orthogonal_complement,
)
from qprcert.pauli import random_density, random_effect
from qprcert.reduction import (
    Embedding,
    MatrixOp,
    check_operator_qpr3,
    check_povm,
    frame_representation,
    informationally_complete_povm,
    lift_povm,
    random_density_matrix,
    random_effect_matrix,
    restrict_representation,
    trace_preservation_check,
)
from qprcert.render import render_table
from qprcert.utils import to_jsonable

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from qprcert.report import CheckReport

logger = logging.getLogger(__name__)

EXIT_OK: Final[int] = 0
EXIT_INVALID: Final[int] = 2
EXIT_IMPOSSIBLE: Final[int] = 3

COUNTEREXAMPLES: Final[tuple[str, ...]] = ("duplication", "constant-one", "sic")
LINE_EXAMPLE: Final = PointValueSet(points=[[0.0, 1.0], [1.0, 0.0]], values=[5.0, 7.0])

type StateRepT = AffineStateRep | TabulatedStateRep
type EffectRepT = AffineEffectRep | TabulatedEffectRep


def _emit(payload: object, config: RunConfig, *, title: str) -> None:
    if config.output_format == "table":
        sys.stdout.write(render_table(payload, title=title) + "\n")
    else:
        sys.stdout.write(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")


def _write(config: RunConfig, name: str, text: str) -> None:
    if config.out_dir is None:
        return

    config.out_dir.mkdir(parents=True, exist_ok=True)
    (config.out_dir / name).write_text(text if text.endswith("\n") else f"{text}\n", encoding="utf-8")
    logger.debug("Wrote %s", config.out_dir / name)


def _reports(*reports: CheckReport) -> dict[str, Any]:
    return {report.name: report.model_dump(mode="json") for report in reports}


def _load_pair(args: argparse.Namespace) -> tuple[StateRepT, EffectRepT]:
    if args.state is None or args.effect is None:
        msg = "Both --state and --effect are required unless a demo is selected"
        raise InvalidOperatorError(msg)

    return (
        load_state_rep(Path(args.state).read_bytes()),
        load_effect_rep(Path(args.effect).read_bytes()),
    )


def _demo_pair(name: str) -> tuple[StateRepT, EffectRepT]:
    match name:
        case "sic":
            return sic_baseline()
        case "nonnegative":
            return state_independent_candidate()
        case _:
            srep, erep = sic_baseline()
            dup_srep, dup_erep, sigma = duplicate_ontic_space(srep, erep)
            return perturb_mu(dup_srep, sigma), dup_erep


def cmd_certify(args: argparse.Namespace, config: RunConfig) -> int:
    if args.random_nonnegative:
        summary = nonnegative_battery(config.trials, seed=config.seed, tol=config.tolerance)
        payload = summary.model_dump(mode="json")
        _write(config, "battery.json", json.dumps(payload, indent=2, sort_keys=True))
        _emit(payload, config, title="nonnegative battery")
        return EXIT_OK

    srep, erep = _demo_pair(args.demo) if args.demo else _load_pair(args)
    certificate = certify(srep, erep, tol=config.tolerance, chain=args.chain)
    payload = certificate.model_dump(mode="json")
    _write(config, "certificate.json", json.dumps(payload, indent=2, sort_keys=True))
    _emit(payload, config, title="certificate")
    return EXIT_OK


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as e:
        msg = f"Expected a comma-separated list of numbers (got {text!r})"
        raise InvalidOperatorError(msg) from e


def cmd_extend(args: argparse.Namespace, config: RunConfig) -> int:
    match args.demo:
        case "line":
            pvs = LINE_EXAMPLE
        case "constant-one":
            pvs = constant_one_example()
        case _ if args.input is not None:
            pvs = load_point_values(Path(args.input).read_bytes())
        case _:
            msg = "Give a point/value file or --demo"
            raise InvalidOperatorError(msg)

    tol = config.tolerance
    linear = linear_extension_exists(pvs, tol=tol)
    linear_payload = {"exists": linear.exists, "residual": linear.residual, "witness": linear.witness}
    try:
        f = translated_linear_extend(pvs, tol=tol)
    except ExtensionImpossibleError as e:
        _emit({"error": str(e), "witness": e.witness, "linear_extension": linear_payload}, config, title="extend")
        return EXIT_IMPOSSIBLE

    map_payload = TranslatedLinearModel.from_domain(f).model_dump(mode="json")
    payload: dict[str, Any] = {
        "input": PointValueModel.from_domain(pvs).model_dump(mode="json"),
        "map": map_payload,
        "convex_linearity": convex_linearity_check(pvs, tol=tol).model_dump(mode="json"),
        "linear_extension": linear_payload,
        "evaluations": [{"point": query, "value": f.evaluate(_parse_vector(query), tol=tol)} for query in args.query],
    }
    _write(config, "map.json", json.dumps(map_payload, indent=2, sort_keys=True))
    _emit(payload, config, title="extend")
    if args.require_linear and not linear.exists:
        return EXIT_IMPOSSIBLE

    return EXIT_OK


def _parse_subspace(text: str) -> list[int]:
    indices = []
    for token in text.split(","):
        if not token.startswith("e") or not token[1:].isdigit() or int(token[1:]) < 1:
            msg = f"Subspace vectors are written e1, e2, ... (got {token!r})"
            raise InvalidOperatorError(msg)
        indices.append(int(token[1:]) - 1)

    return indices


def cmd_reduce(args: argparse.Namespace, config: RunConfig) -> int:
    tol = config.tolerance
    frame = load_frame(Path(args.frame_file).read_bytes()) if args.frame_file else None
    frame = frame or informationally_complete_povm(args.frame, seed=config.seed)
    big = frame_representation(frame, tol=tol)
    if args.embedding:
        emb = load_embedding(Path(args.embedding).read_bytes())
    else:
        emb = Embedding.coordinate(big.dim, _parse_subspace(args.subspace))

    if emb.big_dim != big.dim:
        msg = f"The embedding targets dimension {emb.big_dim} but the frame acts on dimension {big.dim}"
        raise InvalidOperatorError(msg)

    rng = np.random.default_rng(config.seed)
    k, trials = emb.small_dim, max(config.trials, 1)
    small_samples = [(random_density_matrix(k, rng), random_effect_matrix(k, rng)) for _ in range(trials)]
    big_samples = [(random_density_matrix(big.dim, rng), random_effect_matrix(big.dim, rng)) for _ in range(trials)]
    srep, erep = restrict_representation(big, emb)

    trace = max(
        (trace_preservation_check(rho, e, emb, tol=tol) for rho, e in small_samples),
        key=lambda report: report.worst_defect,
    )
    effect = small_samples[0][1]
    complement = MatrixOp(entries=np.eye(k) - effect.entries)
    reports = [
        check_operator_qpr3(big, big, big_samples, tol=tol).model_copy(update={"name": "big_qpr3"}),
        check_operator_qpr3(srep, erep, small_samples, tol=tol).model_copy(update={"name": "restricted_qpr3"}),
        trace,
        check_povm(lift_povm((effect, complement), emb), tol=tol).model_copy(update={"name": "lifted_povm"}),
    ]
    payload: dict[str, Any] = {"big_dim": big.dim, "small_dim": k, "checks": _reports(*reports)}
    if k == big.dim:
        payload["identity_deviation"] = max(
            max(
                float(np.max(np.abs(srep.mu(rho).values - big.mu(rho).values))),
                float(np.max(np.abs(erep.xi(e).values - big.xi(e).values))),
            )
            for rho, e in small_samples
        )

    if k == 2:  # noqa: PLR2004
        extract = extract_coefficients(srep, erep)
        _write(config, "restricted_state.json", dump_state_rep(extract.state_rep()))
        _write(config, "restricted_effect.json", dump_effect_rep(extract.effect_rep()))
        payload["fit_residual"] = extract.fit_residual

    _emit(payload, config, title="reduce")
    return EXIT_OK


def _duplication_report(config: RunConfig) -> dict[str, Any]:
    tol = config.tolerance
    srep, erep = sic_baseline()
    dup_srep, dup_erep, sigma = duplicate_ontic_space(srep, erep)
    perturbed = perturb_mu(dup_srep, sigma)
    rng = np.random.default_rng(config.seed)
    effects = [random_effect(rng) for _ in range(max(config.trials, 1))]
    samples = [(rho, e) for rho in perturbed.states for e in (*PROBE_EFFECTS, *effects)]
    orthogonality = max(abs(sigma.inner(dup_erep.xi(e))) for e in effects)
    _write(config, "duplication_state.json", dump_state_rep(perturbed))
    _write(config, "duplication_effect.json", dump_effect_rep(dup_erep))
    return {
        "checks": _reports(
            check_normalization(perturbed, perturbed.states, tol=tol),
            check_unit_sum(dup_erep, sic_povm(), tol=tol),
            check_qpr3(perturbed, dup_erep, samples, tol=tol),
            check_convex_linearity(perturbed, tol=tol),
        ),
        "expected_failures": ["convex_linearity"],
        "sigma_orthogonality": orthogonality,
        "complement_dimension": len(orthogonal_complement(dup_erep, tol=tol)),
    }


def _sic_report(config: RunConfig) -> dict[str, Any]:
    tol = config.tolerance
    srep, erep = sic_baseline()
    rng = np.random.default_rng(config.seed)
    samples = [(random_density(rng), random_effect(rng)) for _ in range(max(config.trials, 1))]
    state = negativity(srep)
    effect = effect_negativity(erep)
    _write(config, "sic_state.json", dump_state_rep(srep))
    _write(config, "sic_effect.json", dump_effect_rep(erep))
    return {
        "checks": _reports(
            check_normalization(srep, [rho for rho, _ in samples], tol=tol),
            check_unit_sum(erep, sic_povm(), tol=tol),
            check_qpr3(srep, erep, samples, tol=tol),
        ),
        "nonnegativity": {
            "pass": state.value >= -tol and effect.value >= -tol,
            "state_min": state.value,
            "state_witness": state.state.bloch,
            "effect_min": effect.value,
        },
        "expected_failures": ["nonnegativity"],
    }


def _constant_one_report(config: RunConfig) -> dict[str, Any]:
    tol = config.tolerance
    pvs = constant_one_example()
    f = translated_linear_extend(pvs, tol=tol)
    linear = linear_extension_exists(pvs, tol=tol)
    _write(config, "constant_one.json", PointValueModel.from_domain(pvs).model_dump_json(indent=2))
    return {
        "checks": _reports(convex_linearity_check(pvs, tol=tol)),
        "translated_linear": TranslatedLinearModel.from_domain(f).model_dump(mode="json"),
        "linear_extension": {"exists": linear.exists, "residual": linear.residual, "witness": linear.witness},
        "expected_failures": ["linear_extension"],
    }


COUNTEREXAMPLE_REPORTS: Final[dict[str, Callable[[RunConfig], dict[str, Any]]]] = {
    "duplication": _duplication_report,
    "constant-one": _constant_one_report,
    "sic": _sic_report,
}


def cmd_counterexample(args: argparse.Namespace, config: RunConfig) -> int:
    payload = {"fixture": args.name, **COUNTEREXAMPLE_REPORTS[args.name](config)}
    _emit(payload, config, title=f"counterexample {args.name}")
    return EXIT_OK


def _catalog_minimum(rep: TabulatedStateRep | TabulatedEffectRep) -> dict[str, Any]:
    values = np.array([function.values for _, function in rep.catalog])
    entry, point = np.unravel_index(int(np.argmin(values)), values.shape)
    return {"min": float(values[entry, point]), "entry": int(entry), "label": rep.space.labels[int(point)]}


def cmd_negativity(args: argparse.Namespace, config: RunConfig) -> int:
    srep, erep = _demo_pair(args.demo) if args.demo else _load_pair(args)
    if isinstance(srep, AffineStateRep):
        state = negativity(srep)
        state_payload = {"min": state.value, "label": state.label, "bloch": state.state.bloch}
    else:
        state_payload = _catalog_minimum(srep)

    if isinstance(erep, AffineEffectRep):
        effect = effect_negativity(erep)
        effect_payload = {"min": effect.value, "label": effect.label, "m": effect.effect.m, "p": effect.effect.p}
    else:
        effect_payload = _catalog_minimum(erep)

    payload = {
        "state": state_payload,
        "effect": effect_payload,
        "nonnegative": bool(state_payload["min"] >= -config.tolerance and effect_payload["min"] >= -config.tolerance),
    }
    _emit(payload, config, title="negativity")
    return EXIT_OK


def _common_parser(*, suppress: bool) -> argparse.ArgumentParser:
    """Flags accepted both before and after the subcommand name."""

    def default(value: object) -> object:
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=default(DEFAULT_TOL), help="Numerical tolerance for every check")
    common.add_argument("--seed", type=int, default=default(0), help="Seed for every random sample")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=default("json"), dest="output_format")
    common.add_argument("--out", type=Path, default=default(None), help="Directory for emitted JSON files")
    common.add_argument("--trials", type=int, default=default(1000), help="Random samples or candidates per check")
    common.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=default(False),
        help="Log debug output to stderr",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser(suppress=True)
    parser = argparse.ArgumentParser(
        prog="qprcert",
        description="Quasiprobability representation no-go toolkit",
        parents=[_common_parser(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_certify = sub.add_parser("certify", parents=[common], help="Certify a candidate representation")
    p_certify.add_argument("--demo", choices=("sic", "nonnegative", "duplication"))
    p_certify.add_argument("--state", help="State representation JSON")
    p_certify.add_argument("--effect", help="Effect representation JSON")
    p_certify.add_argument("--random-nonnegative", action="store_true", help="Run the nonnegative battery")
    p_certify.add_argument("--chain", action="store_true", help="Attach the contradiction-chain report")
    p_certify.set_defaults(func=cmd_certify)

    p_extend = sub.add_parser("extend", parents=[common], help="Extend point/value data to a translated-linear map")
    p_extend.add_argument("input", nargs="?", help="Point/value JSON")
    p_extend.add_argument("--demo", choices=("line", "constant-one"))
    p_extend.add_argument("--query", action="append", default=[], help="Comma-separated point to evaluate")
    p_extend.add_argument("--require-linear", action="store_true", help="Exit 3 unless a linear extension exists")
    p_extend.set_defaults(func=cmd_extend)

    p_reduce = sub.add_parser("reduce", parents=[common], help="Restrict a frame representation to a subspace")
    p_reduce.add_argument("--frame", type=int, default=3, help="Dimension of a random informationally complete frame")
    p_reduce.add_argument("--frame-file", help="Frame JSON instead of a random frame")
    p_reduce.add_argument("--subspace", default="e1,e2", help="Basis vectors spanning the subspace")
    p_reduce.add_argument("--embedding", help="Embedding JSON {V, alpha} instead of --subspace")
    p_reduce.set_defaults(func=cmd_reduce)

    p_counter = sub.add_parser("counterexample", parents=[common], help="Build and verify a counterexample fixture")
    p_counter.add_argument("name", choices=COUNTEREXAMPLES)
    p_counter.set_defaults(func=cmd_counterexample)

    p_negativity = sub.add_parser("negativity", parents=[common], help="Report state and effect negativity")
    p_negativity.add_argument("--demo", choices=("sic", "nonnegative", "duplication"))
    p_negativity.add_argument("--state", help="State representation JSON")
    p_negativity.add_argument("--effect", help="Effect representation JSON")
    p_negativity.set_defaults(func=cmd_negativity)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = RunConfig(
            tolerance=args.tol,
            seed=args.seed,
            output_format=args.output_format,
            trials=args.trials,
            out_dir=args.out,
        )
        with tolerance_scope(config.tolerance):
            return int(args.func(args, config))
    except (QprError, ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INVALID


__all__ = [
    "build_parser",
    "cmd_certify",
    "cmd_counterexample",
    "cmd_extend",
    "cmd_negativity",
    "cmd_reduce",
    "main",
]
