from __future__ import annotations

import json
from typing import TYPE_CHECKING

import pytest

from qprcert.cli import main
from qprcert.models import dump_effect_rep, dump_state_rep

if TYPE_CHECKING:
    from pathlib import Path


def run(capsys, *argv: str) -> tuple[int, dict]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.startswith("{") else {}


def test_certify_sic_demo(capsys):
    code, payload = run(capsys, "certify", "--demo", "sic")

    assert code == 0
    assert payload["kind"] == "StateNegativity"
    assert payload["defect"] == pytest.approx(0.5, abs=1e-9)


def test_certify_nonnegative_demo_with_chain(capsys):
    code, payload = run(capsys, "certify", "--demo", "nonnegative", "--chain")

    assert code == 0
    assert payload["kind"] == "FrameCondition"
    assert payload["chain"]["conclusion"] == "dual_basis_conflict"
    assert "conclusion:" in payload["chain"]["narrative"]


def test_certify_reads_representation_files(capsys, sic_pair, tmp_path: Path):
    srep, erep = sic_pair
    (tmp_path / "state.json").write_text(dump_state_rep(srep), encoding="utf-8")
    (tmp_path / "effect.json").write_text(dump_effect_rep(erep), encoding="utf-8")

    code, payload = run(
        capsys,
        "certify",
        "--state",
        str(tmp_path / "state.json"),
        "--effect",
        str(tmp_path / "effect.json"),
        "--out",
        str(tmp_path / "out"),
    )

    assert code == 0
    assert payload["kind"] == "StateNegativity"
    assert json.loads((tmp_path / "out" / "certificate.json").read_text(encoding="utf-8")) == payload


def test_certify_truncated_file_exits_2(capsys, sic_pair, tmp_path: Path):
    srep, erep = sic_pair
    text = dump_state_rep(srep)
    (tmp_path / "state.json").write_text(text[: len(text) // 3], encoding="utf-8")
    (tmp_path / "effect.json").write_text(dump_effect_rep(erep), encoding="utf-8")

    code = main(["certify", "--state", str(tmp_path / "state.json"), "--effect", str(tmp_path / "effect.json")])

    captured = capsys.readouterr()
    assert code == 2
    assert captured.out == ""
    assert "Invalid state representation document" in captured.err


def test_certify_without_inputs_exits_2(capsys):
    assert main(["certify"]) == 2
    assert "--state and --effect" in capsys.readouterr().err


def test_certify_random_nonnegative(capsys):
    code, payload = run(capsys, "certify", "--random-nonnegative", "--trials", "25", "--seed", "7")

    assert code == 0
    assert payload["trials"] == 25
    assert payload["escapes"] == 0
    assert payload["max_overlap"] <= 1.0 + 1e-9


def test_invalid_tolerance_exits_2(capsys):
    assert main(["certify", "--demo", "sic", "--tol", "0"]) == 2
    assert "tolerance must be positive" in capsys.readouterr().err


def test_table_format(capsys):
    code = main(["certify", "--demo", "sic", "--format", "table"])

    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert lines[0] == "== certificate =="
    assert any(line.startswith("kind") and line.endswith("StateNegativity") for line in lines)


def test_extend_line_demo(capsys, tmp_path: Path):
    code, payload = run(capsys, "extend", "--demo", "line", "--query=-1,2", "--out", str(tmp_path))

    assert code == 0
    assert payload["evaluations"] == [{"point": "-1,2", "value": [pytest.approx(3.0)]}]
    assert json.loads((tmp_path / "map.json").read_text(encoding="utf-8")) == payload["map"]


def test_extend_constant_one_requires_linear(capsys):
    code, payload = run(capsys, "extend", "--demo", "constant-one", "--require-linear")

    assert code == 3
    assert payload["linear_extension"]["exists"] is False
    assert payload["convex_linearity"]["pass"] is True
    coefficients = payload["linear_extension"]["witness"]["coefficients"]
    assert [round(abs(value)) for value in coefficients] == [1, 1, 1, 0, 0]


def test_extend_inconsistent_file_exits_3(capsys, tmp_path: Path):
    path = tmp_path / "pvs.json"
    path.write_text(json.dumps({"points": [[0.0], [1.0], [2.0]], "values": [[0.0], [1.0], [5.0]]}), encoding="utf-8")

    code, payload = run(capsys, "extend", str(path))

    assert code == 3
    assert "not convex-linear" in payload["error"]
    assert len(payload["witness"]["coefficients"]) == 3


def test_extend_query_off_hull_exits_2(capsys):
    assert main(["extend", "--demo", "line", "--query", "0,0"]) == 2
    assert "off the affine hull" in capsys.readouterr().err


def test_reduce_frame_to_a_qubit(capsys, tmp_path: Path):
    argv = ("reduce", "--frame", "3", "--subspace", "e1,e2", "--trials", "20", "--out", str(tmp_path))
    code, payload = run(capsys, *argv)

    assert code == 0
    assert payload["big_dim"] == 3
    assert payload["small_dim"] == 2
    for name in ("big_qpr3", "restricted_qpr3", "trace_preservation", "lifted_povm"):
        assert payload["checks"][name]["pass"] is True
    assert payload["fit_residual"] <= 1e-9
    assert (tmp_path / "restricted_state.json").exists()
    assert (tmp_path / "restricted_effect.json").exists()


def test_reduce_identity_subspace_reproduces_the_original(capsys):
    code, payload = run(capsys, "reduce", "--frame", "2", "--subspace", "e1,e2", "--trials", "10")

    assert code == 0
    assert payload["identity_deviation"] <= 1e-12


def test_reduce_non_orthonormal_embedding_exits_2(capsys, tmp_path: Path):
    path = tmp_path / "embedding.json"
    isometry = [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    path.write_text(json.dumps({"V": isometry}), encoding="utf-8")

    assert main(["reduce", "--embedding", str(path)]) == 2
    assert "orthonormal" in capsys.readouterr().err


def test_reduce_rejects_bad_subspace_tokens(capsys):
    assert main(["reduce", "--subspace", "e0,e1"]) == 2
    assert "e1, e2" in capsys.readouterr().err


def test_counterexample_duplication(capsys, tmp_path: Path):
    code, payload = run(capsys, "counterexample", "duplication", "--trials", "50", "--out", str(tmp_path))

    checks = payload["checks"]
    assert code == 0
    assert checks["normalization"]["pass"] is True
    assert checks["unit_sum"]["pass"] is True
    assert checks["qpr3"]["pass"] is True
    assert checks["convex_linearity"]["pass"] is False
    assert checks["convex_linearity"]["worst_defect"] == pytest.approx(1.0, abs=1e-12)
    assert payload["complement_dimension"] == 4
    assert (tmp_path / "duplication_state.json").exists()


def test_counterexample_sic(capsys):
    code, payload = run(capsys, "counterexample", "sic", "--trials", "50")

    assert code == 0
    assert all(check["pass"] for check in payload["checks"].values())
    assert payload["nonnegativity"]["pass"] is False
    assert payload["nonnegativity"]["state_min"] == pytest.approx(-0.5, abs=1e-9)


def test_counterexample_constant_one(capsys):
    code, payload = run(capsys, "counterexample", "constant-one")

    assert code == 0
    assert payload["linear_extension"]["exists"] is False
    assert payload["checks"]["convex_linearity"]["pass"] is True
    assert set(payload["translated_linear"]) == {"u0", "w0", "basis", "h"}


def test_counterexample_unknown_name_exits_2(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["counterexample", "bogus"])

    assert excinfo.value.code == 2


def test_negativity_sic(capsys):
    code, payload = run(capsys, "negativity", "--demo", "sic")

    assert code == 0
    assert payload["state"]["min"] == pytest.approx(-0.5, abs=1e-9)
    assert payload["effect"]["min"] == pytest.approx(0.0, abs=1e-12)
    assert payload["nonnegative"] is False


def test_negativity_of_a_tabulated_rep(capsys):
    code, payload = run(capsys, "negativity", "--demo", "duplication")

    assert code == 0
    assert payload["state"]["min"] == pytest.approx(-0.75 - 0.75 / 3**0.5, abs=1e-12)
    assert "entry" in payload["state"]
    assert payload["nonnegative"] is False


def test_common_flags_are_accepted_before_the_subcommand(capsys):
    before = run(capsys, "--seed", "3", "--trials", "20", "counterexample", "sic")
    after = run(capsys, "counterexample", "sic", "--seed", "3", "--trials", "20")

    assert before == after
    assert before[0] == 0


def test_subcommand_flag_overrides_the_global_one(capsys):
    code = main(["--format", "json", "certify", "--demo", "sic", "--format", "table"])
    out = capsys.readouterr().out

    assert code == 0
    assert not out.startswith("{")


def test_tolerance_flag_reaches_catalog_validation(capsys, tmp_path: Path):
    space = {"labels": ["l0"], "weights": [1.0]}
    state = {"kind": "tabulated-state", "space": space, "catalog": [{"bloch": [1.000001, 0.0, 0.0], "values": [1.0]}]}
    effect = {"kind": "affine-effect", "space": space, "B": [[0.0], [0.0], [0.0]], "D": [1.0], "F": [0.0]}
    (tmp_path / "state.json").write_text(json.dumps(state), encoding="utf-8")
    (tmp_path / "effect.json").write_text(json.dumps(effect), encoding="utf-8")
    files = ["--state", str(tmp_path / "state.json"), "--effect", str(tmp_path / "effect.json")]

    strict, _ = run(capsys, "negativity", *files)
    loose, payload = run(capsys, "--tol", "1e-5", "negativity", *files)

    assert strict == 2
    assert loose == 0
    assert payload["nonnegative"] is True
