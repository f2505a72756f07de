"""End-to-end tests for the command-line interface.

Each test drives main() with real argv against the bundled corpus and
checks the exit code plus the JSON payload.  The exit-code contract:
0 success, 1 failed validation or hypothesis, 2 budget exceeded,
3 malformed input (including bad flags).  Reports must be byte-identical
across repeat runs with the same input and seed.
"""

import contextlib
import io
import json

import pytest

from waldcat.cli import main
from waldcat.workspace import corpus_path

FX2 = str(corpus_path("fx2"))
FX3 = str(corpus_path("fx3"))
QA1 = str(corpus_path("quiver_a1"))
F2C2 = str(corpus_path("f2c2"))

CORPUS_NAMES = ["f2c2", "fx2", "fx3", "quiver_a1", "quiver_a2"]


def run(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def runj(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_validate_corpus(name):
    code, out = runj("validate", "--input", str(corpus_path(name)))
    assert code == 0
    assert out["ok"] is True
    assert out["failures"] == []
    assert all(out["algebra_checks"].values())


def test_validate_broken_document_exits_one(tmp_path):
    doc = json.loads(corpus_path("fx2").read_text())
    doc["modules"]["badmod"] = {"algebra": "fx2", "action": [[[1]], [[1]]]}
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    code, out = runj("validate", "--input", str(path))
    assert code == 1
    assert out["ok"] is False
    assert any(f["name"] == "badmod" for f in out["failures"])


def test_weq_verdict_yes():
    code, out = runj("weq", "--input", FX2, "--map", "mul_x")
    assert code == 0
    assert out["verdict"] == "yes"


def test_weq_oracle_agreement():
    code, out = runj("weq", "--input", FX2, "--map", "mul_x", "--oracle")
    assert code == 0
    assert out["oracle_verdict"] == "yes"
    assert out["oracle_agrees"] is True


def test_weq_no_for_non_equivalence():
    # the socle inclusion S -> A has cone S + S, not acyclic
    code, out = runj("weq", "--input", FX2, "--map", "socle")
    assert code == 0
    assert out["verdict"] == "no"


def test_ext_with_oracle():
    code, out = runj("ext", "--input", FX2, "--quot", "S", "--sub", "S",
                     "--oracle")
    assert code == 0
    assert out["dimension"] == 1
    assert out["class_count"] == 2
    assert out["oracle_class_count"] == 2
    assert out["oracle_agrees"] is True


def test_class_module_frobenius():
    code, out = runj("class", "--input", F2C2, "--module", "A")
    assert code == 0
    assert out["projective"] is True
    assert out["injective"] is True


def test_factor_produces_verified_sequences():
    code, out = runj("factor", "--input", FX2, "--map", "socle")
    assert code == 0
    assert out["middle_dim"] == out["kernel_dim"] + 2  # cod A has dim 2
    assert out["middle_dim"] == out["cokernel_dim"] + 1  # dom S has dim 1
    assert len(out["sequences"]) == 2


def test_lift_on_commuting_square():
    code, out = runj("lift", "--input", FX2, "--i", "pad_incl",
                     "--p", "pad_proj", "--top", "pad_incl",
                     "--bottom", "pad_proj")
    assert code == 0
    assert out["verified"] is True


def test_axioms_all_pass():
    code, out = runj("axioms", "--input", FX2, "--samples", "3", "--seed", "7")
    assert code == 0
    assert out["summary"]["FAIL"] == 0
    assert out["summary"]["PASS"] >= 1


def test_axioms_deterministic_bytes():
    _, first = run("axioms", "--input", FX2, "--samples", "4", "--seed", "11")
    _, second = run("axioms", "--input", FX2, "--samples", "4", "--seed", "11")
    assert first == second


def test_k0_exact_category_projectives():
    code, out = runj("k0", "--input", FX2, "--class", "projectives",
                     "--dim-bound", "4")
    assert code == 0
    assert out["kind"] == "exact_category"
    assert out["description"] == "Z"


def test_k0_waldhausen_kill_acyclics():
    code, out = runj("k0", "--input", FX2, "--acyclics", "projectives",
                     "--dim-bound", "4")
    assert code == 0
    assert out["kind"] == "waldhausen"
    assert out["description"] == "Z/2"


def test_localize_truncation_degree_two():
    code, out = runj("localize", "--input", FX2, "--acyclics", "projectives",
                     "--dim-bound", "4")
    assert code == 0
    assert out["ok"] is True
    assert out["verdicts"] == {
        "composite_zero": True, "surjective": True, "im_eq_ker": True,
    }
    assert out["cokernel"]["description"] == "Z/2"


def test_localize_truncation_degree_three_uses_config():
    # fx3's workspace config supplies dim_bound and acyclics defaults
    code, out = runj("localize", "--input", FX3)
    assert code == 0
    assert out["ok"] is True
    assert out["cokernel"]["description"] == "Z/3"


def test_localize_deterministic_bytes():
    args = ("localize", "--input", FX2, "--acyclics", "projectives",
            "--dim-bound", "4")
    _, first = run(*args)
    _, second = run(*args)
    assert first == second


def test_localize_failed_hypotheses_exit_one():
    code, out = runj("localize", "--input", FX2, "--acyclics", "explicit:S",
                     "--dim-bound", "3")
    assert code == 1
    assert out["ok"] is False
    assert out["hypotheses"]["failures"]
    assert out["groups"] is None
    assert out["verdicts"] is None


def test_span_membership_and_resolve():
    code, out = runj("span", "--input", FX2, "--op", "membership",
                     "--span", "socle_span")
    assert code == 0
    assert out["in_P"] is True and out["in_I"] is False
    code, out = runj("span", "--input", FX2, "--op", "resolve",
                     "--span", "socle_span")
    assert code == 0
    assert out["validated"] is True


def test_span_factor_verified():
    code, out = runj("span", "--input", FX2, "--op", "factor",
                     "--dom", "socle_span", "--cod", "socle_span",
                     "--left", "id_S", "--apex", "id_S", "--right", "id_A")
    assert code == 0
    assert out["verified"] is True


def test_span_lift_identity_square():
    spec = "socle_span,socle_span,id_S,id_S,id_A"
    code, out = runj("span", "--input", FX2, "--op", "lift", "--i", spec,
                     "--p", spec, "--top", spec, "--bottom", spec)
    assert code == 0
    assert out["components"]["apex"] == [[1]]


def test_chain_homology_and_weq():
    code, out = runj("chain", "--input", FX2, "--op", "homology",
                     "--complex", "xcx")
    assert code == 0
    assert out["homology_dims"] == {"0": 1, "1": 1}
    code, out = runj("chain", "--input", FX2, "--op", "qiso", "--dom", "xcx",
                     "--cod", "xcx", "--components", "0:id_A,1:id_A")
    assert code == 0
    assert out["is_quasi_iso"] is True
    code, out = runj("chain", "--input", FX2, "--op", "weq", "--dom", "xcx",
                     "--cod", "xcx", "--components", "0:id_A,1:id_A")
    assert code == 0
    assert out["verdict"] == "yes"


def test_resolve_zp_two_step_ladder():
    code, out = runj("resolve-zp", "--input", FX2, "--module", "A",
                     "--resolution", "pad_incl:pad_proj,socle:socle_quot",
                     "--acyclics", "projectives", "--p-class", "all")
    assert code == 0
    assert out["steps"] == 2
    assert all(d[0] + d[2] == d[1] for d in out["dims"])


def test_resolve_zp_precondition_error_exit_one():
    # with projective acyclics the resolved object itself must be acyclic
    code, out = runj("resolve-zp", "--input", FX2, "--module", "S",
                     "--resolution", "socle:socle_quot",
                     "--acyclics", "projectives", "--p-class", "all")
    assert code == 1
    assert "Z-intersect-C" in out["error"]["message"]


def test_enumerate_small_bound():
    code, out = runj("enumerate", "--input", FX2, "--dim-bound", "2")
    assert code == 0
    assert [m["dim"] for m in out["modules"]] == [0, 1, 2, 2]


def test_exit_three_missing_file():
    code, out = runj("validate", "--input", "/tmp/no-such-workspace.json")
    assert code == 3
    assert out["error"]["type"] == "malformed"


def test_exit_three_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{broken")
    code, out = runj("validate", "--input", str(path))
    assert code == 3


def test_exit_three_unknown_name():
    code, out = runj("class", "--input", FX2, "--module", "nosuch")
    assert code == 3
    assert "nosuch" in out["error"]["message"]


def test_exit_three_bad_flag_value():
    code, out = runj("weq", "--input", FX2, "--map", "mul_x",
                     "--format", "yaml")
    assert code == 3


def test_exit_three_unknown_subcommand():
    code, out = runj("frobnicate", "--input", FX2)
    assert code == 3


def test_exit_two_budget_exceeded():
    code, out = runj("k0", "--input", FX2, "--dim-bound", "4",
                     "--budget", "10")
    assert code == 2
    assert out["error"]["type"] == "budget"


def test_text_format_renders_sequences():
    code, text = run("factor", "--input", FX2, "--map", "socle",
                     "--format", "text")
    assert code == 0
    rows = [ln for ln in text.splitlines() if "0 -> " in ln]
    assert len(rows) == 2
    # columns are aligned across rows
    arrows = [[i for i, ch in enumerate(ln) if ch == ">"] for ln in rows]
    assert arrows[0] == arrows[1]


def test_json_reports_end_with_newline_and_sorted_keys():
    _, text = run("weq", "--input", FX2, "--map", "mul_x")
    assert text.endswith("\n")
    payload = json.loads(text)
    assert text == json.dumps(payload, sort_keys=True, indent=2) + "\n"
