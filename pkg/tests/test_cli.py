import json

import pytest

from polywild.cli import main
from polywild.tame2 import nagata_endo


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_exp_nagata(capsys):
    code, out, _ = run(capsys, "exp", "--d", "-2*x2,x3,0", "--f", "x1*x3+x2^2")
    assert code == 0
    assert out["images"][1] == "x1*x3^2 + x2^2*x3 + x2"
    assert out["images"][2] == "x3"


def test_tame2_wild_exit_one(capsys):
    phi = nagata_endo()
    code, out, _ = run(capsys, "tame2", "--ring", "Q[t]", "--images", ",".join(map(str, phi.images)),
                       "--inverse", ",".join(map(str, phi.inverse)))
    assert code == 1 and out["outcome"] == "wild"


def test_tame2_tame(capsys):
    code, out, _ = run(capsys, "tame2", "--images", "x1 + x2^2, x2", "--inverse", "x1 - x2^2, x2")
    assert code == 0 and out["outcome"] == "tame"


def test_lsc_build_catalog(capsys):
    code, out, _ = run(capsys, "lsc", "build", "--t0", "3", "--t1", "1", "--depth", "5")
    assert code == 0
    assert out["f"][5] == "x1*x3^3 - x2^2*x3^2 - x2*x3 - 1"
    assert out["a"][:6] == [1, 1, 2, 1, 1, 0]


def test_lsc_verify_sigma3(capsys):
    code, out, _ = run(capsys, "lsc", "verify", "--t0", "3", "--t1", "1", "--depth", "5", "--alpha0", "0,2")
    assert code == 0 and all(out["sigma3"]["checks"].values())


def test_lsc_depth_error(capsys):
    code, out, err = run(capsys, "lsc", "build", "--t0", "3", "--t1", "1", "--depth", "6")
    assert code == 2 and out is None and "DepthBeyondI" in err


def test_parse_error_names_offset(capsys):
    code, _, err = run(capsys, "eval", "--f", "x1*+2")
    assert code == 2 and "offset 3" in err and "'+'" in err


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_eval_and_compose(capsys):
    code, out, _ = run(capsys, "eval", "--f", "(x1+x2)*(x1-x2)", "--at", "x2,x1")
    assert out["f"] == "x1^2 - x2^2" and out["value"] == "-x1^2 + x2^2"
    code, out, _ = run(capsys, "compose", "--outer", "x1,x2+x1^2", "--inner", "x1+x2,x2")
    assert out["images"][0] == "x1^2 + x1 + x2"


def test_log(capsys):
    code, out, _ = run(capsys, "log", "--images", "x1,x2+x1")
    assert code == 0 and out["derivation"]["images"] == ["0", "x1"]


def test_reduce_and_classify(capsys):
    code, out, _ = run(capsys, "reduce-poly", "--f", "x2+x1^2")
    assert out["reduced"] == "x2"
    code, out, _ = run(capsys, "classify", "--ring", "Z", "--f", "2*x2+x1^2")
    assert out["type"] == "I"


def test_verdict_commands(capsys):
    code, out, _ = run(capsys, "hd-verdict", "--d", "t,-2*x1", "--f", "t*x2+x1^2", "--coordinate", "2")
    assert code == 1 and out["coordinate"]["grade"] == "totally_wild"
    code, out, _ = run(capsys, "tri3-verdict", "--d", "0,x1,-2*x2", "--f", "x1*x3+x2^2")
    assert code == 1 and out["outcome"] == "wild"


def test_wtest(capsys):
    code, out, _ = run(capsys, "wtest", "--p", "x1*x3 - x2^2")
    assert code == 0 and out["certification"]["certified"]
    code, out, _ = run(capsys, "wtest", "--p", "x1*x3 - x2")
    assert code == 1 and out["certification"]["failure"]["clause"] == "linear"


def test_su_check(capsys):
    code, out, _ = run(capsys, "su-check", "--F", "x1,x2,x3", "--G", "x1,x2^2,x3")
    assert code == 1 and out["clauses"]["SU2"] is False


def test_theta(capsys):
    code, out, _ = run(capsys, "theta", "--theta", "z^2", "--verify")
    assert code == 0 and out["e"] == 3 and out["nagata"] is True


def test_json_job(tmp_path, capsys):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "exp", "options": {"d": ["-2*x2", "x3", "0"], "f": "x1*x3+x2^2"}}))
    code, out, _ = run(capsys, "exp", "--json-in", str(job))
    assert code == 0 and out["images"][2] == "x3"
    job.write_text(json.dumps({"command": "theta", "options": {}}))
    code, _, err = run(capsys, "exp", "--json-in", str(job))
    assert code == 2


def test_deterministic_output(capsys):
    a = run(capsys, "lsc", "build", "--t0", "3", "--t1", "2", "--depth", "4")
    b = run(capsys, "lsc", "build", "--t0", "3", "--t1", "2", "--depth", "4")
    assert a == b


def test_repro_subset(capsys):
    code, out, err = run(capsys, "repro", "--only", "1,7")
    assert code == 0 and out["passed"]
    assert "[PASS] criterion 1" in err


SCHEMA_CASES = {
    "eval": ["eval", "--f", "x1+x2", "--at", "x2,x1"],
    "exp": ["exp", "--d", "-2*x2,x3,0", "--f", "x1*x3+x2^2"],
    "log": ["log", "--images", "x1,x2+x1"],
    "compose": ["compose", "--outer", "x1,x2", "--inner", "x2,x1"],
    "tame2": ["tame2", "--images", "x1 + x2^2, x2", "--inverse", "x1 - x2^2, x2"],
    "reduce-poly": ["reduce-poly", "--f", "x2+x1^2"],
    "classify": ["classify", "--ring", "Z", "--f", "2*x2+x1^2"],
    "hd-verdict": ["hd-verdict", "--d", "t,-2*x1", "--f", "t*x2+x1^2", "--coordinate", "2"],
    "tri3-verdict": ["tri3-verdict", "--d", "0,x1,-2*x2", "--f", "x1*x3+x2^2"],
    "wtest": ["wtest", "--p", "x1*x3 - x2^2"],
    "su-check": ["su-check", "--F", "x1,x2,x3", "--G", "x1,x2^2,x3"],
    "lsc": ["lsc", "verify", "--t0", "3", "--t1", "2", "--depth", "4"],
    "theta": ["theta", "--theta", "z^2", "--verify"],
    "repro": ["repro", "--only", "5"],
}


@pytest.mark.parametrize("name", sorted(SCHEMA_CASES))
def test_output_matches_schema(name, capsys):
    jsonschema = pytest.importorskip("jsonschema")
    from importlib.resources import files
    schema = json.loads(files("polywild").joinpath("schemas", f"{name}.json").read_text())
    _, out, _ = run(capsys, *SCHEMA_CASES[name])
    jsonschema.validate(out, schema)
