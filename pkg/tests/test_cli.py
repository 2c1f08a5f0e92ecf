import json

import pytest

from dshier.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_classify_so7(capsys):
    r = report(capsys, "classify", "--algebra", "so7", "--partition", "3,2,2")
    assert r["command"] == "classify"
    assert r["version"] and len(r["config_hash"]) == 16
    body = r["report"]
    assert body["depth"] == "3/2" and body["nilpotent_type"] is True
    assert body["omega_rank"] == 4
    assert body["integrable_quasicyclic"]["element_type"] == "mixed"


def test_classify_g2(capsys):
    body = report(capsys, "classify", "--algebra", "g2", "--nilpotent-label", "~A1")["report"]
    assert body["quasicyclic_exists"] is False
    assert body["table1"]["status"] == "never-quasicyclic"


def test_classify_sl2(capsys):
    body = report(capsys, "classify", "--algebra", "sl2")["report"]
    assert body["depth"] == "1" and body["nilpotent_type"] is False


def test_algebra_build_json_roundtrip(capsys, tmp_path):
    body = report(capsys, "algebra", "build", "--algebra", "sl3")["report"]
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(body["algebra"]))
    again = report(capsys, "algebra", "build", "--algebra", str(path))["report"]
    assert again["algebra"] == body["algebra"]


def test_triple_build_and_check(capsys, tmp_path):
    r = report(capsys, "triple", "build", "--algebra", "so7", "--partition", "3,2,2")
    assert all(r["report"]["check"].values())
    path = tmp_path / "t.json"
    path.write_text(json.dumps(r["report"]))
    c = report(capsys, "triple", "check", "--algebra", "so7", "--partition", "3,2,2", "--triple", str(path))
    assert c["report"]["ok"]


def test_hierarchy_sl2(capsys, tmp_path):
    out = tmp_path / "run.json"
    code, _, err = run(capsys, "hierarchy", "run", "--algebra", "sl2", "--max-degree", "5",
                       "--densities", "3", "--out", str(out))
    assert code == 0, err
    body = json.loads(out.read_text())["report"]
    assert body["verification"]["residual_zero"] and body["verification"]["involution"]
    assert body["sl2_slice"]["densities"][1] == "-1/4*u^2"
    assert (tmp_path / "run.densities.txt").read_text().count("\n") == 3
    assert json.loads((tmp_path / "run.hierarchy.json").read_text())["max_degree"] == "5"


def test_hierarchy_so7(capsys):
    body = report(capsys, "hierarchy", "run", "--algebra", "so7", "--partition", "3,2,2",
                  "--max-degree", "2")["report"]
    assert body["verification"]["residual_zero"]
    assert body["verification"]["flatness_residual"] == 0


def test_idempotent_output(capsys):
    args = ("hierarchy", "run", "--algebra", "sl2", "--max-degree", "3", "--seed", "4")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_config_file_overridden_by_flags(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"algebra": "so7", "partition": "3,2,2"}))
    a = report(capsys, "classify", "--config", str(cfg))
    b = report(capsys, "classify", "--config", str(cfg), "--algebra", "sl2", "--partition", "2")
    assert a["report"]["algebra"] == "so7" and b["report"]["algebra"] == "sl2"
    assert a["config_hash"] != b["config_hash"]


@pytest.mark.parametrize("argv,code", [
    (("classify", "--algebra", "nope"), 2),
    (("classify", "--algebra", "so7", "--partition", "3,3"), 2),
    (("classify", "--algebra", "so8", "--partition", "4,2,1,1"), 2),
    (("classify", "--config", "/nonexistent.json"), 2),
    (("hierarchy", "run", "--algebra", "sl2", "--max-degree", "1", "--densities", "50"), 5),
    (("hierarchy", "run", "--algebra", "sl2", "--max-degree", "4", "--densities", "0"), 2),
    (("hierarchy", "run", "--algebra", "sl3", "--partition", "1,1,1"), 4),
    (("table1", "show", "--algebra", "E9"), 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_text_format(capsys):
    code, out, _ = run(capsys, "table1", "show", "--algebra", "G2", "--format", "text")
    assert code == 0 and "never-quasicyclic" in out and "dynkin_characteristic: [1/2, 0]" in out


def test_pva_and_lenard(capsys):
    body = report(capsys, "pva", "check", "--table", "affine", "--algebra", "sl2")["report"]
    assert all(v["ok"] for v in body.values())
    body = report(capsys, "lenard", "run", "--steps", "3")["report"]
    assert body["functionals"][1] == "1/2*c*u*u[2] + 1/2*u^3"
    assert body["involution"]
