import json
import random

import pytest

from rankinpadic import datasets
from rankinpadic.localfactors import random_wd_datum
from rankinpadic.shell import Workspace, detect_kind, main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def newform_record(n=300):
    obj = datasets.newform("11a").to_json()
    obj["an"] = obj["an"][:n]
    return obj


def test_ingest_and_query(tmp_path, capsys, workspace):
    path = write_json(tmp_path / "f.json", newform_record())
    rc, out, _ = run(capsys, "ingest", path)
    assert rc == 0
    handle = json.loads(out)["ingested"][0]["handle"]
    assert handle in workspace.manifest()["datasets"]
    rc, out, _ = run(capsys, "qexp", handle, "--qprec", "6")
    assert rc == 0 and json.loads(out)["coeffs"] == ["0", "1", "-2", "-1", "2", "1"]


def test_ingest_rejects_corrupted_coefficient(tmp_path, capsys, workspace):
    obj = newform_record()
    obj["an"][49] = "13"
    rc, _, err = run(capsys, "ingest", write_json(tmp_path / "bad.json", obj))
    assert rc == 2 and "49" in err
    assert workspace.manifest()["datasets"] == {}


def test_ingest_rejects_bad_weil_deligne(tmp_path, capsys, workspace):
    # a unipotent tame generator with a diagonal Frobenius violates F s F^-1 = s^nu
    bad = {"dim": 2, "frob_inv": [["2", "0"], ["0", "3"]], "tame_gen": [["1", "1"], ["0", "1"]],
           "swan": 0, "eps0": "1", "residue": 5}
    rc, _, err = run(capsys, "ingest", write_json(tmp_path / "wd.json", [bad]))
    assert rc == 2 and "tame relation" in err
    good = random_wd_datum(random.Random(1), 5).to_json()
    rc, out, _ = run(capsys, "ingest", write_json(tmp_path / "wd_ok.json", [good]))
    assert rc == 0 and json.loads(out)["ingested"][0]["kind"] == "weil-deligne"


def test_detect_kind():
    assert detect_kind({"an": []}) == "newform"
    assert detect_kind({"basis": []}) == "space"
    assert detect_kind({"f": "Delta", "g": "E4"}) == "point"
    with pytest.raises(ValueError, match="schemas"):
        detect_kind({"x": 1})


def test_check_writes_reports(capsys, workspace):
    rc, out, _ = run(capsys, "check", "gamma", "--samples", "10")
    assert rc == 0 and json.loads(out)["ok"]
    tsv = (workspace.root / "reports" / "gamma.tsv").read_text().splitlines()
    assert tsv[0] == "suite\tcheck\tok" and all(line.endswith("pass") for line in tsv[1:])


def test_reports_are_deterministic(capsys, workspace):
    run(capsys, "check", "euler", "--samples", "20", "--seed", "3")
    first = (workspace.root / "reports" / "euler.json").read_bytes()
    run(capsys, "check", "euler", "--samples", "20", "--seed", "3")
    assert (workspace.root / "reports" / "euler.json").read_bytes() == first


def test_flags_before_and_after_subcommand(capsys, tmp_path):
    ws = tmp_path / "other"
    rc, _, _ = run(capsys, "--workspace", str(ws), "check", "eisenstein", "--prec", "20", "--w-prec", "0")
    assert rc == 0 and (ws / "reports" / "eisenstein.json").exists()
    rc, out, _ = run(capsys, "check", "eisenstein", "--p", "5", "--N", "3", "--m", "3", "--prec", "20",
                     "--w-prec", "0", "--workspace", str(ws))
    assert rc == 0 and json.loads(out)["params"]["p"] == 5


def test_lvalue_cache_is_transparent(capsys, workspace):
    rc, first, _ = run(capsys, "lvalue")
    assert rc == 0
    rec = json.loads(first)
    assert rec["value"]["unit"] == "7069234579331464431251646576188"
    assert len(list((workspace.root / "cache").iterdir())) == 1
    _, second, _ = run(capsys, "lvalue")
    assert second == first
    for f in (workspace.root / "cache").iterdir():
        f.unlink()
    _, third, _ = run(capsys, "lvalue")
    assert third == first


def test_fe_with_tamper(capsys, workspace, tmp_path):
    rc, out, _ = run(capsys, "fe", "--tamper")
    res = json.loads(out)
    assert rc == 0 and res["verdict"] == "pass" and res["tamper"]["detected"]
    rc, out, _ = run(capsys, "fe", "--gamma", write_json(tmp_path / "g.json", {"gamma": "12"}))
    assert rc == 1 and json.loads(out)["verdict"] == "fail"


def test_unsupported_point_exits_with_error(capsys, workspace):
    rc, _, err = run(capsys, "lvalue", "--t", "1")
    assert rc == 2 and "t > 0" in err


def test_environment_workspace(monkeypatch, tmp_path):
    monkeypatch.setenv("RANKINPADIC_WORKSPACE", str(tmp_path / "env"))
    assert Workspace().root == tmp_path / "env"


def test_manifest_hash_checked(tmp_path, capsys, workspace):
    path = write_json(tmp_path / "f.json", newform_record())
    rc, out, _ = run(capsys, "ingest", path)
    entry = json.loads(out)["ingested"][0]
    (workspace.root / entry["file"]).write_text("{}")
    with pytest.raises(ValueError, match="hash"):
        workspace.load(entry["handle"])
