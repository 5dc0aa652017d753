import csv
import json

import pytest

from qcentral.cli import main


@pytest.fixture(scope="module")
def a1_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "a1.json"
    assert main(["central", "--family", "A", "--rank", "1", "--out", str(path), "--jobs", "1"]) == 0
    return path


def test_central_a1(a1_file):
    data = json.loads(a1_file.read_text())
    assert data["verification"]["passed"]
    assert len(data["terms"]) == 3
    assert data["provenance"]["version"]


def test_unsupported_type(tmp_path, capsys):
    assert main(["central", "--family", "E", "--rank", "6", "--out", str(tmp_path / "e6.json")]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == 3


def test_verify_passes(a1_file, tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--central", str(a1_file), "--sites", "3", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"]


def test_verify_sampled(a1_file, tmp_path):
    assert main(["verify", "--central", str(a1_file), "--sites", "2", "--mode", "sampled",
                 "--q", "4/5,7/3", "--out", str(tmp_path / "v.json")]) == 0


def test_verify_mutated_fails(a1_file, tmp_path):
    data = json.loads(a1_file.read_text())
    data["terms"][2]["coeff"] = "q^2-1+q^-2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    out = tmp_path / "v.json"
    assert main(["verify", "--central", str(bad), "--sites", "2", "--out", str(out)]) == 2
    v = json.loads(out.read_text())
    assert not v["passed"] and v["witness"]


def test_verify_identity_is_central(a1_file, tmp_path):
    data = json.loads(a1_file.read_text())
    data["terms"] = [{"f_word": [], "k_exp": [0, 0], "e_word": [], "coeff": "1"}]
    one = tmp_path / "one.json"
    one.write_text(json.dumps(data))
    assert main(["verify", "--central", str(one), "--out", str(tmp_path / "v.json")]) == 0


def test_generator_and_simulate(a1_file, tmp_path):
    gen = tmp_path / "g.json"
    assert main(["generator", "--central", str(a1_file), "--sites", "2", "--q0", "4/5", "--out", str(gen)]) == 0
    g = json.loads(gen.read_text())
    assert g["states"] == ["00", "01", "10", "11"] and g["discarded"] == []
    ev = tmp_path / "ev.csv"
    hs = tmp_path / "h.csv"
    assert main(["simulate", "--gen", str(gen), "--tmax", "20", "--seed", "3", "--start", "01",
                 "--out", str(ev), "--heights", str(hs)]) == 0
    rows = [r for r in csv.reader(l for l in ev.read_text().splitlines() if not l.startswith("#"))]
    assert rows[0][0] == "time" and len(rows) > 1


def test_simulate_zero_generator(tmp_path):
    gen = tmp_path / "z.json"
    gen.write_text(json.dumps({"states": ["a", "b"], "rates": [], "discarded": [], "q0": "1/2"}))
    ev = tmp_path / "ev.csv"
    assert main(["simulate", "--gen", str(gen), "--tmax", "10", "--seed", "0", "--out", str(ev)]) == 0
    body = [l for l in ev.read_text().splitlines() if not l.startswith("#")]
    assert len(body) == 1


def test_float_q0_refused(a1_file, tmp_path):
    assert main(["generator", "--central", str(a1_file), "--sites", "2", "--q0", "0.8",
                 "--out", str(tmp_path / "g.json")]) == 3


def test_missing_file(tmp_path):
    assert main(["verify", "--central", str(tmp_path / "nope.json")]) == 3


def test_bench_legacy(tmp_path):
    out = tmp_path / "b.md"
    js = tmp_path / "b.json"
    assert main(["bench", "--legacy", "--family", "D", "--rank", "4", "--weight", "2,2,1,1",
                 "--precision", "4", "--out", str(out), "--json", str(js)]) == 0
    leg = json.loads(js.read_text())["legacy"][0]
    assert leg["exact_rank"] == 20 and leg["discrepancy"] > 0


def test_outputs_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["central", "--family", "A", "--rank", "2", "--out", str(p), "--jobs", "1"]) == 0
    assert a.read_bytes() == b.read_bytes()
    ga, gb = tmp_path / "ga.json", tmp_path / "gb.json"
    for p in (ga, gb):
        assert main(["generator", "--central", str(a), "--sites", "2", "--out", str(p)]) == 0
    assert ga.read_bytes() == gb.read_bytes()
