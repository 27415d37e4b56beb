import json

import pytest

from morphqec.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    return rc, capsys.readouterr().out


def test_codes_build(tmp_path, capsys):
    out = tmp_path / "qrm3.json"
    assert main(["codes", "build", "--name", "qrm3", "--distance", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["n"] == 15 and data["distance"] == 3


def test_morph_and_msd(tmp_path, capsys):
    code = tmp_path / "steane.json"
    main(["codes", "build", "--name", "steane", "--out", str(code)])
    region = [i for i, ch in enumerate(json.loads(code.read_text())["x_stabs"][0]) if ch == "X"]
    out = tmp_path / "m.json"
    assert main(["morph", "--code", str(code), "--region", ",".join(map(str, region)), "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["n"] == 7 - 4 + 2
    rc, text = run(capsys, "msd", "analyze", "--protocol", "10", "--order", "3")
    assert rc == 0
    assert json.loads(text)["p_out_series"] == [[0, 0, 1], [1, 0, 1], [2, 1, 1], [3, 9, 1]]


def test_msd_cost(capsys):
    rc, text = run(capsys, "msd", "cost", "--target", "1e-7")
    data = json.loads(text)
    assert rc == 0 and data["sequence"] == "10-10"
    assert abs(data["cost"] - 69.41) < 0.35
    rc, text = run(capsys, "msd", "cost", "--target", "1e-300", "--max-rounds", "1")
    assert rc == 1 and not json.loads(text)["feasible"]


def test_lattice_and_decode(tmp_path, capsys):
    lat = tmp_path / "lat.json"
    assert main(["lattice", "build", "--L", "6", "--method", "B", "--q", "0.5", "--seed", "2",
                 "--out", str(lat)]) == 0
    assert json.loads(lat.read_text())["summary"]["k"] == 4
    err = tmp_path / "err.json"
    err.write_text(json.dumps([3]))
    rc, text = run(capsys, "decode", "one", "--lattice", str(lat), "--error", str(err))
    data = json.loads(text)
    assert rc == 0 and data["success"]
    assert data["correction"] == sorted(data["correction"])


def test_verify_gates(tmp_path, capsys):
    code = tmp_path / "steane.json"
    main(["codes", "build", "--name", "steane", "--out", str(code)])
    circ = tmp_path / "c.json"
    circ.write_text(json.dumps({"n": 7, "gates": [{"kind": "Sdg", "targets": [q]} for q in range(7)]}))
    rc, text = run(capsys, "verify", "gates", "--code", str(code), "--circuit", str(circ), "--expect", "S")
    assert rc == 0 and json.loads(text)["passed"]
    circ.write_text(json.dumps({"n": 7, "gates": [{"kind": "H", "targets": [0]}]}))
    rc, text = run(capsys, "verify", "gates", "--code", str(code), "--circuit", str(circ))
    assert rc == 1 and not json.loads(text)["logical"]


def test_threshold_run_and_fit(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"method": "A1", "q": 0.0, "L": [6], "p": [0.0, 0.1],
                               "lattices_per_point": 1, "trials_per_lattice": 50}))
    out = tmp_path / "rows.csv"
    assert main(["threshold", "run", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0].startswith("method,q,L,p")
    assert main(["threshold", "fit", "--in", str(out)]) == 2


def test_reproduce(capsys):
    rc, text = run(capsys, "reproduce", "--list")
    assert rc == 0 and "msd-10to1" in text
    rc, text = run(capsys, "reproduce", "weight2")
    assert rc == 0 and text.count("PASS") == 2
    rc, text = run(capsys, "reproduce", "msd-10to1", "--format", "json")
    assert rc == 0 and all(a["passed"] for a in json.loads(text))


def test_errors_exit_2(capsys):
    assert main(["codes", "build", "--name", "hyperoct", "--d", "9"]) == 2
    assert main(["reproduce", "no-such-scenario"]) == 2
