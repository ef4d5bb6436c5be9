import csv
import io
import json
import math

import pytest

from bellfriends import cli
from bellfriends import countsfile as CF
from bellfriends import stats as S
from bellfriends.circuits import SETTING_PAIRS
from bellfriends.noise import NoiseModel


def test_ionq_noiseless_simulation():
    doc = cli.cmd_simulate(cli.RunConfig(variant="ionq", shots=10**5, seed=2))
    br, sr = cli.analyze_doc(doc)
    assert abs(br.B - 2 * math.sqrt(2)) < 5 * br.sigma_B
    assert sr.direction == "none"


def test_ecr_and_cz_same_exact_b():
    b = [S.chsh(cli.simulate_table(v, NoiseModel(), None)).B for v in ("ibm-ecr", "ibm-cz", "ionq")]
    assert b[0] == pytest.approx(b[1], abs=1e-12) and b[0] == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert b[2] == pytest.approx(b[0], abs=1e-12)


def test_minimal_run():
    doc = cli.cmd_simulate(cli.RunConfig(shots=1, reps=1, seed=0))
    assert len(doc["runs"]) == 4
    assert all(sum(r["counts"].values()) == 1 and len(r["counts"]) == 1 for r in doc["runs"])
    assert sorted((r["a"], r["b"]) for r in doc["runs"]) == sorted(SETTING_PAIRS)


def test_setting_order_recorded_and_shuffled():
    doc = cli.cmd_simulate(cli.RunConfig(shots=1, reps=12, seed=5))
    orders = [tuple(map(tuple, o)) for o in doc["setting_order"]]
    assert all(sorted(o) == sorted(SETTING_PAIRS) for o in orders)
    assert len(set(orders)) > 1
    assert [(r["a"], r["b"]) for r in doc["runs"][:4]] == list(orders[0])


def test_run_config_validation():
    with pytest.raises(ValueError):
        cli.RunConfig(shots=0)
    with pytest.raises(ValueError):
        cli.RunConfig(variant="sycamore")
    with pytest.raises(ValueError):
        cli.cmd_simulate(cli.RunConfig(exact=True, reps=2))


def test_round_trip_reports(tmp_path):
    cfg = cli.RunConfig(variant="ibm-ecr", shots=2000, reps=2, seed=3,
                        noise=NoiseModel(p1=1e-3, p2=1e-2, readout_flip=0.01), out=tmp_path)
    doc = cli.cmd_simulate(cfg)
    mem = cli.analyze_doc(doc)
    results = cli.cmd_analyze([tmp_path / "counts.json"], tmp_path / "rep", stream=io.StringIO())
    _, br, sr = results[0]
    assert br == mem[0]
    assert sr.entries == mem[1].entries
    rows = list(csv.DictReader(io.StringIO((tmp_path / "rep" / "bell.csv").read_bytes().decode())))
    assert float(rows[0]["B"]) == pytest.approx(br.B, abs=1e-6)
    assert (tmp_path / "rep" / "signaling.csv").read_bytes().count(b"\r\n") == 33


def test_replay_is_byte_identical(tmp_path):
    cfg = dict(variant="ibm-cz", shots=3000, reps=2, seed=11, noise=NoiseModel(p1=0.01, p2=0.02,
                                                                               readout_flip=0.02))
    a = cli.cmd_simulate(cli.RunConfig(**cfg, out=tmp_path / "a"))
    b = cli.cmd_simulate(cli.RunConfig(**cfg, out=tmp_path / "b", workers=2))
    assert CF.payload(a) == CF.payload(b)
    c = cli.cmd_simulate(cli.RunConfig(**dict(cfg, seed=12)))
    assert CF.payload(a) != CF.payload(c)


def _exact_file(tmp_path, name, **noise):
    cli.main(["simulate", "--exact", "--out", str(tmp_path / name), "--group-label", name,
              "--noise-json", json.dumps(noise)])
    return tmp_path / name / "counts.json"


def test_analyze_exact_ideal(tmp_path, capsys):
    path = _exact_file(tmp_path, "ideal")
    capsys.readouterr()
    assert cli.main(["analyze", str(path), "--out", str(tmp_path / "rep")]) == 0
    out = capsys.readouterr().out
    assert "2.8284" in out and out.splitlines()[1].rstrip().endswith("0.000")
    row = next(csv.DictReader(io.StringIO((tmp_path / "rep" / "bell.csv").read_text())))
    assert row["B"] == "2.828427" and row["dB_1e-4"] == "0.000" and row["A-B"] == ""


def test_analyze_crosstalk_has_arrows(tmp_path, capsys):
    doc = cli.cmd_simulate(cli.RunConfig(variant="ionq", shots=10**6, seed=4,
                                         noise=NoiseModel(crosstalk_zz=0.1), group_label="xt",
                                         out=tmp_path / "xt"))
    assert doc["noise"]["crosstalk_zz"] == 0.1
    results = cli.cmd_analyze([tmp_path / "xt" / "counts.json"], stream=io.StringIO())
    assert results[0][2].arrow != ""


def test_signal_scan_outputs(tmp_path, capsys):
    ideal = _exact_file(tmp_path, "ideal")
    xt = _exact_file(tmp_path, "xt", crosstalk_zz=0.1)
    capsys.readouterr()
    cli.main(["signal-scan", str(ideal), "--out", str(tmp_path / "s1")])
    rows = list(csv.DictReader(io.StringIO((tmp_path / "s1" / "signaling.csv").read_text())))
    assert len(rows) == 32 and all(abs(float(r["z"])) < 5 for r in rows)
    assert [(r["party"], r["own_setting"], r["outcome"]) for r in rows] == sorted(
        (r["party"], r["own_setting"], r["outcome"]) for r in rows)
    capsys.readouterr()
    cli.main(["signal-scan", str(xt)])
    lines = capsys.readouterr().out.splitlines()
    assert "significant" in lines[0] and lines[1] == "flagged:"


def test_parse_errors_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 1, "runs": []}))
    assert cli.main(["signal-scan", str(bad)]) == 2
    assert "non-empty" in capsys.readouterr().err
    doc = cli.cmd_simulate(cli.RunConfig(shots=10, seed=0))
    doc["runs"][0]["shots"] = 11
    bad.write_text(CF.dumps(doc))
    assert cli.main(["analyze", str(bad)]) == 2
    assert "line" in capsys.readouterr().err
    assert cli.main(["analyze", str(tmp_path / "missing.json")]) == 3


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["simulate", "--shots", "5", "--out", str(blocker)]) == 3


def test_noise_flags_and_qubit_group(tmp_path, capsys):
    cfg = tmp_path / "noise.json"
    cfg.write_text(json.dumps({"p1": 0.001, "p2": 0.01, "seed": 8}))
    rc = cli.main(["simulate", "--shots", "20", "--noise-json", str(cfg), "--readout-flip", "0.02",
                   "--qubit-group", "ibm_kingston:2", "--dump-circuit", "--out", str(tmp_path / "o")])
    assert rc == 0
    doc = CF.load(tmp_path / "o" / "counts.json")
    assert doc["noise"] == {"p1": 0.001, "p2": 0.01, "readout_flip": 0.02, "crosstalk_zz": 0.0, "seed": 8}
    assert doc["seed"] == 8
    assert doc["qubit_map"]["M"] == 38
    circuits = json.loads((tmp_path / "o" / "circuits.json").read_text())
    assert set(circuits) == {"00", "01", "10", "11"}
    assert cli.main(["simulate", "--p1", "2", "--out", str(tmp_path / "x")]) == 2


def test_verify_gates(capsys):
    assert cli.main(["verify-gates"]) == 0
    out = capsys.readouterr().out
    assert "negative_control_s_dagger" in out and "expected to FAIL" in out
    assert out.count("PASS") >= 20


def test_dump_circuit(capsys):
    assert cli.main(["dump-circuit", "--variant", "ionq", "-a", "1", "-b", "0"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["settings"]["alpha"] == pytest.approx(math.pi / 2)
