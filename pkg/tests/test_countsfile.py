import json

import pytest

from bellfriends import countsfile as CF
from bellfriends.cli import RunConfig, cmd_simulate


@pytest.fixture(scope="module")
def doc():
    return cmd_simulate(RunConfig(variant="ionq", shots=50, reps=2, seed=1))


def test_round_trip(doc):
    text = CF.dumps(doc)
    again = CF.loads(text)
    assert again == json.loads(text)
    assert CF.payload(again) == CF.payload(doc)
    t = CF.to_table(again)
    assert all(t.shots[s] == 100 for s in t.shots)


def test_payload_ignores_timestamp(doc):
    other = dict(doc, created="1999-01-01T00:00:00+00:00")
    assert CF.payload(other) == CF.payload(doc)


def _broken(doc, edit):
    d = json.loads(CF.dumps(doc))
    edit(d)
    return CF.dumps(d)


@pytest.mark.parametrize("edit, message", [
    (lambda d: d["runs"][3]["counts"].update({"000000": 10**6}), "counts sum"),
    (lambda d: d.update(runs=[]), "non-empty"),
    (lambda d: d.update(schema_version=9), "schema_version"),
    (lambda d: d["runs"][1].update(a=2), "settings"),
    (lambda d: d["runs"][2]["counts"].update({"0001": 0}), "6-bit"),
    (lambda d: d["runs"][0].update(shots=0), "positive integer"),
    (lambda d: d.update(bit_order="B0B1B2A0A1A2"), "bit_order"),
])
def test_validation_errors(doc, edit, message):
    with pytest.raises(CF.CountsFileError, match=message):
        CF.loads(_broken(doc, edit))


def test_error_carries_line(doc):
    text = _broken(doc, lambda d: d["runs"][3]["counts"].update({"000000": 10**6}))
    with pytest.raises(CF.CountsFileError) as exc:
        CF.loads(text)
    line = int(str(exc.value).rsplit("line ", 1)[1].rstrip(")"))
    lines = text.splitlines()
    # the reported line opens the offending run object
    assert lines[line - 1].strip() == "{"
    assert any('"a"' in l for l in lines[line:line + 6])


def test_bad_json_position():
    with pytest.raises(CF.CountsFileError, match="line 2, column"):
        CF.loads('{"schema_version": 1,\n "runs": [}')


def test_exact_runs():
    d = {"schema_version": 1, "runs": [
        {"a": 0, "b": 0, "shots": None, "probabilities": {"000000": 0.5, "111111": 0.5}}]}
    t = CF.to_table(CF.loads(json.dumps(d)))
    assert t.shots[(0, 0)] == float("inf")
    d["runs"].append({"a": 0, "b": 0, "shots": 2, "counts": {"000000": 2}})
    with pytest.raises(CF.CountsFileError, match="mixes"):
        CF.to_table(CF.loads(json.dumps(d)))
    d["runs"][0]["probabilities"]["000000"] = 0.4
    with pytest.raises(CF.CountsFileError, match="sum"):
        CF.loads(json.dumps(d))


def test_qubit_groups():
    g = CF.QUBIT_GROUPS["ibm_torino"][1]
    assert g == {"A2": 3, "A1": 5, "A0": 4, "M": 16, "B0": 23, "B1": 22, "B2": 24}
    assert CF.QUBIT_GROUPS["ibm_sherbrooke"] == CF.QUBIT_GROUPS["ibm_brisbane"]
    for device, groups in CF.QUBIT_GROUPS.items():
        assert len(groups) == 6
        for layout in groups.values():
            assert len(set(layout.values())) == 7
