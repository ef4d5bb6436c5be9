"""JSON interchange format for per-setting shot counts.

    {
      "schema_version": 1,
      "bit_order": "A0A1A2B0B1B2",
      "backend": "ibm-ecr",
      "group_label": "G1",
      "qubit_map": {"A2": 3, ...},            # optional, physical qubit per label
      "seed": 1234,                            # optional
      "noise": {"p1": 0, ...},                 # optional
      "setting_order": [[[0, 1], [1, 1], ...], ...],  # optional, per repetition
      "created": "...",                        # optional, ignored on comparison
      "runs": [
        {"repetition": 0, "a": 0, "b": 1, "shots": 20000, "counts": {"000000": 8561, ...}},
        {"a": 1, "b": 1, "shots": null, "probabilities": {"000000": 0.0732, ...}}
      ]
    }

A run with ``"shots": null`` carries exact probabilities instead of counts.
Physical layouts of the six published qubit groups per device are available
as :data:`QUBIT_GROUPS`.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .stats import CountsTable

SCHEMA_VERSION = 1
BIT_ORDER = "A0A1A2B0B1B2"

_LAYOUT_LABELS = ("A2", "A1", "A0", "M", "B0", "B1", "B2")
_LAYOUTS = {
    "ibm_brisbane": [
        (3, 5, 4, 15, 22, 21, 23), (27, 29, 28, 35, 47, 46, 48), (40, 42, 41, 53, 60, 59, 61),
        (65, 67, 66, 73, 85, 84, 88), (78, 80, 79, 91, 98, 97, 99), (103, 105, 104, 111, 122, 121, 123),
    ],
    "ibm_torino": [
        (3, 5, 4, 16, 23, 22, 24), (28, 30, 29, 36, 48, 47, 49), (41, 43, 42, 54, 61, 60, 62),
        (66, 68, 67, 74, 86, 85, 87), (79, 81, 80, 92, 99, 98, 100), (104, 106, 105, 112, 124, 123, 125),
    ],
    "ibm_kingston": [
        (2, 4, 3, 16, 23, 22, 24), (28, 30, 29, 38, 49, 48, 50), (42, 44, 43, 56, 63, 62, 64),
        (68, 70, 69, 78, 89, 88, 90), (82, 84, 83, 96, 103, 102, 104), (108, 110, 109, 118, 129, 128, 130),
    ],
}
_LAYOUTS["ibm_sherbrooke"] = _LAYOUTS["ibm_brisbane"]

QUBIT_GROUPS = {
    device: {g + 1: dict(zip(_LAYOUT_LABELS, row)) for g, row in enumerate(rows)}
    for device, rows in _LAYOUTS.items()
}


class CountsFileError(ValueError):
    """Schema or consistency violation, with the location that caused it."""


def _locate(text: str, run_index: int) -> str:
    # line number of the run_index-th object inside "runs", for error messages
    pos = text.find('"runs"')
    if pos < 0:
        return ""
    depth, seen = 0, -1
    for i in range(text.index("[", pos) + 1, len(text)):
        ch = text[i]
        if ch == "{":
            if depth == 0:
                seen += 1
                if seen == run_index:
                    return f" (line {text.count(chr(10), 0, i) + 1})"
            depth += 1
        elif ch == "}":
            depth -= 1
        elif ch == "]" and depth == 0:
            break
    return ""


def _check_bits(bits, where: str) -> None:
    if not isinstance(bits, str) or len(bits) != 6 or any(c not in "01" for c in bits):
        raise CountsFileError(f"{where}: outcome key {bits!r} is not a 6-bit string in {BIT_ORDER} order")


def validate(doc: dict, text: str | None = None) -> None:
    def fail(msg, run=None):
        ctx = _locate(text, run) if (text is not None and run is not None) else ""
        raise CountsFileError(msg + ctx)

    if not isinstance(doc, dict):
        fail("top level must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        fail(f"unsupported schema_version {doc.get('schema_version')!r} (expected {SCHEMA_VERSION})")
    if doc.get("bit_order", BIT_ORDER) != BIT_ORDER:
        fail(f"bit_order must be {BIT_ORDER!r}")
    runs = doc.get("runs")
    if not isinstance(runs, list) or not runs:
        fail("'runs' must be a non-empty list")
    for i, run in enumerate(runs):
        where = f"runs[{i}]"
        if not isinstance(run, dict):
            fail(f"{where}: must be an object", i)
        if run.get("a") not in (0, 1) or run.get("b") not in (0, 1):
            fail(f"{where}: settings a, b must be 0 or 1", i)
        shots = run.get("shots", "missing")
        if shots is None:
            probs = run.get("probabilities")
            if not isinstance(probs, dict) or not probs:
                fail(f"{where}: exact run (shots null) needs a 'probabilities' object", i)
            for k, v in probs.items():
                _check_bits(k, where)
                if not isinstance(v, (int, float)) or v < 0:
                    fail(f"{where}: probability for {k} must be non-negative", i)
            if abs(sum(probs.values()) - 1.0) > 1e-9:
                fail(f"{where}: probabilities sum to {sum(probs.values())!r}", i)
            continue
        if not isinstance(shots, int) or isinstance(shots, bool) or shots < 1:
            fail(f"{where}: 'shots' must be a positive integer or null", i)
        counts = run.get("counts")
        if not isinstance(counts, dict):
            fail(f"{where}: 'counts' must be an object", i)
        for k, v in counts.items():
            _check_bits(k, where)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                fail(f"{where}: count for {k} must be a non-negative integer", i)
        total = sum(counts.values())
        if total != shots:
            fail(f"{where}: counts sum to {total} but shots = {shots}", i)


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CountsFileError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    validate(doc, text)
    return doc


def load(path) -> dict:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def dump(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def to_table(doc: dict) -> CountsTable:
    """Aggregate all runs (summing repetitions) into one table."""
    t = CountsTable()
    for run in doc["runs"]:
        a, b = run["a"], run["b"]
        if run["shots"] is None:
            if (a, b) in t.data:
                raise CountsFileError(f"setting {(a, b)} given as exact probabilities more than once")
            t.set_probabilities(a, b, run["probabilities"])
        else:
            if math.isinf(t.shots.get((a, b), 0)):
                raise CountsFileError(f"setting {(a, b)} mixes counts and exact probabilities")
            t.add(a, b, run["counts"])
    return t


def payload(doc: dict) -> str:
    """Canonical serialization without the timestamp, for replay comparison."""
    return dumps({k: v for k, v in doc.items() if k != "created"})
