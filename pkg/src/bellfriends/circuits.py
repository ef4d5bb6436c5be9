"""The two Bell-with-friends circuits and their closed-form oracle.

Wire numbering follows the circuit drawings: IBM uses q0..q6 =
A2, A1, A0, M, B0, B1, B2 and IonQ uses q0..q5 = A2, A1, A0, B0, B1, B2.
``Circuit.readout`` maps labels to wires and is the only place that
association lives; downstream code should go through :func:`label_distribution`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from . import gates as G
from .statevec import StateVector, apply_matrix, bitstring, init_zero, probabilities

LABELS = ("A0", "A1", "A2", "B0", "B1", "B2")
DEFAULT_ALPHAS = (0.0, math.pi / 2)
DEFAULT_BETAS = (-math.pi / 4, math.pi / 4)

Native = Literal["ideal", "ecr", "cz", "zz"]


@dataclass(frozen=True)
class Settings:
    a: int
    b: int
    alpha: float
    beta: float

    @classmethod
    def from_bits(cls, a: int, b: int, alphas=DEFAULT_ALPHAS, betas=DEFAULT_BETAS) -> "Settings":
        if a not in (0, 1) or b not in (0, 1):
            raise ValueError(f"setting bits must be 0 or 1, got ({a}, {b})")
        return cls(a, b, float(alphas[a]), float(betas[b]))


SETTING_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Op:
    gate: G.Gate
    wires: tuple[int, ...]
    # "setting", "entangle", "swap" or "copy"; native expansions inherit it
    role: str = ""


@dataclass(frozen=True)
class Circuit:
    name: str
    n_wires: int
    ops: tuple[Op, ...]
    readout: dict = field(default_factory=dict)
    settings: Settings | None = None

    def __post_init__(self):
        wires = list(self.readout.values())
        if len(set(wires)) != len(wires) or len(set(self.readout)) != len(self.readout):
            raise ValueError("readout labels and wires must be unique")
        for op in self.ops:
            if any(not 0 <= w < self.n_wires for w in op.wires):
                raise ValueError(f"{op.gate.name} on {op.wires} outside {self.n_wires} wires")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_wires": self.n_wires,
            "readout": dict(self.readout),
            "settings": None if self.settings is None else {
                "a": self.settings.a, "b": self.settings.b,
                "alpha": self.settings.alpha, "beta": self.settings.beta,
            },
            "ops": [
                {"gate": op.gate.name, "params": dict(op.gate.params), "wires": list(op.wires),
                 "role": op.role}
                for op in self.ops
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _cx(control: int, target: int, native: Native, role: str) -> list[Op]:
    if native == "ideal":
        seq = [(G.GATES["CX"], (control, target))]
    elif native == "ecr":
        seq = G.cx_from_ecr(control, target)
    elif native == "cz":
        seq = G.cx_from_cz(control, target)
    elif native == "zz":
        seq = G.cx_from_zz(control, target)
    else:
        raise ValueError(f"unknown native gate set {native!r}")
    return [Op(g, w, role) for g, w in seq]


def _cx_up(first: int, second: int, native: Native, role: str) -> list[Op]:
    # CX with control `second`, keeping the hardware two-qubit gate oriented first -> second
    if native == "ecr":
        return [Op(g, w, role) for g, w in G.cx_up_from_ecr(first, second)]
    return _cx(second, first, native, role)


def _copies(a0: int, a1: int, a2: int, b0: int, b1: int, b2: int, native: Native) -> list[Op]:
    ops: list[Op] = []
    for ctrl, tgt in ((a0, a1), (a0, a2), (b0, b1), (b0, b2)):
        ops += _cx(ctrl, tgt, native, "copy")
    return ops


def _settings_ops(s: Settings, a0: int, b0: int) -> list[Op]:
    return [Op(G.s_gate(s.alpha), (a0,), "setting"), Op(G.s_gate(s.beta), (b0,), "setting")]


def build_ibm_circuit(s: Settings, native: Native = "ecr", copy_first: bool = False) -> Circuit:
    """Seven-wire superconducting variant with a middle source qubit M.

    ``copy_first`` moves the friend copies before the setting rotations; it
    exists only as the negative control showing that copying too early
    destroys unanimity.
    """
    a2, a1, a0, m, b0, b1, b2 = range(7)
    ops: list[Op] = [Op(G.s_gate(0.0), (m,), "entangle")]
    ops += _cx(m, b0, native, "entangle")
    # CX_up CX_down |phi 0> = |0 phi> moves M's half of the pair onto A0
    ops += _cx(m, a0, native, "swap")
    ops += _cx_up(m, a0, native, "swap")
    settings = _settings_ops(s, a0, b0)
    copies = _copies(a0, a1, a2, b0, b1, b2, native)
    ops += copies + settings if copy_first else settings + copies
    readout = {"A2": a2, "A1": a1, "A0": a0, "M": m, "B0": b0, "B1": b1, "B2": b2}
    return Circuit(f"ibm-{native}", 7, tuple(ops), readout, s)


def build_ionq_circuit(s: Settings, native: Native = "zz") -> Circuit:
    """Six-wire trapped-ion variant; entanglement from a single ZZ_{pi/4}."""
    a2, a1, a0, b0, b1, b2 = range(6)
    xp, zz = G.GATES["X+"], G.GATES["ZZ"]
    ops = [
        Op(xp, (a0,), "entangle"),
        Op(xp, (b0,), "entangle"),
        Op(zz, (a0, b0), "entangle"),
        Op(xp, (a0,), "entangle"),
        Op(xp, (b0,), "entangle"),
    ]
    ops += _settings_ops(s, a0, b0)
    ops += _copies(a0, a1, a2, b0, b1, b2, native)
    readout = {"A2": a2, "A1": a1, "A0": a0, "B2": b2, "B1": b1, "B0": b0}
    return Circuit(f"ionq-{native}", 6, tuple(ops), readout, s)


VARIANTS = {
    "ibm-ecr": lambda s: build_ibm_circuit(s, "ecr"),
    "ibm-cz": lambda s: build_ibm_circuit(s, "cz"),
    "ionq": lambda s: build_ionq_circuit(s, "zz"),
}


def build_circuit(variant: str, s: Settings) -> Circuit:
    try:
        return VARIANTS[variant](s)
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}; choose from {sorted(VARIANTS)}") from None


def simulate(circuit: Circuit) -> StateVector:
    """Ideal (noiseless) evolution of ``circuit`` from |0...0>."""
    state = init_zero(circuit.n_wires)
    for op in circuit.ops:
        apply_matrix(state.amplitudes, state.n_qubits, op.gate.matrix, op.wires)
    return state


def label_index_map(circuit: Circuit, labels: Iterable[str] = LABELS) -> np.ndarray:
    """For every wire basis index, the index of the labelled outcome (label 0 = LSB)."""
    idx = np.arange(1 << circuit.n_wires)
    out = np.zeros_like(idx)
    for pos, lab in enumerate(labels):
        out |= ((idx >> circuit.readout[lab]) & 1) << pos
    return out


def label_distribution(circuit: Circuit, probs: np.ndarray, labels: Iterable[str] = LABELS) -> np.ndarray:
    """Marginalise wire probabilities onto labelled outcomes (unlisted wires are traced out).

    Index ``j`` of the result has label ``labels[k]`` at bit ``k``, so
    ``statevec.bitstring(j, 6)`` prints A0 A1 A2 B0 B1 B2.
    """
    labels = tuple(labels)
    return np.bincount(label_index_map(circuit, labels), weights=probs, minlength=1 << len(labels))


def ideal_label_probabilities(circuit: Circuit) -> np.ndarray:
    return label_distribution(circuit, probabilities(simulate(circuit)))


# --- closed-form oracle -----------------------------------------------------

_ALL_A0 = 0b000111  # A0 A1 A2 set (labels 0..2)
_ALL_B0 = 0b111000


def analytic_final_state(alpha: float, beta: float) -> StateVector:
    """Four-term pre-measurement state on qubits A0 A1 A2 B0 B1 B2 (qubit 0 = A0)."""
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise ValueError("angles must be finite")
    amps = np.zeros(64, dtype=np.complex128)
    s = alpha + beta
    r8 = math.sqrt(8.0)
    amps[0] = (1 + 1j * np.exp(1j * s)) / r8
    amps[_ALL_A0 | _ALL_B0] = -(1j + np.exp(-1j * s)) / r8
    amps[_ALL_A0] = -(1j * np.exp(-1j * alpha) + np.exp(1j * beta)) / r8
    amps[_ALL_B0] = -(1j * np.exp(-1j * beta) + np.exp(1j * alpha)) / r8
    return StateVector(6, amps)


def analytic_probabilities(alpha: float, beta: float) -> dict[str, float]:
    """All 64 labelled outcomes, keyed A0A1A2B0B1B2; only four are nonzero."""
    s = math.sin(alpha + beta)
    out = {bitstring(j, 6): 0.0 for j in range(64)}
    out["000000"] = out["111111"] = (1 - s) / 4
    out["111000"] = out["000111"] = (1 + s) / 4
    return out
