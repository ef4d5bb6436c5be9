"""Stochastic Pauli noise, readout flips and setting-gate crosstalk.

Noise is simulated by trajectories: after every non-virtual gate each
touched wire (or wire pair, for two-qubit gates) suffers a uniformly random
non-identity Pauli with probability ``p1`` (or ``p2``).  Shots are grouped by
their fault pattern, every distinct pattern is evolved once as a row of a
batched statevector, and the shots belonging to it are drawn from its Born
distribution.  This is distributionally identical to running one trajectory
per shot.

``crosstalk_zz`` replaces the two setting rotations by one concurrent
evolution on (A0, B0) that also contains a ``theta/2 Z Z`` term.  Because the
coupling is on during the setting rotations it makes each party's marginals
depend on the other party's angle; it is a positive control for the
signaling scan, not a model of any particular device.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import gates as G
from .circuits import LABELS, Circuit, label_index_map
from .statevec import StateVector, apply_matrix, bitstring, make_rng

# max rows of the batched statevector held at once
BATCH_ROWS = 4096


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    readout_flip: float = 0.0
    crosstalk_zz: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        for name in ("p1", "p2", "readout_flip"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be a probability in [0, 1], got {v!r}")
        if not math.isfinite(self.crosstalk_zz):
            raise ValueError("crosstalk_zz must be finite")

    @property
    def is_ideal(self) -> bool:
        return self.p1 == self.p2 == self.readout_flip == self.crosstalk_zz == 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseModel":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown noise parameters: {sorted(unknown)}")
        return cls(**{k: v for k, v in d.items()})


def setting_generator(alpha: float) -> np.ndarray:
    """Hermitian H with S_alpha = exp(-i pi/4 H)."""
    return math.cos(alpha) * G.X - math.sin(alpha) * G.Y


def concurrent_setting_unitary(alpha: float, beta: float, theta: float) -> np.ndarray:
    """Both setting rotations run simultaneously with a ZZ coupling of angle ``theta``.

    Reduces to kron(S_alpha, S_beta) at theta = 0.
    """
    h = (math.pi / 4) * (np.kron(setting_generator(alpha), G.I2) + np.kron(G.I2, setting_generator(beta)))
    h = h + (theta / 2) * np.kron(G.Z, G.Z)
    return expm(-1j * h)


@dataclass(frozen=True)
class Step:
    matrix: np.ndarray
    wires: tuple[int, ...]
    # (wires, probability) for every independent fault location after this step
    sites: tuple[tuple[tuple[int, ...], float], ...]


def _sites_for(gate: G.Gate, wires: tuple[int, ...], model: NoiseModel):
    if gate.virtual:
        return ()
    p = model.p1 if len(wires) == 1 else model.p2
    return ((wires, p),) if p > 0 else ()


def compile_steps(circuit: Circuit, model: NoiseModel) -> list[Step]:
    steps: list[Step] = []
    ops = list(circuit.ops)
    i = 0
    while i < len(ops):
        op = ops[i]
        if model.crosstalk_zz and op.role == "setting":
            a0, b0 = circuit.readout["A0"], circuit.readout["B0"]
            pair = {o.wires[0]: o for o in ops[i:i + 2] if o.role == "setting"}
            if set(pair) != {a0, b0}:
                raise ValueError("crosstalk needs adjacent setting gates on A0 and B0")
            u = concurrent_setting_unitary(
                pair[a0].gate.params["alpha"], pair[b0].gate.params["alpha"], model.crosstalk_zz
            )
            sites = tuple(((w,), model.p1) for w in (a0, b0) if model.p1 > 0)
            steps.append(Step(u, (a0, b0), sites))
            i += 2
            continue
        steps.append(Step(op.gate.matrix, op.wires, _sites_for(op.gate, op.wires, model)))
        i += 1
    return steps


def _sample_fault_patterns(steps: Sequence[Step], shots: int, rng: np.random.Generator):
    """Group ``shots`` by fault pattern.

    Returns ``(patterns, counts, sites)`` where ``patterns[k]`` is an int
    array of event codes ``site * 16 + pauli`` (empty for the fault-free
    pattern) and ``sites`` lists ``(step, wires, p)`` per fault location.
    """
    sites = [(si, w, p) for si, st in enumerate(steps) for (w, p) in st.sites]
    shot_ids, codes = [], []
    for s, (_, w, p) in enumerate(sites):
        k = int(rng.binomial(shots, p))
        if k == 0:
            continue
        shot_ids.append(rng.choice(shots, size=k, replace=False))
        codes.append(s * 16 + rng.integers(1, 4 ** len(w), size=k))
    if not shot_ids:
        return [np.empty(0, dtype=np.int64)], np.array([shots]), sites
    shot_ids = np.concatenate(shot_ids)
    codes = np.concatenate(codes)
    order = np.lexsort((codes, shot_ids))
    shot_ids, codes = shot_ids[order], codes[order]
    faulty, start, per_shot = np.unique(shot_ids, return_index=True, return_counts=True)
    group = np.repeat(np.arange(faulty.size), per_shot)
    rank = np.arange(shot_ids.size) - start[group]
    width = int(per_shot.max())
    table = np.full((faulty.size, width), -1, dtype=np.int64)
    table[group, rank] = codes
    bits = int(len(sites) * 16).bit_length()
    if width * bits <= 62:
        # pack each row into one integer key; a 1-d unique is much cheaper than axis=0
        key = ((table + 1) << (bits * np.arange(width))).sum(axis=1)
        _, first, mult = np.unique(key, return_index=True, return_counts=True)
        uniq = table[first]
    else:
        uniq, mult = np.unique(table, axis=0, return_counts=True)
    patterns = [np.empty(0, dtype=np.int64)] + [row[row >= 0] for row in uniq]
    counts = np.concatenate([[shots - faulty.size], mult])
    return patterns, counts, sites


def _evolve_batch(steps, sites, patterns, n_wires: int) -> np.ndarray:
    """Final statevectors for each fault pattern, shape (len(patterns), 2**n).

    Every row equals the fault-free state until its first fault, so the clean
    state is evolved once and rows join the batch only at their first fault.
    Rows are ordered by that step, which keeps the active rows a contiguous
    prefix of the array.
    """
    rows = len(patterns)
    never = len(steps)
    first = np.full(rows, never)
    # faults[step] -> {(wires, pauli): [row, ...]} in sorted-row numbering
    faults: dict[int, dict] = {}
    decoded = []
    for r, pat in enumerate(patterns):
        ev = [(sites[site][0], sites[site][1], pauli) for site, pauli in (divmod(int(c), 16) for c in pat)]
        decoded.append(ev)
        if ev:
            first[r] = min(e[0] for e in ev)
    order = np.argsort(first, kind="stable")
    for pos, r in enumerate(order):
        for step, wires, pauli in decoded[r]:
            faults.setdefault(step, {}).setdefault((wires, pauli), []).append(pos)
    joined = np.searchsorted(first[order], np.arange(never + 1), side="right")

    clean = np.zeros(1 << n_wires, dtype=np.complex128)
    clean[0] = 1.0
    psi = np.empty((rows, 1 << n_wires), dtype=np.complex128)
    active = 0
    for si, st in enumerate(steps):
        apply_matrix(clean, n_wires, st.matrix, st.wires)
        if active:
            apply_matrix(psi[:active], n_wires, st.matrix, st.wires)
        psi[active:joined[si]] = clean
        active = joined[si]
        for (wires, pauli), rs in faults.get(si, {}).items():
            idx = np.asarray(rs)
            sub = psi[idx]
            apply_matrix(sub, n_wires, G.pauli_string(pauli, len(wires)), wires)
            psi[idx] = sub
    psi[active:] = clean
    out = np.empty_like(psi)
    out[order] = psi
    return out


def _flip_mask_probs(n_bits: int, f: float) -> np.ndarray:
    weight = np.array([bin(m).count("1") for m in range(1 << n_bits)])
    return f ** weight * (1 - f) ** (n_bits - weight)


def apply_readout_flips_counts(counts: np.ndarray, n_bits: int, f: float, rng) -> np.ndarray:
    """Flip every bit of every shot independently with probability ``f``.

    Shots sharing an outcome are split over the 2**n flip masks with one
    multinomial draw, which is exact and avoids expanding to per-shot arrays.
    """
    if f == 0:
        return counts.copy()
    probs = _flip_mask_probs(n_bits, f)
    probs = probs / probs.sum()
    split = rng.multinomial(counts.astype(np.int64), np.broadcast_to(probs, (counts.size, probs.size)))
    out = np.zeros_like(counts)
    idx = np.arange(counts.size)
    for m in range(probs.size):
        np.add.at(out, idx ^ m, split[:, m])
    return out


def apply_readout_flips(bits: str, model: NoiseModel, rng) -> str:
    """Per-shot form: each character flipped independently with ``readout_flip``."""
    rng = make_rng(rng)
    flips = rng.random(len(bits)) < model.readout_flip
    return "".join(("1" if c == "0" else "0") if fl else c for c, fl in zip(bits, flips))


def sample_label_counts(circuit: Circuit, model: NoiseModel, shots: int, rng,
                        labels: Sequence[str] = LABELS) -> np.ndarray:
    """Counts over labelled outcomes (index per :func:`circuits.label_distribution`)."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = make_rng(rng)
    steps = compile_steps(circuit, model)
    patterns, mult, sites = _sample_fault_patterns(steps, shots, rng)
    lmap = label_index_map(circuit, labels)
    n_out = 1 << len(labels)
    onehot = np.zeros((lmap.size, n_out))
    onehot[np.arange(lmap.size), lmap] = 1.0
    total = np.zeros(n_out, dtype=np.int64)
    for lo in range(0, len(patterns), BATCH_ROWS):
        chunk = patterns[lo:lo + BATCH_ROWS]
        psi = _evolve_batch(steps, sites, chunk, circuit.n_wires)
        p = (np.abs(psi) ** 2) @ onehot
        p /= p.sum(axis=1, keepdims=True)
        total += rng.multinomial(mult[lo:lo + BATCH_ROWS], p).sum(axis=0)
    return apply_readout_flips_counts(total, len(labels), model.readout_flip, rng)


def exact_label_probabilities(circuit: Circuit, model: NoiseModel,
                              labels: Sequence[str] = LABELS) -> np.ndarray:
    """Infinite-shot label distribution; crosstalk and readout flips are handled exactly.

    Depolarizing faults would need a sum over every fault pattern, so models
    with ``p1`` or ``p2`` set are refused.
    """
    if model.p1 or model.p2:
        raise ValueError("exact probabilities are available only without depolarizing noise")
    steps = compile_steps(circuit, model)
    psi = _evolve_batch(steps, [], [np.empty(0, dtype=np.int64)], circuit.n_wires)[0]
    probs = np.bincount(label_index_map(circuit, labels), weights=np.abs(psi) ** 2,
                        minlength=1 << len(labels))
    if model.readout_flip:
        masks = _flip_mask_probs(len(labels), model.readout_flip)
        idx = np.arange(probs.size)
        probs = sum(masks[m] * probs[idx ^ m] for m in range(masks.size))
    return probs / probs.sum()


def counts_to_dict(counts: np.ndarray, n_bits: int = len(LABELS)) -> dict[str, int]:
    return {bitstring(int(j), n_bits): int(counts[j]) for j in np.flatnonzero(counts)}


# --- single-trajectory interface ----------------------------------------------


def apply_channel(state: StateVector, model: NoiseModel, gate: G.Gate, wires: Sequence[int], rng) -> StateVector:
    """Fault step after ``gate`` on ``wires``: maybe insert a random non-identity Pauli."""
    rng = make_rng(rng)
    for w, p in _sites_for(gate, tuple(wires), model):
        if rng.random() < p:
            code = int(rng.integers(1, 4 ** len(w)))
            apply_matrix(state.amplitudes, state.n_qubits, G.pauli_string(code, len(w)), w)
    return state


def run_trajectory(circuit: Circuit, model: NoiseModel, rng) -> StateVector:
    """One noisy trajectory, gate by gate (reference path for the batched sampler)."""
    rng = make_rng(rng)
    state = StateVector(circuit.n_wires, np.eye(1, 1 << circuit.n_wires, dtype=np.complex128)[0])
    for st in compile_steps(circuit, model):
        apply_matrix(state.amplitudes, state.n_qubits, st.matrix, st.wires)
        for w, p in st.sites:
            if rng.random() < p:
                code = int(rng.integers(1, 4 ** len(w)))
                apply_matrix(state.amplitudes, state.n_qubits, G.pauli_string(code, len(w)), w)
    return state
