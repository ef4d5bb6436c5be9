"""Dense statevector storage and stride-based gate application.

Qubit-order convention: qubit ``q`` is bit ``q`` of the amplitude index, so
qubit 0 is the least significant bit.  Bitstrings are printed with qubit 0
leftmost, i.e. ``bitstring(index, n)[q] == str((index >> q) & 1)``.

Gate matrices are indexed in the order their wires are listed: for a gate
applied to ``(w0, w1)`` the matrix row/column index is ``2*bit(w0) + bit(w1)``.
This matches the ``|FG>`` basis ``|00>, |01>, |10>, |11>`` used for the
two-qubit gates in :mod:`bellfriends.gates`.

The low-level kernel :func:`apply_matrix` works on arrays of shape
``(..., 2**n)`` so a batch of trajectories can be evolved at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "MAX_QUBITS",
    "ConfigurationError",
    "ValidationError",
    "StateVector",
    "init_zero",
    "apply_matrix",
    "apply_1q",
    "apply_2q",
    "apply_gate",
    "probabilities",
    "outcome_probabilities",
    "sample",
    "bitstring",
    "index_of",
    "make_rng",
]

MAX_QUBITS = 24
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12

# Set to False to skip the gate-entry unitarity check in hot loops.
CHECK_UNITARY = True


class ConfigurationError(ValueError):
    """Invalid simulation parameters (qubit counts, shots, ...)."""


class ValidationError(ValueError):
    """Invalid gate matrix or gate placement."""


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ConfigurationError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def make_rng(seed, *stream) -> np.random.Generator:
    """PCG64 generator for ``seed``, optionally on an independent sub-stream.

    ``make_rng(seed, i, j)`` gives a stream that depends only on
    ``(seed, i, j)``, so parallel jobs can be seeded without coordination.
    """
    if isinstance(seed, np.random.Generator):
        if stream:
            raise TypeError("sub-streams need an integer seed")
        return seed
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def init_zero(n_qubits: int) -> StateVector:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits!r}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n_qubits), amps)


def _check_unitary(gate: np.ndarray, tol: float = UNITARY_TOL) -> None:
    dim = gate.shape[0]
    err = np.max(np.abs(gate.conj().T @ gate - np.eye(dim)))
    if err > tol:
        raise ValidationError(f"gate is not unitary (max |U^dag U - I| = {err:.3g})")


def apply_matrix(psi: np.ndarray, n_qubits: int, gate: np.ndarray, wires: Sequence[int]) -> np.ndarray:
    """Apply a ``2**k x 2**k`` matrix to ``wires`` of ``psi`` in place.

    ``psi`` has shape ``(..., 2**n_qubits)`` and must be C-contiguous.  No
    full-register matrix is formed; the amplitude array is viewed as a rank-n
    tensor and the k gate axes are contracted.
    """
    k = len(wires)
    view = psi.reshape(psi.shape[:-1] + (2,) * n_qubits)
    lead = psi.ndim - 1
    # qubit q lives on tensor axis lead + (n-1-q) because qubit 0 is the LSB
    axes = [lead + n_qubits - 1 - w for w in wires]
    sub = np.moveaxis(view, axes, list(range(-k, 0)))
    if k > 2:
        g = gate.reshape((2,) * (2 * k))
        out_idx, in_idx = "abc"[:k], "xyz"[:k]
        sub[...] = np.einsum(f"{out_idx}{in_idx},...{in_idx}->...{out_idx}", g, sub)
        return psi
    # explicit sweep over the 2**k amplitude slices, skipping zero entries
    dim = 1 << k
    slices = [sub[..., i] if k == 1 else sub[..., i >> 1, i & 1] for i in range(dim)]
    old = [s.copy() for s in slices]
    for r in range(dim):
        out = slices[r]
        out[...] = 0
        for c in range(dim):
            coef = gate[r, c]
            if coef == 1:
                out += old[c]
            elif coef != 0:
                out += coef * old[c]
    return psi


def _validate_wires(state: StateVector, wires: Sequence[int]) -> None:
    for w in wires:
        if not 0 <= w < state.n_qubits:
            raise IndexError(f"qubit index {w} out of range for {state.n_qubits} qubits")
    if len(set(wires)) != len(wires):
        raise ValidationError(f"gate wires must be distinct, got {tuple(wires)}")


def apply_gate(state: StateVector, gate, wires: Sequence[int], check: bool | None = None) -> StateVector:
    """Apply ``gate`` (matrix or object with ``.matrix``) to ``wires`` in place."""
    matrix = np.asarray(getattr(gate, "matrix", gate), dtype=np.complex128)
    wires = tuple(int(w) for w in wires)
    if matrix.shape != (1 << len(wires),) * 2:
        raise ValidationError(f"matrix shape {matrix.shape} does not fit {len(wires)} wire(s)")
    _validate_wires(state, wires)
    if CHECK_UNITARY if check is None else check:
        _check_unitary(matrix)
    apply_matrix(state.amplitudes, state.n_qubits, matrix, wires)
    if __debug__:
        drift = abs(state.norm() - 1.0)
        if drift > NORM_TOL:
            raise ValidationError(f"norm drifted by {drift:.3g} after gate on {wires}")
    return state


def apply_1q(state: StateVector, gate, target: int, check: bool | None = None) -> StateVector:
    return apply_gate(state, gate, (target,), check=check)


def apply_2q(state: StateVector, gate, first: int, second: int, check: bool | None = None) -> StateVector:
    return apply_gate(state, gate, (first, second), check=check)


def probabilities(state: StateVector) -> np.ndarray:
    """Born probabilities indexed by basis index (see module docstring)."""
    p = np.abs(state.amplitudes) ** 2
    return p


def bitstring(index: int, n_qubits: int) -> str:
    return "".join("1" if (index >> q) & 1 else "0" for q in range(n_qubits))


def index_of(bits: str) -> int:
    if any(c not in "01" for c in bits):
        raise ValidationError(f"not a bitstring: {bits!r}")
    return sum(1 << q for q, c in enumerate(bits) if c == "1")


def outcome_probabilities(state: StateVector) -> dict[str, float]:
    p = probabilities(state)
    return {bitstring(i, state.n_qubits): float(p[i]) for i in range(p.size)}


def sample(state: StateVector, shots: int, seed) -> dict[str, int]:
    """Draw ``shots`` computational-basis samples; returns nonzero counts only."""
    if shots < 1:
        raise ConfigurationError(f"shots must be >= 1, got {shots}")
    rng = make_rng(seed)
    p = probabilities(state)
    counts = rng.multinomial(int(shots), p / p.sum())
    return {bitstring(int(i), state.n_qubits): int(counts[i]) for i in np.flatnonzero(counts)}
