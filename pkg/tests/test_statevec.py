import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellfriends import gates as G
from bellfriends.statevec import (
    ConfigurationError, StateVector, ValidationError, apply_1q, apply_2q, apply_matrix,
    bitstring, index_of, init_zero, make_rng, outcome_probabilities, probabilities, sample,
)
from conftest import random_state, random_unitary


@pytest.mark.parametrize("n, expected", [(1, [1, 0]), (2, [1, 0, 0, 0])])
def test_init_zero_small(n, expected):
    np.testing.assert_array_equal(init_zero(n).amplitudes, expected)


def test_init_zero_seven():
    s = init_zero(7)
    assert s.amplitudes.size == 128 and s.amplitudes[0] == 1
    assert s.norm() == 1.0


@pytest.mark.parametrize("n", [0, 25, -1, 2.5])
def test_init_zero_out_of_range(n):
    with pytest.raises(ConfigurationError):
        init_zero(n)


def test_amplitude_length_checked():
    with pytest.raises(ConfigurationError):
        StateVector(2, np.zeros(3))


def test_s0_on_zero_gives_minus_y():
    s = apply_1q(init_zero(1), G.s_gate(0.0), 0)
    np.testing.assert_allclose(s.amplitudes, np.array([1, -1j]) / math.sqrt(2), atol=1e-15)


def test_identity_and_double_x(rng):
    psi = random_state(3, rng)
    s = StateVector(3, psi.copy())
    apply_1q(s, G.I2, 1)
    np.testing.assert_allclose(s.amplitudes, psi, atol=1e-15)
    z = init_zero(1)
    apply_1q(apply_1q(z, G.X, 0), G.X, 0)
    np.testing.assert_array_equal(z.amplitudes, [1, 0])


def test_cx_basis_action():
    # basis |FG> with F on the first wire; qubit 0 control, qubit 1 target
    s = StateVector(2, np.zeros(4))
    s.amplitudes[index_of("10")] = 1
    apply_2q(s, G.CX_DOWN, 0, 1)
    assert outcome_probabilities(s)["11"] == 1.0
    z = apply_2q(init_zero(2), G.CX_DOWN, 0, 1)
    assert outcome_probabilities(z)["00"] == 1.0


@pytest.mark.parametrize("bits", ["00", "01", "10", "11"])
def test_ecr_twice_is_identity(bits):
    s = StateVector(2, np.zeros(4))
    s.amplitudes[index_of(bits)] = 1
    ref = s.amplitudes.copy()
    apply_2q(apply_2q(s, G.ECR_DOWN, 0, 1), G.ECR_DOWN, 0, 1)
    np.testing.assert_allclose(s.amplitudes, ref, atol=1e-15)


def test_bad_gate_inputs():
    s = init_zero(2)
    with pytest.raises(ValidationError):
        apply_1q(s, np.array([[1, 1], [0, 1]]), 0)
    with pytest.raises(ValidationError):
        apply_2q(s, G.CX_DOWN, 1, 1)
    with pytest.raises(IndexError):
        apply_1q(s, G.X, 2)
    with pytest.raises(ValidationError):
        apply_1q(s, G.CX_DOWN, 0)
    # the advisory check can be switched off
    apply_1q(init_zero(1), np.diag([1, 1 + 1e-13]), 0, check=False)


def test_bell_state_probabilities():
    s = StateVector(2, np.array([1, 0, 0, -1j]) / math.sqrt(2))
    p = outcome_probabilities(s)
    assert p == pytest.approx({"00": 0.5, "11": 0.5, "01": 0.0, "10": 0.0}, abs=1e-15)
    assert outcome_probabilities(init_zero(1)) == {"0": 1.0, "1": 0.0}


def test_bitstring_convention():
    # qubit 0 is the LSB of the index and prints leftmost
    assert bitstring(1, 3) == "100"
    assert bitstring(4, 3) == "001"
    assert index_of("100") == 1
    s = apply_1q(init_zero(3), G.X, 2)
    assert outcome_probabilities(s)["001"] == 1.0


@given(st.integers(0, 255))
def test_bitstring_roundtrip(i):
    assert index_of(bitstring(i, 8)) == i


def test_sample_examples():
    assert sample(init_zero(1), 100, 5) == {"0": 100}
    bell = StateVector(2, np.array([1, 0, 0, 1]) / math.sqrt(2))
    n = 10**6
    c = sample(bell, n, 11)
    assert sum(c.values()) == n
    assert abs(c["00"] / n - 0.5) < 5 * math.sqrt(0.25 / n)
    assert sample(bell, 1000, 42) == sample(bell, 1000, 42)
    with pytest.raises(ConfigurationError):
        sample(bell, 0, 1)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.data())
def test_norm_preserved_over_random_circuits(n, seed, data):
    rng = np.random.default_rng(seed)
    s = StateVector(n, random_state(n, rng))
    for _ in range(8):
        if n >= 2 and data.draw(st.booleans()):
            i, j = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            apply_2q(s, random_unitary(4, rng), i, j)
        else:
            apply_1q(s, random_unitary(2, rng), data.draw(st.integers(0, n - 1)))
    assert abs(s.norm() - 1) < 1e-12
    assert abs(probabilities(s).sum() - 1) < 1e-12


def _marginal(p, n, qubits):
    out = {}
    for i, v in enumerate(p):
        key = tuple((i >> q) & 1 for q in qubits)
        out[key] = out.get(key, 0) + v
    return out


@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_gate_is_local(seed, k):
    n = 5
    rng = np.random.default_rng(seed)
    s = StateVector(n, random_state(n, rng))
    others = [q for q in range(n) if q != k]
    before = _marginal(probabilities(s), n, others)
    apply_1q(s, random_unitary(2, rng), k)
    after = _marginal(probabilities(s), n, others)
    for key in before:
        assert after[key] == pytest.approx(before[key], abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(0, 3), st.integers(0, 3))
def test_reversed_gate_on_swapped_wires(seed, i, j):
    if i == j:
        return
    rng = np.random.default_rng(seed)
    psi = random_state(4, rng)
    u = random_unitary(4, rng)
    s1 = apply_2q(StateVector(4, psi.copy()), u, i, j)
    s2 = apply_2q(StateVector(4, psi.copy()), G.reverse(u), j, i)
    np.testing.assert_allclose(s1.amplitudes, s2.amplitudes, atol=1e-13)


@given(st.integers(0, 2**32 - 1), st.permutations([0, 1, 2, 3]))
def test_kernel_matches_dense_kron(seed, perm):
    # reference: the full-register matrix, built entry by entry
    rng = np.random.default_rng(seed)
    n = 4
    psi = random_state(n, rng)
    u = random_unitary(4, rng)
    i, j = perm[:2]
    full = np.zeros((16, 16), dtype=complex)
    for col in range(16):
        bi, bj = (col >> i) & 1, (col >> j) & 1
        for r in range(4):
            row = col & ~(1 << i) & ~(1 << j) | ((r >> 1) << i) | ((r & 1) << j)
            full[row, col] += u[r, 2 * bi + bj]
    out = apply_matrix(psi.copy(), n, u, (i, j))
    np.testing.assert_allclose(out, full @ psi, atol=1e-13)


def test_three_wire_kernel(rng):
    psi = random_state(4, rng)
    out = apply_matrix(psi.copy(), 4, G.cxx_matrix(), (1, 2, 3))
    # CXX on (1, 2, 3): wire 1 controls flips of 2 and 3
    ref = np.zeros_like(psi)
    for i in range(16):
        j = i ^ (0b1100 if (i >> 1) & 1 else 0)
        ref[j] = psi[i]
    np.testing.assert_allclose(out, ref, atol=1e-15)


def test_batched_kernel_matches_rows(rng):
    psi = np.stack([random_state(3, rng) for _ in range(5)])
    u = random_unitary(4, rng)
    batch = apply_matrix(psi.copy(), 3, u, (2, 0))
    for r in range(5):
        np.testing.assert_allclose(batch[r], apply_matrix(psi[r].copy(), 3, u, (2, 0)), atol=1e-15)


def test_rng_streams_independent_and_reproducible():
    a = make_rng(7, 0, 1).integers(0, 2**63, 4)
    b = make_rng(7, 0, 1).integers(0, 2**63, 4)
    c = make_rng(7, 0, 2).integers(0, 2**63, 4)
    assert (a == b).all() and not (a == c).all()
