import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import gate_unitary
from partialqec.pauli import DimensionError, PauliString, UnsupportedGateError
from partialqec.tableau import CliffordGate, StabilizerTableau, projector_expectation

KINDS_1Q = ["H", "S", "SDG", "X", "Y", "Z", "SX"]


def random_circuit(n, depth, rng):
    gates = []
    for _ in range(depth):
        if n > 1 and rng.random() < 0.4:
            c, t = rng.choice(n, 2, replace=False)
            gates.append(CliffordGate("CNOT", (int(c), int(t))))
        else:
            gates.append(CliffordGate(str(rng.choice(KINDS_1Q)), (int(rng.integers(n)),)))
    return gates


def dense_state(n, gates):
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for g in gates:
        psi = gate_unitary(g.kind, g.targets, n, g.param) @ psi
    return psi


def run(n, gates):
    t = StabilizerTableau(n)
    for g in gates:
        t.apply_gate(g)
    return t


def test_projectors_match_dense_on_random_circuits():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        gates = random_circuit(n, int(rng.integers(1, 25)), rng)
        t = run(n, gates)
        probs = np.abs(dense_state(n, gates)) ** 2
        for idx, bits in enumerate(itertools.product([0, 1], repeat=n)):
            assert abs(projector_expectation(t, bits) - probs[idx]) < 1e-12
        assert t.check_invariants()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 30), st.integers(0, 2**31))
def test_stabilizers_fix_the_dense_state(n, depth, seed):
    gates = random_circuit(n, depth, np.random.default_rng(seed))
    t = run(n, gates)
    psi = dense_state(n, gates)
    for s in t.stabilizers():
        np.testing.assert_allclose(s.to_matrix() @ psi, psi, atol=1e-10)
    assert t.check_invariants()


def test_bell_state_measurement_correlates(rng):
    for _ in range(20):
        t = StabilizerTableau(2).apply("H", 0).apply("CNOT", 0, 1)
        a, random_a = t.measure_pauli(PauliString.from_str("ZI"), rng)
        b, random_b = t.measure_pauli(PauliString.from_str("IZ"), rng)
        assert random_a and not random_b and a == b


def test_forced_outcome_and_projector_probability():
    t = StabilizerTableau(1).apply("H", 0)
    assert t.projector_probability([PauliString.from_str("Z")]) == pytest.approx(0.5)
    assert t.projector_probability([PauliString.from_str("X")]) == 1.0
    assert t.projector_probability([PauliString.from_str("-X")]) == 0.0
    out, _ = t.measure_pauli(PauliString.from_str("Z"), forced=-1)
    assert out == -1
    assert projector_expectation(t, [1]) == 1.0


def test_fault_flips_anticommuting_rows():
    t = StabilizerTableau(2)
    t.apply_fault(PauliString.from_str("XI"))
    assert projector_expectation(t, [1, 0]) == 1.0


def test_rejects_bad_input():
    with pytest.raises(UnsupportedGateError):
        CliffordGate("T", (0,))
    with pytest.raises(ValueError):
        CliffordGate("CNOT", (1, 1))
    with pytest.raises(DimensionError):
        StabilizerTableau(2).apply_fault(PauliString.from_str("X"))
    with pytest.raises(UnsupportedGateError):
        CliffordGate("RZ", (0,), 0.1)
