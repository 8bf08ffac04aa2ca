import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import H, LETTER, X, Z, gate_unitary, kron_all
from partialqec.circuit import Block, NativeGate, PhysicalCircuit, Step
from partialqec.codes import bitflip_code, cnot_tilde, steane_code, transversal_gate
from partialqec.density import (DenseState, LeakageError, apply_channel, average_gate_infidelity,
                                dense_survival, depolarizing_ptm, entanglement_fidelity, ideal_logical_ptm,
                                logical_process_tomography, pauli_channel_ptm, ptm_of_map, ptm_of_unitary,
                                sampled_infidelity, trace_distance_to_mixed, tvd_to_uniform)
from partialqec.noise import GateNoise, NoiseModel, PauliChannel, device_model


def test_hadamard_ptm_by_hand():
    R = ptm_of_unitary(H)
    want = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0]])
    np.testing.assert_allclose(R, want, atol=1e-12)
    with pytest.raises(ValueError):
        ptm_of_unitary(np.array([[1, 1], [0, 1]]))


@given(st.floats(0, 1))
def test_depolarizing_infidelity_is_half_eps(eps):
    R = depolarizing_ptm(eps)
    assert average_gate_infidelity(R, np.eye(4)) == pytest.approx(eps / 2, abs=1e-12)
    assert entanglement_fidelity(R, np.eye(4)) == pytest.approx(1 - 3 * eps / 4, abs=1e-12)


@settings(max_examples=30)
@given(st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 0))
def test_pauli_channel_ptm_matches_kraus(w):
    p = np.array(w) / sum(w)
    kraus = lambda m: sum(pi * LETTER[c] @ m @ LETTER[c] for pi, c in zip(p, "IXYZ"))  # noqa: E731
    np.testing.assert_allclose(pauli_channel_ptm(p), ptm_of_map(kraus, 1), atol=1e-12)


def test_apply_channel_roundtrip(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    rho = np.outer(v, v.conj())
    u = gate_unitary("CNOT", (0, 1), 2)
    np.testing.assert_allclose(apply_channel(rho, ptm_of_unitary(u)), u @ rho @ u.conj().T, atol=1e-12)


def test_dense_state_matches_statevector(rng):
    n = 3
    gates = [NativeGate("SX", (0,)), NativeGate("CNOT", (0, 2)), NativeGate("RZ", (2,), 0.7),
             NativeGate("CNOT", (2, 1)), NativeGate("SX", (1,))]
    circ = PhysicalCircuit(n, [Step((g,)) for g in gates])
    psi = np.zeros(8, dtype=complex)
    psi[0] = 1
    for g in gates:
        psi = gate_unitary(g.name, g.qubits, n, g.param) @ psi
    st_ = DenseState.from_vector(np.eye(8)[0].astype(complex)).run(circ)
    np.testing.assert_allclose(st_.matrix(), np.outer(psi, psi.conj()), atol=1e-12)


def test_pauli_noise_on_dense_state():
    p = np.array([0.7, 0.1, 0.05, 0.15])
    rho = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]])
    want = sum(pi * LETTER[c] @ rho @ LETTER[c] for pi, c in zip(p, "IXYZ"))
    got = DenseState(rho).apply_pauli_1q(0, p).matrix()
    np.testing.assert_allclose(got, want, atol=1e-12)
    # a correlated two-qubit channel (XX only) goes through the general path
    q = np.zeros(16)
    q[0], q[5] = 0.8, 0.2
    rho2 = np.kron(rho, np.diag([1.0, 0]))
    XX = kron_all([X, X])
    want2 = 0.8 * rho2 + 0.2 * XX @ rho2 @ XX
    np.testing.assert_allclose(DenseState(rho2).apply_gate_noise(GateNoise(q), (0, 1)).matrix(), want2, atol=1e-12)


def test_distances():
    assert tvd_to_uniform(np.full(8, 1 / 8)) == 0.0
    assert tvd_to_uniform(np.eye(4)[0]) == pytest.approx(0.75)
    assert trace_distance_to_mixed(np.diag([1.0, 0])) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        tvd_to_uniform([0.5, 0.4])


def test_dense_and_pauli_tomography_agree():
    code = bitflip_code()
    noise = NoiseModel({"X": GateNoise.single(PauliChannel(0.02, 0.0, 0.0))})
    circ = transversal_gate(code, "X", native="clifford")
    Rd = logical_process_tomography(circ, noise, {"bitflip": code}, backend="dense")
    Rp = logical_process_tomography(circ, noise, {"bitflip": code}, backend="pauli")
    np.testing.assert_allclose(Rd, Rp, atol=1e-12)
    # logical X fails when 2 or 3 of the 3 physical flips occur
    p = 0.02
    fail = 3 * p**2 * (1 - p) + p**3
    assert average_gate_infidelity(Rd, ideal_logical_ptm("X")) == pytest.approx(2 / 3 * fail, rel=1e-9)


def test_steane_tilde_cnot_with_both_backends():
    circ = cnot_tilde(steane_code(), control_on="clean")
    noise = device_model(0.01, 0.01)
    Rd = logical_process_tomography(circ, noise, backend="dense")
    Rp = logical_process_tomography(circ, noise, backend="pauli")
    np.testing.assert_allclose(Rd, Rp, atol=1e-12)
    # clean register 1 controls noisy register 0
    assert 0 < average_gate_infidelity(Rd, ideal_logical_ptm("CNOT10")) < 5e-3


def test_dense_cap_and_leakage():
    circ = transversal_gate(steane_code(), "CNOT")
    with pytest.raises(MemoryError):
        logical_process_tomography(circ, backend="dense")
    bad = PhysicalCircuit(3, [Step((NativeGate("X", (0,)),))], blocks=[Block("bitflip", (0, 1, 2))])
    with pytest.raises(LeakageError):
        logical_process_tomography(bad, backend="dense")


def test_sampled_infidelity_tracks_the_ptm_value(rng):
    R = depolarizing_ptm(0.1)
    mean, se = sampled_infidelity(R, np.eye(4), 4000, rng)
    assert abs(mean - 0.05) < 4 * se + 1e-12


def test_dense_survival_of_noisy_x_pair():
    circ = PhysicalCircuit(1, [Step((NativeGate("X", (0,)),)), Step((NativeGate("X", (0,)),))])
    noise = NoiseModel({"X": GateNoise.single(PauliChannel(0.1, 0, 0))})
    # survives when zero or two flips fire
    assert dense_survival(circ, noise) == pytest.approx(0.81 + 0.01)
    assert dense_survival(circ) == pytest.approx(1.0)
    assert np.allclose(Z @ Z, np.eye(2))
