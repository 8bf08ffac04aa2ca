import numpy as np
import pytest

from partialqec.circuit import NativeGate, PhysicalCircuit, Step
from partialqec.codes import steane_code
from partialqec.compiler import compile_circuit
from partialqec.density import dense_survival
from partialqec.experiments.mirror import mirrored_circuit
from partialqec.frames import FrameProgram, simulate, simulate_tableau
from partialqec.noise import GateNoise, NoiseModel, PauliChannel, device_model


def x_chain(k):
    return PhysicalCircuit(1, [Step((NativeGate("X", (0,)),)) for _ in range(k)])


def test_fault_free_probability_is_exact():
    noise = NoiseModel({"X": GateNoise.single(PauliChannel(0.1, 0, 0))})
    assert FrameProgram(x_chain(5), noise).fault_free_probability == pytest.approx(0.9**5)


def test_x_chain_survival_matches_binomial_parity(rng):
    p, k = 0.05, 6
    noise = NoiseModel({"X": GateNoise.single(PauliChannel(p, 0, 0))})
    exact = 0.5 * (1 + (1 - 2 * p) ** k)  # even number of flips
    for conditioned in (False, True):
        res = simulate(x_chain(k), noise, 40000, rng, conditioned=conditioned)
        assert abs(res.fidelity - exact) < 4 * res.se + 1e-12


def test_noiseless_mirror_survives_exactly(rng):
    circ = compile_circuit(mirrored_circuit(4, 1, 3, rng))
    assert simulate(circ, None, 100, rng).fidelity == 1.0
    res = simulate(circ, None, 100, rng, conditioned=True)
    assert res.fidelity == 1.0 and res.simulated == 0


def test_frames_agree_with_dense_on_a_small_mixed_circuit(rng):
    circ = compile_circuit(mirrored_circuit(3, 1, 1, np.random.default_rng(5)), steane_code())
    noise = device_model(0.5, 0.5)
    exact = dense_survival(circ, noise)
    res = simulate(circ, noise, 20000, rng, conditioned=True)
    assert exact < 0.999
    assert abs(res.fidelity - exact) < 4 * res.se


def test_frames_agree_with_tableau_reference(rng):
    circ = compile_circuit(mirrored_circuit(2, 1, 1, np.random.default_rng(2)), steane_code())
    noise = device_model(1.0, 1.0)
    a = simulate(circ, noise, 20000, rng)
    b = simulate_tableau(circ, noise, 1500, rng)
    assert abs(a.fidelity - b.fidelity) < 4 * np.hypot(a.se, b.se)


def test_seeded_runs_repeat():
    circ = x_chain(4)
    noise = NoiseModel({"X": GateNoise.single(PauliChannel(0.1, 0.1, 0))})
    a = simulate(circ, noise, 1000, np.random.default_rng(9), conditioned=True)
    b = simulate(circ, noise, 1000, np.random.default_rng(9), conditioned=True)
    assert a == b


def test_noise_arity_mismatch_rejected():
    circ = PhysicalCircuit(2, [Step((NativeGate("CNOT", (0, 1)),))])
    noise = NoiseModel({"CNOT": GateNoise.single(PauliChannel(0.1, 0, 0))})
    with pytest.raises(ValueError):
        FrameProgram(circ, noise)


def test_sampling_tiny_fault_rates():
    # rates near 1e-10: 1 - probs[0] loses the digits that probs[1:] carries
    probs = np.zeros(4)
    probs[1:] = [3e-10, 1e-10, 2e-10]
    probs[0] = 1 - probs[1:].sum()
    ch = GateNoise(probs)
    assert abs(ch.probs[1:] / ch.fault_probability).sum() == pytest.approx(1, abs=1e-15)
    circ = PhysicalCircuit(1, [Step((NativeGate("I", (0,)),))])
    res = simulate(circ, NoiseModel({"I": ch}), 1000, np.random.default_rng(0), conditioned=True)
    assert res.fidelity == pytest.approx(1, abs=1e-8)
