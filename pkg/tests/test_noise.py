import numpy as np
import pytest
from hypothesis import given, strategies as st

from partialqec.density import average_gate_infidelity, ideal_logical_ptm, pauli_channel_ptm
from partialqec.noise import (DEVICE_INFIDELITY, GateNoise, NoiseLayout, PauliChannel, compose_depolarizing,
                              device_model, error_rate, heuristic_boundary_rate, noise_from_config, read_config,
                              rb_noise, ring_pairs, sample_fault, steane_effective_rate)


def test_error_rate_examples():
    assert error_rate(PauliChannel.depolarizing(0.3)) == pytest.approx(0.3)
    assert error_rate(PauliChannel()) == 0
    assert error_rate(PauliChannel(0, 0, 0.1)) == pytest.approx(0.2)


@given(st.floats(0, 1), st.floats(0, 1))
def test_depolarizing_composition_matches_ptm(e1, e2):
    a, b = PauliChannel.depolarizing(e1), PauliChannel.depolarizing(e2)
    R = a.ptm() @ b.ptm()
    assert 1 - R[1, 1] == pytest.approx(compose_depolarizing(e1, e2), abs=1e-12)


def test_sample_fault_frequencies(rng):
    assert all(sample_fault(PauliChannel(), rng) == "I" for _ in range(50))
    ch = PauliChannel.depolarizing(1.0)
    idx = ch.sample(rng, size=10**5)
    counts = np.bincount(idx, minlength=4)
    # chi-squared with 3 dof against 0.25 each: 99.9% quantile is 16.27
    chi2 = ((counts - 25000) ** 2 / 25000).sum()
    assert chi2 < 16.27
    z = PauliChannel(0, 0, 0.5).sample(rng, size=10**5)
    assert abs((z == 3).mean() - 0.5) < 3 * np.sqrt(0.25 / 1e5) + 1e-3


def test_rate_formulas():
    assert steane_effective_rate(0) == 0
    # 7/4 * 1e-6 - 3/4 * 1e-10
    assert steane_effective_rate(0.01) == pytest.approx(1.749925e-6, rel=1e-12)
    assert steane_effective_rate(0.02) == pytest.approx(7 / 4 * 8e-6 - 3 / 4 * 3.2e-9, rel=1e-12)
    assert heuristic_boundary_rate(0, 7) == 0
    assert heuristic_boundary_rate(0.01, 1) == pytest.approx(0.01)
    assert heuristic_boundary_rate(1e-3, 7) == pytest.approx(6.979e-3, abs=1e-6)


def test_device_model_infidelities():
    m = device_model(0.01, 0.0)
    R = pauli_channel_ptm(m.gates["CNOT"].probs) @ ideal_logical_ptm("CNOT")
    assert average_gate_infidelity(R, ideal_logical_ptm("CNOT")) == pytest.approx(1.9e-4, rel=1e-9)
    assert m.gates["SX"].average_infidelity() == pytest.approx(8.8e-6, rel=1e-9)
    assert m.for_gate("I") is None and m.for_gate("RZ") is None
    m1 = device_model(0.01, 0.01)
    assert m1.gates["I"].average_infidelity() == pytest.approx(2.8e-5, rel=1e-9)
    assert m1.idle_to_cnot_ratio == pytest.approx(DEVICE_INFIDELITY["I"] / DEVICE_INFIDELITY["CNOT"])
    assert m1.idle_to_cnot_ratio == pytest.approx(0.147, abs=1e-3)
    with pytest.raises(ValueError):
        device_model(1.5, 0)


def test_gate_noise_validation():
    g = GateNoise.depolarizing(0.1, 2)
    assert g.arity == 2 and g.fault_probability == pytest.approx(0.1 * 15 / 16)
    assert g.average_infidelity() == pytest.approx(4 / 5 * 0.1 * 15 / 16)
    with pytest.raises(ValueError):
        GateNoise(np.array([0.5, 0.6, 0, 0]))
    with pytest.raises(ValueError):
        PauliChannel(0.6, 0.6, 0)
    assert rb_noise(1e-3, 1e-2).gates["CNOT"].arity == 2


def test_ring_pairs_and_layout_roles():
    assert ring_pairs(4, 0) == [(0, 1), (2, 3)]
    assert ring_pairs(4, 1) == [(1, 2), (3, 0)]
    lay = NoiseLayout.clean_prefix(6, 2, 2, 1e-5, 1e-2, 5e-2)
    assert lay.n_c == 2 and lay.n_b == 2
    # layer 0 bricks (0,1)(2,3)(4,5): no clean-noisy brick; layer 1 bricks (1,2),(5,0): both cross
    assert list(lay.roles[:, 0]) == ["clean", "clean", "bulk", "bulk", "bulk", "bulk"]
    assert list(lay.roles[:, 1]) == ["clean", "clean", "boundary", "bulk", "bulk", "boundary"]
    with pytest.raises(ValueError):
        ring_pairs(5, 0)


def test_config_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# device\nq = 0.01\nq-I = 0.005  # idle\n")
    cfg = read_config(p)
    assert cfg == {"q": "0.01", "q_I": "0.005"}
    m = noise_from_config(cfg)
    assert m.q_I == 0.005
    rates = noise_from_config({"eps_d": "1e-3", "w": "7"})
    assert rates["eps_b"] == pytest.approx(heuristic_boundary_rate(1e-3, 7))
    p.write_text("nonsense\n")
    with pytest.raises(ValueError):
        read_config(p)
