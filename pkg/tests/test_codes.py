import itertools

import numpy as np
import pytest

from partialqec.codes import (CodeError, CodeSpec, DecodeError, bitflip_code, code_state_vectors, cnot_tilde,
                              decode_syndrome, encode_zero, get_code, qec_round, steane_code, transversal_gate)
from partialqec.density import qec_channel
from partialqec.pauli import PauliString, commutes, pauli_mul
from partialqec.tableau import projector_expectation


def single_errors(N):
    for q in range(N):
        for ch in "XYZ":
            yield PauliString.from_letters({q: ch}, N)


def test_steane_structure():
    c = steane_code()
    assert (c.N, len(c.generators), c.w) == (7, 6, 7)
    assert len(c.decoder) == 64


@pytest.mark.parametrize("code", [steane_code(), bitflip_code()], ids=["steane", "bitflip"])
def test_code_states_are_stabilized(code):
    zero, one = code_state_vectors(code)
    for g in code.generators:
        m = g.to_matrix()
        np.testing.assert_allclose(m @ zero, zero, atol=1e-12)
        np.testing.assert_allclose(m @ one, one, atol=1e-12)
    lz = code.logical_z.to_matrix()
    np.testing.assert_allclose(lz @ zero, zero, atol=1e-12)
    np.testing.assert_allclose(lz @ one, -one, atol=1e-12)


def test_steane_corrects_every_single_qubit_error():
    c = steane_code()
    for e in single_errors(7):
        rec = decode_syndrome(c, c.syndrome(e))
        residual = pauli_mul(rec, e)
        # residual must be a stabilizer: commutes with everything and acts trivially on logicals
        assert all(commutes(residual, g) for g in c.generators)
        assert commutes(residual, c.logical_x) and commutes(residual, c.logical_z)


def test_bitflip_corrects_x_only():
    c = bitflip_code()
    for q in range(3):
        e = PauliString.from_letters({q: "X"}, 3)
        assert pauli_mul(decode_syndrome(c, c.syndrome(e)), e).x == 0
    z = PauliString.from_letters({0: "Z"}, 3)
    assert c.syndrome(z) == (0, 0)
    assert not commutes(z, c.logical_x)


def test_qec_round_tableau_and_dense_agree(rng):
    c = steane_code()
    zero, _ = code_state_vectors(c)
    for e in single_errors(7):
        t = encode_zero(c)
        t.apply_fault(e)
        qec_round(c, t, rng=rng)
        # back in |0bar>: logical Z measures +1 deterministically
        assert t.projector_probability([c.logical_z]) == 1.0
        m = e.to_matrix()
        rho = qec_channel(m @ np.outer(zero, zero.conj()) @ m.conj().T, c, range(7))
        assert np.real(zero.conj() @ rho @ zero) == pytest.approx(1.0, abs=1e-12)


def test_qec_channel_is_idempotent_and_trace_preserving(rng):
    c = bitflip_code()
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    rho = np.outer(v, v.conj())
    once = qec_channel(rho, c, range(3))
    assert np.trace(once).real == pytest.approx(1.0)
    np.testing.assert_allclose(qec_channel(once, c, range(3)), once, atol=1e-12)


def test_validation_errors():
    P = PauliString.from_str
    with pytest.raises(CodeError):
        CodeSpec("bad", 2, (P("XI"), P("ZI")), P("XX"), P("ZZ"))
    with pytest.raises(CodeError):
        get_code("surface")
    with pytest.raises(DecodeError):
        decode_syndrome(steane_code(), (0, 1))
    with pytest.raises(CodeError):
        transversal_gate(bitflip_code(), "H")


def test_transversal_and_tilde_gate_counts():
    c = steane_code()
    assert transversal_gate(c, "CNOT").count("CNOT") == 7
    for side in ("noisy", "clean"):
        circ = cnot_tilde(c, control_on=side)
        assert circ.count("CNOT") == c.w
        assert circ.n_qubits == 8


def test_encode_zero_logical_readout():
    c = steane_code()
    t = encode_zero(c)
    # |0bar> is a uniform superposition of the 8 even-weight Hamming codewords
    assert projector_expectation(t, [0] * 7) == pytest.approx(1 / 8)
    assert t.projector_probability([c.logical_z]) == 1.0
