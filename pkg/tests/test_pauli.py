import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import LETTER, gate_unitary, kron_all
from partialqec.pauli import (DimensionError, PauliString, UnsupportedGateError, commutes, conjugate,
                              pauli_mul, rz_quarter_turns, weight)

letters = st.text(alphabet="IXYZ", min_size=1, max_size=5)


def dense(p: PauliString) -> np.ndarray:
    return (1j ** p.phase) * kron_all([LETTER[p.letter(q)] for q in range(p.n)])


def test_parse_and_print():
    p = PauliString.from_str("-iXIZY")
    assert p.n == 4 and p.phase == 3
    assert p.letters == "XIZY"
    assert PauliString.from_str(str(p)) == p
    assert p.support == [0, 2, 3]
    with pytest.raises(ValueError):
        PauliString.from_str("XQ")


def test_to_matrix_matches_kron():
    p = PauliString.from_str("-XYZ")
    np.testing.assert_allclose(p.to_matrix(), -kron_all([LETTER["X"], LETTER["Y"], LETTER["Z"]]))


@given(letters.flatmap(lambda s: st.tuples(st.just(s), st.text(alphabet="IXYZ", min_size=len(s), max_size=len(s)))),
       st.integers(0, 3), st.integers(0, 3))
def test_product_matches_dense(pair, ka, kb):
    a = PauliString.from_str(pair[0])
    b = PauliString.from_str(pair[1])
    a = PauliString(a.n, a.x, a.z, ka)
    b = PauliString(b.n, b.x, b.z, kb)
    np.testing.assert_allclose(dense(pauli_mul(a, b)), dense(a) @ dense(b), atol=1e-12)
    ma, mb = dense(a), dense(b)
    assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


@given(letters)
def test_weight_and_identity(s):
    p = PauliString.from_str(s)
    assert weight(p) == sum(ch != "I" for ch in s)
    assert p.is_identity == (weight(p) == 0)


@settings(max_examples=60)
@given(st.text(alphabet="IXYZ", min_size=2, max_size=3), st.sampled_from(["H", "S", "SDG", "X", "Y", "Z", "SX", "CNOT", "RZ"]),
       st.data())
def test_conjugation_matches_dense(s, gate, data):
    p = PauliString.from_str(s)
    n = p.n
    if gate == "CNOT":
        c = data.draw(st.integers(0, n - 1))
        t = data.draw(st.integers(0, n - 1).filter(lambda v: v != c))
        qubits, param = (c, t), None
    else:
        qubits = (data.draw(st.integers(0, n - 1)),)
        param = data.draw(st.sampled_from([np.pi / 2, np.pi, -np.pi / 2, 3 * np.pi / 2])) if gate == "RZ" else None
    u = gate_unitary(gate, qubits, n, param)
    got = dense(conjugate(p, gate, qubits, param))
    want = u @ dense(p) @ u.conj().T
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_rz_needs_quarter_turns():
    assert rz_quarter_turns(np.pi) == 2
    assert rz_quarter_turns(-np.pi / 2) == 3
    with pytest.raises(UnsupportedGateError):
        rz_quarter_turns(0.3)
    with pytest.raises(UnsupportedGateError):
        conjugate(PauliString.from_str("X"), "T", (0,))


def test_dimension_checks():
    with pytest.raises(DimensionError):
        pauli_mul(PauliString.from_str("X"), PauliString.from_str("XX"))
    with pytest.raises(DimensionError):
        PauliString(2, x=0b100)


def test_embed_restrict_roundtrip():
    p = PauliString.from_str("XZ")
    e = p.embed([3, 1], 4)
    assert e.letters == "IZIX"
    assert e.restrict([3, 1]) == p
