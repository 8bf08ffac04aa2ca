"""Uniform sampling of the two-qubit Clifford group (11520 elements mod phase).

Elements are words of ``(gate, targets)`` in time order over the generators
``H, S, X, Y, Z`` and ``CNOT`` in either direction.  The group is enumerated
once through the standard four-class decomposition (single-qubit,
CNOT-like, iSWAP-like, SWAP-like); sampling picks a uniform index.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from ..pauli import PauliString, conjugate

Word = tuple[tuple[str, tuple[int, ...]], ...]

_SYMPLECTIC_1Q = ((), ("H",), ("S",), ("H", "S"), ("S", "H"), ("H", "S", "H"))
_PAULI_1Q = ((), ("X",), ("Y",), ("Z",))
_S1 = ((), ("S", "H"), ("S", "H", "S", "H"))

GROUP_ORDER = 11520
SYMPLECTIC_ORDER = 720


def _on(q: int, names) -> Word:
    return tuple((g, (q,)) for g in names)


def one_qubit_cliffords() -> list[tuple[str, ...]]:
    return [s + p for s, p in itertools.product(_SYMPLECTIC_1Q, _PAULI_1Q)]


_IMAGES = [PauliString.from_str(s) for s in ("XI", "ZI", "IX", "IZ")]


def clifford_key(word: Word) -> tuple:
    """Images of X0, Z0, X1, Z1 (with signs): identifies the element mod phase."""
    out = []
    for p in _IMAGES:
        for g, tg in word:
            p = conjugate(p, g, tg)
        out.append((p.x, p.z, p.phase))
    return tuple(out)


def symplectic_key(word: Word) -> tuple:
    return tuple((x, z) for x, z, _ in clifford_key(word))


@lru_cache(maxsize=1)
def all_cliffords() -> tuple[Word, ...]:
    c1 = one_qubit_cliffords()
    cx01: Word = (("CNOT", (0, 1)),)
    cx10: Word = (("CNOT", (1, 0)),)
    words: list[Word] = []
    for a, b in itertools.product(c1, repeat=2):
        base = _on(0, a) + _on(1, b)
        words.append(base)
        for s0, s1 in itertools.product(_S1, repeat=2):
            tail = _on(0, s0) + _on(1, s1)
            words.append(base + cx01 + tail)
            words.append(base + cx01 + cx10 + tail)
        words.append(base + cx01 + cx10 + cx01)
    return tuple(words)


@lru_cache(maxsize=1)
def _table() -> dict[tuple, Word]:
    table = {clifford_key(w): w for w in all_cliffords()}
    if len(table) != GROUP_ORDER:
        raise AssertionError(f"class decomposition produced {len(table)} distinct elements")
    return table


def sample_two_qubit_clifford(rng: np.random.Generator) -> Word:
    words = all_cliffords()
    return words[int(rng.integers(len(words)))]


def invert_word_gates(word: Word) -> list[tuple[str, tuple[int, ...]]]:
    inv = {"S": "SDG", "SDG": "S"}
    return [(inv.get(g, g), tg) for g, tg in reversed(word)]


def inverse_word(word: Word) -> Word:
    """Canonical word (no S-dagger) for the inverse element."""
    return _table()[clifford_key(tuple(invert_word_gates(word)))]


def word_unitary(word: Word) -> np.ndarray:
    from ..density import gate_matrix

    eye = np.eye(2)
    U = np.eye(4, dtype=complex)
    for g, tg in word:
        if g == "CNOT":
            m = gate_matrix("CNOT")
            if tg == (1, 0):
                sw = np.eye(4)[[0, 2, 1, 3]]
                m = sw @ m @ sw
        else:
            m1 = gate_matrix(g)
            m = np.kron(m1, eye) if tg == (0,) else np.kron(eye, m1)
        U = m @ U
    return U
