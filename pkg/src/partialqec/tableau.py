"""Stabilizer tableau simulator with destabilizer bookkeeping.

Rows ``0..n-1`` hold destabilizers and rows ``n..2n-1`` stabilizers; each row
is an ``(x, z)`` bit pair per qubit plus a sign bit ``r`` (1 means ``-``).
Gates conjugate every row in place and return the tableau so calls chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import DimensionError, PauliString, UnsupportedGateError, rz_quarter_turns

CLIFFORD_KINDS = ("I", "H", "S", "SDG", "X", "Y", "Z", "SX", "RZ", "CNOT")


@dataclass(frozen=True)
class CliffordGate:
    kind: str
    targets: tuple[int, ...]
    param: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(self.targets))
        if kind not in CLIFFORD_KINDS:
            raise UnsupportedGateError(f"{self.kind} is not a supported Clifford gate")
        arity = 2 if kind == "CNOT" else 1
        if len(self.targets) != arity:
            raise ValueError(f"{kind} takes {arity} target(s), got {self.targets}")
        if kind == "CNOT" and self.targets[0] == self.targets[1]:
            raise ValueError("CNOT control equals target")
        if kind == "RZ":
            rz_quarter_turns(self.param)


def _g(x1, z1, x2, z2):
    # exponent of i picked up when multiplying letter (x1,z1) into (x2,z2)
    x1 = x1.astype(np.int8)
    z1 = z1.astype(np.int8)
    x2 = x2.astype(np.int8)
    z2 = z2.astype(np.int8)
    return np.where(
        x1 & z1, z2 - x2,
        np.where(x1, z2 * (2 * x2 - 1), np.where(z1, x2 * (1 - 2 * z2), 0)),
    )


def _row_product(x1, z1, r1, x2, z2, r2):
    """Product of Hermitian rows (1) * (2); both must commute."""
    k = (2 * int(r1) + 2 * int(r2) + int(_g(x1, z1, x2, z2).sum())) % 4
    return x1 ^ x2, z1 ^ z2, k


class StabilizerTableau:
    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need at least one qubit, got {n}")
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1
        self.z[n + idx, idx] = 1

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.n = self.n
        t.x, t.z, t.r = self.x.copy(), self.z.copy(), self.r.copy()
        return t

    # views ------------------------------------------------------------
    def _row(self, i: int) -> PauliString:
        return PauliString.from_bits(self.x[i], self.z[i], 2 * int(self.r[i]))

    def stabilizers(self) -> list[PauliString]:
        return [self._row(self.n + i) for i in range(self.n)]

    def destabilizers(self) -> list[PauliString]:
        return [self._row(i) for i in range(self.n)]

    def __str__(self) -> str:
        return "\n".join(str(p) for p in self.stabilizers())

    def check_invariants(self) -> bool:
        """Symplectic pattern: stabilizers commute, destab i pairs with stab i."""
        n = self.n
        sym = (self.x.astype(int) @ self.z.T.astype(int) + self.z.astype(int) @ self.x.T.astype(int)) % 2
        expected = np.zeros((2 * n, 2 * n), dtype=int)
        expected[np.arange(n), n + np.arange(n)] = 1
        expected[n + np.arange(n), np.arange(n)] = 1
        return bool(np.array_equal(sym[:, n:], expected[:, n:]) and
                    np.array_equal(sym[n:, :n], expected[n:, :n]))

    # gates ------------------------------------------------------------
    def _check_q(self, *qs: int) -> None:
        for q in qs:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range for {self.n} qubits")

    def h(self, q: int) -> "StabilizerTableau":
        self.r ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()
        return self

    def s(self, q: int) -> "StabilizerTableau":
        self.r ^= self.x[:, q] & self.z[:, q]
        self.z[:, q] ^= self.x[:, q]
        return self

    def cnot(self, c: int, t: int) -> "StabilizerTableau":
        x, z = self.x, self.z
        self.r ^= x[:, c] & z[:, t] & (x[:, t] ^ z[:, c] ^ 1)
        x[:, t] ^= x[:, c]
        z[:, c] ^= z[:, t]
        return self

    def apply_gate(self, gate: CliffordGate) -> "StabilizerTableau":
        self._check_q(*gate.targets)
        kind, tg = gate.kind, gate.targets
        q = tg[0]
        if kind == "I":
            pass
        elif kind == "H":
            self.h(q)
        elif kind == "S":
            self.s(q)
        elif kind == "SDG":
            self.s(q).s(q).s(q)
        elif kind == "X":
            self.r ^= self.z[:, q]
        elif kind == "Z":
            self.r ^= self.x[:, q]
        elif kind == "Y":
            self.r ^= self.x[:, q] ^ self.z[:, q]
        elif kind == "SX":
            self.h(q).s(q).h(q)
        elif kind == "RZ":
            for _ in range(rz_quarter_turns(gate.param)):
                self.s(q)
        elif kind == "CNOT":
            self.cnot(*tg)
        else:  # pragma: no cover - guarded by CliffordGate
            raise UnsupportedGateError(kind)
        return self

    def apply(self, kind: str, *targets: int, param: float | None = None) -> "StabilizerTableau":
        return self.apply_gate(CliffordGate(kind, targets, param))

    def apply_fault(self, p: PauliString) -> "StabilizerTableau":
        """Conjugate by the Pauli ``p``: flip signs of anticommuting rows."""
        if p.n != self.n:
            raise DimensionError(f"fault on {p.n} qubits, tableau has {self.n}")
        self.r ^= self._anticommuting(p)
        return self

    # measurement ------------------------------------------------------
    def _anticommuting(self, p: PauliString) -> np.ndarray:
        px, pz = p.xbits(), p.zbits()
        return ((self.x @ pz + self.z @ px) % 2).astype(np.uint8)

    def _rowsum(self, h: int, i: int) -> None:
        x, z, k = _row_product(self.x[h], self.z[h], self.r[h], self.x[i], self.z[i], self.r[i])
        self.x[h], self.z[h], self.r[h] = x, z, k // 2

    def _deterministic_sign(self, p: PauliString, anti: np.ndarray) -> int:
        n = self.n
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        k = 0
        for i in np.flatnonzero(anti[:n]):
            x, z, k = _row_product(x, z, k // 2, self.x[n + i], self.z[n + i], self.r[n + i])
        return 1 if k == 0 else -1

    def measure_pauli(self, p: PauliString, rng: np.random.Generator | None = None,
                      forced: int | None = None) -> tuple[int, bool]:
        """Measure Hermitian ``p``; return ``(outcome, was_random)``.

        ``forced`` (+1/-1) post-selects the outcome of a random measurement;
        a forced value is ignored when the outcome is deterministic.
        """
        if p.n != self.n:
            raise DimensionError(f"measuring {p.n}-qubit Pauli on {self.n} qubits")
        if p.is_identity:
            raise ValueError("cannot measure the identity")
        sign_p = p.sign
        n = self.n
        anti = self._anticommuting(p)
        stab_hits = np.flatnonzero(anti[n:])
        if stab_hits.size == 0:
            return sign_p * self._deterministic_sign(p, anti), False
        piv = n + int(stab_hits[0])
        for h in np.flatnonzero(anti):
            if h != piv:
                self._rowsum(int(h), piv)
        self.x[piv - n], self.z[piv - n], self.r[piv - n] = self.x[piv], self.z[piv], self.r[piv]
        if forced is None:
            if rng is None:
                raise ValueError("random measurement needs an rng")
            outcome = 1 if rng.random() < 0.5 else -1
        else:
            outcome = forced
        self.x[piv], self.z[piv] = p.xbits(), p.zbits()
        self.r[piv] = 1 if outcome * sign_p == -1 else 0
        return outcome, True

    def projector_probability(self, paulis: Sequence[PauliString]) -> float:
        """Probability that commuting ``paulis`` all measure +1 (state untouched)."""
        t = self.copy()
        prob = 1.0
        for p in paulis:
            outcome, random = t.measure_pauli(p, forced=1)
            if random:
                prob *= 0.5
            elif outcome != 1:
                return 0.0
        return prob


def init_zero(n: int) -> StabilizerTableau:
    return StabilizerTableau(n)


def apply_gate(t: StabilizerTableau, g: CliffordGate) -> StabilizerTableau:
    return t.apply_gate(g)


def apply_fault(t: StabilizerTableau, p: PauliString) -> StabilizerTableau:
    return t.apply_fault(p)


def measure_pauli(t: StabilizerTableau, p: PauliString, rng: np.random.Generator) -> tuple[int, StabilizerTableau]:
    outcome, _ = t.measure_pauli(p, rng)
    return outcome, t


def projector_expectation(t: StabilizerTableau, bitstring: Sequence[int]) -> float:
    """``<x|rho|x>`` for the computational basis string ``x``."""
    if len(bitstring) != t.n:
        raise DimensionError(f"bitstring length {len(bitstring)} != {t.n}")
    zs = [PauliString.from_letters({q: "Z"}, t.n, phase=2 * int(b)) for q, b in enumerate(bitstring)]
    return t.projector_probability(zs)
