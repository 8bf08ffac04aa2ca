"""Phased Pauli strings on n qubits.

A string is stored as two integer bitmasks (bit ``q`` set when qubit ``q``
carries an X resp. Z component) plus a phase exponent ``k`` so that the
operator equals ``i**k`` times the tensor product of Hermitian letters, with
``Y`` taken as the Hermitian letter for ``x = z = 1``.  Python ints act as
arbitrary-length packed words, so products and commutation tests are a
handful of bitwise operations regardless of ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LETTERS = "IXYZ"

# (x_bit, z_bit) for each letter
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}


class DimensionError(ValueError):
    """Raised when Pauli strings of different lengths are combined."""


class UnsupportedGateError(ValueError):
    """Raised for gates outside the Clifford set handled by a backend."""


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.n < 0 or self.x & ~mask or self.z & ~mask:
            raise DimensionError(f"bits exceed length {self.n}")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse ``"+XIZ"``, ``"-iY"`` or a bare ``"XZ"``."""
        s = text.strip()
        phase = 0
        if s.startswith(("+", "-")):
            phase = 0 if s[0] == "+" else 2
            s = s[1:]
            if s.startswith("i"):
                phase += 1
                s = s[1:]
        x = z = 0
        for q, ch in enumerate(s):
            if ch not in _LETTER_BITS:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            xb, zb = _LETTER_BITS[ch]
            x |= xb << q
            z |= zb << q
        return cls(len(s), x, z, phase)

    @classmethod
    def from_letters(cls, letters: dict[int, str] | Iterable[tuple[int, str]], n: int,
                     phase: int = 0) -> "PauliString":
        items = letters.items() if isinstance(letters, dict) else letters
        x = z = 0
        for q, ch in items:
            xb, zb = _LETTER_BITS[ch]
            x |= xb << q
            z |= zb << q
        return cls(n, x, z, phase)

    @classmethod
    def from_bits(cls, xbits: Sequence[int], zbits: Sequence[int], phase: int = 0) -> "PauliString":
        if len(xbits) != len(zbits):
            raise DimensionError("x and z bit-vectors differ in length")
        x = sum(int(b) << q for q, b in enumerate(xbits))
        z = sum(int(b) << q for q, b in enumerate(zbits))
        return cls(len(xbits), x, z, phase)

    # views ------------------------------------------------------------
    def letter(self, q: int) -> str:
        return "IXZY"[((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)]

    @property
    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def xbits(self) -> np.ndarray:
        return np.array([(self.x >> q) & 1 for q in range(self.n)], dtype=np.uint8)

    def zbits(self) -> np.ndarray:
        return np.array([(self.z >> q) & 1 for q in range(self.n)], dtype=np.uint8)

    @property
    def support(self) -> list[int]:
        s = self.x | self.z
        return [q for q in range(self.n) if (s >> q) & 1]

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if self.phase % 2:
            raise ValueError(f"{self} is not Hermitian")
        return 1 - self.phase

    def unsigned(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, 0)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix with qubit 0 as the most significant tensor factor."""
        mats = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]),
                "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}
        out = np.array([[1.0 + 0j]])
        for ch in self.letters:
            out = np.kron(out, mats[ch])
        return (1j ** self.phase) * out

    def restrict(self, qubits: Sequence[int]) -> "PauliString":
        """Sub-string on ``qubits`` (in the given order), phase dropped."""
        x = sum(((self.x >> q) & 1) << i for i, q in enumerate(qubits))
        z = sum(((self.z >> q) & 1) << i for i, q in enumerate(qubits))
        return PauliString(len(qubits), x, z)

    def embed(self, qubits: Sequence[int], n: int) -> "PauliString":
        """Place this string on ``qubits`` of an ``n``-qubit register."""
        if len(qubits) != self.n:
            raise DimensionError("embedding needs one target per qubit")
        x = sum(((self.x >> i) & 1) << q for i, q in enumerate(qubits))
        z = sum(((self.z >> i) & 1) << q for i, q in enumerate(qubits))
        return PauliString(n, x, z, self.phase)

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(self.n + other.n, self.x | (other.x << self.n),
                           self.z | (other.z << self.n), self.phase + other.phase)


def _check(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise DimensionError(f"length mismatch: {a.n} vs {b.n}")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a @ b`` with exact phase."""
    _check(a, b)
    ax, az, bx, bz = a.x, a.z, b.x, b.z
    a_x, a_y, a_z = ax & ~az, ax & az, ~ax & az
    b_x, b_y, b_z = bx & ~bz, bx & bz, ~bx & bz
    plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z)
    k = a.phase + b.phase + _popcount(plus) - _popcount(minus)
    return PauliString(a.n, ax ^ bx, az ^ bz, k)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the symplectic inner product is even."""
    _check(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def weight(p: PauliString) -> int:
    return _popcount(p.x | p.z)


# Clifford conjugation -------------------------------------------------------

_HALF_PI = math.pi / 2


def rz_quarter_turns(theta: float) -> int:
    """Number of quarter turns for a Clifford-angle R_Z, else raise."""
    k = round(theta / _HALF_PI)
    if abs(theta - k * _HALF_PI) > 1e-9:
        raise UnsupportedGateError(f"R_Z({theta}) is not a Clifford angle")
    return k % 4


def _bit(v: int, q: int) -> int:
    return (v >> q) & 1


def _flip_sign(p: PauliString, cond: int) -> PauliString:
    return PauliString(p.n, p.x, p.z, p.phase + 2 * cond) if cond else p


def _h(p: PauliString, q: int) -> PauliString:
    xb, zb = _bit(p.x, q), _bit(p.z, q)
    x = p.x & ~(1 << q) | (zb << q)
    z = p.z & ~(1 << q) | (xb << q)
    return PauliString(p.n, x, z, p.phase + 2 * (xb & zb))


def _s(p: PauliString, q: int) -> PauliString:
    xb, zb = _bit(p.x, q), _bit(p.z, q)
    return PauliString(p.n, p.x, p.z ^ (xb << q), p.phase + 2 * (xb & zb))


def _cnot(p: PauliString, c: int, t: int) -> PauliString:
    xc, zc, xt, zt = _bit(p.x, c), _bit(p.z, c), _bit(p.x, t), _bit(p.z, t)
    sign = xc & zt & (xt ^ zc ^ 1)
    return PauliString(p.n, p.x ^ (xc << t), p.z ^ (zt << c), p.phase + 2 * sign)


def conjugate(p: PauliString, name: str, qubits: Sequence[int], param: float | None = None) -> PauliString:
    """Return ``U p U^dagger`` for the named Clifford gate."""
    name = name.upper()
    if name in ("I", "ID"):
        return p
    if name == "CNOT":
        return _cnot(p, qubits[0], qubits[1])
    (q,) = qubits
    if name == "H":
        return _h(p, q)
    if name == "S":
        return _s(p, q)
    if name == "SDG":
        return _s(_s(_s(p, q), q), q)
    if name == "X":
        return _flip_sign(p, _bit(p.z, q))
    if name == "Z":
        return _flip_sign(p, _bit(p.x, q))
    if name == "Y":
        return _flip_sign(p, _bit(p.x, q) ^ _bit(p.z, q))
    if name == "SX":
        return _h(_s(_h(p, q), q), q)
    if name == "RZ":
        k = rz_quarter_turns(param)
        for _ in range(k):
            p = _s(p, q)
        return p
    raise UnsupportedGateError(f"unsupported gate {name}")
