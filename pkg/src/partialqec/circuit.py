"""Physical circuits over native gates, with QEC-round markers.

Text form: one time-step per line, gates as ``NAME(args)@q0,q1`` and QEC
markers as ``QEC@block``, separated by single spaces.  A header line
``qubits <m>`` is followed by one ``block <id> <code> <q...>`` line per code
block; the steps follow a ``steps`` line.  Steps containing only R_Z gates
and markers are virtual: they take no time and get no idle padding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

NATIVE_NAMES = ("I", "H", "S", "SDG", "X", "Y", "Z", "SX", "RZ", "CNOT")

# Single-qubit Cliffords in device natives, in time order.
DEVICE_DECOMPOSITIONS: dict[str, list[tuple[str, float | None]]] = {
    "I": [("I", None)],
    "X": [("SX", None), ("SX", None)],
    # R_Z(pi) after SX SX; the R_Z(pi/2) variant realizes S X, not Y
    "Y": [("SX", None), ("SX", None), ("RZ", math.pi)],
    "Z": [("RZ", math.pi)],
    "S": [("RZ", math.pi / 2)],
    "SDG": [("RZ", -math.pi / 2)],
    "H": [("RZ", math.pi / 2), ("SX", None), ("RZ", math.pi / 2)],
}


@dataclass(frozen=True)
class NativeGate:
    name: str
    qubits: tuple[int, ...]
    param: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "name", self.name.upper())
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.name not in NATIVE_NAMES:
            raise ValueError(f"unknown native gate {self.name}")

    def to_text(self) -> str:
        arg = f"({format_angle(self.param)})" if self.param is not None else ""
        return f"{self.name}{arg}@{','.join(map(str, self.qubits))}"


@dataclass(frozen=True)
class Step:
    gates: tuple[NativeGate, ...] = ()
    qec: tuple[int, ...] = ()

    @property
    def virtual(self) -> bool:
        return all(g.name == "RZ" for g in self.gates)

    def to_text(self) -> str:
        parts = [g.to_text() for g in self.gates] + [f"QEC@{b}" for b in self.qec]
        return " ".join(parts)


@dataclass(frozen=True)
class Block:
    code: str
    qubits: tuple[int, ...]


@dataclass
class PhysicalCircuit:
    n_qubits: int
    steps: list[Step] = field(default_factory=list)
    blocks: list[Block] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return sum(not s.virtual for s in self.steps)

    def gates(self) -> Iterable[NativeGate]:
        for s in self.steps:
            yield from s.gates

    def count(self, name: str) -> int:
        return sum(g.name == name.upper() for g in self.gates())

    def two_qubit_gates(self) -> list[NativeGate]:
        return [g for g in self.gates() if len(g.qubits) == 2]

    def validate(self) -> None:
        for k, s in enumerate(self.steps):
            used: list[int] = [q for g in s.gates for q in g.qubits]
            if len(used) != len(set(used)):
                raise ValueError(f"step {k}: a qubit is used twice")
            if any(not 0 <= q < self.n_qubits for q in used):
                raise ValueError(f"step {k}: qubit out of range")
            if any(not 0 <= b < len(self.blocks) for b in s.qec):
                raise ValueError(f"step {k}: unknown block in QEC marker")

    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}"]
        for i, b in enumerate(self.blocks):
            lines.append(f"block {i} {b.code} " + " ".join(map(str, b.qubits)))
        lines.append("steps")
        lines.extend(s.to_text() for s in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PhysicalCircuit":
        lines = text.splitlines()
        m = re.fullmatch(r"qubits (\d+)", lines[0].strip())
        if not m:
            raise ValueError("missing 'qubits' header")
        circ = cls(int(m.group(1)))
        i = 1
        while lines[i].startswith("block"):
            _, _, code, *qs = lines[i].split()
            circ.blocks.append(Block(code, tuple(int(q) for q in qs)))
            i += 1
        if lines[i].strip() != "steps":
            raise ValueError("missing 'steps' line")
        for line in lines[i + 1:]:
            gates, qec = [], []
            for tok in line.split():
                name, _, where = tok.partition("@")
                if name == "QEC":
                    qec.append(int(where))
                    continue
                param = None
                pm = re.fullmatch(r"(\w+)\((.*)\)", name)
                if pm:
                    name, param = pm.group(1), parse_angle(pm.group(2))
                gates.append(NativeGate(name, tuple(int(q) for q in where.split(",")), param))
            circ.steps.append(Step(tuple(gates), tuple(qec)))
        return circ

    def extend(self, other: "PhysicalCircuit") -> "PhysicalCircuit":
        if other.n_qubits != self.n_qubits or other.blocks != self.blocks:
            raise ValueError("circuits differ in layout")
        self.steps.extend(other.steps)
        return self


def format_angle(theta: float) -> str:
    frac = Fraction(theta / math.pi).limit_denominator(8)
    if abs(float(frac) * math.pi - theta) < 1e-12:
        num, den = frac.numerator, frac.denominator
        if num == 0:
            return "0"
        head = {1: "pi", -1: "-pi"}.get(num, f"{num}pi")
        return head if den == 1 else f"{head}/{den}"
    return repr(float(theta))


def parse_angle(text: str) -> float:
    m = re.fullmatch(r"(-?\d*)pi(?:/(\d+))?", text)
    if m:
        num = m.group(1)
        num = {"": 1, "-": -1}.get(num, None) if num in ("", "-") else int(num)
        return num * math.pi / int(m.group(2) or 1)
    return float(text)


def single_qubit_steps(kind: str, qubits: Sequence[int]) -> list[Step]:
    """Device-native steps for the same single-qubit Clifford on many qubits."""
    return [Step(tuple(NativeGate(name, (q,), param) for q in qubits))
            for name, param in DEVICE_DECOMPOSITIONS[kind.upper()]]
