"""Stabilizer codes, encoded states, transversal gates and idealized QEC rounds."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .circuit import DEVICE_DECOMPOSITIONS, Block, NativeGate, PhysicalCircuit, Step
from .pauli import PauliString, commutes, weight
from .tableau import StabilizerTableau


class CodeError(ValueError):
    pass


class DecodeError(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class CodeSpec:
    name: str
    N: int
    generators: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    transversal_cliffords: bool = False
    decoder: dict[tuple[int, ...], PauliString] = field(default_factory=dict)

    @property
    def w(self) -> int:
        return min(weight(self.logical_x), weight(self.logical_z))

    def __post_init__(self):
        self.validate()
        if not self.decoder:
            object.__setattr__(self, "decoder", _min_weight_css_table(self))

    def validate(self) -> None:
        gens = self.generators
        for a, b in itertools.combinations(gens, 2):
            if not commutes(a, b):
                raise CodeError(f"{self.name}: generators {a} and {b} anticommute")
        if commutes(self.logical_x, self.logical_z):
            raise CodeError(f"{self.name}: logical X and Z commute")
        for g in gens:
            if not (commutes(g, self.logical_x) and commutes(g, self.logical_z)):
                raise CodeError(f"{self.name}: logical operator fails to commute with {g}")

    def syndrome(self, error: PauliString) -> tuple[int, ...]:
        return tuple(int(not commutes(g, error)) for g in self.generators)

    @cached_property
    def check_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """``(gx, gz)`` bit matrices of the generators, shape ``(r, N)``."""
        gx = np.array([g.xbits() for g in self.generators], dtype=np.uint8)
        gz = np.array([g.zbits() for g in self.generators], dtype=np.uint8)
        return gx, gz

    @cached_property
    def recovery_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Recovery x/z bits indexed by the integer syndrome ``sum s_g 2**g``."""
        r = len(self.generators)
        rx = np.zeros((2**r, self.N), dtype=np.uint8)
        rz = np.zeros((2**r, self.N), dtype=np.uint8)
        for s, p in self.decoder.items():
            k = sum(b << i for i, b in enumerate(s))
            rx[k], rz[k] = p.xbits(), p.zbits()
        return rx, rz

    def dump(self) -> str:
        lines = [f"code {self.name} N={self.N} w={self.w}"]
        lines += [f"gen {g}" for g in self.generators]
        lines += [f"logical_x {self.logical_x}", f"logical_z {self.logical_z}"]
        return "\n".join(lines) + "\n"


def _min_weight_css_table(code: CodeSpec) -> dict[tuple[int, ...], PauliString]:
    """Minimum-weight recovery for each syndrome, decoding X and Z parts apart."""
    N = code.N
    x_best: dict[tuple[int, ...], PauliString] = {}
    z_best: dict[tuple[int, ...], PauliString] = {}
    for wt in range(N + 1):
        for qs in itertools.combinations(range(N), wt):
            mask = sum(1 << q for q in qs)
            for best, p in ((x_best, PauliString(N, x=mask)), (z_best, PauliString(N, z=mask))):
                best.setdefault(code.syndrome(p), p)
    table = {}
    for (sx, px), (sz, pz) in itertools.product(x_best.items(), z_best.items()):
        s = tuple(a ^ b for a, b in zip(sx, sz))
        table.setdefault(s, PauliString(N, px.x, pz.z))
    return table


@lru_cache(maxsize=None)
def bitflip_code() -> CodeSpec:
    P = PauliString.from_str
    return CodeSpec("bitflip", 3, (P("ZZI"), P("IZZ")), P("XXX"), P("ZZZ"))


STEANE_ROWS = ("1010101", "0110011", "0001111")


@lru_cache(maxsize=None)
def steane_code() -> CodeSpec:
    gens = []
    for letter in "XZ":
        for row in STEANE_ROWS:
            gens.append(PauliString.from_str("".join(letter if b == "1" else "I" for b in row)))
    P = PauliString.from_str
    return CodeSpec("steane", 7, tuple(gens), P("X" * 7), P("Z" * 7), transversal_cliffords=True)


CODES = {"steane": steane_code, "bitflip": bitflip_code}


def get_code(name: str) -> CodeSpec:
    try:
        return CODES[name]()
    except KeyError:
        raise CodeError(f"unknown code {name!r}") from None


def decode_syndrome(code: CodeSpec, s: Sequence[int]) -> PauliString:
    s = tuple(int(b) for b in s)
    if len(s) != len(code.generators):
        raise DecodeError(f"syndrome length {len(s)} != {len(code.generators)}")
    try:
        return code.decoder[s]
    except KeyError:
        raise DecodeError(f"no recovery for syndrome {s}") from None


# encoded states ----------------------------------------------------------------

def encode_zero(code: CodeSpec) -> StabilizerTableau:
    """|0bar>: project |0...0> onto the +1 eigenspace of every generator."""
    t = StabilizerTableau(code.N)
    for g in code.generators:
        outcome, _ = t.measure_pauli(g, forced=1)
        if outcome != 1:
            raise CodeError(f"{code.name}: |0...0> has zero overlap with the code space")
    return t


def code_state_vectors(code: CodeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Dense |0bar>, |1bar> with qubit 0 as the most significant bit."""
    d = 2**code.N
    psi = np.zeros(d, dtype=complex)
    psi[0] = 1
    for g in code.generators:
        psi = (psi + g.to_matrix() @ psi) / 2
    psi /= np.linalg.norm(psi)
    return psi, code.logical_x.to_matrix() @ psi


# transversal gates ---------------------------------------------------------------

LOGICAL_KINDS = ("I", "X", "Y", "Z", "H", "S", "SDG", "CNOT")

# gates that end in an idealized QEC round on the device gate set
DEVICE_QEC_AFTER = {"I", "X", "Y", "H", "CNOT"}


def _clifford_steps(kind: str, qubits: Sequence[int]) -> list[Step]:
    one = lambda name: Step(tuple(NativeGate(name, (q,)) for q in qubits))  # noqa: E731
    if kind == "S":
        return [one("S"), one("Z")]
    if kind == "SDG":
        return [one("S")]
    return [one(kind)]


def _block_steps(code: CodeSpec, kind: str, qubits: Sequence[int], native: str) -> list[Step]:
    if native == "clifford":
        return _clifford_steps(kind, qubits)
    if kind in ("S", "SDG"):
        # transversal S^dagger realizes logical S on this code and vice versa
        theta = 3 * math.pi / 2 if kind == "S" else -3 * math.pi / 2
        return [Step(tuple(NativeGate("RZ", (q,), theta) for q in qubits))]
    return [Step(tuple(NativeGate(name, (q,), param) for q in qubits))
            for name, param in DEVICE_DECOMPOSITIONS[kind]]


def qec_after(kind: str, native: str) -> bool:
    return native == "clifford" or kind in DEVICE_QEC_AFTER


def transversal_gate(code: CodeSpec, kind: str, native: str = "device") -> PhysicalCircuit:
    """Logical ``kind`` on one block (two blocks for CNOT, qubits ``0..2N-1``)."""
    kind = kind.upper()
    if kind not in LOGICAL_KINDS:
        raise CodeError(f"unsupported logical gate {kind}")
    if kind in ("H", "S", "SDG") and not code.transversal_cliffords:
        raise CodeError(f"{code.name} has no transversal {kind}")
    if native not in ("device", "clifford"):
        raise ValueError(f"unknown native gate set {native!r}")
    N = code.N
    if kind == "CNOT":
        circ = PhysicalCircuit(2 * N, blocks=[Block(code.name, tuple(range(N))),
                                              Block(code.name, tuple(range(N, 2 * N)))])
        circ.steps = [Step((NativeGate("CNOT", (i, N + i)),)) for i in range(N)]
        circ.steps.append(Step(qec=(0, 1)))
        return circ
    circ = PhysicalCircuit(N, blocks=[Block(code.name, tuple(range(N)))])
    circ.steps = _block_steps(code, kind, range(N), native)
    if qec_after(kind, native):
        circ.steps.append(Step(qec=(0,)))
    return circ


def cnot_tilde(code: CodeSpec, noisy_reg: int = 0, logical_reg: int = 1,
               control_on: str = "noisy") -> PhysicalCircuit:
    """Clean-noisy CNOT on a two-register layout (registers in index order).

    Noisy control: one CNOT from the noisy qubit onto every qubit of the
    logical X support.  Clean control: every qubit of the logical Z support
    controls the noisy qubit.  Either way exactly ``w`` two-qubit gates.
    """
    if control_on not in ("noisy", "clean"):
        raise ValueError("control_on must be 'noisy' or 'clean'")
    if {noisy_reg, logical_reg} != {0, 1}:
        raise ValueError("registers must be 0 and 1")
    lx, lz = code.logical_x, code.logical_z
    if lx.z or lz.x:
        raise CodeError(f"{code.name}: logical X/Z are not transversal products")
    N = code.N
    noisy_q, off = (0, 1) if noisy_reg == 0 else (N, 0)
    circ = PhysicalCircuit(N + 1, blocks=[Block(code.name, tuple(range(off, off + N)))])
    if control_on == "noisy":
        circ.steps = [Step((NativeGate("CNOT", (noisy_q, off + q)),)) for q in lx.support]
    else:
        circ.steps = [Step((NativeGate("CNOT", (off + q, noisy_q)),)) for q in lz.support]
    circ.steps.append(Step(qec=(0,)))
    return circ


# QEC rounds ---------------------------------------------------------------------

def _embed(p: PauliString, qubits: Sequence[int], n: int) -> PauliString:
    return p.embed(list(qubits), n)


def measure_syndrome(code: CodeSpec, t: StabilizerTableau, block: Sequence[int],
                     rng: np.random.Generator | None = None) -> tuple[int, ...]:
    bits = []
    for g in code.generators:
        outcome, _ = t.measure_pauli(_embed(g, block, t.n), rng)
        bits.append(0 if outcome == 1 else 1)
    return tuple(bits)


def qec_round(code: CodeSpec, state, block: Sequence[int] | None = None,
              rng: np.random.Generator | None = None):
    """Noiseless syndrome measurement plus recovery on one code block.

    ``state`` is a :class:`StabilizerTableau` (updated in place) or a dense
    density matrix (a new matrix is returned).
    """
    block = list(range(code.N)) if block is None else list(block)
    if isinstance(state, StabilizerTableau):
        s = measure_syndrome(code, state, block, rng)
        rec = decode_syndrome(code, s)
        if not rec.is_identity:
            state.apply_fault(_embed(rec, block, state.n))
        return state
    from .density import qec_channel
    return qec_channel(np.asarray(state), code, block)
