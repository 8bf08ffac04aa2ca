"""Compile layered logical circuits over clean/noisy registers to native gates.

Each logical layer becomes ``D`` real time-steps, ``D`` being the deepest gate
in the layer, interleaved with virtual steps that hold the R_Z gates:

    v0  r1  v1  r2  v2 ...  rD  vD

A gate's native stages fill the earliest slots in order; R_Z stages go to the
next virtual slot and every other stage to the next real slot.  With idle
accounting, physical qubits untouched in a real slot get an ``I`` gate, and a
clean block whose gate has already finished also gets a QEC round after every
further real slot (a logical idle).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .circuit import DEVICE_DECOMPOSITIONS, Block, NativeGate, PhysicalCircuit, Step
from .codes import CodeSpec, _block_steps, qec_after, steane_code

TAGS = ("clean", "noisy")
SINGLE_KINDS = ("I", "X", "Y", "Z", "H", "S", "SDG", "SX")
INVERSE = {"S": "SDG", "SDG": "S", "SX": None}


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class LogicalGate:
    kind: str
    targets: tuple[int, ...]

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if kind == "CNOT" else 1
        if kind not in SINGLE_KINDS + ("CNOT",):
            raise CompileError(f"unknown logical gate {self.kind}")
        if len(self.targets) != arity or len(set(self.targets)) != arity:
            raise CompileError(f"{kind} needs {arity} distinct target(s), got {self.targets}")

    def inverse(self) -> "LogicalGate":
        if self.kind == "SX":
            raise CompileError("SX inverse is not in the gate set")
        return LogicalGate(INVERSE.get(self.kind, self.kind), self.targets)


@dataclass
class LogicalCircuit:
    tags: tuple[str, ...]
    layers: list[list[LogicalGate]] = field(default_factory=list)

    def __post_init__(self):
        self.tags = tuple(self.tags)
        if any(t not in TAGS for t in self.tags):
            raise CompileError(f"tags must be 'clean' or 'noisy', got {self.tags}")
        for layer in self.layers:
            self._check_layer(layer)

    @property
    def n(self) -> int:
        return len(self.tags)

    def _check_layer(self, layer: Sequence[LogicalGate]) -> None:
        used = [t for g in layer for t in g.targets]
        if len(used) != len(set(used)):
            raise CompileError("a register appears twice in one layer")
        if any(not 0 <= t < self.n for t in used):
            raise CompileError("gate target out of range")

    def append(self, layer: Sequence[LogicalGate]) -> "LogicalCircuit":
        layer = list(layer)
        self._check_layer(layer)
        self.layers.append(layer)
        return self

    def gates(self):
        for layer in self.layers:
            yield from layer

    def inverse(self) -> "LogicalCircuit":
        return LogicalCircuit(self.tags, [[g.inverse() for g in reversed(layer)]
                                          for layer in reversed(self.layers)])

    def to_text(self) -> str:
        lines = ["tags " + " ".join(self.tags)]
        for layer in self.layers:
            lines.append(" ".join(f"{g.kind}@{','.join(map(str, g.targets))}" for g in layer))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LogicalCircuit":
        """Inverse of :meth:`to_text`; ``#`` starts a comment, blank lines are skipped."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or not lines[0].startswith("tags"):
            raise CompileError("first line must be 'tags <clean|noisy> ...'")
        circ = cls(tuple(lines[0].split()[1:]))
        for ln in lines[1:]:
            layer = []
            for tok in ln.split():
                kind, sep, tg = tok.partition("@")
                if not sep:
                    raise CompileError(f"bad gate token {tok!r}; expected KIND@targets")
                try:
                    targets = tuple(int(t) for t in tg.split(","))
                except ValueError:
                    raise CompileError(f"bad targets in {tok!r}") from None
                layer.append(LogicalGate(kind, targets))
            circ.append(layer)
        return circ


def clifford_to_natives(kind: str) -> list[tuple[str, float | None]]:
    """Device-native sequence (time order) for a single-qubit Clifford."""
    try:
        return list(DEVICE_DECOMPOSITIONS[kind.upper()])
    except KeyError:
        raise CompileError(f"no native decomposition for {kind}") from None


# register layout -----------------------------------------------------------------

@dataclass
class Layout:
    qubits: list[tuple[int, ...]]        # physical qubits of each register
    block_of: dict[int, int]             # register -> block index
    blocks: list[Block]
    codes: dict[int, CodeSpec]

    @property
    def n_physical(self) -> int:
        return sum(len(q) for q in self.qubits)


def make_layout(tags: Sequence[str], codes=None) -> Layout:
    codes = _code_map(tags, codes)
    qubits, blocks, block_of = [], [], {}
    nxt = 0
    for r, tag in enumerate(tags):
        if tag == "clean":
            N = codes[r].N
            qs = tuple(range(nxt, nxt + N))
            block_of[r] = len(blocks)
            blocks.append(Block(codes[r].name, qs))
        else:
            qs = (nxt,)
        qubits.append(qs)
        nxt += len(qs)
    return Layout(qubits, block_of, blocks, codes)


def _code_map(tags, codes) -> dict[int, CodeSpec]:
    clean = [r for r, t in enumerate(tags) if t == "clean"]
    if codes is None:
        codes = steane_code() if clean else None
    if isinstance(codes, CodeSpec):
        return {r: codes for r in clean}
    codes = dict(codes or {})
    missing = [r for r in clean if r not in codes]
    if missing:
        raise CompileError(f"no code given for clean registers {missing}")
    return {r: codes[r] for r in clean}


# gate expansion ------------------------------------------------------------------

def _stages(gate: LogicalGate, layout: Layout, tags, native: str):
    """Native stages (lists of parallel gates, time order) plus QEC blocks."""
    kind, tg = gate.kind, gate.targets
    if kind != "CNOT":
        (r,) = tg
        qs = layout.qubits[r]
        if tags[r] == "noisy":
            if native == "clifford":
                return [[NativeGate(kind, qs)]], []
            return [[NativeGate(n, qs, p)] for n, p in clifford_to_natives(kind)], []
        code = layout.codes[r]
        if kind == "SX":
            raise CompileError("SX has no transversal form on a clean register")
        if kind in ("H", "S", "SDG") and not code.transversal_cliffords:
            raise CompileError(f"{code.name} has no transversal {kind}")
        stages = [list(s.gates) for s in _block_steps(code, kind, qs, native)]
        return stages, ([layout.block_of[r]] if qec_after(kind, native) else [])
    c, t = tg
    tc, tt = tags[c], tags[t]
    qc, qt = layout.qubits[c], layout.qubits[t]
    if tc == tt == "noisy":
        return [[NativeGate("CNOT", (qc[0], qt[0]))]], []
    if tc == tt == "clean":
        if layout.codes[c].N != layout.codes[t].N:
            raise CompileError("transversal CNOT needs equal block sizes")
        stages = [[NativeGate("CNOT", (a, b))] for a, b in zip(qc, qt)]
        return stages, [layout.block_of[c], layout.block_of[t]]
    # clean-noisy: one CNOT per qubit in the logical operator support
    if tc == "noisy":
        code = layout.codes[t]
        sup = code.logical_x.support
        stages = [[NativeGate("CNOT", (qc[0], qt[q]))] for q in sup]
        return stages, [layout.block_of[t]]
    code = layout.codes[c]
    sup = code.logical_z.support
    stages = [[NativeGate("CNOT", (qc[q], qt[0]))] for q in sup]
    return stages, [layout.block_of[c]]


def _is_virtual(stage) -> bool:
    return all(g.name == "RZ" for g in stage)


def gate_depth(kind: str, tags: Sequence[str] = ("noisy",), native: str = "device",
               code: CodeSpec | None = None) -> int:
    """Real (non-R_Z) time-steps a logical gate takes."""
    tags = tuple(tags)
    gate = LogicalGate(kind, tuple(range(len(tags))))
    layout = make_layout(tags, code)
    stages, _ = _stages(gate, layout, tags, native)
    return sum(not _is_virtual(s) for s in stages)


def _place(stages) -> list[int]:
    """Slot index for each stage: virtual slot k is 2k, real slot k is 2k-1."""
    pos, out = 0, []
    for s in stages:
        if _is_virtual(s):
            pos = pos if pos % 2 == 0 else pos + 1
        else:
            pos = pos + 1 if pos % 2 == 0 else pos + 2
        out.append(pos)
    return out


def compile_circuit(circuit: LogicalCircuit, codes=None, native: str = "device",
                    idle_accounting: bool = True) -> PhysicalCircuit:
    if native not in ("device", "clifford"):
        raise CompileError(f"unknown native gate set {native!r}")
    tags = circuit.tags
    layout = make_layout(tags, codes)
    phys = PhysicalCircuit(layout.n_physical, blocks=list(layout.blocks))
    for layer in circuit.layers:
        phys.steps.extend(_compile_layer(layer, layout, tags, native, idle_accounting))
    return phys


compile = compile_circuit  # noqa: A001 - public name


def _compile_layer(layer, layout: Layout, tags, native, idle_accounting) -> list[Step]:
    expanded = [(g, *_stages(g, layout, tags, native)) for g in layer]
    placed = [(g, st, qec, _place(st)) for g, st, qec in expanded]
    D = max((sum(not _is_virtual(s) for s in st) for _, st, _, _ in placed), default=0)
    n_slots = 2 * D + 1
    gates: list[list[NativeGate]] = [[] for _ in range(n_slots)]
    qecs: list[list[int]] = [[] for _ in range(n_slots)]
    block_done: dict[int, int] = {}  # block -> slot of its gate's last stage
    for g, st, qec, slots in placed:
        for s, k in zip(st, slots):
            gates[k].extend(s)
        last = slots[-1] if slots else 0
        for b in qec:
            qecs[last].append(b)
        for r in g.targets:
            if r in layout.block_of:
                block_done[layout.block_of[r]] = last
    if idle_accounting and D:
        for k in range(1, n_slots, 2):
            busy = {q for gt in gates[k] for q in gt.qubits}
            gates[k].extend(NativeGate("I", (q,)) for q in range(layout.n_physical) if q not in busy)
            for b in range(len(layout.blocks)):
                if block_done.get(b, -1) < k:
                    qecs[k].append(b)
    steps = []
    for gs, qs in zip(gates, qecs):
        if gs or qs:
            steps.append(Step(tuple(sorted(gs, key=lambda g: g.qubits)), tuple(sorted(set(qs)))))
    return steps
