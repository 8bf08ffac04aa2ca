"""Effective logical noise: each logical gate as its ideal action followed by
a logical Pauli channel obtained by exact tomography of the compiled gate.

For Pauli noise with a QEC round closing every noisy stretch on a block,
this reproduces the physical model exactly: each block re-enters the code
space after every gate, so logical errors of successive gates compose as
independent Pauli channels.  Idling follows the depth rule used by the
compiler: a register whose gate has real depth ``d`` in a layer of depth
``D`` idles for ``D - d`` steps (``I`` on a noisy register, the QEC-closed
logical idle on a clean one).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..circuit import NativeGate, PhysicalCircuit, Step
from ..codes import CodeSpec, steane_code
from ..compiler import LogicalCircuit, LogicalGate, compile_circuit, gate_depth
from ..density import average_gate_infidelity, ideal_logical_ptm, logical_registers, pauli_channel_ptm
from ..noise import GateNoise, NoiseModel
from ..pauli_tomography import logical_error_distribution


@dataclass
class LogicalNoiseTable:
    """Cache of logical channels and depths keyed by ``(kind, tags)``."""

    noise: NoiseModel
    code: CodeSpec = field(default_factory=steane_code)
    _channels: dict = field(default_factory=dict, repr=False)
    _depths: dict = field(default_factory=dict, repr=False)

    def compiled(self, kind: str, tags: tuple[str, ...]) -> PhysicalCircuit:
        circ = LogicalCircuit(tags, [[LogicalGate(kind, tuple(range(len(tags))))]])
        codes = self.code if "clean" in tags else None
        return compile_circuit(circ, codes, native="device", idle_accounting=True)

    def channel(self, kind: str, tags: tuple[str, ...]) -> GateNoise:
        key = (kind, tuple(tags))
        if key not in self._channels:
            phys = self.compiled(kind, key[1])
            regs = logical_registers(phys, {self.code.name: self.code})
            probs = logical_error_distribution(phys, self.noise, regs)
            self._channels[key] = GateNoise(probs)
        return self._channels[key]

    def depth(self, kind: str, tags: tuple[str, ...]) -> int:
        key = (kind, tuple(tags))
        if key not in self._depths:
            self._depths[key] = gate_depth(kind, key[1], "device", self.code)
        return self._depths[key]

    def infidelity(self, kind: str, tags: tuple[str, ...]) -> float:
        """Average gate infidelity of the logical gate."""
        ch = self.channel(kind, tags)
        ideal = ideal_logical_ptm(kind)
        return average_gate_infidelity(pauli_channel_ptm(ch.probs) @ ideal, ideal)


def effective_circuit(circuit: LogicalCircuit, table: LogicalNoiseTable):
    """Lower to one qubit per register; return ``(circuit, noise callable)``.

    Gates keep their logical names; the callable hands each gate its logical
    channel, keyed by the tags of its targets.
    """
    tags = circuit.tags
    steps: list[Step] = []
    channels: dict[tuple[int, int], GateNoise] = {}
    for layer in circuit.layers:
        own = {}
        for g in layer:
            tg = tuple(tags[t] for t in g.targets)
            d = table.depth(g.kind, tg)
            for t in g.targets:
                own[t] = d
        D = max(own.values(), default=0)
        if not layer:
            continue
        k = len(steps)
        steps.append(Step(tuple(NativeGate(g.kind, g.targets) for g in layer)))
        for gi, g in enumerate(layer):
            channels[(k, gi)] = table.channel(g.kind, tuple(tags[t] for t in g.targets))
        for j in range(D):
            idle = [r for r in range(circuit.n) if D - own.get(r, 0) > j]
            if not idle:
                break
            k = len(steps)
            steps.append(Step(tuple(NativeGate("I", (r,)) for r in idle)))
            for gi, r in enumerate(idle):
                channels[(k, gi)] = table.channel("I", (tags[r],))
    phys = PhysicalCircuit(circuit.n, steps=steps)
    return phys, lambda k, gi, g: channels.get((k, gi))
