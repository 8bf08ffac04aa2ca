"""Vectorized Pauli-frame simulation of noisy Clifford circuits.

For Clifford circuits with Pauli noise the noisy state is ``F |psi>`` with
``|psi>`` the ideal state and ``F`` a random Pauli (the frame).  Frames for
many shots are propagated together as bit arrays of shape ``(qubits, shots)``.
QEC rounds act on the frame exactly because the ideal block state sits in the
code space wherever a round is placed, so syndromes are determined by the
frame alone.  Readout assumes the ideal output is the all-zero logical state,
which holds for every compiled-to-identity sequence used here.

Faults are drawn sparsely: for each noise channel the Bernoulli process over
all (location, shot) pairs is sampled via geometric gaps, so the cost scales
with the number of faults rather than the number of locations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import PhysicalCircuit
from .codes import CodeSpec, get_code
from .noise import LETTER_X, LETTER_Z, GateNoise, NoiseModel
from .pauli import rz_quarter_turns


@dataclass
class _StepOps:
    h: np.ndarray
    s: np.ndarray
    sx: np.ndarray
    cx_c: np.ndarray
    cx_t: np.ndarray
    qec: list[tuple[CodeSpec, np.ndarray]] = field(default_factory=list)


def _arr(v) -> np.ndarray:
    return np.asarray(v, dtype=np.intp)


@dataclass
class _Channel:
    noise: GateNoise
    steps: np.ndarray     # (L,)
    qubits: np.ndarray    # (L, arity)


class FrameProgram:
    """A :class:`PhysicalCircuit` lowered to index arrays, plus noise locations."""

    def __init__(self, circuit: PhysicalCircuit, noise, codes: dict[str, CodeSpec] | None = None):
        """``noise`` is a :class:`NoiseModel` or a callable ``(step, gate_index, gate)``
        returning the gate's :class:`GateNoise` (or None)."""
        circuit.validate()
        if isinstance(noise, NoiseModel):
            model = noise
            noise_for = lambda k, i, g: model.for_gate(g.name)  # noqa: E731
        else:
            noise_for = noise
        self.n = circuit.n_qubits
        codes = dict(codes or {})
        for b in circuit.blocks:
            codes.setdefault(b.code, get_code(b.code))
        self.blocks = [(codes[b.code], _arr(b.qubits)) for b in circuit.blocks]
        self.noisy_qubits = _arr(sorted(set(range(self.n)) - {q for _, qs in self.blocks for q in qs}))
        self.ops: list[_StepOps] = []
        locs: dict[int, tuple[GateNoise, list[int], list[tuple[int, ...]]]] = {}
        for k, step in enumerate(circuit.steps):
            h, s, sx, cc, ct = [], [], [], [], []
            for gi, g in enumerate(step.gates):
                q = g.qubits[0]
                if g.name == "H":
                    h.append(q)
                elif g.name in ("S", "SDG"):
                    s.append(q)
                elif g.name == "SX":
                    sx.append(q)
                elif g.name == "RZ":
                    if rz_quarter_turns(g.param) % 2:
                        s.append(q)
                elif g.name == "CNOT":
                    cc.append(g.qubits[0])
                    ct.append(g.qubits[1])
                ch = noise_for(k, gi, g)
                if ch is not None and ch.fault_probability > 0:
                    if ch.arity != len(g.qubits):
                        raise ValueError(f"{g.name} noise acts on {ch.arity} qubit(s)")
                    entry = locs.setdefault(id(ch), (ch, [], []))
                    entry[1].append(k)
                    entry[2].append(g.qubits)
            qec = self._group_qec(step.qec)
            self.ops.append(_StepOps(_arr(h), _arr(s), _arr(sx), _arr(cc), _arr(ct), qec))
        self.channels = [_Channel(ch, _arr(st), _arr(qs).reshape(len(st), ch.arity))
                         for ch, st, qs in locs.values()]

    def _group_qec(self, block_ids) -> list[tuple[CodeSpec, np.ndarray]]:
        by_code: dict[int, tuple[CodeSpec, list[np.ndarray]]] = {}
        for b in block_ids:
            code, qs = self.blocks[b]
            by_code.setdefault(id(code), (code, []))[1].append(qs)
        return [(code, np.stack(qs)) for code, qs in by_code.values()]

    @property
    def fault_free_probability(self) -> float:
        """Exact probability that a shot sees no fault at all."""
        log_p = sum(len(c.steps) * math.log1p(-c.noise.fault_probability) for c in self.channels
                    if c.noise.fault_probability < 1)
        if any(c.noise.fault_probability >= 1 and len(c.steps) for c in self.channels):
            return 0.0
        return math.exp(log_p)

    # fault sampling ----------------------------------------------------------
    def sample_faults(self, shots: int, rng: np.random.Generator):
        """Flattened single-qubit fault records sorted by step:
        ``(step, qubit, shot, xbit, zbit)`` arrays."""
        recs = []
        for c in self.channels:
            p = c.noise.fault_probability
            M = len(c.steps) * shots
            pos = _bernoulli_positions(M, p, rng)
            if pos.size == 0:
                continue
            loc, shot = np.divmod(pos, shots)
            cond = c.noise.probs[1:] / p
            letter = rng.choice(np.arange(1, c.noise.probs.size), size=pos.size, p=cond)
            if c.noise.arity == 1:
                parts = [(letter, 0)]
            else:
                parts = [(letter // 4, 0), (letter % 4, 1)]
            for let, wire in parts:
                keep = let != 0
                recs.append((c.steps[loc[keep]], c.qubits[loc[keep], wire], shot[keep],
                             LETTER_X[let[keep]], LETTER_Z[let[keep]]))
        if not recs:
            e = np.zeros(0, dtype=np.intp)
            return e, e, e, e.astype(np.uint8), e.astype(np.uint8)
        cols = [np.concatenate(c) for c in zip(*recs)]
        order = np.argsort(cols[0], kind="stable")
        return tuple(c[order] for c in cols)

    # propagation ---------------------------------------------------------------
    def propagate(self, faults, shots: int) -> tuple[np.ndarray, np.ndarray]:
        st, fq, fs, fx, fz = faults
        x = np.zeros((self.n, shots), dtype=np.uint8)
        z = np.zeros((self.n, shots), dtype=np.uint8)
        bounds = np.searchsorted(st, np.arange(len(self.ops) + 1))
        for k, op in enumerate(self.ops):
            if op.h.size:
                tmp = x[op.h]
                x[op.h] = z[op.h]
                z[op.h] = tmp
            if op.s.size:
                z[op.s] ^= x[op.s]
            if op.sx.size:
                x[op.sx] ^= z[op.sx]
            if op.cx_c.size:
                x[op.cx_t] ^= x[op.cx_c]
                z[op.cx_c] ^= z[op.cx_t]
            a, b = bounds[k], bounds[k + 1]
            if b > a:
                x[fq[a:b], fs[a:b]] ^= fx[a:b]
                z[fq[a:b], fs[a:b]] ^= fz[a:b]
            for code, idx in op.qec:
                frame_qec(code, x, z, idx)
        return x, z

    def success(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        """Shots whose logical readout is all zero (after a final ideal QEC)."""
        ok = np.ones(x.shape[1], dtype=bool)
        if self.noisy_qubits.size:
            ok &= ~x[self.noisy_qubits].any(axis=0)
        for code, qs in self.blocks:
            idx = qs[None, :]
            frame_qec(code, x, z, idx)
            lz = np.asarray(code.logical_z.support)
            ok &= (x[qs[lz]].sum(axis=0) % 2) == 0
        return ok


def _bernoulli_positions(M: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices in ``[0, M)`` of an i.i.d. Bernoulli(p) sequence."""
    if M == 0 or p <= 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(M, dtype=np.int64)
    out, last = [], -1
    expect = M * p
    while True:
        size = int(expect + 6 * math.sqrt(expect) + 16)
        pos = last + np.cumsum(rng.geometric(p, size=size))
        out.append(pos[pos < M])
        if pos[-1] >= M:
            break
        last = int(pos[-1])
        expect = (M - last) * p
    return np.concatenate(out)


def frame_qec(code: CodeSpec, x: np.ndarray, z: np.ndarray, idx: np.ndarray) -> None:
    """Ideal QEC on blocks ``idx`` (shape ``(blocks, N)``), in place."""
    gx, gz = code.check_matrices
    xb, zb = x[idx], z[idx]  # (nb, N, S)
    key = np.zeros(xb.shape[::2], dtype=np.intp)
    for i in range(gx.shape[0]):
        bit = np.zeros_like(key, dtype=np.uint8)
        for q in np.flatnonzero(gx[i]):
            bit ^= zb[:, q]
        for q in np.flatnonzero(gz[i]):
            bit ^= xb[:, q]
        key |= bit.astype(np.intp) << i
    if not key.any():
        return
    rx, rz = code.recovery_table
    x[idx] ^= rx[key].transpose(0, 2, 1)
    z[idx] ^= rz[key].transpose(0, 2, 1)


@dataclass
class FrameResult:
    fidelity: float
    se: float
    shots: int
    simulated: int
    p_fault_free: float
    successes: int


def simulate(circuit: PhysicalCircuit | FrameProgram, noise: NoiseModel | None, shots: int,
             rng: np.random.Generator, conditioned: bool = False) -> FrameResult:
    """Estimate the all-zero survival probability of ``circuit``.

    With ``conditioned`` only shots containing at least one fault are
    propagated; the estimate combines the exact fault-free probability with
    the empirical success rate of faulty shots.
    """
    prog = circuit if isinstance(circuit, FrameProgram) else FrameProgram(circuit, noise or NoiseModel())
    faults = prog.sample_faults(shots, rng)
    if not conditioned:
        x, z = prog.propagate(faults, shots)
        ok = prog.success(x, z)
        f = float(ok.mean())
        return FrameResult(f, math.sqrt(max(f * (1 - f), 0) / shots), shots, shots,
                           prog.fault_free_probability, int(ok.sum()))
    p0 = prog.fault_free_probability
    faulty, remap = np.unique(faults[2], return_inverse=True)
    F = faulty.size
    if F == 0:
        return FrameResult(p0 if p0 < 1 else 1.0, 0.0, shots, 0, p0, 0)
    compressed = (faults[0], faults[1], remap.astype(np.intp), faults[3], faults[4])
    x, z = prog.propagate(compressed, F)
    ok = prog.success(x, z)
    s = float(ok.mean())
    pf = 1 - p0
    return FrameResult(p0 + pf * s, pf * math.sqrt(s * (1 - s) / F), shots, F, p0, int(ok.sum()))


def simulate_tableau(circuit: PhysicalCircuit, noise: NoiseModel | None, shots: int,
                     rng: np.random.Generator, codes: dict[str, CodeSpec] | None = None) -> FrameResult:
    """Shot-by-shot reference: full tableau evolution with sampled Pauli faults
    and measured QEC rounds.  Much slower than :func:`simulate`; used to
    cross-check it."""
    from .pauli import PauliString
    from .tableau import CliffordGate, StabilizerTableau
    from .codes import measure_syndrome, decode_syndrome

    noise = noise or NoiseModel()
    n = circuit.n_qubits
    codes = dict(codes or {})
    for b in circuit.blocks:
        codes.setdefault(b.code, get_code(b.code))
    blocks = [(codes[b.code], list(b.qubits)) for b in circuit.blocks]
    in_block = {q for _, qs in blocks for q in qs}
    noisy = [q for q in range(n) if q not in in_block]

    start = StabilizerTableau(n)
    for code, qs in blocks:
        for g in code.generators:
            start.measure_pauli(g.embed(qs, n), forced=1)

    def qec(t, code, qs):
        rec = decode_syndrome(code, measure_syndrome(code, t, qs, rng))
        if not rec.is_identity:
            t.apply_fault(rec.embed(qs, n))

    ok = 0
    for _ in range(shots):
        t = start.copy()
        for step in circuit.steps:
            faults = []
            for g in step.gates:
                t.apply_gate(CliffordGate(g.name, g.qubits, g.param))
                ch = noise.for_gate(g.name)
                if ch is not None and ch.fault_probability > 0:
                    idx = int(rng.choice(ch.probs.size, p=ch.probs))
                    if idx:
                        faults.append(PauliString.from_letters(dict(zip(g.qubits, ch.letters(idx))), n))
            for f in faults:
                t.apply_fault(f)
            for b in step.qec:
                qec(t, *blocks[b])
        for code, qs in blocks:
            qec(t, code, qs)
        good = True
        for q in noisy:
            good &= t.measure_pauli(PauliString.from_letters({q: "Z"}, n), rng)[0] == 1
        for code, qs in blocks:
            good &= t.measure_pauli(code.logical_z.embed(qs, n), rng)[0] == 1
        ok += bool(good)
    f = ok / shots
    return FrameResult(f, math.sqrt(f * (1 - f) / shots), shots, shots, float("nan"), ok)
