"""Exact logical tomography of Clifford circuits with Pauli noise.

The logical effect of a fault depends only on whether its propagated image
commutes with a fixed list of Paulis at the output: the code generators (the
syndrome) and the logical X/Z of each register.  Back-propagating that list
through the circuit gives, for every fault location, the bit pattern each
Pauli letter produces.  Independent locations combine by XOR, so the joint
distribution of the pattern is a convolution computed with a Walsh-Hadamard
transform.  Decoding the pattern then yields the logical Pauli channel.
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from .circuit import PhysicalCircuit
from .codes import CodeSpec
from .noise import NoiseModel
from .pauli import LETTERS, PauliString, commutes, conjugate, pauli_mul

MAX_BITS = 20


def _embed(p: PauliString, qs, n) -> PauliString:
    return p.embed(list(qs), n)


def _reps(regs, n):
    """Physical logical-X and logical-Z representatives for each register."""
    out = []
    for kind, qs, code in regs:
        if kind == "noisy":
            out.append((PauliString.from_letters({qs[0]: "X"}, n), PauliString.from_letters({qs[0]: "Z"}, n)))
        else:
            out.append((_embed(code.logical_x, qs, n), _embed(code.logical_z, qs, n)))
    return out


def _generators(regs, n) -> list[PauliString]:
    return [_embed(g, qs, n) for kind, qs, code in regs if kind == "clean" for g in code.generators]


def _logical_rep(letters: str, reps, n) -> PauliString:
    p = PauliString.identity(n)
    for ch, (lx, lz) in zip(letters, reps):
        if ch == "X":
            p = pauli_mul(p, lx)
        elif ch == "Z":
            p = pauli_mul(p, lz)
        elif ch == "Y":
            y = pauli_mul(lx, lz)
            p = pauli_mul(p, PauliString(n, y.x, y.z, y.phase + 1))
    return p


def _logical_letters(p: PauliString, reps) -> str:
    out = []
    for lx, lz in reps:
        xb = not commutes(p, lz)
        zb = not commutes(p, lx)
        out.append("IXZY"[xb | (zb << 1)])
    return "".join(out)


def _stabilizer_phase(t: PauliString, gens: list[PauliString]) -> int:
    """Return ``k`` with ``t = i**k * prod(subset of gens)``; raise if not in the group."""
    n = t.n
    rows = [((g.x << n) | g.z, 1 << i) for i, g in enumerate(gens)]
    target = (t.x << n) | t.z
    basis: dict[int, tuple[int, int]] = {}
    for v, tag in rows:
        for piv in sorted(basis, reverse=True):
            if v >> piv & 1:
                bv, bt = basis[piv]
                v, tag = v ^ bv, tag ^ bt
        if v:
            piv = v.bit_length() - 1
            for p2 in list(basis):
                bv, bt = basis[p2]
                if bv >> piv & 1:
                    basis[p2] = (bv ^ v, bt ^ tag)
            basis[piv] = (v, tag)
    used = 0
    for piv in sorted(basis, reverse=True):
        if target >> piv & 1:
            bv, bt = basis[piv]
            target ^= bv
            used ^= bt
    if target:
        raise ValueError("ideal circuit does not preserve the code space")
    g = PauliString.identity(n)
    for i, gen in enumerate(gens):
        if used >> i & 1:
            g = pauli_mul(g, gen)
    return (t.phase - g.phase) % 4


def ideal_ptm(circuit: PhysicalCircuit, regs) -> np.ndarray:
    n = circuit.n_qubits
    k = len(regs)
    reps = _reps(regs, n)
    gens = _generators(regs, n)
    labels = ["".join(t) for t in itertools.product(LETTERS, repeat=k)]
    index = {lab: i for i, lab in enumerate(labels)}
    R = np.zeros((4**k, 4**k))
    R[0, 0] = 1
    for b, lab in enumerate(labels[1:], 1):
        q = _logical_rep(lab, reps, n)
        for g in circuit.gates():
            q = conjugate(q, g.name, g.qubits, g.param)
        if any(not commutes(q, s) for s in gens):
            raise ValueError("ideal circuit does not preserve the code space")
        out = _logical_letters(q, reps)
        rep = _logical_rep(out, reps, n)
        k_phase = _stabilizer_phase(pauli_mul(rep, q), gens)
        if k_phase % 2:
            raise ValueError("non-Hermitian logical image")
        R[index[out], b] = 1 - k_phase
    return R


def _fwht(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    h = 1
    n = a.size
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1)
        a = a.reshape(n)
        h *= 2
    return a


def _parity_table(bits: int) -> np.ndarray:
    par = np.zeros(1, dtype=np.uint8)
    for _ in range(bits):
        par = np.concatenate([par, par ^ 1])
    return par


def pattern_distribution(circuit: PhysicalCircuit, noise: NoiseModel, functionals: list[PauliString]) -> np.ndarray:
    """Distribution over the ``F``-bit pattern of output anticommutations."""
    F = len(functionals)
    if F > MAX_BITS:
        raise MemoryError(f"{F} functionals exceed the cap of {MAX_BITS}")
    M = list(functionals)
    loc_counter: Counter = Counter()
    for step in reversed(circuit.steps):
        for g in step.gates:
            ch = noise.for_gate(g.name)
            if ch is None:
                continue
            dist: dict[int, float] = {}
            for idx, p in enumerate(ch.probs):
                if p == 0:
                    continue
                if ch.arity == 1:
                    e = PauliString.from_letters({g.qubits[0]: LETTERS[idx]}, circuit.n_qubits)
                else:
                    e = PauliString.from_letters({g.qubits[0]: LETTERS[idx // 4],
                                                  g.qubits[1]: LETTERS[idx % 4]}, circuit.n_qubits)
                v = sum((not commutes(e, m)) << j for j, m in enumerate(M))
                dist[v] = dist.get(v, 0.0) + float(p)
            loc_counter[tuple(sorted(dist.items()))] += 1
        for g in reversed(step.gates):
            M = [conjugate(m, g.name, g.qubits, g.param) for m in M]
    size = 1 << F
    u = np.arange(size)
    par = _parity_table(F)
    chi = np.ones(size)
    for dist, count in loc_counter.items():
        c = np.zeros(size)
        for v, p in dist:
            c += p * (1.0 - 2.0 * par[u & v])
        chi *= c**count
    return np.clip(_fwht(chi) / size, 0, None)


def pauli_tomography(circuit: PhysicalCircuit, noise: NoiseModel | None, codes, regs,
                     leak_tol: float = 1e-9) -> np.ndarray:
    from .density import pauli_channel_ptm

    probs = logical_error_distribution(circuit, noise, regs, leak_tol)
    return pauli_channel_ptm(probs) @ ideal_ptm(circuit, regs)


def logical_error_distribution(circuit: PhysicalCircuit, noise: NoiseModel | None, regs,
                               leak_tol: float = 1e-9) -> np.ndarray:
    """Probabilities of the logical Pauli errors (``IXYZ`` order, register 0 most
    significant) left after the circuit, as if applied after the ideal gate."""
    from .density import LeakageError

    noise = noise or NoiseModel()
    n = circuit.n_qubits
    qec_steps = [i for i, s in enumerate(circuit.steps) if s.qec]
    last = len(circuit.steps) - 1
    if any(i != last for i in qec_steps):
        raise NotImplementedError("pauli backend supports a QEC round only at the final step")
    corrected = set(circuit.steps[last].qec) if qec_steps else set()
    block_index = {tuple(b.qubits): i for i, b in enumerate(circuit.blocks)}
    reps = _reps(regs, n)
    functionals, layout = [], []
    for (kind, qs, code), (lx, lz) in zip(regs, reps):
        start = len(functionals)
        if kind == "clean":
            functionals += [_embed(g, qs, n) for g in code.generators]
        functionals += [lz, lx]  # x-bit, z-bit of the logical error
        layout.append((kind, code, start, len(functionals) - start, block_index.get(tuple(qs))))
    dist = pattern_distribution(circuit, noise, functionals)
    v = np.arange(dist.size)
    k = len(regs)
    logical = np.zeros(dist.size, dtype=np.intp)
    leak = np.zeros(dist.size, dtype=bool)
    for reg, (kind, code, start, width, blk) in enumerate(layout):
        bits = (v >> start) & ((1 << width) - 1)
        xb, zb = (bits >> (width - 2)) & 1, (bits >> (width - 1)) & 1
        if kind == "clean":
            r = width - 2
            syn = bits & ((1 << r) - 1)
            if blk in corrected:
                rec_x, rec_z = _recovery_logical_bits(code)
                xb, zb = xb ^ rec_x[syn], zb ^ rec_z[syn]
            else:
                leak |= syn != 0
        letter = np.array([0, 1, 3, 2])[xb | (zb << 1)]  # (x,z) -> index in IXYZ
        logical = logical * 4 + letter
    leak_w = float(dist[leak].sum())
    if leak_w > leak_tol:
        raise LeakageError(leak_w)
    probs = np.bincount(logical[~leak], weights=dist[~leak], minlength=4**k)
    return probs / probs.sum()


def _recovery_logical_bits(code: CodeSpec):
    r = len(code.generators)
    rx = np.zeros(2**r, dtype=np.intp)
    rz = np.zeros(2**r, dtype=np.intp)
    for s, p in code.decoder.items():
        key = sum(b << i for i, b in enumerate(s))
        rx[key] = not commutes(p, code.logical_z)
        rz[key] = not commutes(p, code.logical_x)
    return rx, rz
