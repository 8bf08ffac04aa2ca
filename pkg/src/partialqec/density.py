"""Dense density-matrix backend, Pauli transfer matrices and logical tomography.

PTM convention: ``R[a, b] = Tr[P_a E(P_b)] / 2**k`` over unnormalized Pauli
strings ordered lexicographically in ``I, X, Y, Z`` with qubit 0 as the most
significant digit.

Density operators are held as tensors of shape ``(2,) * 2n`` (row axes for
qubits ``0..n-1`` then column axes), qubit 0 being the most significant bit
of the matrix index, matching :meth:`PauliString.to_matrix`.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence

import numpy as np

from .circuit import NativeGate, PhysicalCircuit
from .codes import CodeSpec, code_state_vectors, get_code
from .noise import GateNoise, NoiseModel
from .pauli import LETTERS, PauliString, commutes, conjugate, pauli_mul

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
PAULI_1Q = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}


class LeakageError(RuntimeError):
    def __init__(self, weight: float):
        super().__init__(f"output leaves the code space with weight {weight:.3e}")
        self.weight = weight


# PTMs ------------------------------------------------------------------------

def pauli_basis(k: int) -> list[np.ndarray]:
    out = []
    for letters in itertools.product(LETTERS, repeat=k):
        m = np.array([[1.0 + 0j]])
        for ch in letters:
            m = np.kron(m, PAULI_1Q[ch])
        out.append(m)
    return out


def _num_qubits(d: int) -> int:
    k = int(round(math.log2(d)))
    if 2**k != d:
        raise ValueError(f"dimension {d} is not a power of two")
    return k


def ptm_of_map(channel: Callable[[np.ndarray], np.ndarray], k: int) -> np.ndarray:
    basis = pauli_basis(k)
    d = 2**k
    R = np.empty((4**k, 4**k))
    for b, Pb in enumerate(basis):
        out = channel(Pb)
        for a, Pa in enumerate(basis):
            R[a, b] = np.real(np.trace(Pa @ out)) / d
    return R


def ptm_of_unitary(u: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or not np.allclose(u.conj().T @ u, np.eye(len(u)), atol=atol):
        raise ValueError("input is not a unitary matrix")
    return ptm_of_map(lambda m: u @ m @ u.conj().T, _num_qubits(len(u)))


def depolarizing_ptm(eps: float, k: int = 1) -> np.ndarray:
    return np.diag([1.0] + [1 - eps] * (4**k - 1))


def pauli_channel_ptm(probs: Sequence[float]) -> np.ndarray:
    """Diagonal PTM of ``rho -> sum_P p_P P rho P`` (probs over ``4**k`` Paulis)."""
    probs = np.asarray(probs, dtype=float)
    k = _num_qubits(int(round(math.sqrt(probs.size))))
    paulis = [PauliString.from_str("".join(t)) for t in itertools.product(LETTERS, repeat=k)]
    diag = [sum(p * (1 if commutes(a, e) else -1) for p, e in zip(probs, paulis)) for a in paulis]
    return np.diag(diag)


def apply_channel(rho: np.ndarray, R: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if R.shape != (d * d, d * d):
        raise ValueError(f"PTM of shape {R.shape} does not act on dimension {d}")
    basis = pauli_basis(_num_qubits(d))
    c = np.array([np.real(np.trace(P @ rho)) for P in basis])
    c = R @ c
    return sum(ci * P for ci, P in zip(c, basis)) / d


def entanglement_fidelity(actual: np.ndarray, ideal: np.ndarray) -> float:
    if actual.shape != ideal.shape:
        raise ValueError("PTMs differ in dimension")
    d = int(round(math.sqrt(actual.shape[0])))
    return float(np.trace(ideal.T @ actual)) / d**2


def average_gate_infidelity(actual: np.ndarray, ideal: np.ndarray) -> float:
    d = int(round(math.sqrt(actual.shape[0])))
    fe = entanglement_fidelity(actual, ideal)
    return 1 - (d * fe + 1) / (d + 1)


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def sampled_infidelity(actual: np.ndarray, ideal: np.ndarray, n_samples: int,
                       rng: np.random.Generator) -> tuple[float, float]:
    """Mean and standard error of ``1 - <psi|U^dag E(psi) U|psi>`` over Haar states."""
    d = int(round(math.sqrt(actual.shape[0])))
    basis = pauli_basis(_num_qubits(d))
    B = np.array([P.conj().ravel() for P in basis])  # row a gives Tr[P_a rho] via @ rho.ravel()
    vals = np.empty(n_samples)
    for i in range(n_samples):
        psi = haar_state(d, rng)
        c = np.real(B @ np.outer(psi, psi.conj()).ravel())
        vals[i] = 1 - (ideal @ c) @ (actual @ c) / d
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))


# distances ---------------------------------------------------------------------

def trace_distance_to_mixed(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    if abs(np.trace(rho) - 1) > 1e-9:
        raise ValueError("state is not normalized")
    d = rho.shape[0]
    ev = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return 0.5 * float(np.abs(ev - 1 / d).sum())


def tvd_to_uniform(probs: np.ndarray) -> float:
    p = np.asarray(probs, dtype=float).ravel()
    if abs(p.sum() - 1) > 1e-9 or p.min() < -1e-12:
        raise ValueError("probabilities are not normalized")
    return 0.5 * float(np.abs(p - 1 / p.size).sum())


# dense simulation ------------------------------------------------------------------

_SX = np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]) / 2
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def gate_matrix(name: str, param: float | None = None) -> np.ndarray:
    name = name.upper()
    fixed = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z, "H": _H, "S": np.diag([1, 1j]),
             "SDG": np.diag([1, -1j]), "SX": _SX, "CNOT": _CNOT}
    if name in fixed:
        return fixed[name]
    if name == "RZ":
        return np.diag([np.exp(-0.5j * param), np.exp(0.5j * param)])
    raise ValueError(f"unknown gate {name}")


class DenseState:
    """Linear operator on ``n`` qubits evolved by unitaries, Pauli channels and QEC."""

    def __init__(self, op: np.ndarray):
        op = np.asarray(op, dtype=complex)
        dim = op.shape[0]
        self.n = _num_qubits(dim)
        self.t = op.reshape((2,) * (2 * self.n))

    @classmethod
    def from_vector(cls, psi: np.ndarray) -> "DenseState":
        return cls(np.outer(psi, np.conj(psi)))

    def matrix(self) -> np.ndarray:
        d = 2**self.n
        return self.t.reshape(d, d)

    def apply_unitary(self, u: np.ndarray, qubits: Sequence[int]) -> "DenseState":
        k = len(qubits)
        n = self.n
        u = u.reshape((2,) * (2 * k))
        rows = list(qubits)
        cols = [n + q for q in qubits]
        t = np.tensordot(u, self.t, axes=(list(range(k, 2 * k)), rows))
        t = np.moveaxis(t, list(range(k)), rows)
        t = np.tensordot(t, u.conj(), axes=(cols, list(range(k, 2 * k))))
        self.t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), cols)
        return self

    def apply_pauli(self, p: PauliString, side: str = "both") -> np.ndarray:
        """Tensor of ``P rho P`` (``both``), ``P rho`` (``left``) or ``rho P`` (``right``)."""
        t = self.t
        n = self.n
        axes_l = list(range(n)) if side in ("both", "left") else []
        axes_r = list(range(n, 2 * n)) if side in ("both", "right") else []
        for ax in axes_l + axes_r:
            q = ax % n
            ch = p.letter(q)
            if ch == "I":
                continue
            m = PAULI_1Q[ch] if ax < n else PAULI_1Q[ch].T
            t = np.moveaxis(np.tensordot(m, t, axes=(1, ax)), 0, ax)
        phase = 1j ** p.phase
        if side == "both":
            return t * (phase * np.conj(phase))
        return t * phase

    def apply_pauli_1q(self, q: int, probs: np.ndarray) -> "DenseState":
        pI, pX, pY, pZ = probs
        n = self.n
        t = np.moveaxis(self.t, (q, n + q), (0, 1))
        flipped = t[::-1, ::-1]
        s = np.array([[1, -1], [-1, 1]])[:, :, None]
        shape = (2, 2) + (1,) * (t.ndim - 2)
        s = s.reshape(shape)
        out = (pI + pZ * s) * t + (pX + pY * s) * flipped
        self.t = np.moveaxis(out, (0, 1), (q, n + q))
        return self

    def apply_gate_noise(self, noise: GateNoise, qubits: Sequence[int]) -> "DenseState":
        if noise.arity == 1:
            return self.apply_pauli_1q(qubits[0], noise.probs)
        p = noise.probs.reshape(4, 4)
        a, b = p.sum(axis=1), p.sum(axis=0)
        if np.allclose(np.outer(a, b), p, atol=1e-15):
            return self.apply_pauli_1q(qubits[0], a).apply_pauli_1q(qubits[1], b)
        acc = np.zeros_like(self.t)
        for idx, prob in enumerate(noise.probs):
            if prob == 0:
                continue
            letters = {qubits[0]: LETTERS[idx // 4], qubits[1]: LETTERS[idx % 4]}
            acc += prob * self.apply_pauli(PauliString.from_letters(letters, self.n))
        self.t = acc
        return self

    def qec(self, code: CodeSpec, block: Sequence[int]) -> "DenseState":
        self.t = _qec_tensor(self.t, self.n, code, list(block))
        return self

    def apply_native(self, g: NativeGate) -> "DenseState":
        if g.name == "I":
            return self
        return self.apply_unitary(gate_matrix(g.name, g.param), g.qubits)

    def run(self, circuit: PhysicalCircuit, noise: NoiseModel | None = None,
            codes: dict[str, CodeSpec] | None = None) -> "DenseState":
        noise = noise or NoiseModel()
        codes = _codes_for(circuit, codes)
        for step in circuit.steps:
            for g in step.gates:
                self.apply_native(g)
                ch = noise.for_gate(g.name)
                if ch is not None:
                    self.apply_gate_noise(ch, g.qubits)
            for b in step.qec:
                blk = circuit.blocks[b]
                self.qec(codes[blk.code], blk.qubits)
        return self


def _codes_for(circuit: PhysicalCircuit, codes) -> dict[str, CodeSpec]:
    codes = dict(codes or {})
    for b in circuit.blocks:
        codes.setdefault(b.code, get_code(b.code))
    return codes


_W_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _syndrome_basis(code: CodeSpec) -> np.ndarray:
    """Unitary with columns ``E_s |l>`` ordered by ``2 * key(s) + l``."""
    key = id(code)
    if key not in _W_CACHE:
        zero, one = code_state_vectors(code)
        r = len(code.generators)
        if 2 ** (r + 1) != 2**code.N:
            raise ValueError("QEC channel needs a code with one logical qubit")
        cols = []
        for k in range(2**r):
            s = tuple((k >> i) & 1 for i in range(r))
            E = code.decoder[s].to_matrix()
            cols += [E @ zero, E @ one]
        W = np.array(cols).T
        if not np.allclose(W.conj().T @ W, np.eye(len(W)), atol=1e-10):
            raise ValueError(f"{code.name}: decoder recoveries do not give an orthonormal basis")
        _W_CACHE[key] = (W, code)  # keep code alive so id() stays unique
    return _W_CACHE[key][0]


def _qec_tensor(t: np.ndarray, n: int, code: CodeSpec, block: list[int]) -> np.ndarray:
    W = _syndrome_basis(code)
    N = len(block)
    rest = [q for q in range(n) if q not in block]
    perm = block + rest + [n + q for q in block] + [n + q for q in rest]
    dB, dR = 2**N, 2 ** len(rest)
    m = np.transpose(t, perm).reshape(dB, dR, dB, dR)
    a = np.tensordot(W.conj().T, m, axes=(1, 0))          # (dB, dR, dB, dR)
    a = np.tensordot(a, W, axes=(2, 0))                   # (dB, dR, dR, dB)
    a = a.reshape(dB // 2, 2, dR, dR, dB // 2, 2)
    sigma = np.einsum("sirtsj->irjt", a)                  # (2, dR, 2, dR)
    W0 = W[:, :2]
    out = np.tensordot(W0, sigma, axes=(1, 0))            # (dB, dR, 2, dR)
    out = np.tensordot(out, W0.conj(), axes=(2, 1))       # (dB, dR, dR, dB)
    out = np.moveaxis(out, 3, 2).reshape((2,) * (2 * n))
    return np.transpose(out, np.argsort(perm))


def qec_channel(rho: np.ndarray, code: CodeSpec, block: Sequence[int]) -> np.ndarray:
    st = DenseState(rho)
    st.qec(code, block)
    return st.matrix()


# registers of a physical circuit ---------------------------------------------------

def logical_registers(circuit: PhysicalCircuit, codes=None):
    """``[(kind, qubits, code)]`` ordered by first physical qubit."""
    codes = _codes_for(circuit, codes)
    in_block = {q for b in circuit.blocks for q in b.qubits}
    regs = [("clean", tuple(b.qubits), codes[b.code]) for b in circuit.blocks]
    regs += [("noisy", (q,), None) for q in range(circuit.n_qubits) if q not in in_block]
    regs.sort(key=lambda r: min(r[1]))
    return regs


def zero_projector_probability(state: DenseState, circuit: PhysicalCircuit, codes=None) -> float:
    """Probability of the all-zero logical readout after an ideal QEC on each block."""
    regs = logical_registers(circuit, codes)
    for kind, qs, code in regs:
        if kind == "clean":
            state.qec(code, qs)
    n = state.n
    diag = np.real(np.diagonal(state.matrix())).reshape((2,) * n)
    mask = np.ones((2,) * n, dtype=bool)
    bits = np.indices((2,) * n)
    for kind, qs, code in regs:
        if kind == "noisy":
            mask &= bits[qs[0]] == 0
        else:
            sup = [qs[i] for i in code.logical_z.support]
            mask &= bits[sup].sum(axis=0) % 2 == 0
    return float(diag[mask].sum())


def dense_survival(circuit: PhysicalCircuit, noise: NoiseModel | None = None, codes=None) -> float:
    """Exact all-zero survival probability starting from the encoded all-zero state."""
    regs = logical_registers(circuit, codes)
    psi = _encoded_vector(regs, [0] * len(regs), circuit.n_qubits)
    st = DenseState.from_vector(psi).run(circuit, noise, codes)
    return zero_projector_probability(st, circuit, codes)


def _encoded_vector(regs, bits, n) -> np.ndarray:
    order = sorted(q for _, qs, _ in regs for q in qs)
    if order != list(range(n)):
        raise ValueError("registers do not tile the physical qubits")
    vec = np.array([1.0 + 0j])
    for (kind, qs, code), b in zip(regs, bits):
        if list(qs) != list(range(min(qs), min(qs) + len(qs))):
            raise ValueError("register qubits must be contiguous")
        if kind == "noisy":
            v = np.eye(2, dtype=complex)[b]
        else:
            v = code_state_vectors(code)[b]
        vec = np.kron(vec, v)
    return vec


# logical process tomography ---------------------------------------------------------

DENSE_QUBIT_CAP = 12


def logical_process_tomography(circuit: PhysicalCircuit, noise: NoiseModel | None = None,
                               codes=None, backend: str = "auto", leak_tol: float = 1e-9) -> np.ndarray:
    """Logical PTM of a physical circuit acting on at most two logical registers.

    ``dense`` evolves every code-space basis operator ``|n><m|`` exactly.
    ``pauli`` handles Clifford circuits with Pauli noise of any size: it maps
    each fault location to its effect on the final syndromes and logical
    operators and convolves the independent locations exactly.
    """
    regs = logical_registers(circuit, codes)
    if len(regs) > 2:
        raise ValueError("tomography supports at most two logical registers")
    if backend == "auto":
        backend = "dense" if circuit.n_qubits <= DENSE_QUBIT_CAP else "pauli"
    if backend == "dense":
        if circuit.n_qubits > DENSE_QUBIT_CAP:
            raise MemoryError(f"dense backend capped at {DENSE_QUBIT_CAP} physical qubits")
        return _dense_tomography(circuit, noise, codes, regs, leak_tol)
    if backend == "pauli":
        from .pauli_tomography import pauli_tomography
        return pauli_tomography(circuit, noise, codes, regs, leak_tol)
    raise ValueError(f"unknown backend {backend!r}")


def _dense_tomography(circuit, noise, codes, regs, leak_tol) -> np.ndarray:
    k = len(regs)
    dk = 2**k
    n = circuit.n_qubits
    kets = [_encoded_vector(regs, bits, n) for bits in itertools.product((0, 1), repeat=k)]
    K = np.array(kets).T  # (2^n, dk)
    lam = np.zeros((dk, dk, dk, dk), dtype=complex)  # lam[a, b, i, j] = <a|L(|i><j|)|b>
    leak = 0.0
    for i, j in itertools.product(range(dk), repeat=2):
        st = DenseState(np.outer(kets[i], kets[j].conj())).run(circuit, noise, codes)
        out = st.matrix()
        proj = K.conj().T @ out @ K
        lam[:, :, i, j] = proj
        if i == j:
            leak = max(leak, float(np.real(np.trace(out) - np.trace(proj))))
    if leak > leak_tol:
        raise LeakageError(leak)
    basis = pauli_basis(k)
    R = np.empty((dk * dk, dk * dk))
    for b, Pb in enumerate(basis):
        out = np.einsum("abij,ij->ab", lam, Pb)
        for a, Pa in enumerate(basis):
            R[a, b] = np.real(np.trace(Pa @ out)) / dk
    return R


def ideal_logical_ptm(kind: str) -> np.ndarray:
    """PTM of the ideal one- or two-qubit logical gate named ``kind``."""
    kind = kind.upper()
    if kind == "CNOT":
        return ptm_of_unitary(_CNOT)
    if kind == "CNOT10":
        swap = np.eye(4)[[0, 2, 1, 3]]
        return ptm_of_unitary(swap @ _CNOT @ swap)
    return ptm_of_unitary(gate_matrix(kind))


__all__ = [
    "LeakageError", "pauli_basis", "ptm_of_map", "ptm_of_unitary", "depolarizing_ptm",
    "pauli_channel_ptm", "apply_channel", "entanglement_fidelity", "average_gate_infidelity",
    "sampled_infidelity", "trace_distance_to_mixed", "tvd_to_uniform", "DenseState",
    "qec_channel", "dense_survival", "logical_process_tomography", "ideal_logical_ptm",
    "gate_matrix", "conjugate", "pauli_mul",
]
