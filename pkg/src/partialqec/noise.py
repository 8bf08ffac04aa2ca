"""Pauli noise channels, error-rate algebra and the noise models used here.

Every channel in this package is a Pauli channel: a probability vector over
the ``4**k`` Pauli strings on the ``k`` qubits a gate touches.  Index ``a``
of a two-qubit vector is ``4 * letter(first) + letter(second)`` with letters
ordered ``I, X, Y, Z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .pauli import LETTERS

# Average gate infidelities of the reference device's native gates.
DEVICE_INFIDELITY = {"CNOT": 1.9e-2, "SX": 8.8e-4, "I": 2.8e-3}

# x/z bits of letters I, X, Y, Z
LETTER_X = np.array([0, 1, 1, 0], dtype=np.uint8)
LETTER_Z = np.array([0, 0, 1, 1], dtype=np.uint8)


@dataclass(frozen=True)
class PauliChannel:
    p_x: float = 0.0
    p_y: float = 0.0
    p_z: float = 0.0

    def __post_init__(self):
        ps = (self.p_x, self.p_y, self.p_z)
        if min(ps) < 0 or sum(ps) > 1 + 1e-12:
            raise ValueError(f"invalid Pauli channel probabilities {ps}")

    @classmethod
    def depolarizing(cls, eps: float) -> "PauliChannel":
        """``rho -> (1 - eps) rho + eps I/2``."""
        return cls(eps / 4, eps / 4, eps / 4)

    @property
    def probs(self) -> np.ndarray:
        """Probabilities of ``I, X, Y, Z``."""
        return np.array([1 - self.p_x - self.p_y - self.p_z, self.p_x, self.p_y, self.p_z])

    def damping(self) -> dict[str, float]:
        """``eps_Q``: each non-identity Pauli ``Q`` is mapped to ``(1 - eps_Q) Q``."""
        px, py, pz = self.p_x, self.p_y, self.p_z
        return {"X": 2 * (py + pz), "Y": 2 * (px + pz), "Z": 2 * (px + py)}

    def error_rate(self) -> float:
        return 1 - min(abs(1 - e) for e in self.damping().values())

    def ptm(self) -> np.ndarray:
        d = self.damping()
        return np.diag([1.0, 1 - d["X"], 1 - d["Y"], 1 - d["Z"]])

    def sample(self, rng: np.random.Generator, size: int | None = None):
        idx = rng.choice(4, size=size, p=self.probs)
        if size is None:
            return LETTERS[int(idx)]
        return idx


def error_rate(ch: PauliChannel) -> float:
    return ch.error_rate()


def sample_fault(ch: PauliChannel, rng: np.random.Generator) -> str:
    return ch.sample(rng)


def compose_depolarizing(eps1: float, eps2: float) -> float:
    return 1 - (1 - eps1) * (1 - eps2)


def steane_effective_rate(eps_d: float) -> float:
    return 7 / 4 * eps_d**3 - 3 / 4 * eps_d**5


def heuristic_boundary_rate(eps_d: float, w: int) -> float:
    """Boundary-qubit rate: ``w`` independent chances of an ``eps_d`` error."""
    return 1 - (1 - eps_d) ** w


# gate noise -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GateNoise:
    """Pauli channel acting on the qubits of one gate after the ideal gate."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size not in (4, 16):
            raise ValueError("gate noise needs 4 or 16 Pauli probabilities")
        if p.min() < -1e-15 or abs(p.sum() - 1) > 1e-12:
            raise ValueError("Pauli probabilities must be a distribution")
        object.__setattr__(self, "probs", np.clip(p, 0, None))

    @property
    def arity(self) -> int:
        return 1 if self.probs.size == 4 else 2

    @property
    def fault_probability(self) -> float:
        return float(self.probs[1:].sum())  # not 1 - probs[0]: keeps precision for tiny rates

    @classmethod
    def single(cls, ch: PauliChannel) -> "GateNoise":
        return cls(ch.probs)

    @classmethod
    def product(cls, a: PauliChannel, b: PauliChannel) -> "GateNoise":
        return cls(np.outer(a.probs, b.probs).ravel())

    @classmethod
    def depolarizing(cls, eps: float, arity: int) -> "GateNoise":
        """``rho -> (1 - eps) rho + eps I/d`` on ``arity`` qubits."""
        d2 = 4**arity
        p = np.full(d2, eps / d2)
        p[0] += 1 - eps
        return cls(p)

    def average_infidelity(self) -> float:
        d = 2**self.arity
        return d / (d + 1) * (1 - float(self.probs[0]))

    def letters(self, index: int) -> str:
        if self.arity == 1:
            return LETTERS[index]
        return LETTERS[index // 4] + LETTERS[index % 4]


def depolarizing_from_infidelity(r: float) -> float:
    """Single-qubit depolarizing parameter with average infidelity ``r``."""
    return 2 * r


def wirewise_depolarizing_from_infidelity(r: float) -> float:
    """Rate of i.i.d. single-qubit depolarizing on both wires of a two-qubit
    gate giving two-qubit average infidelity ``r``."""
    if not 0 <= r <= 0.8:
        raise ValueError("two-qubit infidelity out of range")
    return 4 / 3 * (1 - math.sqrt(1 - 5 * r / 4))


@dataclass
class NoiseModel:
    """Native gate name -> Pauli channel applied right after the gate."""

    gates: dict[str, GateNoise] = field(default_factory=dict)
    name: str = "custom"

    def for_gate(self, name: str) -> GateNoise | None:
        g = self.gates.get(name.upper())
        if g is None or g.fault_probability == 0:
            return None
        return g

    @property
    def is_noiseless(self) -> bool:
        return all(g.fault_probability == 0 for g in self.gates.values())


def noiseless() -> NoiseModel:
    return NoiseModel({}, name="noiseless")


def rb_noise(eps1: float, eps2: float) -> NoiseModel:
    """Depolarizing ``eps1`` after every single-qubit gate, two-qubit
    depolarizing ``eps2`` after every CNOT; no idling noise."""
    one = GateNoise.depolarizing(eps1, 1)
    gates = {k: one for k in ("H", "S", "SDG", "SX", "X", "Y", "Z")}
    gates["CNOT"] = GateNoise.depolarizing(eps2, 2)
    return NoiseModel(gates, name=f"rb(eps1={eps1:g}, eps2={eps2:g})")


@dataclass
class DeviceModel(NoiseModel):
    q: float = 0.01
    q_I: float = 0.0

    @property
    def infidelities(self) -> dict[str, float]:
        return {"CNOT": self.q * DEVICE_INFIDELITY["CNOT"], "SX": self.q * DEVICE_INFIDELITY["SX"],
                "I": self.q_I * DEVICE_INFIDELITY["I"]}

    @property
    def idle_to_cnot_ratio(self) -> float:
        """Infidelity ratio of the idle gate to the noisy CNOT."""
        inf = self.infidelities
        return inf["I"] / inf["CNOT"] if inf["CNOT"] else math.inf


def device_model(q: float, q_I: float) -> DeviceModel:
    """Native gates {R_Z, SX, CNOT, I}: ideal gate followed by depolarizing noise
    whose average infidelity is ``q`` (``q_I`` for I) times the reference
    device value.  R_Z is exact."""
    if not (0 <= q <= 1 and 0 <= q_I <= 1):
        raise ValueError("mixture weights must lie in [0, 1]")
    sx = PauliChannel.depolarizing(depolarizing_from_infidelity(q * DEVICE_INFIDELITY["SX"]))
    idle = PauliChannel.depolarizing(depolarizing_from_infidelity(q_I * DEVICE_INFIDELITY["I"]))
    wire = PauliChannel.depolarizing(wirewise_depolarizing_from_infidelity(q * DEVICE_INFIDELITY["CNOT"]))
    gates = {"SX": GateNoise.single(sx), "I": GateNoise.single(idle), "CNOT": GateNoise.product(wire, wire),
             "RZ": GateNoise.single(PauliChannel())}
    return DeviceModel(gates, name=f"device(q={q:g}, q_I={q_I:g})", q=q, q_I=q_I)


# layouts for the analytic brick model -----------------------------------------

def ring_pairs(n: int, layer: int) -> list[tuple[int, int]]:
    """Bricks of ``layer`` (0-based) on a periodic ring of even ``n``."""
    if n % 2:
        raise ValueError("ring brick layout needs even n")
    off = layer % 2
    return [((2 * k + off) % n, (2 * k + off + 1) % n) for k in range(n // 2)]


@dataclass
class NoiseLayout:
    """Per-register, per-layer depolarizing rates of the brick model."""

    tags: tuple[str, ...]
    rates: np.ndarray  # shape (n, L)
    roles: np.ndarray  # same shape, entries 'clean' | 'bulk' | 'boundary'

    @property
    def n(self) -> int:
        return len(self.tags)

    @property
    def L(self) -> int:
        return self.rates.shape[1]

    @classmethod
    def from_tags(cls, tags: Sequence[str], L: int, eps_c: float, eps_d: float,
                  eps_b: float) -> "NoiseLayout":
        tags = tuple(tags)
        n = len(tags)
        for e in (eps_c, eps_d, eps_b):
            if not 0 <= e <= 1:
                raise ValueError("rates must lie in [0, 1]")
        rates = np.zeros((n, L))
        roles = np.empty((n, L), dtype=object)
        for ell in range(L):
            boundary = set()
            for a, b in ring_pairs(n, ell):
                if tags[a] != tags[b]:
                    boundary.add(a if tags[a] == "noisy" else b)
            for i in range(n):
                if tags[i] == "clean":
                    rates[i, ell], roles[i, ell] = eps_c, "clean"
                elif i in boundary:
                    rates[i, ell], roles[i, ell] = eps_b, "boundary"
                else:
                    rates[i, ell], roles[i, ell] = eps_d, "bulk"
        return cls(tags, rates, roles)

    @classmethod
    def clean_prefix(cls, n: int, n_c: int, L: int, eps_c: float, eps_d: float,
                     eps_b: float) -> "NoiseLayout":
        return cls.from_tags(["clean"] * n_c + ["noisy"] * (n - n_c), L, eps_c, eps_d, eps_b)

    @property
    def n_c(self) -> int:
        return sum(t == "clean" for t in self.tags)

    @property
    def n_b(self) -> int:
        """Clean-noisy couplings on the ring (each appears once per two layers)."""
        n = self.n
        return sum(self.tags[i] != self.tags[(i + 1) % n] for i in range(n))


# structured-text config --------------------------------------------------------

def read_config(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def noise_from_config(cfg: Mapping[str, str]):
    """DeviceModel when ``q`` is given, else a dict of brick-model rates."""
    if "q" in cfg:
        return device_model(float(cfg["q"]), float(cfg.get("q_I", cfg.get("qI", 0.0))))
    keys = ("eps_c", "eps_d", "eps_b", "w")
    rates = {k: float(cfg[k]) for k in keys if k in cfg}
    if "eps_d" in rates and "eps_b" not in rates and "w" in rates:
        rates["eps_b"] = heuristic_boundary_rate(rates["eps_d"], int(rates["w"]))
    return rates
