"""Mirrored random Clifford circuits ``V V^dagger`` on a line of registers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .._parallel import pmap
from ..codes import get_code
from ..compiler import LogicalCircuit, LogicalGate, compile_circuit
from ..frames import FrameProgram, simulate
from ..noise import DeviceModel, NoiseModel, device_model
from .effective import LogicalNoiseTable, effective_circuit

MIRROR_SINGLES = ("H", "X", "Y", "Z", "S", "SDG")
BACKENDS = ("logical", "physical", "dense")
# "trajectory" names fault sampling in general; the logical model is the fast one
BACKEND_ALIASES = {"trajectory": "logical"}


def mirror_layers(n: int, L: int, rng: np.random.Generator) -> list[list[LogicalGate]]:
    """The ``3L`` layers of ``V``: random single-qubit Cliffords on every
    register, then CNOTs on pairs ``(i, i+1)`` for even ``i``, then odd ``i``.
    The left register of each pair is the control."""
    layers = []
    for _ in range(L):
        kinds = rng.integers(len(MIRROR_SINGLES), size=n)
        layers.append([LogicalGate(MIRROR_SINGLES[k], (r,)) for r, k in enumerate(kinds)])
        for off in (0, 1):
            layers.append([LogicalGate("CNOT", (i, i + 1)) for i in range(off, n - 1, 2)])
    return [ly for ly in layers if ly]


def mirrored_circuit(n: int, n_c: int, L: int, rng: np.random.Generator) -> LogicalCircuit:
    """``V V^dagger`` with the first ``n_c`` registers clean."""
    if not 0 <= n_c <= n or n < 1 or L < 0:
        raise ValueError(f"need 0 <= n_c <= n, n >= 1, L >= 0 (got n={n}, n_c={n_c}, L={L})")
    tags = ("clean",) * n_c + ("noisy",) * (n - n_c)
    V = LogicalCircuit(tags, mirror_layers(n, L, rng))
    return LogicalCircuit(tags, V.layers + V.inverse().layers)


@dataclass
class MirrorConfig:
    n_values: Sequence[int] = (10,)
    n_c_values: Sequence[int] | None = None     # None: every 0..n
    L_values: Sequence[int] = (4, 8, 12, 16)
    circuits_per_point: int = 25
    q: float = 0.01
    q_I: float = 0.0
    seed: int = 0
    backend: str = "logical"
    shots: int = 20000
    code: str = "steane"
    noise: NoiseModel | None = field(default=None, repr=False)

    def __post_init__(self):
        self.n_values = tuple(int(v) for v in self.n_values)
        self.L_values = tuple(int(v) for v in self.L_values)
        if self.n_c_values is not None:
            self.n_c_values = tuple(int(v) for v in self.n_c_values)
        self.backend = BACKEND_ALIASES.get(self.backend, self.backend)
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        if self.circuits_per_point < 1 or self.shots < 1:
            raise ValueError("circuits_per_point and shots must be >= 1")

    @property
    def noise_model(self) -> NoiseModel:
        return self.noise if self.noise is not None else device_model(self.q, self.q_I)

    def n_c_for(self, n: int) -> tuple[int, ...]:
        vals = range(n + 1) if self.n_c_values is None else self.n_c_values
        return tuple(v for v in vals if v <= n)


def circuit_rng(seed: int, n: int, L: int, index: int) -> np.random.Generator:
    """Skeleton RNG; independent of n_c and noise so scans share circuits."""
    return np.random.default_rng(np.random.SeedSequence([seed, n, L, index]))


def circuit_fidelity(circ: LogicalCircuit, cfg: MirrorConfig, rng: np.random.Generator,
                     table: LogicalNoiseTable | None = None) -> tuple[float, float]:
    """Survival probability of one mirrored circuit and its standard error."""
    noise = cfg.noise_model
    if cfg.backend == "logical":
        table = table or LogicalNoiseTable(noise, get_code(cfg.code))
        phys, noise_for = effective_circuit(circ, table)
        res = simulate(FrameProgram(phys, noise_for), None, cfg.shots, rng, conditioned=True)
        return res.fidelity, res.se
    codes = get_code(cfg.code) if "clean" in circ.tags else None
    phys = compile_circuit(circ, codes, native="device", idle_accounting=True)
    if cfg.backend == "physical":
        res = simulate(FrameProgram(phys, noise), None, cfg.shots, rng, conditioned=True)
        return res.fidelity, res.se
    from ..density import DENSE_QUBIT_CAP, dense_survival
    if phys.n_qubits > DENSE_QUBIT_CAP:
        raise MemoryError(f"dense backend capped at {DENSE_QUBIT_CAP} physical qubits")
    return dense_survival(phys, noise), 0.0


_TABLES: dict = {}


def _table_for(cfg: MirrorConfig) -> LogicalNoiseTable:
    key = (cfg.q, cfg.q_I, cfg.code, id(cfg.noise))
    if key not in _TABLES:
        _TABLES[key] = LogicalNoiseTable(cfg.noise_model, get_code(cfg.code))
    return _TABLES[key]


def _point(args) -> list[dict]:
    cfg, n, L, i = args
    rows = []
    table = _table_for(cfg) if cfg.backend == "logical" else None
    for n_c in cfg.n_c_for(n):
        circ = mirrored_circuit(n, n_c, L, circuit_rng(cfg.seed, n, L, i))
        shot_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, n, L, i, n_c, 1]))
        f, se = circuit_fidelity(circ, cfg, shot_rng, table)
        rows.append({"n": n, "n_c": n_c, "L": L, "circuit_index": i, "fidelity": f, "se": se})
    return rows


def run_mirror(cfg: MirrorConfig, workers: int | None = None) -> list[dict]:
    """Per-circuit rows ``n, n_c, L, circuit_index, fidelity, se``."""
    jobs = [(cfg, n, L, i) for n in cfg.n_values for L in cfg.L_values for i in range(cfg.circuits_per_point)]
    return [row for rows in pmap(_point, jobs, workers) for row in rows]


def mean_fidelity(rows: Sequence[dict]) -> list[dict]:
    """Mean fidelity per ``(n, n_c, L)`` with the standard error over circuits."""
    groups: dict[tuple[int, int, int], list[float]] = {}
    for r in rows:
        groups.setdefault((r["n"], r["n_c"], r["L"]), []).append(r["fidelity"])
    out = []
    for (n, n_c, L), fs in sorted(groups.items()):
        fs = np.asarray(fs)
        se = float(fs.std(ddof=1) / math.sqrt(fs.size)) if fs.size > 1 else 0.0
        out.append({"n": n, "n_c": n_c, "L": L, "circuits": int(fs.size), "mean_fidelity": float(fs.mean()),
                    "se": se})
    return out
