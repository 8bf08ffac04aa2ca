"""Logical randomized benchmarking on two registers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .._parallel import pmap
from ..compiler import LogicalCircuit, LogicalGate, compile_circuit
from ..codes import get_code
from ..frames import FrameProgram, simulate, simulate_tableau
from ..noise import NoiseModel, rb_noise
from .clifford2q import Word, clifford_key, inverse_word, sample_two_qubit_clifford
from .fitting import DecayFit, error_per_clifford, fit_decay

TYPE_PAIRS = {
    "noisy-noisy": ("noisy", "noisy"),
    "clean-noisy": ("clean", "noisy"),
    "clean-clean": ("clean", "clean"),
}


# lengths used for the reference runs: evenly spaced up to the per-type maximum
DEFAULT_M_GRIDS = {
    ("noisy", "noisy"): tuple(int(m) for m in np.linspace(1, 1500, 16).round()),
    ("clean", "noisy"): tuple(int(m) for m in np.linspace(1, 600, 13).round()),
    ("clean", "clean"): tuple(int(m) for m in np.linspace(1, 400, 9).round()),
}


def parse_types(types) -> tuple[str, str]:
    if isinstance(types, str):
        key = types.strip().lower().replace("_", "-").replace(",", "-")
        if key == "noisy-clean":
            key = "clean-noisy"
        if key not in TYPE_PAIRS:
            raise ValueError(f"unsupported qubit type pair {types!r}")
        return TYPE_PAIRS[key]
    types = tuple(types)
    if types not in TYPE_PAIRS.values():
        if types == ("noisy", "clean"):
            return types
        raise ValueError(f"unsupported qubit type pair {types!r}")
    return types


def types_label(types) -> str:
    return "-".join(parse_types(types))


@dataclass
class RBConfig:
    qubit_types: tuple[str, str] = ("noisy", "noisy")
    m_grid: Sequence[int] | None = None         # None: DEFAULT_M_GRIDS for the type pair
    sequences_per_m: int = 9
    shots: int = 1024
    noise: NoiseModel | tuple[float, float] = (2.425e-5, 2.425e-4)
    seed: int = 0
    code: str = "steane"
    backend: str = "frame"

    def __post_init__(self):
        self.qubit_types = parse_types(self.qubit_types)
        if self.m_grid is None:
            self.m_grid = DEFAULT_M_GRIDS[tuple(sorted(self.qubit_types))]
        self.m_grid = tuple(int(m) for m in self.m_grid)
        if not self.m_grid or min(self.m_grid) < 1:
            raise ValueError("sequence lengths must be >= 1")
        if self.shots < 1 or self.sequences_per_m < 1:
            raise ValueError("shots and sequences_per_m must be >= 1")
        if self.backend not in ("frame", "tableau"):
            raise ValueError(f"unknown RB backend {self.backend!r}")

    @property
    def noise_model(self) -> NoiseModel:
        if isinstance(self.noise, NoiseModel):
            return self.noise
        return rb_noise(*self.noise)


def _pack(words: Sequence[Word]) -> list[list[LogicalGate]]:
    """Greedy ASAP layering of a gate list on two registers."""
    layers: list[list[LogicalGate]] = []
    depth = [0, 0]
    for word in words:
        for g, tg in word:
            k = max(depth[t] for t in tg)
            if k == len(layers):
                layers.append([])
            layers[k].append(LogicalGate(g, tg))
            for t in tg:
                depth[t] = k + 1
    return layers


def rb_elements(m: int, rng: np.random.Generator) -> list[Word]:
    """``m`` uniform Clifford words followed by the word of their inverse."""
    if m < 1:
        raise ValueError("m must be >= 1")
    words = [sample_two_qubit_clifford(rng) for _ in range(m)]
    total = tuple(g for w in words for g in w)
    return words + [inverse_word(total)]


def rb_sequence(m: int, types, rng: np.random.Generator) -> LogicalCircuit:
    return LogicalCircuit(parse_types(types), _pack(rb_elements(m, rng)))


def compile_rb(circ: LogicalCircuit, code: str = "steane"):
    codes = get_code(code) if "clean" in circ.tags else None
    return compile_circuit(circ, codes, native="clifford", idle_accounting=False)


@dataclass
class _Job:
    cfg: RBConfig
    i_m: int
    j: int


def _run_job(job: _Job) -> dict:
    cfg = job.cfg
    m = cfg.m_grid[job.i_m]
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, job.i_m, job.j]))
    phys = compile_rb(rb_sequence(m, cfg.qubit_types, rng), cfg.code)
    noise = cfg.noise_model
    if cfg.backend == "tableau":
        res = simulate_tableau(phys, noise, cfg.shots, rng)
        p0 = FrameProgram(phys, noise).fault_free_probability
    else:
        res = simulate(FrameProgram(phys, noise), None, cfg.shots, rng)
        p0 = res.p_fault_free
    return {"types": types_label(cfg.qubit_types), "m": m, "seq_index": job.j, "shots": cfg.shots,
            "successes": res.successes, "p0": p0}


def run_rb(cfg: RBConfig, workers: int | None = None) -> list[dict]:
    """One row per (length, sequence): ``types, m, seq_index, shots, successes, p0``.

    ``p0`` is the exact probability that the sequence sees no fault at all.
    """
    jobs = [_Job(cfg, i, j) for i in range(len(cfg.m_grid)) for j in range(cfg.sequences_per_m)]
    return pmap(_run_job, jobs, workers)


@dataclass
class RBResult:
    types: tuple[str, str]
    fit: DecayFit
    r: float
    r_se: float
    rows: list[dict] = field(repr=False, default_factory=list)


def fit_rb(rows: Sequence[dict], weighted: bool = False) -> RBResult:
    """Fit the decay with a free asymptote.  If that leaves the amplitude
    unresolved (hardly any failures, so A and eps trade off freely), refit
    with B pinned at 1/4, the fully mixed two-qubit survival without SPAM."""
    m = np.array([r["m"] for r in rows], dtype=float)
    p = np.array([r["successes"] / r["shots"] for r in rows])
    fit = fit_decay(m, p, weighted=weighted)
    A_se = fit.uncertainties[0]
    if fit.degenerate or not np.isfinite(A_se) or abs(fit.A) < 2 * A_se or fit.B > 1:
        fit = fit_decay(m, p, weighted=weighted, B=0.25)
    eps = min(max(fit.eps, 0.0), 1.0)
    return RBResult(parse_types(rows[0]["types"]), fit, error_per_clifford(eps, 2),
                    3 / 4 * fit.eps_se, list(rows))


def check_inverse(words: Sequence[Word]) -> bool:
    """True when the words multiply to the identity (mod phase)."""
    return clifford_key(tuple(g for w in words for g in w)) == clifford_key(())


__all__ = ["RBConfig", "RBResult", "rb_sequence", "rb_elements", "run_rb", "fit_rb", "compile_rb",
           "parse_types", "types_label", "check_inverse", "DEFAULT_M_GRIDS"]
