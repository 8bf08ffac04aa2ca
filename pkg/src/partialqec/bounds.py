"""Concentration bounds for noisy brick circuits with clean and noisy registers.

Closed forms for the average total-variation lower bound, the all-noisy
trace-distance upper bound and the clean-qubit threshold, plus small-size
oracles: explicit enumeration of the weight-``L+1`` Pauli trajectories,
Haar moment checks for two-qubit bricks, and dense Monte Carlo estimates of
the average output distance to uniform.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .density import DenseState
from .noise import NoiseLayout, ring_pairs
from .pauli import PauliString


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class BoundParams:
    n: int
    L: int
    n_c: int
    n_b: int
    eps_c: float
    eps_d: float
    eps_b: float

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise BoundError(f"n must be even and >= 2, got {self.n}")
        if self.L < 0 or self.L % 2:
            raise BoundError(f"L must be even and >= 0, got {self.L}")
        if not 0 <= self.n_c <= self.n:
            raise BoundError("need 0 <= n_c <= n")
        if self.n_b < 0 or self.n_b % 2 or self.n_b > 2 * min(self.n_c, self.n_d):
            raise BoundError(f"n_b must be even and at most 2 min(n_c, n_d), got {self.n_b}")
        for e in (self.eps_c, self.eps_d, self.eps_b):
            if not 0 <= e <= 1:
                raise BoundError("error rates must lie in [0, 1]")

    @property
    def n_d(self) -> int:
        return self.n - self.n_c

    @property
    def fractions(self) -> tuple[float, float, float]:
        n = self.n
        return self.n_c / n, self.n_d / n - self.n_b / (2 * n), self.n_b / (2 * n)

    @classmethod
    def all_noisy(cls, n: int, L: int, eps_d: float) -> "BoundParams":
        return cls(n, L, 0, 0, eps_d, eps_d, eps_d)


def _pow1m(eps: float, k: float) -> float:
    """``(1 - eps)**k`` with ``0**0 = 1``."""
    if k == 0:
        return 1.0
    return (1.0 - eps) ** k


def lower_bound(p: BoundParams) -> float:
    """Average total-variation distance lower bound for the partial layout."""
    fc, fd, fb = p.fractions
    L = p.L
    return (1 / 12) * (2 / 5) ** L * _pow1m(p.eps_c, 2 * L * fc) * _pow1m(p.eps_d, 2 * L * fd) \
        * _pow1m(p.eps_b, 2 * L * fb)


def all_noisy_lower_bound(L: int, eps_d: float) -> float:
    return (1 / 12) * (2 / 5) ** L * _pow1m(eps_d, 2 * L)


def layout_lower_bound(layout: NoiseLayout) -> float:
    """General form: a factor ``(1 - eps_il)**(2/n)`` per noise instance."""
    n, L = layout.rates.shape
    return (1 / 12) * (2 / 5) ** L * float(np.prod((1 - layout.rates) ** (2 / n)))


def upper_bound(n: int, L: int, eps_d: float) -> float:
    """Trace-distance upper bound for any all-noisy circuit of ``L`` noise layers."""
    if n < 1:
        raise BoundError("n must be >= 1")
    return math.sqrt(math.log(4) * n) * _pow1m(eps_d, L)


def clean_threshold(n_b: int, eps_c: float, eps_d: float, eps_b: float) -> float:
    """Clean-register count above which the partial lower bound beats the all-noisy one."""
    if eps_c == eps_d:
        raise ZeroDivisionError("threshold undefined for eps_c == eps_d")
    if not (0 <= eps_c < eps_d <= eps_b < 1):
        raise BoundError("need 0 <= eps_c < eps_d <= eps_b < 1")
    num = math.log1p(-eps_d) - math.log1p(-eps_b)
    den = math.log1p(-eps_c) - math.log1p(-eps_d)
    return n_b / 2 * num / den


def params_layout(p: BoundParams) -> NoiseLayout:
    """Ring layout with a contiguous clean block; requires ``n_b`` in ``{0, 2}``."""
    if p.n_b not in (0, 2) or (p.n_b == 2) != (0 < p.n_c < p.n):
        raise BoundError("a contiguous clean block has n_b = 2 exactly when 0 < n_c < n")
    return NoiseLayout.clean_prefix(p.n, p.n_c, p.L, p.eps_c, p.eps_d, p.eps_b)


# trajectories ----------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Weight-one Pauli strings ``s_0..s_L`` given as ``(qubit, letter)`` sites."""

    sites: tuple[tuple[int, str], ...]
    chi: float
    n: int = 0

    @property
    def weight(self) -> int:
        return len(self.sites)

    @property
    def paulis(self) -> list[PauliString]:
        return [PauliString.from_letters({q: c}, self.n) for q, c in self.sites]


MAX_TRAJECTORY_L = 8


def _brick_partner(n: int, layer: int, q: int) -> tuple[int, int]:
    for a, b in ring_pairs(n, layer):
        if q in (a, b):
            return a, b
    raise AssertionError("every qubit sits in a brick")


def enumerate_trajectories(layout: NoiseLayout, out_qubit: int) -> Iterator[Trajectory]:
    """All weight-``L+1`` trajectories ending in ``Z`` on ``out_qubit``.

    Each brick layer maps a weight-one string on one of its qubits to any of
    the six weight-one strings on the same brick; the input string must be a
    ``Z`` (the only weight-one Pauli with nonzero overlap on ``|0>``).
    Depolarizing noise after layer ``l`` damps the string by
    ``1 - eps[q, l]``.
    """
    n, L = layout.rates.shape
    if L < 1:
        raise BoundError("trajectories need L >= 1")
    if L > MAX_TRAJECTORY_L:
        raise BoundError(f"enumeration capped at L = {MAX_TRAJECTORY_L}")

    def back(layer: int, site: tuple[int, str]):
        # site holds s_layer (after brick layer `layer`, 1-based); extend to s_{layer-1}
        a, b = _brick_partner(n, layer - 1, site[0])
        if layer == 1:
            for q in (a, b):
                yield [(q, "Z")]
            return
        for q, c in itertools.product((a, b), "XYZ"):
            for tail in back(layer - 1, (q, c)):
                yield tail + [(q, c)]

    last = (out_qubit, "Z")
    for head in back(L, last):
        sites = tuple(head + [last])
        chi = 1.0
        for ell in range(1, L + 1):
            chi *= 1 - layout.rates[sites[ell][0], ell - 1]
        yield Trajectory(sites, chi, n)


@dataclass
class TrajectoryResult:
    count: int              # trajectories per output qubit
    bound_term: float       # (1/n) sum_i sum_s chi**2 / (4 * 15**L)
    geometric_term: float   # the same after the AM-GM step


def trajectory_oracle(n: int, L: int, layout: NoiseLayout) -> TrajectoryResult:
    if layout.rates.shape != (n, L):
        raise BoundError("layout shape does not match (n, L)")
    counts, total, log_sum = set(), 0.0, 0.0
    n_terms = 0
    for i in range(n):
        c = 0
        for t in enumerate_trajectories(layout, i):
            c += 1
            total += t.chi**2
            log_sum += 2 * math.log(t.chi) if t.chi > 0 else -math.inf
        counts.add(c)
        n_terms += c
    if len(counts) != 1:
        raise AssertionError(f"trajectory counts differ across output qubits: {sorted(counts)}")
    (count,) = counts
    norm = 4 * 15**L
    geo = n_terms * math.exp(log_sum / n_terms) / n if n_terms else 0.0
    return TrajectoryResult(count, total / (n * norm), geo / norm)


# Haar moments -----------------------------------------------------------------

def haar_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-random ``d x d`` unitaries (QR of a complex Gaussian, phases fixed)."""
    shape = (d, d) if size is None else (size, d, d)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]


def _pauli2(label: str) -> np.ndarray:
    return PauliString.from_str(label).to_matrix() / 2  # unit Hilbert-Schmidt norm


@dataclass
class MomentEstimate:
    t: str
    q: str
    r: str
    s: str
    mean: float
    se: float
    expected: float

    @property
    def z(self) -> float:
        return (self.mean - self.expected) / self.se if self.se > 0 else 0.0


def design_moment_check(n_samples: int, rng: np.random.Generator,
                        quads: Sequence[tuple[str, str, str, str]] | None = None,
                        n_random: int = 5, batch: int = 20000) -> list[MomentEstimate]:
    """Estimate ``E Tr[t U q U^dag] Tr[r U s U^dag]`` over Haar ``U(4)``.

    Labels are two-letter Pauli names, normalized so that ``Tr[P P] = 1``.
    Default: ``n_random`` random pairs of non-identity Paulis (squared
    moments, expected 1/15) and as many cross terms (expected 0), plus the
    identity case (expected 1).
    """
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=2)]
    if quads is None:
        nonid = labels[1:]
        pick = lambda: nonid[int(rng.integers(len(nonid)))]  # noqa: E731
        quads = [("II", "II", "II", "II")]
        for _ in range(n_random):
            t, q = pick(), pick()
            quads.append((t, q, t, q))
        for _ in range(n_random):
            t, q, r, s = pick(), pick(), pick(), pick()
            while (t, q) == (r, s):
                r, s = pick(), pick()
            quads.append((t, q, r, s))
    mats = {lab: _pauli2(lab) for lab in labels}
    sums = np.zeros(len(quads))
    sq = np.zeros(len(quads))
    done = 0
    while done < n_samples:
        m = min(batch, n_samples - done)
        U = haar_unitary(4, rng, m)
        Ud = np.conj(np.swapaxes(U, 1, 2))
        for k, (t, q, r, s) in enumerate(quads):
            a = np.einsum("ij,mji->m", mats[t], U @ mats[q] @ Ud)
            b = a if (r, s) == (t, q) else np.einsum("ij,mji->m", mats[r], U @ mats[s] @ Ud)
            v = np.real(a * b)
            sums[k] += v.sum()
            sq[k] += (v**2).sum()
        done += m
    out = []
    for k, (t, q, r, s) in enumerate(quads):
        mean = sums[k] / n_samples
        var = max(sq[k] / n_samples - mean**2, 0.0)
        if (t, q) != (r, s):
            exp = 0.0
        elif t == q == "II":
            exp = 1.0
        elif "II" in (t, q):
            exp = 0.0
        else:
            exp = 1 / 15
        out.append(MomentEstimate(t, q, r, s, float(mean), math.sqrt(var / n_samples), exp))
    return out


# dense Monte Carlo ------------------------------------------------------------

MC_MAX_QUBITS = 8


@dataclass
class MCResult:
    mean: float
    se: float
    trace_mean: float
    samples: np.ndarray = field(repr=False)
    trace_dominates_ok: bool = True   # trace distance >= TVD on every sample
    marginal_ok: bool = True   # (p0_i - 1/2)**2 <= TVD for every qubit and sample

    def __iter__(self):
        yield self.mean
        yield self.se


def brick_output(n: int, layout: NoiseLayout, rng: np.random.Generator) -> np.ndarray:
    """Density matrix after one sampled Haar-brick circuit with layout noise."""
    L = layout.rates.shape[1]
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    st = DenseState.from_vector(psi)
    for ell in range(L):
        for a, b in ring_pairs(n, ell):
            st.apply_unitary(haar_unitary(4, rng), (a, b))
        for q in range(n):
            e = layout.rates[q, ell]
            if e:
                st.apply_pauli_1q(q, np.array([1 - 3 * e / 4, e / 4, e / 4, e / 4]))
    return st.matrix()


def _tvd_and_checks(rho: np.ndarray, n: int) -> tuple[float, float, bool, bool]:
    d = 2**n
    p = np.clip(np.real(np.diagonal(rho)), 0, None)
    tvd = 0.5 * float(np.abs(p - 1 / d).sum())
    evals = np.linalg.eigvalsh(rho - np.eye(d) / d)
    trace = 0.5 * float(np.abs(evals).sum())
    bits = p.reshape((2,) * n)
    marg_ok = True
    for i in range(n):
        p0 = float(np.take(bits, 0, axis=i).sum())
        marg_ok &= (p0 - 0.5) ** 2 <= tvd + 1e-12
    return tvd, trace, trace >= tvd - 1e-12, marg_ok


def mc_average_tvd(n: int, L: int, layout: NoiseLayout, n_circuits: int,
                   rng: np.random.Generator) -> MCResult:
    """Mean output TVD to uniform over Haar-brick circuits, with its standard error."""
    if n % 2 or L % 2:
        raise BoundError("n and L must be even")
    if n > MC_MAX_QUBITS:
        raise MemoryError(f"dense Monte Carlo capped at {MC_MAX_QUBITS} qubits")
    if layout.rates.shape != (n, L):
        raise BoundError("layout shape does not match (n, L)")
    tv, tr = np.zeros(n_circuits), np.zeros(n_circuits)
    ok1 = ok2 = True
    for k in range(n_circuits):
        tv[k], tr[k], a, b = _tvd_and_checks(brick_output(n, layout, rng), n)
        ok1 &= a
        ok2 &= b
    se = float(tv.std(ddof=1) / math.sqrt(n_circuits)) if n_circuits > 1 else 0.0
    return MCResult(float(tv.mean()), se, float(tr.mean()), tv, ok1, ok2)


# CSV rows ---------------------------------------------------------------------

BOUND_COLUMNS = ("n", "L", "n_c", "n_b", "eps_c", "eps_d", "eps_b", "lower", "upper", "threshold",
                 "mc_mean", "mc_se")


def bound_row(p: BoundParams, mc: MCResult | None = None) -> dict:
    try:
        thr = clean_threshold(p.n_b, p.eps_c, p.eps_d, p.eps_b) if p.n_b else 0.0
    except (ZeroDivisionError, BoundError):
        thr = float("nan")
    return {"n": p.n, "L": p.L, "n_c": p.n_c, "n_b": p.n_b, "eps_c": p.eps_c, "eps_d": p.eps_d,
            "eps_b": p.eps_b, "lower": lower_bound(p), "upper": upper_bound(p.n, p.L, p.eps_d),
            "threshold": thr, "mc_mean": mc.mean if mc else float("nan"),
            "mc_se": mc.se if mc else float("nan")}
