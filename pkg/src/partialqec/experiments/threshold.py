"""Clean-qubit threshold from mirror scans, and the linear idling model
``n_threshold = b + a (n - b)`` with ``a = c r / (c r + 1)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .mirror import mean_fidelity


def decay_rates(rows: Sequence[dict], n: int) -> dict[int, float]:
    """Per-layer decay rate ``-d log F / dL`` for every ``n_c`` at size ``n``.

    ``rows`` are per-circuit rows or already-averaged rows with ``mean_fidelity``.
    """
    if rows and "mean_fidelity" not in rows[0]:
        rows = mean_fidelity(rows)
    by_nc: dict[int, list[tuple[int, float]]] = {}
    for r in rows:
        if r["n"] == n:
            by_nc.setdefault(r["n_c"], []).append((r["L"], r["mean_fidelity"]))
    out = {}
    for n_c, pts in sorted(by_nc.items()):
        Ls, fs = np.array(sorted(pts)).T
        if Ls.size < 2:
            raise ValueError(f"need at least two layer counts for n_c={n_c}")
        out[n_c] = float(-np.polyfit(Ls, np.log(np.clip(fs, 1e-300, None)), 1)[0])
    return out


def find_threshold(rows: Sequence[dict], n: int) -> int:
    """Smallest ``n_c >= 1`` whose decay rate beats ``n_c = 0``; ``n`` if none does."""
    rates = decay_rates(rows, n)
    if 0 not in rates:
        raise ValueError("the scan must include n_c = 0")
    for n_c in sorted(k for k in rates if k >= 1):
        if rates[n_c] < rates[0]:
            return n_c
    return n


@dataclass
class ThresholdModel:
    b: float
    a: dict[float, float]
    c: float
    r_squared: float

    def predict(self, ratio: float, n) -> np.ndarray:
        a = a_model(ratio, self.c)
        return self.b + a * (np.asarray(n, dtype=float) - self.b)


def a_model(ratio, c: float):
    cr = c * np.asarray(ratio, dtype=float)
    return cr / (cr + 1)


def fit_threshold_model(thresholds: Mapping[float, Mapping[int, float]]) -> ThresholdModel:
    """``thresholds[ratio][n] = n_threshold``; ``ratio`` is eps_I / eps_CNOT.

    ``b`` is the mean over ``n`` of the zero-idling row; each ratio's ``a``
    comes from a through-origin regression of ``n_threshold - b`` on
    ``n - b``; ``c`` by least squares of ``a(ratio)``.  ``r_squared`` is the
    coefficient of determination of that last fit.
    """
    if 0 not in thresholds and 0.0 not in thresholds:
        raise ValueError("need a zero-idling row to fix b")
    for ratio, row in thresholds.items():
        if len(row) < 3:
            raise ValueError(f"need at least three n values for ratio {ratio}")
    zero = thresholds.get(0.0, thresholds.get(0))
    b = float(np.mean(list(zero.values())))
    a = {}
    for ratio, row in sorted(thresholds.items()):
        if ratio == 0:
            a[float(ratio)] = 0.0
            continue
        x = np.array([n - b for n in row], dtype=float)
        y = np.array([row[n] - b for n in row], dtype=float)
        a[float(ratio)] = float(x @ y / (x @ x))
    rs = np.array([r for r in a if r > 0])
    av = np.array([a[r] for r in rs])
    if rs.size == 0:
        return ThresholdModel(b, a, 0.0, float("nan"))
    # one parameter; fit log c for positivity
    res = least_squares(lambda lc: a_model(rs, math.exp(lc[0])) - av, [0.0])
    c = float(math.exp(res.x[0]))
    allr = np.array(list(a))
    alla = np.array([a[r] for r in allr])
    ss_res = float(np.sum((a_model(allr, c) - alla) ** 2))
    ss_tot = float(np.sum((alla - alla.mean()) ** 2))
    r2 = 1 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    return ThresholdModel(b, a, c, r2)


def heuristic_threshold(n: int, eps_d: float, eps_b: float, eps_I: float) -> float:
    """Solve ``n eps_d = eps_b + (n - n_thr)(eps_d + eps_I)`` for ``n_thr``."""
    return n - (n * eps_d - eps_b) / (eps_d + eps_I)
