"""Fit of survival data to ``P(m) = A * eps**m + B``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares


class FitError(RuntimeError):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message if residual is None else f"{message} (residual norm {residual:.3e})")
        self.residual = residual


@dataclass
class DecayFit:
    A: float
    B: float
    eps: float
    covariance: np.ndarray = field(repr=False)
    degenerate: bool = False
    residual: float = 0.0

    @property
    def uncertainties(self) -> np.ndarray:
        """Standard errors of ``(A, B, eps)``."""
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))

    @property
    def eps_se(self) -> float:
        return float(self.uncertainties[2])

    def predict(self, m) -> np.ndarray:
        return self.A * self.eps ** np.asarray(m, dtype=float) + self.B

    def as_dict(self) -> dict:
        se = self.uncertainties
        return {"A": self.A, "B": self.B, "eps": self.eps, "A_se": float(se[0]), "B_se": float(se[1]),
                "eps_se": float(se[2]), "degenerate": self.degenerate, "residual": self.residual}


def mean_by_m(m, p) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(m, dtype=float)
    p = np.asarray(p, dtype=float)
    ms = np.unique(m)
    return ms, np.array([p[m == v].mean() for v in ms])


def _initial_guess(m: np.ndarray, p: np.ndarray) -> np.ndarray:
    ms, pm = mean_by_m(m, p)
    B0 = float(pm.min())
    A0 = float(pm[0] - B0)
    y = pm - B0
    ok = y > 0
    eps0 = 0.99
    if ok.sum() >= 2 and A0 > 0:
        slope = np.polyfit(ms[ok], np.log(y[ok]), 1)[0]
        eps0 = float(np.clip(math.exp(slope), 1e-6, 1.0))
    if eps0 >= 1.0 or eps0 <= 1e-6:
        eps0 = 0.99
    # the minimum sits on the curve itself; start the asymptote a bit lower
    B0 = float(pm[-1] - A0 * eps0 ** ms[-1]) if ok.sum() >= 2 else B0
    return np.array([A0, B0, eps0])


def fit_decay(m, p, sigma=None, weighted: bool = False, max_nfev: int = 2000,
              B: float | None = None) -> DecayFit:
    """Least-squares fit of ``(A, B, eps)`` to per-sequence survival
    probabilities ``p`` at lengths ``m``.

    Levenberg-Marquardt with a finite-difference Jacobian; covariance is
    ``s**2 (J^T J)^-1`` at the optimum.  ``weighted`` divides residuals by
    ``sigma`` (default: the sample spread of the sequences at each ``m``).
    A given ``B`` is held fixed and only ``(A, eps)`` are fitted; its
    variance is reported as zero.
    """
    m = np.asarray(m, dtype=float)
    p = np.asarray(p, dtype=float)
    if m.shape != p.shape or m.ndim != 1:
        raise ValueError("m and p must be 1-d arrays of equal length")
    if np.unique(m).size < 3:
        raise ValueError("need at least three distinct sequence lengths")
    if weighted:
        if sigma is None:
            ms, _ = mean_by_m(m, p)
            spread = {v: p[m == v].std(ddof=1) if (m == v).sum() > 1 else 0.0 for v in ms}
            sigma = np.array([spread[v] for v in m])
        w = 1 / np.maximum(np.asarray(sigma, dtype=float), 1e-12)
    else:
        w = np.ones_like(p)

    ms, pm = mean_by_m(m, p)
    scale = max(float(np.abs(p).max()), 1e-12)
    if B is not None:
        return _fit_fixed_b(m, p, w, float(B), max_nfev)
    if np.ptp(pm) <= 1e-12 * scale:
        return DecayFit(0.0, float(p.mean()), 1.0, np.full((3, 3), np.inf), degenerate=True)

    def resid(theta):
        A, B, eps = theta
        return w * (A * np.abs(eps) ** m + B - p)

    x0 = _initial_guess(m, p)
    res = least_squares(resid, x0, method="lm", max_nfev=max_nfev, x_scale="jac")
    if not res.success or not 0 <= res.x[2] <= 1:
        res = least_squares(resid, np.clip(x0, [-np.inf, -np.inf, 0], [np.inf, np.inf, 1]),
                            method="trf", bounds=([-np.inf, -np.inf, 0], [np.inf, np.inf, 1]),
                            max_nfev=max_nfev, x_scale="jac")
    rnorm = float(np.linalg.norm(res.fun))
    if not res.success:
        raise FitError(f"decay fit did not converge: {res.message}", rnorm)
    A, B, eps = (float(v) for v in res.x)
    J = res.jac
    dof = max(p.size - 3, 1)
    s2 = float(res.fun @ res.fun) / dof
    try:
        cov = np.linalg.inv(J.T @ J) * s2
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(J.T @ J) * s2
    degenerate = abs(A) < 1e-9 or not np.all(np.isfinite(cov))
    return DecayFit(A, B, eps, cov, degenerate=degenerate, residual=rnorm)


def _fit_fixed_b(m, p, w, B: float, max_nfev: int) -> DecayFit:
    def resid(theta):
        A, eps = theta
        return w * (A * eps**m + B - p)

    ms, pm = mean_by_m(m, p)
    A0 = float(pm[0] - B)
    y = (pm - B) / A0 if A0 > 0 else np.ones_like(pm)
    eps0 = float(np.clip(np.exp(np.polyfit(ms, np.log(np.clip(y, 1e-12, None)), 1)[0]), 0, 1))
    res = least_squares(resid, [A0, eps0], method="trf", bounds=([-np.inf, 0], [np.inf, 1]),
                        max_nfev=max_nfev, x_scale="jac")
    rnorm = float(np.linalg.norm(res.fun))
    if not res.success:
        raise FitError(f"decay fit did not converge: {res.message}", rnorm)
    A, eps = (float(v) for v in res.x)
    dof = max(p.size - 2, 1)
    s2 = float(res.fun @ res.fun) / dof
    c2 = np.linalg.pinv(res.jac.T @ res.jac) * s2
    cov = np.zeros((3, 3))
    cov[np.ix_([0, 2], [0, 2])] = c2
    return DecayFit(A, B, eps, cov, degenerate=abs(A) < 1e-9, residual=rnorm)


def error_per_clifford(eps: float, n_logical: int) -> float:
    """Average error per Clifford ``(2**n - 1) / 2**n * (1 - eps)``."""
    if not 0 <= eps <= 1:
        raise ValueError("decay parameter must lie in [0, 1]")
    d = 2**n_logical
    return (d - 1) / d * (1 - eps)
