"""Weighted functional PCA of curves sampled on a uniform periodic grid.

Integrals over [0, 2*pi) use the rectangle rule with weight ``w = 2*pi/m``,
so the covariance operator is discretized as ``w * K`` and eigenfunctions are
normalized to ``w * sum(phi**2) = 1``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .starhull import AngularGrid

SIGN_TOL = 1e-12
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class FunctionalSample:
    """``curves`` is ``(n, m)``; ``weights`` sum to one (uniform when omitted)."""

    grid: AngularGrid
    curves: np.ndarray
    weights: Optional[np.ndarray] = None
    contour_ids: Optional[tuple] = None
    censored: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.curves, dtype=float))
        if x.shape[1] != self.grid.m:
            raise ValueError(f"curves have {x.shape[1]} columns, grid has {self.grid.m}")
        if not np.all(np.isfinite(x)):
            raise ValueError("curve values must be finite")
        n = x.shape[0]
        p = np.full(n, 1.0 / n) if self.weights is None else np.asarray(self.weights, dtype=float)
        if p.shape != (n,) or np.any(p < 0):
            raise ValueError("weights must be a non-negative vector, one per curve")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {p.sum()}, expected 1")
        ids = tuple(str(k) for k in range(n)) if self.contour_ids is None else tuple(self.contour_ids)
        cens = np.zeros(n, dtype=bool) if self.censored is None else np.asarray(self.censored, dtype=bool)
        object.__setattr__(self, "curves", x)
        object.__setattr__(self, "weights", p)
        object.__setattr__(self, "contour_ids", ids)
        object.__setattr__(self, "censored", cens)

    @property
    def n(self) -> int:
        return self.curves.shape[0]

    def without(self, index: int) -> "FunctionalSample":
        """The sample with one curve removed and the remaining weights renormalized."""
        keep = np.arange(self.n) != index
        p = self.weights[keep]
        total = p.sum()
        if total <= 0:
            raise ValueError("no weight left after removing the curve")
        return FunctionalSample(self.grid, self.curves[keep], p / total,
                                tuple(np.array(self.contour_ids)[keep]), self.censored[keep])


@dataclass(frozen=True)
class EigenSystem:
    grid: AngularGrid
    mean: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # (J, m), one eigenfunction per row

    @property
    def weight(self) -> float:
        return self.grid.step

    @property
    def n_components(self) -> int:
        return len(self.eigenvalues)


def mean_function(sample: FunctionalSample) -> np.ndarray:
    return sample.weights @ sample.curves


def covariance_function(sample: FunctionalSample, mean: Optional[np.ndarray] = None) -> np.ndarray:
    """Weighted covariance sum_i p_i (X_i - mu)(X_i - mu)^T on the grid, ``(m, m)``."""
    if mean is None:
        mean = mean_function(sample)
    d = sample.curves - mean
    k = (d * sample.weights[:, None]).T @ d
    return 0.5 * (k + k.T)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip each row so that its first entry with |value| > SIGN_TOL is positive."""
    out = vecs.copy()
    for r in range(out.shape[0]):
        nz = np.nonzero(np.abs(out[r]) > SIGN_TOL)[0]
        if nz.size and out[r, nz[0]] < 0:
            out[r] = -out[r]
    return out


def eigen_decompose(cov: np.ndarray, grid: AngularGrid, mean: Optional[np.ndarray] = None) -> EigenSystem:
    """Eigenpairs of the integral operator with kernel ``cov`` (dense symmetric solve)."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (grid.m, grid.m):
        raise ValueError(f"covariance must be {grid.m}x{grid.m}")
    scale = max(float(np.abs(cov).max()), 1.0)
    if np.abs(cov - cov.T).max() > SYMMETRY_TOL * scale:
        raise ValueError("covariance matrix is not symmetric")
    w = grid.step
    lam, vec = np.linalg.eigh(w * 0.5 * (cov + cov.T))
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    lam = np.where(lam < 0, 0.0, lam)
    phi = _fix_signs(vec[:, order].T / np.sqrt(w))
    if mean is None:
        mean = np.zeros(grid.m)
    return EigenSystem(grid, np.asarray(mean, dtype=float), lam, phi)


def fit_eigensystem(sample: FunctionalSample, method: str = "svd") -> EigenSystem:
    """Mean and eigensystem of a sample.

    ``method="svd"`` factorizes the weighted centred data matrix (cost
    O(n^2 m)) and yields ``min(n, m)`` components; ``"dense"`` builds the
    covariance and calls `eigen_decompose`.
    """
    mu = mean_function(sample)
    if method == "dense":
        return eigen_decompose(covariance_function(sample, mu), sample.grid, mu)
    if method != "svd":
        raise ValueError(f"unknown method {method!r}")
    w = sample.grid.step
    a = np.sqrt(w * sample.weights)[:, None] * (sample.curves - mu)
    _, s, vt = np.linalg.svd(a, full_matrices=False)
    lam = s ** 2
    phi = _fix_signs(vt / np.sqrt(w))
    return EigenSystem(sample.grid, mu, lam, phi)


def _check_j(es: EigenSystem, J: int):
    if J < 0 or J > es.n_components:
        raise ValueError(f"J={J} outside 0..{es.n_components}")


def principal_scores(curve, es: EigenSystem, J: int) -> np.ndarray:
    """Quadrature inner products of the centred curve(s) with the first J eigenfunctions."""
    _check_j(es, J)
    c = np.asarray(curve, dtype=float) - es.mean
    return es.weight * c @ es.eigenfunctions[:J].T


def reconstruct(curve, es: EigenSystem, J: int) -> np.ndarray:
    scores = principal_scores(curve, es, J)
    return es.mean + scores @ es.eigenfunctions[:J]


def mode_of_variation(es: EigenSystem, k: int, alpha: float) -> np.ndarray:
    """mu + alpha * sqrt(lambda_k) * phi_k, with k counted from 1."""
    if not 1 <= k <= es.n_components:
        raise ValueError(f"component {k} outside 1..{es.n_components}")
    return es.mean + alpha * np.sqrt(es.eigenvalues[k - 1]) * es.eigenfunctions[k - 1]


def variance_explained(eigenvalues, J: int) -> float:
    """Percentage of the total variance carried by the first J eigenvalues (NaN for a null spectrum)."""
    lam = np.asarray(eigenvalues, dtype=float)
    total = lam.sum()
    if total <= 0:
        return float("nan")
    return 100.0 * float(lam[:J].sum()) / float(total)


def _effective_rank(lam: np.ndarray) -> int:
    if lam.size == 0 or lam[0] <= 0:
        return 0
    return int(np.sum(lam > 1e-10 * lam[0]))


def _split_prediction_errors(y: np.ndarray, phi: np.ndarray, j_max: int, w: float) -> np.ndarray:
    """Out-of-sample squared error of fitting centred curve ``y`` with 1..j_max eigenfunctions.

    Scores are fitted by least squares on the even grid points and the error is
    measured on the odd ones, then the halves swap.
    """
    m = y.size
    halves = (np.arange(0, m, 2), np.arange(1, m, 2))
    err = np.zeros(j_max)
    for fit_idx, test_idx in (halves, halves[::-1]):
        for J in range(1, j_max + 1):
            basis = phi[:J]
            coef, *_ = np.linalg.lstsq(basis[:, fit_idx].T, y[fit_idx], rcond=None)
            resid = y[test_idx] - coef @ basis[:, test_idx]
            err[J - 1] += w * float(resid @ resid)
    return err


def cv_scores(sample: FunctionalSample, j_max: int = 20, fast: bool = False) -> np.ndarray:
    """Leave-one-curve-out prediction error for J = 1..j_max, summed over complete curves.

    Each held-out curve is predicted from an eigensystem fitted without it
    (unless ``fast``, which reuses the full-sample eigensystem).  Censored
    curves only ever serve as training data.
    """
    if sample.n < 3:
        raise ValueError("component selection needs at least 3 curves")
    w = sample.grid.step
    total = np.zeros(j_max)
    full = fit_eigensystem(sample) if fast else None
    for i in range(sample.n):
        if sample.censored[i]:
            continue
        try:
            es = full if fast else fit_eigensystem(sample.without(i))
        except ValueError:
            continue
        rank = _effective_rank(es.eigenvalues)
        y = sample.curves[i] - es.mean
        if rank == 0:
            total += w * float(y @ y)
            continue
        err = _split_prediction_errors(y, es.eigenfunctions, min(j_max, rank), w)
        if rank < j_max:
            err = np.concatenate([err, np.full(j_max - rank, err[-1])])
        total += err
    return total


def select_num_components(sample: FunctionalSample, j_max: int = 20, fast: bool = False) -> int:
    """Number of components minimizing `cv_scores`; ties go to the smaller J."""
    scores = cv_scores(sample, j_max=j_max, fast=fast)
    best = scores.min()
    tol = 1e-12 * max(abs(best), np.finfo(float).tiny)
    return int(np.nonzero(scores <= best + tol)[0][0]) + 1


# --- export ---------------------------------------------------------------------

def dumps_eigensystem(es: EigenSystem, J: Optional[int] = None) -> str:
    J = es.n_components if J is None else min(J, es.n_components)
    out = io.StringIO()
    out.write(",".join(["theta", "mean"] + [f"phi_{j + 1}" for j in range(J)]) + "\n")
    for t in range(es.grid.m):
        row = [es.grid.thetas[t], es.mean[t]] + [es.eigenfunctions[j, t] for j in range(J)]
        out.write(",".join(repr(float(v)) for v in row) + "\n")
    return out.getvalue()


def dumps_eigenvalues(eigenvalues, J: Optional[int] = None) -> str:
    lam = np.asarray(eigenvalues, dtype=float)
    J = lam.size if J is None else min(J, lam.size)
    out = io.StringIO()
    out.write("j,eigenvalue,cumulative_pct\n")
    for j in range(J):
        out.write(f"{j + 1},{float(lam[j])!r},{variance_explained(lam, j + 1):.6f}\n")
    return out.getvalue()
