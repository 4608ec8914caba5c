"""Pooled empirical-quantile transform to the standard normal scale and back.

The forward map sends a radial distance v to ``Phi^-1(F(v))`` where F is the
pooled empirical CDF using mid-ranks, ``F(v) = (rank(v) - 0.5) / n``, linearly
interpolated between distinct pooled values and clamped outside them.  The
re-transformation ``g(z) = F_n^-1(Phi(z))`` is the left-continuous generalized
inverse ``inf{x : F_n(x) >= u}`` of the ordinary step CDF, which undoes the
forward map exactly on every pooled value.
"""

from __future__ import annotations

import io
from typing import Iterable

import numpy as np
from scipy.special import ndtr, ndtri

MAP_FORMAT_VERSION = 1


class NormalizingMap:
    """Immutable pooled sample of untransformed radial distances."""

    def __init__(self, sorted_values):
        v = np.sort(np.asarray(sorted_values, dtype=float).ravel())
        if v.size == 0:
            raise ValueError("normalizing map needs a non-empty pool")
        if not np.all(np.isfinite(v)):
            raise ValueError("pooled values must be finite")
        v.setflags(write=False)
        self.sorted_values = v
        uniq, first, counts = np.unique(v, return_index=True, return_counts=True)
        n = v.size
        # mid-rank of a tie block occupying ranks first+1 .. first+count
        mid = first + 0.5 * (counts + 1)
        self._knots = uniq
        self._probs = (mid - 0.5) / n

    @property
    def n_pool(self) -> int:
        return self.sorted_values.size

    @classmethod
    def fit(cls, radials: Iterable, complete_only: bool = False) -> "NormalizingMap":
        """Pool the values of every radial function (or only uncensored ones)."""
        chunks = []
        for rf in radials:
            if complete_only and getattr(rf, "censored", False):
                continue
            chunks.append(np.asarray(getattr(rf, "values", rf), dtype=float).ravel())
        if not chunks:
            raise ValueError("normalizing map needs at least one radial function")
        return cls(np.concatenate(chunks))

    def cdf(self, value):
        """Mid-rank empirical CDF, interpolated between pooled values."""
        return np.interp(np.asarray(value, dtype=float), self._knots, self._probs)

    def apply(self, value):
        """Normal score of ``value``; finite everywhere, increasing over the pooled support."""
        z = ndtri(self.cdf(value))
        return float(z) if np.ndim(z) == 0 else z

    def invert(self, z):
        """Re-transformation g: the smallest pooled x with F_n(x) >= Phi(z)."""
        u = ndtr(np.asarray(z, dtype=float))
        n = self.n_pool
        k = np.clip(np.ceil(n * u).astype(np.int64), 1, n)
        out = self.sorted_values[k - 1]
        return float(out) if np.ndim(out) == 0 else out

    def transform(self, radials) -> np.ndarray:
        """Stack radial functions into an ``(n, m)`` matrix on the normal scale."""
        rows = [np.asarray(getattr(rf, "values", rf), dtype=float) for rf in radials]
        return self.apply(np.vstack(rows))

    # serialization
    def dumps(self) -> str:
        out = io.StringIO()
        out.write(f"# rainshape normalizing map v{MAP_FORMAT_VERSION}\n")
        out.write(f"# n_pool={self.n_pool}\n")
        out.write("value\n")
        for v in self.sorted_values:
            out.write(f"{float(v)!r}\n")
        return out.getvalue()

    @classmethod
    def loads(cls, text: str) -> "NormalizingMap":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# rainshape normalizing map v"):
            raise ValueError("not a normalizing map dump")
        version = int(lines[0].rsplit("v", 1)[1])
        if version != MAP_FORMAT_VERSION:
            raise ValueError(f"unsupported normalizing map version {version}")
        vals = [float(x) for x in lines if x and not x.startswith("#") and x != "value"]
        return cls(vals)


def skewness_profile(curves) -> np.ndarray:
    """Sample skewness (biased, third standardized moment) across curves at each angle.

    ``curves`` is ``(n, m)``.  Angles with zero variance, or fewer than 3 curves,
    give NaN.
    """
    x = np.asarray(curves, dtype=float)
    n, m = x.shape
    if n < 3:
        return np.full(m, np.nan)
    d = x - x.mean(axis=0)
    m2 = (d ** 2).mean(axis=0)
    m3 = (d ** 3).mean(axis=0)
    scale = np.abs(x).max(axis=0) + 1e-300
    degenerate = m2 <= (1e-14 * scale) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        sk = m3 / m2 ** 1.5
    return np.where(degenerate, np.nan, sk)
