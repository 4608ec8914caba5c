"""Kaplan-Meier product-limit masses for right-censored region sizes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class SizeObservation:
    area_km2: float
    censored: bool
    contour_id: str = ""


@dataclass(frozen=True)
class KMWeights:
    contour_ids: tuple
    weights: np.ndarray
    residual: float = 0.0  # survival mass left past the largest observation before redistribution

    def __getitem__(self, contour_id):
        return float(self.weights[self.contour_ids.index(contour_id)])

    def as_dict(self) -> dict:
        return dict(zip(self.contour_ids, self.weights.tolist()))


def kaplan_meier_weights(observations: Sequence[SizeObservation]) -> KMWeights:
    """Mass the product-limit estimator puts on each observation, in input order.

    Censored observations get zero mass.  Tied complete observations share the
    drop at their common size; censorings tied with a death are placed after
    it.  When the largest observation is censored the estimator leaves residual
    mass, which is spread over the complete observations in proportion to their
    weights so the masses sum to one.
    """
    obs = list(observations)
    if not obs:
        raise EstimationError("no observations")
    area = np.array([o.area_km2 for o in obs], dtype=float)
    cens = np.array([bool(o.censored) for o in obs])
    if not np.all(np.isfinite(area)) or np.any(area <= 0):
        raise ValueError("areas must be finite and positive")
    if cens.all():
        raise EstimationError("all observations are censored")

    n = len(obs)
    ids = tuple(o.contour_id if o.contour_id != "" else str(k) for k, o in enumerate(obs))
    if not cens.any():
        # product-limit masses are exactly 1/n here; avoid accumulated rounding
        weights = np.full(n, 1.0 / n)
        weights.setflags(write=False)
        return KMWeights(ids, weights, 0.0)
    weights = np.zeros(n)
    surv = 1.0
    at_risk = n
    for t in np.unique(area):
        here = area == t
        deaths = here & ~cens
        d = int(deaths.sum())
        if d:
            drop = surv * d / at_risk
            weights[deaths] = drop / d
            surv -= drop
        at_risk -= int(here.sum())
    residual = max(surv, 0.0)
    if residual > 0:
        weights = weights / weights.sum()
    weights.setflags(write=False)
    return KMWeights(ids, weights, residual)
