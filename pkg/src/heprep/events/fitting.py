"""Unweighted straight-line track fit.

x and y are fit independently as linear functions of z via the closed
form normal equations; chi2 is the sum of squared residuals of both
projections. The tracker has no field, so straight lines are the honest
model and "refit after removing a hit" is just a re-run.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import DegenerateFitError
from .data import TrackFit, TrackHit


def _fit_line(zs, values):
    n = len(zs)
    z_mean = sum(zs) / n
    v_mean = sum(values) / n
    szz = sum((z - z_mean) ** 2 for z in zs)
    szv = sum((z - z_mean) * (v - v_mean) for z, v in zip(zs, values))
    slope = szv / szz
    intercept = v_mean - slope * z_mean
    chi2 = sum((v - (slope * z + intercept)) ** 2 for z, v in zip(zs, values))
    return slope, intercept, chi2


def fit_track(hits: Sequence[TrackHit]) -> TrackFit:
    """Least-squares lines x(z), y(z) through the hits.

    Requires at least 2 hits with at least 2 distinct z.
    """
    if len(hits) < 2:
        raise DegenerateFitError(f"need >= 2 hits, got {len(hits)}")
    zs = [h.z for h in hits]
    if len(set(zs)) < 2:
        raise DegenerateFitError("need >= 2 distinct plane z coordinates")
    slope_x, intercept_x, chi2_x = _fit_line(zs, [h.x for h in hits])
    slope_y, intercept_y, chi2_y = _fit_line(zs, [h.y for h in hits])
    return TrackFit(slope_x, intercept_x, slope_y, intercept_y, chi2_x + chi2_y)
