"""Point estimate from the RA beam index and the TA in the RAR."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .fingerprint import BeamArea, FingerprintMap, GeoPoint
from .ta import TimingAdvance, ta_to_distance_range


class UnknownBeam(KeyError):
    pass


class EmptyIntersection(ValueError):
    pass


@dataclass(frozen=True)
class LocatedPoint(GeoPoint):
    area_id: int = -1
    clamped: bool = False


def _log_likelihood(area: BeamArea, ta: int, support: int) -> float:
    total = sum(area.ta_histogram.values())
    return math.log((area.ta_histogram.get(ta, 0) + 1) / (total + support))


def select_area(beam_idx: int, ta: TimingAdvance, fmap: FingerprintMap) -> BeamArea:
    """Most likely area for the observed TA (Laplace-smoothed histograms).

    Ties go to the area whose centroid range is closest to the TA annulus,
    then to the lower area id.
    """
    cands = fmap.areas_of(beam_idx)
    if not cands:
        raise UnknownBeam(beam_idx)
    if len(cands) == 1:
        return cands[0]
    support = len({t for a in cands for t in a.ta_histogram} | {ta.ta})
    lo, hi = ta_to_distance_range(ta)
    mid = (lo + hi) / 2
    return min(cands, key=lambda a: (-round(_log_likelihood(a, ta.ta, support), 12),
                                     abs(a.centroid.r - mid), a.area_id))


def localize_ssb_ra(beam_idx: int, ta: TimingAdvance, fmap: FingerprintMap, strict: bool = False) -> LocatedPoint:
    """Midpoint of the bisector segment inside the TA annulus.

    If the annulus misses the surveyed extent of the area the estimate is
    clamped to that extent and flagged, or EmptyIntersection is raised when
    ``strict``.
    """
    area = select_area(beam_idx, ta, fmap)
    if ta.ta == 0:
        return LocatedPoint(0.0, 0.0, area.area_id)
    lo, hi = ta_to_distance_range(ta)
    d = (lo + hi) / 2
    r_min, r_max = area.radial_extent()
    clamped = hi < r_min or lo > r_max
    if clamped:
        if strict:
            raise EmptyIntersection(f"TA {ta.ta} annulus [{lo:.1f}, {hi:.1f}] m misses area {area.area_id}")
        d = min(max(d, r_min), r_max)
    ux, uy = area.bisector
    return LocatedPoint(ux * d, uy * d, area.area_id, clamped)
