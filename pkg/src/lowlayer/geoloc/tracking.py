"""BeamToPath: turn a CSI report stream into a path over beam-area centroids.

Three filters run in one pass.  Reports whose RSRP strays more than
``p_thres`` from the reference are skipped.  A beam is only appended once its
run of identical consecutive reports exceeds ``c_thres``, which drops
flicker at beam borders.  A beam is only appended when its area touches the
previous path area.

``count`` is reset only when a point is appended, exactly as in the original
pseudocode, so it keeps growing across runs that fail the adjacency check.
With ``strict_literal=False`` a stable run of at least ``3 * c_thres``
reports of a non-adjacent beam is appended anyway, which lets the tracker
recover after a coverage gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fingerprint import BeamArea, FingerprintMap, GeoPoint

BASE_WINDOW = 10
INTERP_SPACING_M = 1.0


class EmptyPath(ValueError):
    pass


@dataclass(frozen=True)
class TrackerParams:
    rsrp_base: float | None = None  # None = median of the first reports
    p_thres: float = 15.0
    c_thres: int = 3
    strict_literal: bool = True

    def __post_init__(self):
        if not self.p_thres > 0:
            raise ValueError("p_thres must be positive")
        if self.c_thres < 1:
            raise ValueError("c_thres must be at least 1")


def default_rsrp_base(reports) -> float:
    head = [r.rsrp_dbm for r in reports[:BASE_WINDOW]]
    if not head:
        raise EmptyPath("no reports")
    return float(np.median(head))


def _pick_area(fmap: FingerprintMap, beam_idx: int, last: BeamArea | None) -> tuple[BeamArea | None, bool]:
    """Area of ``beam_idx`` to append and whether it continues the path."""
    cands = fmap.areas_of(beam_idx)
    if not cands:
        return None, False
    if last is None:
        return max(cands, key=lambda a: (a.n_points, -a.area_id)), True
    ok = [a for a in cands if a.area_id == last.area_id or fmap.adjacent(a.area_id, last.area_id)]
    if ok:
        return min(ok, key=lambda a: (a.centroid.dist(last.centroid), a.area_id)), True
    return min(cands, key=lambda a: (a.centroid.dist(last.centroid), a.area_id)), False


def beam_to_path_areas(reports, params: TrackerParams, fmap: FingerprintMap) -> list:
    """Sequence of appended areas, before interpolation."""
    reports = list(reports)
    if len({r.rnti for r in reports}) > 1:
        raise ValueError("reports must belong to a single RNTI")
    base = params.rsrp_base if params.rsrp_base is not None else default_rsrp_base(reports)
    kept = [r for r in reports if abs(r.rsrp_dbm - base) <= params.p_thres]
    path: list[BeamArea] = []
    count = 0
    run = 0
    for n, rep in enumerate(kept):
        nxt = kept[n + 1].beam_idx if n + 1 < len(kept) else None
        run += 1
        if rep.beam_idx == nxt:
            count += 1
            continue
        area, contiguous = _pick_area(fmap, rep.beam_idx, path[-1] if path else None)
        if area is not None and count > params.c_thres and contiguous:
            if not path or area.area_id != path[-1].area_id:
                path.append(area)
            count = 0
        elif (area is not None and not params.strict_literal and run >= 3 * params.c_thres
              and (not path or area.area_id != path[-1].area_id)):
            path.append(area)
            count = 0
        run = 0
    return path


def interpolate(points, spacing: float = INTERP_SPACING_M) -> list:
    if len(points) < 2:
        return list(points)
    out = [points[0]]
    for a, b in zip(points, points[1:]):
        seg = a.dist(b)
        steps = max(1, math.ceil(seg / spacing))
        for k in range(1, steps + 1):
            t = k / steps
            out.append(GeoPoint(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t))
    return out


def beam_to_path(reports, params: TrackerParams, fmap: FingerprintMap) -> list:
    areas = beam_to_path_areas(reports, params, fmap)
    if not areas:
        raise EmptyPath("no beam run survived filtering")
    for a, b in zip(areas, areas[1:]):
        assert fmap.adjacent(a.area_id, b.area_id) or not params.strict_literal
    return interpolate([a.centroid for a in areas])

