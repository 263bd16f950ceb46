"""Beam fingerprint maps built from a walking survey.

Survey points are projected to a local east/north frame centred on the BS,
split per beam index into spatial clusters (single linkage, so a beam seen
through a reflection gets its own area), and each cluster becomes a convex
hull with a bisector ray and a TA histogram.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from shapely.geometry import LineString, MultiPoint, Polygon
from shapely.geometry.polygon import orient

EARTH_RADIUS_M = 6_371_008.8
MIN_AREA_POINTS = 3
MAP_SCHEMA = "lowlayer.fingerprint/1"


class InsufficientSurvey(ValueError):
    pass


@dataclass(frozen=True)
class GeoPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("GeoPoint coordinates must be finite")

    def dist(self, other: "GeoPoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class SurveyPoint:
    lat: float
    lon: float
    beam_idx: int
    rsrp_dbm: float
    ta: int


@dataclass(frozen=True)
class LocalFrame:
    """Equirectangular projection at the BS latitude."""
    lat0: float
    lon0: float

    def to_local(self, lat: float, lon: float) -> GeoPoint:
        k = math.radians(1.0) * EARTH_RADIUS_M
        return GeoPoint((lon - self.lon0) * k * math.cos(math.radians(self.lat0)), (lat - self.lat0) * k)

    def to_latlon(self, p: GeoPoint) -> tuple[float, float]:
        k = math.radians(1.0) * EARTH_RADIUS_M
        return self.lat0 + p.y / k, self.lon0 + p.x / (k * math.cos(math.radians(self.lat0)))


@dataclass
class BeamArea:
    area_id: int
    beam_idx: int
    polygon: list  # GeoPoint vertices, counter-clockwise
    centroid: GeoPoint
    bisector: tuple  # unit (dx, dy)
    ta_histogram: dict = field(default_factory=dict)
    n_points: int = 0

    def shape(self) -> Polygon:
        return Polygon([(p.x, p.y) for p in self.polygon])

    def radial_extent(self) -> tuple[float, float]:
        """Distance range of the hull along its own bisector."""
        shp = self.shape()
        far = max(math.hypot(p.x, p.y) for p in self.polygon) + 1.0
        ux, uy = self.bisector
        seg = shp.intersection(LineString([(0.0, 0.0), (ux * far, uy * far)]))
        if seg.is_empty:
            rs = [math.hypot(p.x, p.y) for p in self.polygon]
            return min(rs), max(rs)
        coords = np.asarray(seg.coords if hasattr(seg, "coords") else
                            [c for g in seg.geoms for c in g.coords])
        rs = np.hypot(coords[:, 0], coords[:, 1])
        return float(rs.min()), float(rs.max())


@dataclass
class FingerprintMap:
    frame: LocalFrame
    areas: list
    adjacency: set  # frozenset({area_id, area_id})
    gap_threshold_m: float = 30.0
    adjacency_distance_m: float = 5.0

    def areas_of(self, beam_idx: int) -> list:
        return [a for a in self.areas if a.beam_idx == beam_idx]

    def beams(self) -> set:
        return {a.beam_idx for a in self.areas}

    def adjacent(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.adjacency

    def area(self, area_id: int) -> BeamArea:
        return self.areas[area_id]

    def to_dict(self) -> dict:
        return {
            "schema": MAP_SCHEMA,
            "bs": {"lat": self.frame.lat0, "lon": self.frame.lon0},
            "gap_threshold_m": self.gap_threshold_m,
            "adjacency_distance_m": self.adjacency_distance_m,
            "areas": [{
                "area_id": a.area_id, "beam_idx": a.beam_idx, "n_points": a.n_points,
                "polygon": [[p.x, p.y] for p in a.polygon],
                "centroid": [a.centroid.x, a.centroid.y],
                "bisector": list(a.bisector),
                "ta_histogram": {str(k): v for k, v in sorted(a.ta_histogram.items())},
            } for a in self.areas],
            "adjacency": sorted(sorted(p) for p in self.adjacency),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FingerprintMap":
        if not isinstance(doc, dict):
            raise ValueError("not a fingerprint map (expected a JSON object)")
        if doc.get("schema") != MAP_SCHEMA:
            raise ValueError(f"not a fingerprint map (schema {doc.get('schema')!r})")
        areas = [BeamArea(a["area_id"], a["beam_idx"], [GeoPoint(*p) for p in a["polygon"]],
                          GeoPoint(*a["centroid"]), tuple(a["bisector"]),
                          {int(k): int(v) for k, v in a["ta_histogram"].items()}, a.get("n_points", 0))
                 for a in doc["areas"]]
        return cls(LocalFrame(doc["bs"]["lat"], doc["bs"]["lon"]), areas,
                   {frozenset(p) for p in doc["adjacency"]},
                   doc.get("gap_threshold_m", 30.0), doc.get("adjacency_distance_m", 5.0))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "FingerprintMap":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _clusters(xy: np.ndarray, gap: float) -> np.ndarray:
    if len(xy) == 1:
        return np.ones(1, dtype=int)
    return fcluster(linkage(xy, method="single"), t=gap, criterion="distance")


def _make_area(area_id: int, beam_idx: int, xy: np.ndarray, tas) -> BeamArea:
    hull = MultiPoint([tuple(p) for p in xy]).convex_hull
    if not isinstance(hull, Polygon) or hull.area <= 0:
        raise InsufficientSurvey(f"beam {beam_idx}: survey points are collinear")
    hull = orient(hull, 1.0)
    ring = list(hull.exterior.coords)[:-1]
    c = hull.centroid
    norm = math.hypot(c.x, c.y)
    if norm == 0:
        raise InsufficientSurvey(f"beam {beam_idx}: area centred on the BS has no bisector")
    return BeamArea(area_id, beam_idx, [GeoPoint(float(x), float(y)) for x, y in ring],
                    GeoPoint(c.x, c.y), (c.x / norm, c.y / norm), dict(sorted(Counter(tas).items())), len(xy))


def build_fingerprint(survey, bs_latlon, gap_threshold_m: float = 30.0,
                      adjacency_distance_m: float = 5.0) -> FingerprintMap:
    """Group survey points into beam areas.

    Clusters with fewer than three points are dropped as noise; if a beam
    index ends up with no area at all the survey is rejected.
    """
    frame = LocalFrame(*bs_latlon)
    pts = sorted(survey, key=lambda s: (s.lat, s.lon, s.beam_idx))
    if not pts:
        raise InsufficientSurvey("empty survey")
    by_beam: dict[int, list] = {}
    for s in pts:
        by_beam.setdefault(int(s.beam_idx), []).append(s)
    areas = []
    for beam in sorted(by_beam):
        group = by_beam[beam]
        xy = np.array([[p.x, p.y] for p in (frame.to_local(s.lat, s.lon) for s in group)])
        labels = _clusters(xy, gap_threshold_m)
        clusters = []
        for lab in sorted(set(labels)):
            mask = labels == lab
            if mask.sum() >= MIN_AREA_POINTS:
                idx = np.flatnonzero(mask)
                clusters.append((xy[mask], [group[i].ta for i in idx]))
        if not clusters:
            raise InsufficientSurvey(f"beam {beam}: fewer than {MIN_AREA_POINTS} points in every cluster")
        # stable order: nearest cluster first
        clusters.sort(key=lambda c: float(np.hypot(*c[0].mean(axis=0))))
        for cxy, tas in clusters:
            areas.append(_make_area(len(areas), beam, cxy, tas))
    shapes = [a.shape() for a in areas]
    adjacency = set()
    for i in range(len(areas)):
        for j in range(i + 1, len(areas)):
            if shapes[i].distance(shapes[j]) <= adjacency_distance_m:
                adjacency.add(frozenset((i, j)))
    return FingerprintMap(frame, areas, adjacency, gap_threshold_m, adjacency_distance_m)
