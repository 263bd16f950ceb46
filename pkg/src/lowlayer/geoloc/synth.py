"""Synthetic beam geometry, survey and walks for localization experiments.

The cell covers a 120 degree wedge facing east between 40 m and 120 m from
the BS.  It is cut into 12 azimuth sectors and 4 range rings, giving 48
beams of roughly 20 m by 9 to 19 m.  Beam indices snake through the grid
(ring 0 runs north to south, ring 1 south to north, ...) so consecutive
indices are always neighbours.  Everything here is line of sight and TA is
exact from geometry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..codec.uci import CsiReport
from .fingerprint import GeoPoint, LocalFrame, SurveyPoint
from .io import write_csi_log, write_survey
from .ta import distance_to_ta

BS_LATLON = (40.7580, -73.9855)
SURVEY_SPACING_M = 2.0


@dataclass(frozen=True)
class WedgeLayout:
    sectors: int = 12
    rings: int = 4
    span_deg: float = 120.0
    r_min: float = 40.0
    r_max: float = 120.0
    mu: int = 3

    @property
    def n_beams(self) -> int:
        return self.sectors * self.rings

    @property
    def sector_rad(self) -> float:
        return math.radians(self.span_deg) / self.sectors

    @property
    def ring_m(self) -> float:
        return (self.r_max - self.r_min) / self.rings

    def sector_center(self, j: int) -> float:
        return math.radians(self.span_deg) / 2 - (j + 0.5) * self.sector_rad

    def beam_of(self, p: GeoPoint) -> int | None:
        r, th = p.r, math.atan2(p.y, p.x)
        half = math.radians(self.span_deg) / 2
        if not (self.r_min <= r < self.r_max and -half < th <= half):
            return None
        j = min(self.sectors - 1, int((half - th) / self.sector_rad))
        k = min(self.rings - 1, int((r - self.r_min) / self.ring_m))
        return self.index(k, j)

    def index(self, ring: int, sector: int) -> int:
        return ring * self.sectors + (sector if ring % 2 == 0 else self.sectors - 1 - sector)

    def cell(self, beam_idx: int) -> tuple[int, int]:
        ring, pos = divmod(beam_idx, self.sectors)
        return ring, pos if ring % 2 == 0 else self.sectors - 1 - pos

    def half_arc_m(self, r: float) -> float:
        return r * self.sector_rad / 2


def rsrp_at(r: float) -> float:
    return -75.0 - 20.0 * math.log10(r / 80.0)


def _polar(r: float, th: float) -> GeoPoint:
    return GeoPoint(r * math.cos(th), r * math.sin(th))


def survey_points(layout: WedgeLayout = WedgeLayout(), frame: LocalFrame = LocalFrame(*BS_LATLON),
                  spacing: float = SURVEY_SPACING_M) -> list:
    """Polar grid inside every beam cell, symmetric about the sector centre."""
    out = []
    for b in range(layout.n_beams):
        ring, sector = layout.cell(b)
        lo = layout.r_min + ring * layout.ring_m
        c = layout.sector_center(sector)
        r = lo + spacing / 2
        while r < lo + layout.ring_m:
            kmax = int((layout.half_arc_m(r) - spacing / 2) // spacing)
            for k in range(-kmax, kmax + 1):
                p = _polar(r, c + k * spacing / r)
                lat, lon = frame.to_latlon(p)
                out.append(SurveyPoint(lat, lon, b, round(rsrp_at(r), 2), distance_to_ta(r, layout.mu)))
            r += spacing
    return out


def eval_points(n: int = 183, seed: int = 7, layout: WedgeLayout = WedgeLayout()) -> list:
    """Uniform over the covered area; returns (GeoPoint, beam_idx, ta)."""
    rng = np.random.default_rng(seed)
    half = math.radians(layout.span_deg) / 2
    out = []
    while len(out) < n:
        r = math.sqrt(rng.uniform(layout.r_min ** 2, layout.r_max ** 2))
        p = _polar(r, rng.uniform(-half, half))
        b = layout.beam_of(p)
        if b is not None:
            out.append((p, b, distance_to_ta(r, layout.mu)))
    return out


@dataclass(frozen=True)
class WalkNoise:
    speed_mps: float = 1.4
    csi_period_ms: float = 40.0
    flicker_m: float = 1.5  # near a border either beam may be reported
    outlier_rate: float = 0.03  # blocked reports, far off in RSRP
    reflection_rate: float = 0.02  # single reports of an unrelated beam at normal power
    rsrp_sigma_db: float = 2.0


def random_walk(rng: np.random.Generator, length_m: float, layout: WedgeLayout = WedgeLayout(),
                max_turns: int = 3) -> list:
    """Piecewise-linear walk of the given length that stays in coverage."""
    half = math.radians(layout.span_deg) / 2 - 0.02
    inside = lambda p: layout.r_min + 2 <= p.r <= layout.r_max - 2 and abs(math.atan2(p.y, p.x)) <= half
    while True:
        r = math.sqrt(rng.uniform((layout.r_min + 2) ** 2, (layout.r_max - 2) ** 2))
        pts = [_polar(r, rng.uniform(-half, half))]
        heading = rng.uniform(0, 2 * math.pi)
        turns = int(rng.integers(0, max_turns + 1))
        cuts = np.sort(rng.uniform(0, length_m, turns))
        legs = np.diff(np.concatenate([[0.0], cuts, [length_m]]))
        ok = True
        for i, leg in enumerate(legs):
            if i:
                heading += rng.uniform(-math.pi / 2, math.pi / 2)
            end = GeoPoint(pts[-1].x + leg * math.cos(heading), pts[-1].y + leg * math.sin(heading))
            mid = GeoPoint((pts[-1].x + end.x) / 2, (pts[-1].y + end.y) / 2)
            if not (inside(end) and inside(mid)):
                ok = False
                break
            pts.append(end)
        if ok and all(inside(p) for p in _sample(pts, 1.0)):
            return pts


def _sample(path, step: float) -> list:
    out = [path[0]]
    for a, b in zip(path, path[1:]):
        n = max(1, math.ceil(a.dist(b) / step))
        out.extend(GeoPoint(a.x + (b.x - a.x) * k / n, a.y + (b.y - a.y) * k / n) for k in range(1, n + 1))
    return out


def _nearest_other_beam(p: GeoPoint, beam: int, layout: WedgeLayout, within: float) -> int | None:
    for dx, dy in ((within, 0), (-within, 0), (0, within), (0, -within)):
        b = layout.beam_of(GeoPoint(p.x + dx, p.y + dy))
        if b is not None and b != beam:
            return b
    return None


def csi_trace(path, rng: np.random.Generator, rnti: int = 0x4601, noise: WalkNoise = WalkNoise(),
              layout: WedgeLayout = WedgeLayout()) -> list:
    step = noise.speed_mps * noise.csi_period_ms / 1000.0
    out = []
    for i, p in enumerate(_sample(path, step)):
        beam = layout.beam_of(p)
        rsrp = rsrp_at(p.r) + rng.normal(0.0, noise.rsrp_sigma_db)
        other = _nearest_other_beam(p, beam, layout, noise.flicker_m)
        if other is not None and rng.random() < 0.5:
            beam = other
        u = rng.random()
        if u < noise.outlier_rate:
            rsrp -= 30.0
            beam = int(rng.integers(0, layout.n_beams))
        elif u < noise.outlier_rate + noise.reflection_rate:
            beam = int(rng.integers(0, layout.n_beams))
        out.append(CsiReport(rnti, beam, round(float(np.clip(rsrp, -156, -31)), 1), i * noise.csi_period_ms))
    return out


def walks(n: int = 30, seed: int = 11, lengths=(20.0, 150.0), layout: WedgeLayout = WedgeLayout()) -> list:
    """``n`` (ground_truth, csi_reports) pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        path = random_walk(rng, float(rng.uniform(*lengths)), layout)
        out.append((path, csi_trace(path, rng, layout=layout)))
    return out


def flicker_trace(a: int = 5, b: int = 6, rnti: int = 0x4601, rsrp_dbm: float = -75.0,
                  period_ms: float = 40.0) -> list:
    """Ten reports of ``a``, a three-fold a/b flicker, then ten of ``b``."""
    beams = [a] * 10 + [a, b] * 3 + [b] * 10
    return [CsiReport(rnti, x, rsrp_dbm, i * period_ms) for i, x in enumerate(beams)]


def write_bundled(out_dir) -> None:
    """Regenerate the CSV files shipped in ``lowlayer/data``."""
    out = Path(out_dir)
    frame = LocalFrame(*BS_LATLON)
    write_survey(out / "wedge_survey.csv", survey_points(frame=frame))
    write_csi_log(out / "flicker_csi.csv", flicker_trace())
    pts = eval_points()
    with open(out / "wedge_ra.csv", "w", encoding="utf-8") as f:
        f.write("t_ms,beam_idx,ta\n")
        f.writelines(f"{i * 1000},{b},{ta}\n" for i, (_, b, ta) in enumerate(pts))
    with open(out / "wedge_ra_truth.csv", "w", encoding="utf-8") as f:
        f.write("t_ms,lat,lon\n")
        for i, (p, _, _) in enumerate(pts):
            lat, lon = frame.to_latlon(p)
            f.write(f"{i * 1000},{lat:.8f},{lon:.8f}\n")
