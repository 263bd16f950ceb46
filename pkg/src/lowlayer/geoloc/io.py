"""CSV and GeoJSON formats for surveys, sniffed logs and estimated paths."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from ..codec.uci import CsiReport
from .fingerprint import LocalFrame, SurveyPoint

SURVEY_HEADER = ["lat", "lon", "beam_idx", "rsrp_dbm", "ta"]
CSI_HEADER = ["t_ms", "rnti", "beam_idx", "rsrp_dbm"]
RA_HEADER = ["t_ms", "beam_idx", "ta"]


class LogFormatError(ValueError):
    pass


def _rows(path, header):
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = set(header) - set(reader.fieldnames or ())
        if missing:
            raise LogFormatError(f"{path}: missing columns {sorted(missing)}")
        for i, row in enumerate(reader, start=2):
            yield i, row


def _write(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def read_survey(path) -> list:
    out = []
    for i, row in _rows(path, SURVEY_HEADER):
        try:
            out.append(SurveyPoint(float(row["lat"]), float(row["lon"]), int(row["beam_idx"]),
                                   float(row["rsrp_dbm"]), int(row["ta"])))
        except ValueError as e:
            raise LogFormatError(f"{path}:{i}: {e}") from e
    return out


def write_survey(path, points) -> None:
    _write(path, SURVEY_HEADER, ([f"{p.lat:.8f}", f"{p.lon:.8f}", p.beam_idx, p.rsrp_dbm, p.ta] for p in points))


def read_csi_log(path, rnti: int | None = None) -> list:
    out = []
    for i, row in _rows(path, CSI_HEADER):
        try:
            rep = CsiReport(int(row["rnti"]), int(row["beam_idx"]), float(row["rsrp_dbm"]), float(row["t_ms"]))
        except ValueError as e:
            raise LogFormatError(f"{path}:{i}: {e}") from e
        if rnti is None or rep.rnti == rnti:
            out.append(rep)
    out.sort(key=lambda r: r.t)
    return out


def write_csi_log(path, reports) -> None:
    _write(path, CSI_HEADER, ([r.t, r.rnti, r.beam_idx, r.rsrp_dbm] for r in reports))


def read_ra_log(path) -> list:
    """``(t_ms, beam_idx, ta)`` tuples."""
    out = []
    for i, row in _rows(path, RA_HEADER):
        try:
            out.append((float(row["t_ms"]), int(row["beam_idx"]), int(row["ta"])))
        except ValueError as e:
            raise LogFormatError(f"{path}:{i}: {e}") from e
    return out


def write_points_csv(path, points, frame: LocalFrame, extra=None) -> None:
    header = ["x_m", "y_m", "lat", "lon"] + (list(extra[0]) if extra else [])
    rows = []
    for i, p in enumerate(points):
        lat, lon = frame.to_latlon(p)
        rows.append([f"{p.x:.3f}", f"{p.y:.3f}", f"{lat:.8f}", f"{lon:.8f}"]
                    + (list(extra[i].values()) if extra else []))
    _write(path, header, rows)


def path_geojson(points, frame: LocalFrame, properties: dict | None = None) -> dict:
    coords = []
    for p in points:
        lat, lon = frame.to_latlon(p)
        coords.append([round(lon, 8), round(lat, 8)])
    geom = {"type": "LineString", "coordinates": coords} if len(coords) > 1 else \
        {"type": "Point", "coordinates": coords[0]}
    return {"type": "Feature", "geometry": geom, "properties": properties or {}}


def write_geojson(path, feature: dict) -> None:
    Path(path).write_text(json.dumps(feature, indent=1), encoding="utf-8")


__all__ = ["LogFormatError", "path_geojson", "read_csi_log", "read_ra_log", "read_survey",
           "write_csi_log", "write_geojson", "write_points_csv", "write_survey"]
