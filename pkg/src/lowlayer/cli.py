"""Command-line entry point.

Exit codes: 0 ok, 2 bad configuration or input schema, 3 I/O failure,
4 empty result.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .geoloc import (EmptyPath, FingerprintMap, InsufficientSurvey, TimingAdvance, TrackerParams, UnknownBeam,
                     beam_to_path, build_fingerprint, error_ecdf, localize_ssb_ra, path_max_deviation)
from .geoloc.io import LogFormatError, path_geojson, read_csi_log, read_ra_log, read_survey, write_geojson
from .simkit.config import ConfigInvalid, config_from_dict, load_config
from .simkit.engine import run
from .simkit.report import IoFailure, MetricsReport, emit_report
from .simkit.scenarios import bundled_scenarios, load_bundled_doc

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_EMPTY = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _latlon(text: str) -> tuple[float, float]:
    try:
        lat, lon = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LAT,LON") from None
    return lat, lon


def _formats(text: str) -> tuple[str, ...]:
    out = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = set(out) - {"json", "csv"}
    if bad or not out:
        raise argparse.ArgumentTypeError("formats are json and/or csv")
    return out


def _load_scenario(ref: str):
    p = Path(ref)
    if p.suffix == ".json" or p.exists():
        return load_config(p)
    if ref in bundled_scenarios():
        return config_from_dict(load_bundled_doc(ref))
    raise FileNotFoundError(f"no scenario file or bundled scenario named {ref!r}")


def _simulate_one(job):
    ref, seed, mitigation, out_dir, formats = job
    cfg = _load_scenario(ref)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if mitigation:
        cfg = dataclasses.replace(cfg, mitigation_enabled=True)
    report = run(cfg)
    emit_report(report, out_dir, formats)
    return cfg.name, str(out_dir)


def cmd_simulate(args) -> int:
    refs = args.scenario
    out = Path(args.out)
    jobs = []
    for ref in refs:
        target = out if len(refs) == 1 else out / Path(ref).stem
        jobs.append((ref, args.seed, args.mitigation, target, args.format))
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_simulate_one, jobs))
    else:
        results = [_simulate_one(j) for j in jobs]
    for name, where in results:
        print(f"{name}: report written to {where}")
    return EXIT_OK


def cmd_fingerprint(args) -> int:
    survey = read_survey(args.survey)
    fmap = build_fingerprint(survey, args.bs, args.gap_threshold, args.adjacency_distance)
    fmap.save(args.out)
    print(f"{len(fmap.areas)} areas over {len(fmap.beams())} beams -> {args.out}")
    return EXIT_OK


def _read_truth(path) -> list:
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if not {"lat", "lon"} <= set(reader.fieldnames or ()):
            raise LogFormatError(f"{path}: truth file needs lat and lon columns")
        for i, row in enumerate(reader, start=2):
            try:
                rows.append((float(row["t_ms"]) if row.get("t_ms") not in (None, "") else None,
                             float(row["lat"]), float(row["lon"])))
            except ValueError as e:
                raise LogFormatError(f"{path}:{i}: {e}") from e
    return rows


def _load_map(path) -> FingerprintMap:
    try:
        return FingerprintMap.load(path)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise CliError(EXIT_CONFIG, f"{path}: invalid fingerprint map: {e}") from e


def cmd_localize(args) -> int:
    fmap = _load_map(args.map)
    ra = read_ra_log(args.ra_log)
    truth = None
    if args.truth:
        t = _read_truth(args.truth)
        if len(t) != len(ra):
            raise LogFormatError("truth file must have one row per RA log row")
        truth = [fmap.frame.to_local(lat, lon) for _, lat, lon in t]
    rows, errors = [], []
    for i, (t_ms, beam, ta) in enumerate(ra):
        try:
            est = localize_ssb_ra(beam, TimingAdvance(ta, args.mu), fmap)
        except UnknownBeam:
            print(f"warning: beam {beam} at t={t_ms} ms is not in the map", file=sys.stderr)
            continue
        lat, lon = fmap.frame.to_latlon(est)
        row = [t_ms, beam, ta, est.area_id, f"{est.x:.3f}", f"{est.y:.3f}", f"{lat:.8f}", f"{lon:.8f}",
               int(est.clamped)]
        if truth is not None:
            err = est.dist(truth[i])
            errors.append(err)
            row.append(f"{err:.3f}")
        rows.append(row)
    if not rows:
        raise CliError(EXIT_EMPTY, "no RA record could be localized")
    header = ["t_ms", "beam_idx", "ta", "area_id", "x_m", "y_m", "lat", "lon", "clamped"]
    if truth is not None:
        header.append("error_m")
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    if errors:
        f_ecdf = error_ecdf(errors)
        ecdf_path = args.ecdf or str(Path(args.out).with_suffix("")) + "_ecdf.csv"
        with open(ecdf_path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["threshold_m", "fraction"])
            for th in range(0, int(max(errors)) + 2):
                w.writerow([th, f"{f_ecdf(th):.4f}"])
        print(f"{len(rows)} estimates; error <= 10 m: {f_ecdf(10):.2%}, <= 20 m: {f_ecdf(20):.2%}")
    else:
        print(f"{len(rows)} estimates -> {args.out}")
    return EXIT_OK


def cmd_track(args) -> int:
    fmap = _load_map(args.map)
    reports = read_csi_log(args.csi_log, args.rnti)
    if not reports:
        raise CliError(EXIT_EMPTY, "no CSI reports for the requested RNTI")
    if args.rnti is None and len({r.rnti for r in reports}) > 1:
        raise LogFormatError("CSI log holds several RNTIs; pick one with --rnti")
    params = TrackerParams(args.rsrp_base, args.p_thres, args.c_thres, not args.recover_gaps)
    path = beam_to_path(reports, params, fmap)
    props = {"rnti": reports[0].rnti, "n_reports": len(reports), "n_points": len(path)}
    if args.truth:
        truth = [fmap.frame.to_local(lat, lon) for _, lat, lon in _read_truth(args.truth)]
        if not truth:
            raise LogFormatError("empty truth file")
        props["max_deviation_m"] = round(path_max_deviation(path, truth), 3)
    write_geojson(args.out, path_geojson(path, fmap.frame, props))
    line = f"path of {len(path)} points -> {args.out}"
    if "max_deviation_m" in props:
        line += f"; max deviation {props['max_deviation_m']:.2f} m"
    print(line)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
        m = MetricsReport.from_dict(doc)
    except (json.JSONDecodeError, ValueError) as e:
        raise CliError(EXIT_CONFIG, f"{args.input}: {e}") from e
    for p in emit_report(m, args.out, args.format):
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lowlayer", description=(
        "Low-layer cellular attack simulator and passive localization toolkit."))
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one or more scenarios and write metrics reports")
    s.add_argument("--scenario", action="append", required=True, metavar="FILE|NAME",
                   help="scenario JSON file or bundled scenario name; repeat for a batch")
    s.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    s.add_argument("--out", required=True, metavar="DIR",
                   help="output directory (one subdirectory per scenario in batch mode)")
    s.add_argument("--mitigation", action="store_true", help="enable keyed low-layer scrambling")
    s.add_argument("--jobs", type=int, default=1, metavar="N", help="run a batch on N worker processes")
    s.add_argument("--format", type=_formats, default=("json", "csv"), metavar="FMT",
                   help="comma-separated output formats: json, csv (default both)")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fingerprint", help="build a beam fingerprint map from a survey CSV")
    f.add_argument("--survey", required=True, metavar="FILE", help="survey CSV (lat,lon,beam_idx,rsrp_dbm,ta)")
    f.add_argument("--bs", required=True, type=_latlon, metavar="LAT,LON", help="BS position")
    f.add_argument("--out", required=True, metavar="FILE", help="fingerprint map JSON to write")
    f.add_argument("--gap-threshold", type=float, default=30.0, metavar="M",
                   help="spatial gap that splits one beam into separate areas (default 30 m)")
    f.add_argument("--adjacency-distance", type=float, default=5.0, metavar="M",
                   help="maximum hull distance for two areas to count as adjacent (default 5 m)")
    f.set_defaults(func=cmd_fingerprint)

    lo = sub.add_parser("localize", help="estimate UE positions from sniffed RA beam index and TA")
    lo.add_argument("--map", required=True, metavar="FILE", help="fingerprint map JSON")
    lo.add_argument("--ra-log", required=True, metavar="FILE", help="RA log CSV (t_ms,beam_idx,ta)")
    lo.add_argument("--out", required=True, metavar="FILE", help="estimates CSV to write")
    lo.add_argument("--truth", metavar="FILE", help="ground-truth CSV (lat,lon), one row per RA record")
    lo.add_argument("--ecdf", metavar="FILE", help="error ECDF CSV (default: <out>_ecdf.csv, needs --truth)")
    lo.add_argument("--mu", type=int, default=3, help="numerology used to convert TA (default 3)")
    lo.set_defaults(func=cmd_localize)

    t = sub.add_parser("track", help="infer a UE path from sniffed CSI reports")
    t.add_argument("--map", required=True, metavar="FILE", help="fingerprint map JSON")
    t.add_argument("--csi-log", required=True, metavar="FILE", help="CSI log CSV (t_ms,rnti,beam_idx,rsrp_dbm)")
    t.add_argument("--p-thres", type=float, default=15.0, metavar="DB", help="power filter threshold in dB")
    t.add_argument("--c-thres", type=int, default=3, metavar="N", help="minimum stable run length")
    t.add_argument("--rsrp-base", type=float, default=None, metavar="DBM",
                   help="RSRP reference (default: median of the first 10 reports)")
    t.add_argument("--rnti", type=int, default=None, help="track only this RNTI")
    t.add_argument("--recover-gaps", action="store_true",
                   help="also append long stable runs of non-adjacent beams")
    t.add_argument("--out", required=True, metavar="FILE", help="GeoJSON path to write")
    t.add_argument("--truth", metavar="FILE", help="ground-truth path CSV (lat,lon) to score against")
    t.set_defaults(func=cmd_track)

    r = sub.add_parser("report", help="re-emit CSV and ECDF tables from a saved report.json")
    r.add_argument("--in", dest="input", required=True, metavar="FILE", help="report.json from simulate")
    r.add_argument("--out", required=True, metavar="DIR", help="output directory")
    r.add_argument("--format", type=_formats, default=("csv",), metavar="FMT",
                   help="comma-separated output formats: json, csv (default csv)")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (ConfigInvalid, LogFormatError, InsufficientSurvey) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except EmptyPath as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EMPTY
    except (IoFailure, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
