"""Metrics report: JSON document, per-series CSV tables and ECDF tables."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geoloc.metrics import error_ecdf as ecdf


class IoFailure(OSError):
    pass


@dataclass
class UeMetrics:
    throughput_mbps: list
    ul_padding_mbps: list
    energy_per_s: list
    energy_units: float
    ra_attempts: int
    ra_outcomes: list
    rlf_time_ms: float | None
    released_ms: float | None
    active_scells: list
    bs_scell_view: list
    beam_aligned: bool
    sib: str


@dataclass
class MetricsReport:
    scenario: str
    seed: int
    duration_ms: float
    bucket_ms: float
    ues: dict
    cell: dict
    sniffer: dict | None = None
    events: list = field(default_factory=list)

    def to_dict(self, include_events: bool = True) -> dict:
        out = {
            "scenario": self.scenario,
            "seed": self.seed,
            "duration_ms": self.duration_ms,
            "bucket_ms": self.bucket_ms,
            "ues": {k: dataclasses.asdict(v) for k, v in self.ues.items()},
            "cell": self.cell,
            "sniffer": self.sniffer,
        }
        if include_events:
            out["events"] = self.events
        return out

    def metrics_dict(self) -> dict:
        """Effect metrics only: everything except the event log, the sniffer
        and the scenario label."""
        d = self.to_dict(include_events=False)
        d.pop("sniffer")
        d.pop("scenario")
        return d

    def to_json(self, include_events: bool = True) -> str:
        return json.dumps(self.to_dict(include_events), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        try:
            return cls(d["scenario"], d["seed"], d["duration_ms"], d["bucket_ms"],
                       {k: UeMetrics(**v) for k, v in d["ues"].items()}, d["cell"], d.get("sniffer"),
                       d.get("events", []))
        except (KeyError, TypeError) as e:
            raise ValueError(f"not a metrics report: {e}") from e

    def ue(self, rnti) -> UeMetrics:
        return self.ues[str(rnti)]


def ecdf_table(values) -> list[tuple[float, float]]:
    """``(threshold, fraction)`` at every distinct sample value."""
    xs = np.sort(np.asarray(values, dtype=float))
    f = ecdf(xs)
    return [(float(x), f(x)) for x in np.unique(xs)]


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoFailure(str(e)) from e


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit_report(m: MetricsReport, out_dir, formats=("json", "csv")) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailure(str(e)) from e
    written = []
    if "json" in formats:
        p = out / "report.json"
        _write(p, m.to_json())
        written.append(p)
    if "csv" in formats:
        n = len(m.cell["rach_load"])
        rows = []
        for i in range(n):
            row = [i * m.bucket_ms / 1000.0]
            for rnti in sorted(m.ues, key=int):
                u = m.ues[rnti]
                row += [u.throughput_mbps[i], u.ul_padding_mbps[i], u.energy_per_s[i]]
            row += [m.cell["rach_load"][i], m.cell["rar_emissions"][i]]
            rows.append(row)
        header = ["t_s"]
        for rnti in sorted(m.ues, key=int):
            header += [f"throughput_mbps_{rnti}", f"ul_padding_mbps_{rnti}", f"energy_{rnti}"]
        header += ["rach_load", "rar_emissions"]
        p = out / "series.csv"
        _write(p, _csv_text(header, rows))
        written.append(p)
        for rnti in sorted(m.ues, key=int):
            table = ecdf_table(m.ues[rnti].throughput_mbps)
            p = out / f"throughput_ecdf_{rnti}.csv"
            _write(p, _csv_text(["threshold_mbps", "fraction"], table))
            written.append(p)
        p = out / "events.csv"
        _write(p, _csv_text(["t_ms", "event", "detail"],
                            [[e["t_ms"], e["event"], json.dumps({k: v for k, v in e.items()
                                                                  if k not in ("t_ms", "event")}, sort_keys=True)]
                             for e in m.events]))
        written.append(p)
    return written
