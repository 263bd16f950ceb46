import csv
import filecmp
import json
import subprocess
import sys
from importlib import resources

import pytest

from lowlayer.cli import EXIT_CONFIG, EXIT_EMPTY, EXIT_IO, EXIT_OK, build_parser, main
from lowlayer.geoloc.synth import BS_LATLON

DATA = resources.files("lowlayer.data")
BS = f"{BS_LATLON[0]},{BS_LATLON[1]}"

FLAGS = {
    "simulate": ["--scenario", "--seed", "--out", "--mitigation", "--jobs", "--format"],
    "fingerprint": ["--survey", "--bs", "--out", "--gap-threshold", "--adjacency-distance"],
    "localize": ["--map", "--ra-log", "--out", "--truth", "--ecdf", "--mu"],
    "track": ["--map", "--csi-log", "--p-thres", "--c-thres", "--rsrp-base", "--rnti", "--recover-gaps", "--out",
              "--truth"],
    "report": ["--in", "--out", "--format"],
}


def data(name):
    with resources.as_file(DATA / name) as p:
        return str(p)


@pytest.fixture(scope="module")
def fmap(tmp_path_factory):
    out = tmp_path_factory.mktemp("map") / "map.json"
    assert main(["fingerprint", "--survey", data("wedge_survey.csv"), "--bs", BS, "--out", str(out)]) == EXIT_OK
    return out


@pytest.mark.parametrize("command", sorted(FLAGS))
def test_help_lists_every_flag(command, capsys):
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args([command, "--help"])
    assert e.value.code == 0
    text = capsys.readouterr().out
    for flag in FLAGS[command]:
        assert flag in text, flag


def test_console_entry_point_runs():
    r = subprocess.run([sys.executable, "-m", "lowlayer.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "simulate" in r.stdout


def test_simulate_bundled_and_mitigated(tmp_path):
    assert main(["simulate", "--scenario", "scell_deactivation", "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["simulate", "--scenario", "scell_deactivation", "--mitigation", "--out", str(tmp_path / "m")]) == 0
    attacked = json.loads((tmp_path / "a" / "report.json").read_text())
    mitigated = json.loads((tmp_path / "m" / "report.json").read_text())
    assert attacked["ues"] != mitigated["ues"]
    assert (tmp_path / "a" / "series.csv").exists()


def test_simulate_is_byte_identical(tmp_path):
    for d in ("x", "y"):
        assert main(["simulate", "--scenario", "harq_dai", "--seed", "4", "--out", str(tmp_path / d)]) == 0
    cmp = filecmp.dircmp(tmp_path / "x", tmp_path / "y")
    assert not cmp.diff_files and not cmp.left_only and cmp.common_files


def test_simulate_batch_with_jobs(tmp_path):
    argv = ["simulate", "--scenario", "sr_keepalive", "--scenario", "bwp_switch", "--format", "json",
            "--out", str(tmp_path)]
    assert main(argv + ["--jobs", "2"]) == EXIT_OK
    serial = tmp_path / "serial"
    assert main(argv[:-1] + [str(serial)]) == EXIT_OK
    for name in ("sr_keepalive", "bwp_switch"):
        assert (tmp_path / name / "report.json").read_bytes() == (serial / name / "report.json").read_bytes()
        assert not (tmp_path / name / "series.csv").exists()


def test_simulate_scenario_file(tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"duration_ms": 1000, "ues": [{"rnti": 17921}]}))
    assert main(["simulate", "--scenario", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"duration_ms": -5}))
    assert main(["simulate", "--scenario", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["simulate", "--scenario", "no_such_scenario", "--out", str(tmp_path / "o")]) == EXIT_IO
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["simulate", "--scenario", "sr_keepalive", "--out", str(blocker / "o")]) == EXIT_IO
    assert main(["fingerprint", "--survey", str(tmp_path / "nope.csv"), "--bs", BS,
                 "--out", str(tmp_path / "m.json")]) == EXIT_IO
    with pytest.raises(SystemExit) as e:
        main(["fingerprint", "--survey", "x", "--bs", "nonsense", "--out", "y"])
    assert e.value.code == 2


def test_fingerprint_builds_48_areas(fmap, capsys):
    doc = json.loads(fmap.read_text())
    assert len(doc["areas"]) == 48


def test_fingerprint_bad_survey_is_schema_error(tmp_path):
    survey = tmp_path / "s.csv"
    survey.write_text("lat,lon\n1,2\n")
    assert main(["fingerprint", "--survey", str(survey), "--bs", BS, "--out", str(tmp_path / "m.json")]) == 2


def test_localize_with_truth(fmap, tmp_path, capsys):
    out = tmp_path / "est.csv"
    argv = ["localize", "--map", str(fmap), "--ra-log", data("wedge_ra.csv"), "--truth", data("wedge_ra_truth.csv"),
            "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert "<= 20 m: 100.00%" in capsys.readouterr().out
    with open(tmp_path / "est_ecdf.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["threshold_m", "fraction"] and rows[-1][1] == "1.0000"
    with open(out, newline="") as f:
        est = list(csv.DictReader(f))
    assert len(est) == 183 and all(float(r["error_m"]) < 20 for r in est)


def test_localize_empty_and_bad_map(fmap, tmp_path):
    ra = tmp_path / "ra.csv"
    ra.write_text("t_ms,beam_idx,ta\n0,999,3\n")
    assert main(["localize", "--map", str(fmap), "--ra-log", str(ra), "--out", str(tmp_path / "o.csv")]) == EXIT_EMPTY
    junk = tmp_path / "junk.json"
    junk.write_text("[]")
    assert main(["localize", "--map", str(junk), "--ra-log", str(ra), "--out", str(tmp_path / "o.csv")]) == EXIT_CONFIG


def test_track_flicker_log(fmap, tmp_path):
    out = tmp_path / "path.geojson"
    assert main(["track", "--map", str(fmap), "--csi-log", data("flicker_csi.csv"), "--out", str(out)]) == EXIT_OK
    feature = json.loads(out.read_text())
    assert feature["geometry"]["type"] == "LineString"
    assert feature["properties"]["rnti"] == 17921 and feature["properties"]["n_reports"] == 26


def test_track_unknown_rnti_is_empty(fmap, tmp_path):
    argv = ["track", "--map", str(fmap), "--csi-log", data("flicker_csi.csv"), "--rnti", "5",
            "--out", str(tmp_path / "p.geojson")]
    assert main(argv) == EXIT_EMPTY


def test_report_reemits_tables(tmp_path):
    assert main(["simulate", "--scenario", "sr_keepalive", "--out", str(tmp_path / "sim")]) == EXIT_OK
    assert main(["report", "--in", str(tmp_path / "sim" / "report.json"), "--out", str(tmp_path / "re")]) == EXIT_OK
    assert (tmp_path / "re" / "series.csv").read_bytes() == (tmp_path / "sim" / "series.csv").read_bytes()
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["report", "--in", str(bad), "--out", str(tmp_path / "x")]) == EXIT_CONFIG
