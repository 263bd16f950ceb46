import filecmp
import json
import math
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from shapely.geometry import Point

from lowlayer.codec.uci import CsiReport
from lowlayer.geoloc import (EmptyIntersection, EmptyPath, FingerprintMap, GeoPoint, InsufficientSurvey, LocalFrame,
                             SurveyPoint, TimingAdvance, TrackerParams, UnknownBeam, beam_to_path, beam_to_path_areas,
                             build_fingerprint, distance_to_ta, error_ecdf, localize_ssb_ra, path_max_deviation,
                             physical_step_m, select_area, ta_step_m, ta_to_distance_range)
from lowlayer.geoloc.io import (LogFormatError, path_geojson, read_csi_log, read_ra_log, read_survey,
                                write_csi_log, write_survey)
from lowlayer.geoloc.synth import BS_LATLON, WedgeLayout, flicker_trace, survey_points, write_bundled
from lowlayer.geoloc.tracking import interpolate

FRAME = LocalFrame(*BS_LATLON)


def survey_from_xy(xy, beam, ta=None, rsrp=-80.0):
    out = []
    for x, y in xy:
        lat, lon = FRAME.to_latlon(GeoPoint(x, y))
        t = distance_to_ta(math.hypot(x, y)) if ta is None else ta
        out.append(SurveyPoint(lat, lon, beam, rsrp, t))
    return out


def grid(cx, cy, half=4.0, step=2.0):
    r = np.arange(-half, half + 1e-9, step)
    return [(cx + dx, cy + dy) for dx in r for dy in r]


@pytest.fixture(scope="module")
def wedge():
    return build_fingerprint(survey_points(), BS_LATLON)


# ---- TA ---------------------------------------------------------------------------

def test_ta_examples():
    assert ta_to_distance_range(TimingAdvance(1)) == (0.0, pytest.approx(9.77))
    assert ta_to_distance_range(TimingAdvance(0)) == (0.0, 0.0)
    lo, hi = ta_to_distance_range(TimingAdvance(4))
    assert lo == pytest.approx(29.31) and hi == pytest.approx(39.08)


def test_ta_step_against_physical_constants():
    for mu in range(5):
        assert ta_step_m(mu) == pytest.approx(physical_step_m(mu), rel=2e-3)
    assert physical_step_m(3) == pytest.approx(9.7589, abs=1e-4)


@given(st.integers(1, 3845), st.integers(0, 4))
def test_ta_intervals_tile(ta, mu):
    assert ta_to_distance_range(TimingAdvance(ta, mu))[1] == ta_to_distance_range(TimingAdvance(ta + 1, mu))[0]


@given(st.floats(0.01, 30000.0))
def test_distance_to_ta_lands_in_range(d):
    ta = distance_to_ta(d)
    lo, hi = ta_to_distance_range(TimingAdvance(ta))
    assert lo - 1e-6 <= d <= hi + 1e-6


def test_ta_validation():
    with pytest.raises(ValueError):
        TimingAdvance(3847)


# ---- fingerprint map ------------------------------------------------------------------

def test_local_frame_round_trip():
    p = GeoPoint(123.4, -56.7)
    q = FRAME.to_local(*FRAME.to_latlon(p))
    assert q.dist(p) < 1e-6
    with pytest.raises(ValueError):
        GeoPoint(math.nan, 0.0)


def test_symmetric_beam_bisector_is_x_axis():
    fmap = build_fingerprint(survey_from_xy(grid(50, 0), 0), BS_LATLON)
    ux, uy = fmap.areas[0].bisector
    assert ux == pytest.approx(1.0) and uy == pytest.approx(0.0, abs=1e-6)


def test_two_clusters_give_two_areas():
    survey = survey_from_xy(grid(30, 0), 7) + survey_from_xy(grid(130, 0), 7)
    fmap = build_fingerprint(survey, BS_LATLON)
    areas = fmap.areas_of(7)
    assert len(areas) == 2 and areas[0].centroid.r < areas[1].centroid.r
    assert not fmap.adjacent(areas[0].area_id, areas[1].area_id)


def test_wedge_map_structure(wedge):
    layout = WedgeLayout()
    assert len(wedge.areas) == 48 and wedge.beams() == set(range(48))
    for b in range(47):
        assert wedge.adjacent(wedge.areas_of(b)[0].area_id, wedge.areas_of(b + 1)[0].area_id)
    for pair in wedge.adjacency:
        assert len(pair) == 2
    ring, sector = layout.cell(0)
    assert (ring, sector) == (0, 0) and layout.index(1, 0) == 23


def test_every_survey_point_is_owned(wedge):
    shapes = {a.beam_idx: a.shape().buffer(1e-6) for a in wedge.areas}
    for s in survey_points()[::7]:
        p = FRAME.to_local(s.lat, s.lon)
        assert shapes[s.beam_idx].covers(Point(p.x, p.y))


def test_fingerprint_ignores_input_order(wedge):
    pts = survey_points()
    shuffled = [pts[i] for i in np.random.default_rng(3).permutation(len(pts))]
    assert build_fingerprint(shuffled, BS_LATLON).to_dict() == wedge.to_dict()


def test_insufficient_surveys():
    with pytest.raises(InsufficientSurvey):
        build_fingerprint([], BS_LATLON)
    with pytest.raises(InsufficientSurvey):
        build_fingerprint(survey_from_xy([(10, 0), (20, 0)], 0), BS_LATLON)
    with pytest.raises(InsufficientSurvey):
        build_fingerprint(survey_from_xy([(10, 0), (20, 0), (30, 0)], 0), BS_LATLON)


def test_map_json_round_trip(wedge, tmp_path):
    wedge.save(tmp_path / "m.json")
    back = FingerprintMap.load(tmp_path / "m.json")
    assert back.to_dict() == wedge.to_dict()
    with pytest.raises(ValueError):
        FingerprintMap.from_dict({"schema": "other"})


# ---- localization ---------------------------------------------------------------------------

def test_localize_on_x_axis():
    fmap = build_fingerprint(survey_from_xy(grid(14, 0, 3.0, 1.0), 0), BS_LATLON)
    p = localize_ssb_ra(0, TimingAdvance(2), fmap)
    assert p.x == pytest.approx(14.655) and p.y == pytest.approx(0.0, abs=1e-6) and not p.clamped
    origin = localize_ssb_ra(0, TimingAdvance(0), fmap)
    assert (origin.x, origin.y) == (0.0, 0.0)


def test_likelihood_picks_far_area():
    survey = survey_from_xy(grid(30, 0), 3, ta=4) + survey_from_xy(grid(93, 0), 3, ta=10)
    fmap = build_fingerprint(survey, BS_LATLON)
    far = localize_ssb_ra(3, TimingAdvance(10), fmap)
    assert far.x == pytest.approx(92.815) and far.area_id == fmap.areas_of(3)[1].area_id
    assert select_area(3, TimingAdvance(4), fmap).area_id == fmap.areas_of(3)[0].area_id


def test_tie_goes_to_area_nearest_the_annulus():
    survey = survey_from_xy(grid(30, 0), 3, ta=1) + survey_from_xy(grid(93, 0), 3, ta=1)
    fmap = build_fingerprint(survey, BS_LATLON)
    assert select_area(3, TimingAdvance(10), fmap).centroid.x == pytest.approx(93.0)


def test_clamping_and_errors():
    fmap = build_fingerprint(survey_from_xy(grid(50, 0), 0), BS_LATLON)
    p = localize_ssb_ra(0, TimingAdvance(30), fmap)
    assert p.clamped and p.x == pytest.approx(54.0)
    with pytest.raises(EmptyIntersection):
        localize_ssb_ra(0, TimingAdvance(30), fmap, strict=True)
    with pytest.raises(UnknownBeam):
        localize_ssb_ra(9, TimingAdvance(3), fmap)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 47), st.integers(1, 20))
def test_estimate_on_bisector_within_annulus(wedge, beam, ta):
    t = TimingAdvance(ta)
    p = localize_ssb_ra(beam, t, wedge)
    area = wedge.area(p.area_id)
    ux, uy = area.bisector
    assert abs(p.x * uy - p.y * ux) < 1e-9 and p.x * ux + p.y * uy >= 0
    lo, hi = ta_to_distance_range(t)
    assert p.clamped or lo - 1e-9 <= p.r <= hi + 1e-9


# ---- tracking -------------------------------------------------------------------------------

def test_single_beam_run(wedge):
    reports = [CsiReport(1, 5, -75.0)] * 100
    assert beam_to_path(reports, TrackerParams(), wedge) == [wedge.areas_of(5)[0].centroid]


def test_flicker_hand_trace(wedge):
    a5, a6 = wedge.areas_of(5)[0], wedge.areas_of(6)[0]
    assert beam_to_path_areas(flicker_trace(), TrackerParams(), wedge) == [a5, a6]
    path = beam_to_path(flicker_trace(), TrackerParams(), wedge)
    assert path == interpolate([a5.centroid, a6.centroid])
    assert all(a.dist(b) <= 1.0 + 1e-9 for a, b in zip(path, path[1:]))


def test_power_filter_outlier_example(wedge):
    clean = [CsiReport(1, 5, -75.0)] * 12 + [CsiReport(1, 6, -75.0)] * 12
    noisy = clean[:6] + [CsiReport(1, 5, -105.0)] + clean[6:]
    assert beam_to_path(noisy, TrackerParams(), wedge) == beam_to_path(clean, TrackerParams(), wedge)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 47), st.integers(1, 12)), min_size=1, max_size=8),
       st.lists(st.tuples(st.integers(0, 200), st.integers(0, 63), st.sampled_from([-100.0, -50.0])), max_size=10))
def test_power_filter_insertion_invariance(wedge, runs, inserts):
    params = TrackerParams(rsrp_base=-75.0)
    base = [CsiReport(1, b, -75.0) for b, n in runs for _ in range(n)]
    noisy = list(base)
    for pos, beam, rsrp in inserts:
        noisy.insert(pos % (len(noisy) + 1), CsiReport(1, beam, rsrp))
    assert beam_to_path_areas(noisy, params, wedge) == beam_to_path_areas(base, params, wedge)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 47), st.integers(1, 12)), min_size=1, max_size=10))
def test_appended_areas_are_adjacent(wedge, runs):
    reports = [CsiReport(1, b, -75.0) for b, n in runs for _ in range(n)]
    areas = beam_to_path_areas(reports, TrackerParams(), wedge)
    assert all(wedge.adjacent(a.area_id, b.area_id) for a, b in zip(areas, areas[1:]))


def test_count_persists_across_non_adjacent_runs(wedge):
    # beam 40 is far from beam 5, so its run is rejected but count keeps growing
    reports = [CsiReport(1, 5, -75.0)] * 5 + [CsiReport(1, 40, -75.0)] * 5 + [CsiReport(1, 6, -75.0)] * 2
    areas = beam_to_path_areas(reports, TrackerParams(), wedge)
    assert [a.beam_idx for a in areas] == [5, 6]
    relaxed = beam_to_path_areas(reports * 1, TrackerParams(strict_literal=False, c_thres=1), wedge)
    assert 40 in [a.beam_idx for a in relaxed]


def test_tracker_errors(wedge):
    with pytest.raises(EmptyPath):
        beam_to_path([], TrackerParams(), wedge)
    with pytest.raises(EmptyPath):
        beam_to_path([CsiReport(1, 5, -75.0)] * 3, TrackerParams(), wedge)
    with pytest.raises(ValueError):
        beam_to_path_areas([CsiReport(1, 5, -75.0), CsiReport(2, 5, -75.0)], TrackerParams(), wedge)
    with pytest.raises(ValueError):
        TrackerParams(p_thres=0)
    with pytest.raises(ValueError):
        TrackerParams(c_thres=0)


# ---- metrics ----------------------------------------------------------------------------------

def test_path_max_deviation_examples():
    line = [GeoPoint(0, 0), GeoPoint(100, 0)]
    assert path_max_deviation(line, line) == 0.0
    assert path_max_deviation([GeoPoint(x, 5.0) for x in range(0, 101, 10)], line) == pytest.approx(5.0)
    assert path_max_deviation([GeoPoint(40, 0)], line) == 0.0
    assert path_max_deviation([GeoPoint(3, 4)], [GeoPoint(0, 0)]) == pytest.approx(5.0)


def test_ecdf():
    f = error_ecdf([5, 15, 25])
    assert f(20) == pytest.approx(2 / 3) and f(4.9) == 0.0 and f(25) == 1.0 and f(15) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        error_ecdf([])


# ---- files ----------------------------------------------------------------------------------------

def test_survey_and_csi_round_trip(tmp_path):
    pts = survey_points()[:20]
    write_survey(tmp_path / "s.csv", pts)
    back = read_survey(tmp_path / "s.csv")
    assert [(p.beam_idx, p.ta, p.rsrp_dbm) for p in back] == [(p.beam_idx, p.ta, p.rsrp_dbm) for p in pts]
    assert all(abs(a.lat - b.lat) < 1e-8 for a, b in zip(back, pts))
    reports = flicker_trace()
    write_csi_log(tmp_path / "c.csv", reversed(reports))
    assert read_csi_log(tmp_path / "c.csv") == reports
    assert read_csi_log(tmp_path / "c.csv", rnti=7) == []


def test_bad_logs(tmp_path):
    (tmp_path / "a.csv").write_text("lat,lon,beam\n1,2,3\n")
    with pytest.raises(LogFormatError):
        read_survey(tmp_path / "a.csv")
    (tmp_path / "b.csv").write_text("t_ms,beam_idx,ta\n0,x,1\n")
    with pytest.raises(LogFormatError):
        read_ra_log(tmp_path / "b.csv")
    (tmp_path / "c.csv").write_text("t_ms,rnti,beam_idx,rsrp_dbm\n0,1,2,-10\n")
    with pytest.raises(LogFormatError):
        read_csi_log(tmp_path / "c.csv")


def test_geojson_shapes():
    line = path_geojson([GeoPoint(0, 0), GeoPoint(10, 0)], FRAME, {"k": 1})
    assert line["geometry"]["type"] == "LineString" and line["properties"] == {"k": 1}
    assert path_geojson([GeoPoint(1, 1)], FRAME)["geometry"]["type"] == "Point"
    json.dumps(line)


def test_bundled_data_matches_generator(tmp_path):
    write_bundled(tmp_path)
    data = resources.files("lowlayer.data")
    for name in ("wedge_survey.csv", "flicker_csi.csv", "wedge_ra.csv", "wedge_ra_truth.csv"):
        with resources.as_file(data / name) as shipped:
            assert filecmp.cmp(shipped, tmp_path / name, shallow=False), name
