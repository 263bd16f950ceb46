"""Passive localization and tracking from RA and CSI leakage."""
from .fingerprint import (BeamArea, FingerprintMap, GeoPoint, InsufficientSurvey, LocalFrame, SurveyPoint,
                          build_fingerprint)
from .localize import EmptyIntersection, LocatedPoint, UnknownBeam, localize_ssb_ra, select_area
from .metrics import error_ecdf, path_max_deviation, path_mean_error
from .ta import TA_MAX, TimingAdvance, distance_to_ta, physical_step_m, ta_step_m, ta_to_distance_range
from .tracking import EmptyPath, TrackerParams, beam_to_path, beam_to_path_areas

__all__ = [
    "BeamArea", "EmptyIntersection", "EmptyPath", "FingerprintMap", "GeoPoint", "InsufficientSurvey",
    "LocalFrame", "LocatedPoint", "SurveyPoint", "TA_MAX", "TimingAdvance", "TrackerParams", "UnknownBeam",
    "beam_to_path", "beam_to_path_areas", "build_fingerprint", "distance_to_ta", "error_ecdf",
    "localize_ssb_ra", "path_max_deviation", "path_mean_error", "physical_step_m", "select_area",
    "ta_step_m", "ta_to_distance_range",
]
