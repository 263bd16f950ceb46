"""Operator profiles observed in the field, used as cell defaults.

Every profile leaves the SCell deactivation timer unset (infinite) and uses a
10-subframe RAR window; they differ in carrier count and preambleTransMax.
``NCA`` aggregated carriers means one PCell plus ``N-1`` SCells.
"""
from __future__ import annotations

_PROFILES = {
    # name: (aggregated carriers, preambleTransMax)
    "MNO-A1": (3, 10),
    "MNO-A2": (4, 5),
    "MNO-A3": (5, 10),
    "MNO-B1": (3, 10),
    "MNO-B2": (3, 10),
    "MNO-C1": (3, 10),
}

PRESETS = {
    name: {
        "scell_count": ca - 1,
        "scell_deactivation_timer_ms": None,
        "sib": {"ra_response_window_sf": 10, "preamble_trans_max": trans_max},
    }
    for name, (ca, trans_max) in _PROFILES.items()
}
