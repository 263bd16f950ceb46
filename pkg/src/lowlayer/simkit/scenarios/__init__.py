"""Bundled scenario documents."""
from __future__ import annotations

import json
from importlib import resources

ATTACK_SCENARIOS = (
    "fig8_po_amplification",
    "ra_blocking_po",
    "induced_jamming",
    "harq_dai",
    "scell_deactivation",
    "scell_activation_drain",
    "bwp_switch",
    "bfr_spoof",
    "sr_keepalive",
)


def bundled_scenarios() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir() if p.name.endswith(".json"))


def scenario_path(name: str):
    return resources.files(__name__) / f"{name}.json"


def load_bundled_doc(name: str) -> dict:
    return json.loads(scenario_path(name).read_text(encoding="utf-8"))


def load_bundled(name: str):
    from ..config import config_from_dict
    return config_from_dict(load_bundled_doc(name))
