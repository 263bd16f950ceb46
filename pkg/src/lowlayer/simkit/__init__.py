from .config import (CALIBRATED_SINR_DB, AttackerSpec, CellSpec, ConfigInvalid, ScenarioConfig, UeSpec,
                     config_from_dict, config_to_dict, load_config)
from .engine import Engine, run
from .presets import PRESETS
from .report import IoFailure, MetricsReport, ecdf, ecdf_table, emit_report
from .scenarios import bundled_scenarios, load_bundled

__all__ = [
    "CALIBRATED_SINR_DB",
    "AttackerSpec",
    "CellSpec",
    "ConfigInvalid",
    "ScenarioConfig",
    "UeSpec",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "Engine",
    "run",
    "PRESETS",
    "IoFailure",
    "MetricsReport",
    "ecdf",
    "ecdf_table",
    "emit_report",
    "bundled_scenarios",
    "load_bundled",
]
