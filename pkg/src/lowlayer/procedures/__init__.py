from .bs import (BsState, BsUeContext, UnknownRnti, bs_on_ack_bitmap, bs_on_bfr,
                 bs_on_missing_feedback, bs_on_sr, inactive_rntis)
from .harq import BsHarq, FeedbackResult, HarqEntry, HarqTracker
from .ra import (RachOverload, Rar, RaEvent, RaPhase, RaResponder, RaState, RaTiming,
                 bs_on_preamble, ra_start, ra_tick, ue_on_msg4, ue_on_rar)
from .ue import (CsiMode, CsiSchedule, StartedRa, Traffic, UeState, UlTransmission, apply_mac_ce,
                 apply_tpc, energy_tick, harq_on_assignment, scell_activity, scell_tick, ue_on_dci)

__all__ = [
    "BsState",
    "BsUeContext",
    "UnknownRnti",
    "bs_on_ack_bitmap",
    "bs_on_bfr",
    "bs_on_missing_feedback",
    "bs_on_sr",
    "inactive_rntis",
    "BsHarq",
    "FeedbackResult",
    "HarqEntry",
    "HarqTracker",
    "RachOverload",
    "Rar",
    "RaEvent",
    "RaPhase",
    "RaResponder",
    "RaState",
    "RaTiming",
    "bs_on_preamble",
    "ra_start",
    "ra_tick",
    "ue_on_msg4",
    "ue_on_rar",
    "CsiMode",
    "CsiSchedule",
    "StartedRa",
    "Traffic",
    "UeState",
    "UlTransmission",
    "apply_mac_ce",
    "apply_tpc",
    "energy_tick",
    "harq_on_assignment",
    "scell_activity",
    "scell_tick",
    "ue_on_dci",
]
