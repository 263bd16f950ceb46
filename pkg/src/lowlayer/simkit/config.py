"""Scenario configuration: dataclasses plus the JSON document format.

Document layout (times in milliseconds unless the key says otherwise)::

    {
      "name": "...", "seed": 1, "duration_ms": 10000, "mitigation_enabled": false,
      "preset": "MNO-A1",                      # optional, cell defaults from presets
      "cell": {...CellSpec fields..., "sib": {...SibRaConfig fields...}},
      "ues": [{...UeSpec fields...}],
      "attacker": {"tx_power_dbm": 10, "path_loss_db": 90 | {"<rnti>": 90},
                   "path_loss_to_bs_db": 90, "omniscient": true,
                   "actions": [{"at_ms": 1000, "kind": "InjectDci", "dci": {...}}, ...]}
    }

Action kinds: InjectDci (``dci``), InjectMacCe (``target``, ``element``),
OvershadowSib (``sib``), InjectPaging, SpoofSr (``target``) and RepeatEvery
(``period_slots``, ``until_ms``, ``inner``).  Each may carry ``tx_power_dbm``.
"""
from __future__ import annotations

import copy
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..attacker import (AttackAction, InjectDci, InjectMacCe, InjectPaging, OvershadowSib,
                        RepeatEvery, SpoofSr)
from ..channel import sinr_for_rate
from ..codec import mac
from ..codec.dci import DciKind, DciMessage
from ..codec.sib import SibRaConfig
from ..core import CellConfig, Direction, ResourceAllocation
from ..procedures.ue import Traffic

# SINR at which 50 RBs (two 5 MHz carriers) carry 10.5 Mbit/s
CALIBRATED_SINR_DB = sinr_for_rate(10.5, 50)


class ConfigInvalid(ValueError):
    pass


@dataclass
class CellSpec:
    bandwidth_rb: int = 50
    mu: int = 0
    sib: SibRaConfig = field(default_factory=SibRaConfig)
    scell_count: int = 0
    scell_rb: int | None = None
    scell_deactivation_timer_ms: float | None = None  # None = infinity
    csi_period_ms: float = 20.0
    noise_dbm: float = -100.0
    bs_tx_power_dbm: float = 0.0
    sensitivity_dbm: float = -110.0
    capture_margin_db: float = 3.0
    overhead_factor: float = 0.7
    max_spectral_efficiency: float = 7.4
    rb_bandwidth_hz: float = 180e3
    rar_rtt_ms: float = 7.0
    rar_rtt_jitter_ms: float = 0.0
    prach_period_sf: int = 10
    ra_retry_gap_sf: int = 2
    rar_rb: int = 4
    ra_context_rb: int = 45
    ra_context_slots: int = 10
    max_rar_per_subframe: int = 8
    harq_group_slots: int = 4
    rlf_timeout_ms: float = 2000.0
    inactivity_timeout_ms: float | None = None
    sib_period_ms: float = 20.0
    reconnect_after_ms: float | None = None
    ul_k2: int = 4
    sr_grant_rb: int = 8
    padding_onset_jitter_ms: float = 0.0
    pdsch_erasure_tolerance: float = 0.1
    base_current: float = 1.0

    def radio(self) -> CellConfig:
        return CellConfig(bandwidth_rb=self.bandwidth_rb, mu=self.mu, rb_bandwidth_hz=self.rb_bandwidth_hz,
                          noise_dbm=self.noise_dbm, overhead_factor=self.overhead_factor,
                          max_spectral_efficiency=self.max_spectral_efficiency,
                          sensitivity_dbm=self.sensitivity_dbm, capture_margin_db=self.capture_margin_db)

    def calibrated_path_loss(self) -> float:
        return self.bs_tx_power_dbm - self.noise_dbm - CALIBRATED_SINR_DB


@dataclass
class UeSpec:
    rnti: int
    distance_m: float = 100.0
    path_loss_db: float | None = None  # None = calibrated link
    traffic: Traffic = Traffic.FULL_BUFFER_DL
    tx_power_dbm: float = 0.0
    beam_idx: int = 0
    scells_active: tuple = ()


@dataclass
class AttackerSpec:
    tx_power_dbm: float = 10.0
    path_loss_db: dict = field(default_factory=dict)
    default_path_loss_db: float = 90.0
    path_loss_to_bs_db: float = 90.0
    omniscient: bool = True
    actions: list = field(default_factory=list)


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    seed: int = 1
    duration_ms: float = 10000.0
    mitigation_enabled: bool = False
    cell: CellSpec = field(default_factory=CellSpec)
    ues: list = field(default_factory=list)
    attacker: AttackerSpec | None = None

    def validate(self) -> "ScenarioConfig":
        if not self.duration_ms > 0:
            raise ConfigInvalid("duration_ms must be positive")
        rntis = [u.rnti for u in self.ues]
        if len(set(rntis)) != len(rntis):
            raise ConfigInvalid("RNTIs must be unique")
        for u in self.ues:
            if not 1 <= u.rnti <= 0xFFEF:
                raise ConfigInvalid(f"RNTI {u.rnti} outside the C-RNTI range")
            if any(not 1 <= i <= self.cell.scell_count for i in u.scells_active):
                raise ConfigInvalid(f"UE {u.rnti} activates an unconfigured SCell")
        c = self.cell
        if c.bandwidth_rb < 1 or not 0 <= c.mu <= 4 or c.scell_count > 7:
            raise ConfigInvalid("invalid cell dimensions")
        if c.harq_group_slots < 1 or c.harq_group_slots + 2 > 7:
            raise ConfigInvalid("harq_group_slots must be in 1..5 so k1 fits 3 bits")
        return self

    def without_attacks(self) -> "ScenarioConfig":
        cfg = copy.deepcopy(self)
        if cfg.attacker is not None:
            cfg.attacker.actions = []
        return cfg


# ---- JSON --------------------------------------------------------------------

def _pick(cls, data: dict, where: str, **conv):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigInvalid(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for k, v in data.items():
        kwargs[k] = conv[k](v) if k in conv else v
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigInvalid(f"{where}: {e}") from e


def sib_from_dict(d: dict) -> SibRaConfig:
    return _pick(SibRaConfig, d, "sib")


def dci_from_dict(d: dict, bandwidth_rb: int) -> DciMessage:
    d = dict(d)
    try:
        kind = DciKind(d.pop("kind"))
        rnti = int(d.pop("rnti"))
    except (KeyError, ValueError) as e:
        raise ConfigInvalid(f"dci: {e}") from e
    alloc = None
    if kind is not DciKind.PDCCH_ORDER:
        direction = Direction.UL if kind is DciKind.UL_GRANT else Direction.DL
        alloc = ResourceAllocation(int(d.pop("start_rb", 0)), int(d.pop("num_rb", bandwidth_rb)), direction)
    msg = _pick(DciMessage, {"rnti": rnti, "kind": kind, "alloc": alloc, **d}, "dci")
    return msg


def dci_to_dict(m: DciMessage) -> dict:
    out = {"kind": m.kind.value, "rnti": m.rnti}
    default = DciMessage(0, m.kind)
    for f in dataclasses.fields(DciMessage):
        if f.name in ("rnti", "kind", "alloc"):
            continue
        v = getattr(m, f.name)
        if v != getattr(default, f.name):
            out[f.name] = v
    if m.alloc is not None:
        out["start_rb"], out["num_rb"] = m.alloc.start_rb, m.alloc.num_rb
    return out


_CE_TYPES = {cls.__name__: cls for cls in (mac.ScellActDeact, mac.TimingAdvanceCmd, mac.SpSrsActDeact,
                                           mac.CsiReportingActDeact, mac.BeamFailureRecovery,
                                           mac.RecommendedBitRate)}


def element_from_dict(d: dict):
    d = dict(d)
    name = d.pop("type", None)
    if name not in _CE_TYPES:
        raise ConfigInvalid(f"unknown MAC CE type {name!r}")
    return _pick(_CE_TYPES[name], d, name)


def element_to_dict(el) -> dict:
    return {"type": type(el).__name__, **dataclasses.asdict(el)}


def _slot(ms: float, mu: int) -> int:
    return int(round(ms * (1 << mu)))


def primitive_from_dict(d: dict, cell: CellSpec):
    d = dict(d)
    kind = d.pop("kind", None)
    p = d.pop("tx_power_dbm", None)
    try:
        if kind == "InjectDci":
            return InjectDci(dci_from_dict(d.pop("dci"), cell.bandwidth_rb), p)
        if kind == "InjectMacCe":
            return InjectMacCe(int(d.pop("target")), element_from_dict(d.pop("element")), p)
        if kind == "OvershadowSib":
            return OvershadowSib(sib_from_dict(d.pop("sib")), p)
        if kind == "InjectPaging":
            return InjectPaging(p)
        if kind == "SpoofSr":
            return SpoofSr(int(d.pop("target")))
    except KeyError as e:
        raise ConfigInvalid(f"{kind}: missing {e}") from e
    raise ConfigInvalid(f"unknown action kind {kind!r}")


def action_from_dict(d: dict, cell: CellSpec) -> AttackAction:
    d = dict(d)
    try:
        at = _slot(float(d.pop("at_ms")), cell.mu)
    except KeyError:
        raise ConfigInvalid("action needs at_ms") from None
    if d.get("kind") == "RepeatEvery":
        try:
            inner = primitive_from_dict(d["inner"], cell)
            rep = RepeatEvery(int(d["period_slots"]), inner, _slot(float(d.get("until_ms", math.inf)), cell.mu)
                              if math.isfinite(float(d.get("until_ms", math.inf))) else 2**62)
        except (KeyError, ValueError) as e:
            raise ConfigInvalid(f"RepeatEvery: {e}") from e
        return AttackAction(at, rep)
    return AttackAction(at, primitive_from_dict(d, cell))


def primitive_to_dict(p, mu: int) -> dict:
    if isinstance(p, InjectDci):
        out = {"kind": "InjectDci", "dci": dci_to_dict(p.dci)}
    elif isinstance(p, InjectMacCe):
        out = {"kind": "InjectMacCe", "target": p.target, "element": element_to_dict(p.element)}
    elif isinstance(p, OvershadowSib):
        out = {"kind": "OvershadowSib", "sib": dataclasses.asdict(p.config)}
    elif isinstance(p, InjectPaging):
        out = {"kind": "InjectPaging"}
    elif isinstance(p, SpoofSr):
        out = {"kind": "SpoofSr", "target": p.target}
    else:
        raise TypeError(p)
    if getattr(p, "tx_power_dbm", None) is not None:
        out["tx_power_dbm"] = p.tx_power_dbm
    return out


def action_to_dict(a: AttackAction, mu: int) -> dict:
    scale = 1 << mu
    if isinstance(a.kind, RepeatEvery):
        out = {"at_ms": a.at / scale, "kind": "RepeatEvery", "period_slots": a.kind.period_slots,
               "inner": primitive_to_dict(a.kind.inner, mu)}
        if a.kind.until < 2**62:
            out["until_ms"] = a.kind.until / scale
        return out
    return {"at_ms": a.at / scale, **primitive_to_dict(a.kind, mu)}


def config_from_dict(doc: dict) -> ScenarioConfig:
    from .presets import PRESETS
    if not isinstance(doc, dict):
        raise ConfigInvalid("scenario must be a JSON object")
    doc = copy.deepcopy(doc)
    cell_doc = {}
    preset = doc.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigInvalid(f"unknown preset {preset!r}")
        cell_doc.update(copy.deepcopy(PRESETS[preset]))
    user_cell = doc.pop("cell", {}) or {}
    if "sib" in user_cell and "sib" in cell_doc:
        cell_doc["sib"] = {**cell_doc["sib"], **user_cell.pop("sib")}
    cell_doc.update(user_cell)
    cell = _pick(CellSpec, cell_doc, "cell", sib=sib_from_dict)
    ues = []
    for u in doc.pop("ues", []):
        conv = {"traffic": lambda v: Traffic(v), "scells_active": tuple}
        try:
            ues.append(_pick(UeSpec, u, "ue", **conv))
        except ValueError as e:
            raise ConfigInvalid(str(e)) from e
    att = None
    att_doc = doc.pop("attacker", None)
    if att_doc is not None:
        att_doc = dict(att_doc)
        actions = [action_from_dict(a, cell) for a in att_doc.pop("actions", [])]
        pl = att_doc.pop("path_loss_db", {})
        if isinstance(pl, (int, float)):
            att_doc["default_path_loss_db"] = float(pl)
            pl = {}
        att = _pick(AttackerSpec, att_doc, "attacker")
        att.path_loss_db = {int(k): float(v) for k, v in pl.items()}
        att.actions = actions
    cfg = _pick(ScenarioConfig, {**doc, "cell": cell, "ues": ues, "attacker": att}, "scenario")
    return cfg.validate()


def config_to_dict(cfg: ScenarioConfig) -> dict:
    cell = dataclasses.asdict(cfg.cell)
    out = {"name": cfg.name, "seed": cfg.seed, "duration_ms": cfg.duration_ms,
           "mitigation_enabled": cfg.mitigation_enabled, "cell": cell,
           "ues": [{**dataclasses.asdict(u), "traffic": u.traffic.value, "scells_active": list(u.scells_active)}
                   for u in cfg.ues]}
    if cfg.attacker is not None:
        a = cfg.attacker
        out["attacker"] = {"tx_power_dbm": a.tx_power_dbm,
                           "path_loss_db": {str(k): v for k, v in sorted(a.path_loss_db.items())},
                           "default_path_loss_db": a.default_path_loss_db,
                           "path_loss_to_bs_db": a.path_loss_to_bs_db, "omniscient": a.omniscient,
                           "actions": [action_to_dict(x, cfg.cell.mu) for x in a.actions]}
    return out


def load_config(path) -> ScenarioConfig:
    """Raises OSError for unreadable files and ConfigInvalid for bad content."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigInvalid(f"{path}: {e}") from e
    return config_from_dict(doc)
