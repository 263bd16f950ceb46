"""Scripted adversary: timed injection primitives and a passive sniffer.

Trigger times are absolute slot counters from simulation start.  A
``RepeatEvery`` wraps exactly one primitive and expands to one injection per
period until (excluding) its ``until`` slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .channel import decode_outcome, DecodeOutcome
from .codec.dci import DciMessage, NoMatch, decode_dci, unmask_rnti
from .codec.sib import SibRaConfig
from .codec.uci import CsiReport, decode_uci
from .core import REFERENCE_CELL, CellConfig


@dataclass(frozen=True)
class InjectDci:
    dci: DciMessage
    tx_power_dbm: float | None = None


@dataclass(frozen=True)
class InjectMacCe:
    target: int
    element: object
    tx_power_dbm: float | None = None


@dataclass(frozen=True)
class OvershadowSib:
    config: SibRaConfig
    tx_power_dbm: float | None = None


@dataclass(frozen=True)
class InjectPaging:
    tx_power_dbm: float | None = None


@dataclass(frozen=True)
class SpoofSr:
    target: int


Primitive = Union[InjectDci, InjectMacCe, OvershadowSib, InjectPaging, SpoofSr]


@dataclass(frozen=True)
class RepeatEvery:
    period_slots: int
    inner: Primitive
    until: int

    def __post_init__(self):
        if isinstance(self.inner, RepeatEvery):
            raise ValueError("RepeatEvery cannot be nested")
        if self.period_slots < 1:
            raise ValueError("period must be at least one slot")


@dataclass(frozen=True)
class AttackAction:
    at: int
    kind: Union[Primitive, RepeatEvery]


@dataclass(frozen=True)
class Injection:
    action_id: int
    slot: int
    primitive: Primitive


def expand_actions(actions, horizon_slots: int) -> dict[int, list[Injection]]:
    """Per-slot injection schedule, in action order within a slot."""
    out: dict[int, list[Injection]] = {}
    for aid, a in enumerate(actions):
        if isinstance(a.kind, RepeatEvery):
            stop = min(a.kind.until, horizon_slots)
            slots = range(a.at, stop, a.kind.period_slots)
            prim = a.kind.inner
        else:
            slots = [a.at] if a.at < horizon_slots else []
            prim = a.kind
        for s in slots:
            out.setdefault(s, []).append(Injection(aid, s, prim))
    return out


@dataclass
class SnifferView:
    observed_rntis: set = field(default_factory=set)
    observed_dcis: list = field(default_factory=list)
    observed_csi_reports: list = field(default_factory=list)
    observed_ra_exchanges: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "observed_rntis": sorted(self.observed_rntis),
            "dci_count": len(self.observed_dcis),
            "csi_count": len(self.observed_csi_reports),
            "ra_count": len(self.observed_ra_exchanges),
        }


@dataclass
class Attacker:
    """Injection schedule plus link budget.  ``omniscient`` attackers know every
    RNTI in the scenario; otherwise candidates come from the sniffer."""

    actions: list = field(default_factory=list)
    tx_power_dbm: float = 10.0
    path_loss_db: dict = field(default_factory=dict)   # rnti -> dB
    default_path_loss_db: float = 90.0
    path_loss_to_bs_db: float = 90.0
    omniscient: bool = True
    known_rntis: frozenset = frozenset()
    cell: CellConfig = REFERENCE_CELL
    view: SnifferView = field(default_factory=SnifferView)

    def rx_at_ue(self, rnti: int, tx_power_dbm: float | None = None) -> float:
        p = self.tx_power_dbm if tx_power_dbm is None else tx_power_dbm
        return p - self.path_loss_db.get(rnti, self.default_path_loss_db)

    def rx_at_bs(self, tx_power_dbm: float | None = None) -> float:
        p = self.tx_power_dbm if tx_power_dbm is None else tx_power_dbm
        return p - self.path_loss_to_bs_db

    def candidates(self) -> set:
        return set(self.known_rntis) if self.omniscient else set(self.view.observed_rntis)

    def _hears(self, rx_dbm: float) -> bool:
        return decode_outcome(rx_dbm, None, True, self.cell) is DecodeOutcome.LEGIT

    def sniff_pdcch(self, t_ms: float, bits: str, rx_dbm: float, bandwidth_rb: int) -> DciMessage | None:
        if not self._hears(rx_dbm):
            return None
        cands = self.candidates()
        if not self.omniscient:
            cands.add(unmask_rnti(bits))
        try:
            d = decode_dci(bits, cands, bandwidth_rb)
        except NoMatch:
            return None
        self.view.observed_rntis.add(d.rnti)
        self.view.observed_dcis.append((t_ms, d.rnti, d.kind.value))
        return d

    def sniff_pucch(self, t_ms: float, bits: str, rx_dbm: float) -> None:
        if not self._hears(rx_dbm):
            return
        try:
            rnti, rec = decode_uci(bits, self.candidates())
        except NoMatch:
            return
        if isinstance(rec, CsiReport):
            self.view.observed_csi_reports.append((t_ms, rnti, rec.beam_idx, rec.rsrp_dbm))

    def sniff_ra(self, t_ms: float, beam_idx: int, ta: int, rx_dbm: float) -> None:
        # preamble occasion and RAR carry no keyed payload
        if self._hears(rx_dbm):
            self.view.observed_ra_exchanges.append((t_ms, beam_idx, ta))


def sniff(engine) -> SnifferView:
    """The view an engine's attacker accumulated while the simulation ran."""
    return engine.attacker.view
