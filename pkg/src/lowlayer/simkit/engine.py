"""Slot-stepped simulation binding BS, UEs, attacker and channel.

Each slot runs the same phases in a fixed order: timed events, attacker
injections, SIB broadcast, BS scheduling, PDCCH/PDSCH delivery, PUSCH
reception, PUCCH, random access, UE timers and metrics.  Timed events sit in
one heap keyed by ``(slot, ordinal)``.  Every random draw comes from a
per-entity stream derived from the scenario seed, so adding or removing
attacker actions never shifts another entity's draws.

All control messages go through the real codecs.  With mitigation enabled the
legitimate PDCCH, PDSCH and PUCCH payloads are XORed with the keyed stream and
receivers undo it; the attacker does not hold the key, so its payloads come
out garbled and fail their CRC.
"""
from __future__ import annotations

import hashlib
import heapq
import hmac
import math
from dataclasses import dataclass, field

import numpy as np

from ..attacker import (Attacker, InjectDci, InjectMacCe, InjectPaging, OvershadowSib, SpoofSr,
                        expand_actions)
from ..channel import DecodeOutcome, decode_outcome, sinr, throughput_mbps
from ..codec.bits import attach_crc, bits_to_bytes, bytes_to_bits, crc16, split_crc
from ..codec.dci import DciKind, DciMessage, NoMatch, decode_dci, encode_dci
from ..codec.mac import BeamFailureRecovery, MacDecodeError, MacPdu, decode_mac_pdu, encode_mac_pdu
from ..codec.scrambling import MitigationKeyContext, scramble_keyed
from ..codec.sib import decode_sib_ra, encode_sib_ra
from ..codec.uci import (AckBitmap, CsiReport, SchedulingRequest, decode_tb, decode_uci, encode_ack,
                         encode_csi, encode_sr, encode_tb, RSRP_MAX_DBM, RSRP_MIN_DBM)
from ..core import Direction, ResourceAllocation, SlotTime
from ..geoloc.ta import distance_to_ta
from ..procedures.bs import BsState, bs_on_ack_bitmap, bs_on_bfr, bs_on_missing_feedback, bs_on_sr, inactive_rntis
from ..procedures.ra import RaEvent, RaPhase, RaResponder, RaTiming, ra_start, ra_tick, ue_on_msg4, ue_on_rar
from ..procedures.ue import (StartedRa, Traffic, UeState, UlTransmission, apply_mac_ce, energy_tick,
                             reconnected, scell_activity, scell_tick, ue_on_dci)
from .config import ScenarioConfig
from .report import MetricsReport, UeMetrics

P_RNTI = 0xFFFE
PAGING_PAYLOAD = "10" + "0" * 24
BS_STREAM = 1
UE_STREAM_BASE = 100
BUCKET_MS = 1000.0


@dataclass(order=True)
class _Timed:
    slot: int
    ordinal: int
    kind: str = field(compare=False)
    payload: object = field(compare=False, default=None)


@dataclass
class _UeRun:
    """Per-UE bookkeeping that is not protocol state."""

    path_loss_db: float
    bits: np.ndarray
    padding_bits: np.ndarray
    energy: np.ndarray
    ra_attempts: int = 0
    ra_outcomes: list = field(default_factory=list)
    rlf_ms: float | None = None
    released_ms: float | None = None
    initial_access: bool = False
    waiting_sib: bool = False
    slot_bits: float = 0.0


class Engine:
    def __init__(self, cfg: ScenarioConfig):
        cfg.validate()
        self.cfg = cfg
        c = cfg.cell
        self.radio = c.radio()
        self.mu = c.mu
        self.spsf = 1 << c.mu
        self.slot_ms = 1.0 / self.spsf
        self.horizon = int(math.ceil(cfg.duration_ms / self.slot_ms))
        self.n_buckets = int(math.ceil(cfg.duration_ms / BUCKET_MS))
        self.slots_per_bucket = int(round(BUCKET_MS / self.slot_ms))
        self.timing = RaTiming(c.prach_period_sf, c.ra_retry_gap_sf, mu=c.mu)
        self.bs_rng = np.random.default_rng([cfg.seed, BS_STREAM])
        self.scell_timer_slots = (math.inf if c.scell_deactivation_timer_ms is None
                                  else int(round(c.scell_deactivation_timer_ms / self.slot_ms)))
        self.scell_rb = c.scell_rb or c.bandwidth_rb
        self.bs = BsState(
            responder=RaResponder(int(round(c.rar_rtt_ms / self.slot_ms)), self.timing.msg3_delay_sf * self.spsf,
                                  c.max_rar_per_subframe),
            rlf_slots=int(round(c.rlf_timeout_ms / self.slot_ms)),
            inactivity_slots=(None if c.inactivity_timeout_ms is None
                              else int(round(c.inactivity_timeout_ms / self.slot_ms))),
            sr_grant_rb=c.sr_grant_rb, ul_k2=c.ul_k2, bandwidth_rb=c.bandwidth_rb, rar_rtt_ms=c.rar_rtt_ms)

        self.ues: dict[int, UeState] = {}
        self.run_of: dict[int, _UeRun] = {}
        self.ue_rng: dict[int, np.random.Generator] = {}
        self.order: list[int] = []
        for i, u in enumerate(cfg.ues):
            rng = np.random.default_rng([cfg.seed, UE_STREAM_BASE + i])
            self.ue_rng[u.rnti] = rng
            true_ta = distance_to_ta(u.distance_m, c.mu)
            ue = UeState(rnti=u.rnti, traffic=u.traffic, configured_scells=c.scell_count,
                         scell_timer_slots=self.scell_timer_slots, serving_beam_idx=u.beam_idx,
                         true_ta=true_ta, ta_value=true_ta, tx_power_dbm=u.tx_power_dbm, sib=c.sib)
            ue.csi_schedule.period_ms = c.csi_period_ms
            ue.scells = {s: self.scell_timer_slots for s in u.scells_active}
            ue.padding_delay_slots = int(rng.uniform(0.0, c.padding_onset_jitter_ms) / self.slot_ms)
            self.ues[u.rnti] = ue
            pl = c.calibrated_path_loss() if u.path_loss_db is None else u.path_loss_db
            zeros = lambda: np.zeros(self.n_buckets)  # noqa: E731
            self.run_of[u.rnti] = _UeRun(pl, zeros(), zeros(), zeros())
            self.order.append(u.rnti)
            self.bs.admit(u.rnti, 0, u.beam_idx, u.scells_active)

        self.attacker = None
        self.schedule = {}
        if cfg.attacker is not None:
            a = cfg.attacker
            self.attacker = Attacker(list(a.actions), a.tx_power_dbm, dict(a.path_loss_db), a.default_path_loss_db,
                                     a.path_loss_to_bs_db, a.omniscient, frozenset(self.order), self.radio)
            self.schedule = expand_actions(a.actions, self.horizon)

        root = hashlib.sha256(f"K_PHY/{cfg.seed}".encode()).digest()
        self.keys = {r: hmac.new(root, r.to_bytes(2, "big"), hashlib.sha256).digest() for r in self.order}

        self.heap: list[_Timed] = []
        self._ordinal = 0
        self.dl_reserved: dict[int, int] = {}
        self.ul_reserved: dict[int, int] = {}
        self.ul_pending: dict[int, list] = {}
        self.spoof_sib: dict[int, tuple] = {}
        self.pdsch_spoof: dict[int, list] = {}
        self.rach_load = np.zeros(self.n_buckets)
        self.rar_emissions = np.zeros(self.n_buckets)
        self.max_dl_rb = 0
        self.max_ul_rb = 0
        self.conservation_ok = True
        self.events: list = []
        self.now = 0

    # ---- helpers -------------------------------------------------------------

    def _push(self, slot: int, kind: str, payload=None) -> None:
        self._ordinal += 1
        heapq.heappush(self.heap, _Timed(slot, self._ordinal, kind, payload))

    def _log(self, kind: str, **detail) -> None:
        self.events.append({"t_ms": self.now * self.slot_ms, "event": kind, **detail})

    def _bucket(self, slot: int) -> int:
        return min(slot // self.slots_per_bucket, self.n_buckets - 1)

    def _slot_time(self, n: int) -> SlotTime:
        return SlotTime.from_index(n, self.mu)

    def _key_ctx(self, rnti: int, n: int, start_rb: int) -> MitigationKeyContext:
        t = self._slot_time(n)
        return MitigationKeyContext(self.keys.get(rnti, b"\0" * 32), t.sfn, t.subframe, start_rb)

    def _protect(self, bits: str, rnti: int, n: int, start_rb: int = 0) -> str:
        if not self.cfg.mitigation_enabled:
            return bits
        return scramble_keyed(bits, self._key_ctx(rnti, n, start_rb))

    def _dl_rx(self, rnti: int) -> float:
        return self.cfg.cell.bs_tx_power_dbm - self.run_of[rnti].path_loss_db

    def _tb_bits(self, num_rb: int, sinr_db: float) -> float:
        return throughput_mbps(num_rb, sinr_db, self.radio) * 1e6 * self.slot_ms / 1000.0

    def _reserve(self, table: dict, slot: int, rb: int) -> int:
        used = table.get(slot, 0)
        got = max(0, min(rb, self.cfg.cell.bandwidth_rb - used))
        table[slot] = used + got
        return got

    def _feedback_slot(self, n: int) -> int:
        p = self.cfg.cell.harq_group_slots
        return (n // p + 1) * p + 2

    def _is_feedback_slot(self, n: int) -> bool:
        p = self.cfg.cell.harq_group_slots
        return n >= p + 2 and (n - 2) % p == 0

    # ---- main loop -----------------------------------------------------------

    def run(self) -> MetricsReport:
        for n in range(self.horizon):
            self.step(n)
        return self.report()

    def step(self, n: int) -> None:
        self.now = n
        for r in self.order:
            self.run_of[r].slot_bits = 0.0
        self._timed_events(n)
        pdcch_spoof, pucch_spoof = self._attacker_phase(n)
        self._sib_occasion(n)
        dl_dcis = self._schedule_dl(n)
        ul_dcis = self._schedule_ul(n)
        self._deliver_pdcch(n, dl_dcis + ul_dcis, pdcch_spoof)
        self._receive_pusch(n)
        self._pucch(n, pucch_spoof)
        self._random_access(n)
        self._timers(n)

    # ---- phases ----------------------------------------------------------------

    def _timed_events(self, n: int) -> None:
        while self.heap and self.heap[0].slot <= n:
            ev = heapq.heappop(self.heap)
            if ev.kind == "rar":
                self._on_rar(n, ev.payload)
            elif ev.kind == "msg4":
                self._on_msg4(n, ev.payload)
            elif ev.kind == "reconnect":
                rnti = ev.payload
                self.run_of[rnti].waiting_sib = True
                self._log("reconnect_attempt", rnti=rnti)

    def _on_rar(self, n: int, rars) -> None:
        for rnti in self.order:
            ue = self.ues[rnti]
            if ue.ra.phase is not RaPhase.WAITING_RAR:
                continue
            for rar in rars:
                _, ev = ue_on_rar(ue, rar, n, self.timing)
                if ev is RaEvent.DONE:
                    self._ra_done(rnti, n)
                elif ev is RaEvent.MSG3:
                    self.bs.responder.on_msg3(rar, rnti)
                    self._push(rar.msg3_slot + self.timing.msg4_delay_sf * self.spsf, "msg4", rar)
                if ev is not None:
                    break

    def _on_msg4(self, n: int, rar) -> None:
        winner = self.bs.responder.resolve(rar)
        if winner is None:
            return
        for rnti in self.order:
            ue = self.ues[rnti]
            if ue.ra.phase is RaPhase.WAITING_MSG4 and ue.ra.preamble == rar.preamble:
                _, ev = ue_on_msg4(ue, rnti == winner, n, self.ue_rng[rnti], self.timing)
                if ev is RaEvent.DONE:
                    self._ra_done(rnti, n)
                elif ev is RaEvent.FAILED:
                    self._ra_failed(rnti, n)

    def _ra_done(self, rnti: int, n: int) -> None:
        run = self.run_of[rnti]
        ue = self.ues[rnti]
        run.ra_outcomes.append([n * self.slot_ms, "Done"])
        self._log("ra_done", rnti=rnti, attempts=ue.ra.attempt)
        if run.initial_access:
            run.initial_access = False
            reconnected(ue, rnti)
            self.bs.admit(rnti, n, ue.serving_beam_idx)

    def _ra_failed(self, rnti: int, n: int) -> None:
        run = self.run_of[rnti]
        run.ra_outcomes.append([n * self.slot_ms, "Failed"])
        run.initial_access = False
        self._log("ra_failed", rnti=rnti, attempts=self.ues[rnti].ra.attempt)
        self._ue_link_failure(rnti, n)

    def _ue_link_failure(self, rnti: int, n: int) -> None:
        ue = self.ues[rnti]
        run = self.run_of[rnti]
        ue.radio_link_failed = True
        ue.rnti = None
        ue.scells.clear()
        ue.harq.clear()
        if run.rlf_ms is None:
            run.rlf_ms = n * self.slot_ms
        delay = self.cfg.cell.reconnect_after_ms
        if delay is not None:
            self._push(n + int(round(delay / self.slot_ms)), "reconnect", rnti)

    def _sib_occasion(self, n: int) -> None:
        period = int(round(self.cfg.cell.sib_period_ms / self.slot_ms))
        if n % period:
            return
        spoof = self.spoof_sib.pop(n, None)
        bs_bits = encode_sib_ra(self.cfg.cell.sib)
        for rnti in self.order:
            ue = self.ues[rnti]
            run = self.run_of[rnti]
            if not (ue.sib_reread_pending or run.waiting_sib):
                continue
            legit = self._dl_rx(rnti)
            bits = bs_bits
            if spoof is not None:
                cfg, power, aid = spoof
                out = decode_outcome(legit, self.attacker.rx_at_ue(rnti, power), True, self.radio)
                if out is DecodeOutcome.COLLISION:
                    continue
                if out is DecodeOutcome.SPOOF:
                    bits = encode_sib_ra(cfg)
                    self._log("sib_overshadowed", rnti=rnti, action=aid)
            ue.sib = decode_sib_ra(bits)
            ue.sib_reread_pending = False
            if run.waiting_sib:
                run.waiting_sib = False
                run.initial_access = True
                ue.ra.phase = RaPhase.IDLE
                ue.radio_link_failed = False
                ra_start(ue, ue.sib, n, self.ue_rng[rnti], self.timing)
                self._log("ra_start", rnti=rnti, cause="initial_access")

    def _attacker_phase(self, n: int):
        pdcch, pucch = [], []
        if self.attacker is None:
            return pdcch, pucch
        period = int(round(self.cfg.cell.sib_period_ms / self.slot_ms))
        bw = self.cfg.cell.bandwidth_rb
        for inj in self.schedule.get(n, ()):
            p, aid = inj.primitive, inj.action_id
            if isinstance(p, InjectDci):
                pdcch.append((encode_dci(p.dci, bw), p.tx_power_dbm, aid, None))
            elif isinstance(p, InjectMacCe):
                self._inject_mac_ce(n, p, aid, pdcch)
            elif isinstance(p, OvershadowSib):
                occasion = -(-n // period) * period
                self.spoof_sib[occasion] = (p.config, p.tx_power_dbm, aid)
                self._log("inject", action=aid, primitive="OvershadowSib", occasion_ms=occasion * self.slot_ms)
            elif isinstance(p, InjectPaging):
                hit = []
                tx = attach_crc(PAGING_PAYLOAD, P_RNTI)
                for rnti in self.order:
                    ue = self.ues[rnti]
                    rx = self.attacker.rx_at_ue(rnti, p.tx_power_dbm)
                    if not ue.connected or decode_outcome(None, rx, False, self.radio) is not DecodeOutcome.SPOOF:
                        continue
                    # connected UEs descramble paging DCIs with their own key under mitigation
                    payload, crc = split_crc(self._protect(tx, rnti, n))
                    if crc16(payload) ^ P_RNTI == crc:
                        ue.sib_reread_pending = True
                        hit.append(rnti)
                self._log("inject", action=aid, primitive="InjectPaging", decoded_by=hit)
            elif isinstance(p, SpoofSr):
                pucch.append((encode_sr(SchedulingRequest(p.target)), aid))
        return pdcch, pucch

    def _inject_mac_ce(self, n: int, p: InjectMacCe, aid: int, pdcch: list) -> None:
        tb = encode_tb(bytes_to_bits(encode_mac_pdu(MacPdu([p.element]))))
        if isinstance(p.element, BeamFailureRecovery):
            # Msg3-style uplink PDU towards the BS claiming the target's identity
            rx_bits = self._protect(tb, p.target, n, 0)
            decoded = None
            try:
                pdu = decode_mac_pdu(bits_to_bytes(decode_tb(rx_bits)))
                decoded = [e for e in pdu.elements if isinstance(e, BeamFailureRecovery)]
            except (NoMatch, MacDecodeError, ValueError):
                pass
            if decoded and p.target in self.bs.connected:
                bs_on_bfr(self.bs, p.target, decoded[0].new_beam_idx)
            self._log("inject", action=aid, primitive="InjectMacCe", target=p.target,
                      element="BeamFailureRecovery", decoded=bool(decoded))
            return
        bw = self.cfg.cell.bandwidth_rb
        # land the HARQ feedback of the carrier DCI on a slot the BS is not expecting
        k1 = 0
        while self._is_feedback_slot(n + k1):
            k1 += 1
        d = DciMessage(p.target, DciKind.DL_ASSIGNMENT, ResourceAllocation(bw - 1, 1, Direction.DL),
                       harq_feedback_timing=k1)
        self.pdsch_spoof.setdefault(n, []).append((p.target, bw - 1, 1, tb, p.tx_power_dbm, aid))
        pdcch.append((encode_dci(d, bw), p.tx_power_dbm, aid, type(p.element).__name__))

    def _schedule_dl(self, n: int) -> list:
        c = self.cfg.cell
        reserved = self.dl_reserved.pop(n, 0)
        eligible = [r for r in self.order if r in self.bs.connected and self.ues[r].traffic is Traffic.FULL_BUFFER_DL]
        dcis = []
        used = reserved
        if eligible:
            avail = c.bandwidth_rb - reserved
            share, extra = divmod(avail, len(eligible))
            start = 0
            fb = self._feedback_slot(n)
            for i, r in enumerate(eligible):
                num = share + (1 if i < extra else 0)
                if num < 1:
                    continue
                ctx = self.bs.connected[r]
                bits = self._tb_bits(num, self._dl_rx(r) - c.noise_dbm)
                dai = ctx.harq.on_assignment(fb, (r, n, bits))
                d = DciMessage(r, DciKind.DL_ASSIGNMENT, ResourceAllocation(start, num, Direction.DL),
                               harq_pid=n % 16, dai=dai, harq_feedback_timing=fb - n, bwp_indicator=ctx.bwp,
                               mcs=9, ndi=(n // 16) % 2)
                dcis.append((d, bits))
                start += num
                used += num
            self._scell_data(n, eligible)
        self.max_dl_rb = max(self.max_dl_rb, used)
        if used > c.bandwidth_rb:
            self.conservation_ok = False
        return dcis

    def _scell_data(self, n: int, eligible) -> None:
        c = self.cfg.cell
        for r in eligible:
            ctx = self.bs.connected[r]
            ue = self.ues[r]
            for s in sorted(ctx.scell_view):
                if s in ue.scells and self._dl_receivable(r, ctx):
                    bits = self._tb_bits(self.scell_rb, self._dl_rx(r) - c.noise_dbm)
                    run = self.run_of[r]
                    run.bits[self._bucket(n)] += bits
                    run.slot_bits += bits
                    scell_activity(ue, s, n)

    def _dl_receivable(self, rnti: int, ctx) -> bool:
        ue = self.ues[rnti]
        return ue.connected and not ue.in_ra and ue.serving_beam_idx == ctx.beam_view

    def _schedule_ul(self, n: int) -> list:
        c = self.cfg.cell
        m = n + c.ul_k2
        dcis = []
        for r in self.order:
            ctx = self.bs.connected.get(r)
            if ctx is not None and ctx.pending_sr_grant is not None and ctx.pending_sr_grant <= n:
                ctx.pending_sr_grant = None
                d = bs_on_sr(self.bs, r, n)
                got = self._reserve(self.ul_reserved, m, d.alloc.num_rb)
                if got:
                    d = DciMessage(r, DciKind.UL_GRANT, ResourceAllocation(0, got, Direction.UL), k_offset=c.ul_k2)
                    dcis.append((d, 0.0))
        eligible = [r for r in self.order if r in self.bs.connected and self.ues[r].traffic is Traffic.FULL_BUFFER_UL]
        used = self.ul_reserved.get(m, 0)
        if eligible:
            avail = c.bandwidth_rb - used
            share, extra = divmod(avail, len(eligible))
            start = used
            for i, r in enumerate(eligible):
                num = share + (1 if i < extra else 0)
                if num < 1:
                    continue
                d = DciMessage(r, DciKind.UL_GRANT, ResourceAllocation(start, num, Direction.UL),
                               k_offset=c.ul_k2, harq_pid=n % 16, mcs=9, bwp_indicator=self.bs.connected[r].bwp)
                dcis.append((d, 0.0))
                start += num
                used += num
        self.ul_reserved.pop(m, None)
        self.max_ul_rb = max(self.max_ul_rb, used)
        if used > c.bandwidth_rb:
            self.conservation_ok = False
        return dcis

    def _deliver_pdcch(self, n: int, legit: list, spoofed: list) -> None:
        c = self.cfg.cell
        bw = c.bandwidth_rb
        spoof_pdsch = self.pdsch_spoof.pop(n, [])
        legit_pdsch = {d.rnti: d.alloc for d, _ in legit if d.kind is DciKind.DL_ASSIGNMENT}
        for d, bits in legit:
            tx = self._protect(encode_dci(d, bw), d.rnti, n)
            if self.attacker is not None:
                self.attacker.sniff_pdcch(n * self.slot_ms, tx, c.bs_tx_power_dbm - self.attacker.path_loss_to_bs_db, bw)
            ue = self.ues[d.rnti]
            if ue.rnti != d.rnti:
                continue
            try:
                rx = decode_dci(self._protect(tx, d.rnti, n), {ue.rnti}, bw)
            except NoMatch:
                continue
            ok = False
            if rx.kind is DciKind.DL_ASSIGNMENT:
                ok = (self._dl_receivable(d.rnti, self.bs.connected[d.rnti])
                      and self._pdsch_survives(d, spoof_pdsch))
                if ok and rx.bwp_indicator == ue.active_bwp:
                    self.run_of[d.rnti].slot_bits += bits
            self._apply_dci(n, ue, rx, ok)
        for bits, power, aid, ce_name in spoofed:
            decoded_by = []
            for rnti in self.order:
                ue = self.ues[rnti]
                if ue.rnti is None:
                    continue
                rx_dbm = self.attacker.rx_at_ue(rnti, power)
                if decode_outcome(None, rx_dbm, False, self.radio) is not DecodeOutcome.SPOOF:
                    continue
                try:
                    rx = decode_dci(self._protect(bits, rnti, n), {ue.rnti}, bw)
                except NoMatch:
                    continue
                decoded_by.append(rnti)
                ok = False
                if rx.kind is DciKind.DL_ASSIGNMENT:
                    ok = self._spoof_pdsch_decodes(n, ue, rx, spoof_pdsch, legit_pdsch)
                self._apply_dci(n, ue, rx, ok)
            self._log("inject", action=aid, primitive="InjectMacCe" if ce_name else "InjectDci",
                      element=ce_name, decoded_by=decoded_by)

    def _pdsch_survives(self, d: DciMessage, spoof_pdsch) -> bool:
        erased = 0
        for target, start, num, _tb, power, _aid in spoof_pdsch:
            ov = d.alloc.overlap(ResourceAllocation(start, num))
            if ov and decode_outcome(self._dl_rx(d.rnti), self.attacker.rx_at_ue(d.rnti, power),
                                     True, self.radio) is not DecodeOutcome.LEGIT:
                erased += ov
        return erased <= self.cfg.cell.pdsch_erasure_tolerance * d.alloc.num_rb

    def _spoof_pdsch_decodes(self, n, ue: UeState, rx: DciMessage, spoof_pdsch, legit_pdsch) -> bool:
        rnti = ue.rnti
        for target, start, num, tb, power, aid in spoof_pdsch:
            if target != rnti or rx.alloc.start_rb != start:
                continue
            legit_alloc = [a for a in legit_pdsch.values() if a.overlap(ResourceAllocation(start, num))]
            legit_rx = self._dl_rx(rnti) if legit_alloc else None
            out = decode_outcome(legit_rx, self.attacker.rx_at_ue(rnti, power), bool(legit_alloc), self.radio)
            if out is not DecodeOutcome.SPOOF:
                return False
            try:
                pdu = decode_mac_pdu(bits_to_bytes(decode_tb(self._protect(tb, rnti, n, start))))
            except (NoMatch, MacDecodeError, ValueError):
                return False
            for el in pdu.elements:
                apply_mac_ce(ue, el, n)
                self._log("mac_ce_applied", rnti=rnti, element=type(el).__name__, action=aid)
            return True
        # a bare injected assignment still carries a well-formed dummy TB
        return True

    def _apply_dci(self, n: int, ue: UeState, d: DciMessage, pdsch_ok: bool) -> None:
        rnti = ue.rnti
        was_in_ra = ue.in_ra
        _, actions = ue_on_dci(ue, d, n, self.ue_rng[rnti], self.timing, pdsch_ok)
        for a in actions:
            if isinstance(a, UlTransmission):
                self.ul_pending.setdefault(a.slot, []).append(a)
            elif isinstance(a, StartedRa) and not was_in_ra:
                ue.harq.clear()
                self._log("ra_start", rnti=rnti, cause="pdcch_order", contention_free=a.contention_free)

    def _receive_pusch(self, n: int) -> None:
        c = self.cfg.cell
        txs = [t for t in self.ul_pending.pop(n, []) if self.ues[t.rnti].connected and not self.ues[t.rnti].in_ra]
        for t in txs:
            run = self.run_of[t.rnti]
            ue = self.ues[t.rnti]
            signal = t.tx_power_dbm - run.path_loss_db
            interferers = [o.tx_power_dbm - self.run_of[o.rnti].path_loss_db
                           for o in txs if o is not t and o.alloc.overlap(t.alloc)]
            s = sinr(signal, interferers, c.noise_dbm).sinr_db
            bits = self._tb_bits(t.alloc.num_rb, s) if signal >= c.sensitivity_dbm else 0.0
            if ue.rbr_cap_kbps is not None:
                bits = min(bits, ue.rbr_cap_kbps * 1000.0 * self.slot_ms / 1000.0)
            if not ue.ul_synchronized:
                bits = 0.0
            b = self._bucket(n)
            if t.padding:
                run.padding_bits[b] += bits
            else:
                run.bits[b] += bits
                run.slot_bits += bits
                ctx = self.bs.connected.get(t.rnti)
                if ctx is not None:
                    ctx.last_activity = n

    def _pucch(self, n: int, spoofed) -> None:
        c = self.cfg.cell
        answered = set()
        for rnti in self.order:
            ue = self.ues[rnti]
            if not ue.connected or ue.in_ra:
                continue
            fb = ue.harq.pop_feedback(n)
            if fb is not None:
                bits, resource = fb
                tx = self._protect(encode_ack(AckBitmap(bits), rnti), rnti, n)
                ctx = self.bs.connected.get(rnti)
                if ctx is None or not ctx.harq.expects(n):
                    continue
                try:
                    got_rnti, rec = decode_uci(self._protect(tx, rnti, n), [rnti])
                except NoMatch:
                    continue
                answered.add(rnti)
                result, acked, rlf = bs_on_ack_bitmap(self.bs, rnti, n, rec.bits, resource, n)
                for _r, tx_slot, tb_bits in acked:
                    self.run_of[rnti].bits[self._bucket(tx_slot)] += tb_bits
                ctx.last_activity = n
                if rlf:
                    self._bs_rlf(rnti, n)
            if ue.csi_schedule.reporting and ue.connected:
                period = max(1, int(round(ue.csi_schedule.period_ms / self.slot_ms)))
                if (n + self.order.index(rnti)) % period == 0:
                    rsrp = min(max(c.bs_tx_power_dbm - self.run_of[rnti].path_loss_db, RSRP_MIN_DBM), RSRP_MAX_DBM)
                    tx = self._protect(encode_csi(CsiReport(rnti, ue.serving_beam_idx % 64, rsrp)), rnti, n)
                    if self.attacker is not None:
                        self.attacker.sniff_pucch(n * self.slot_ms, tx, ue.tx_power_dbm - self.attacker.path_loss_to_bs_db)
        if self._is_feedback_slot(n):
            for rnti in list(self.bs.connected):
                if rnti in answered:
                    continue
                ctx = self.bs.connected[rnti]
                if ctx.harq.expects(n) and bs_on_missing_feedback(self.bs, rnti, n, n):
                    self._bs_rlf(rnti, n)
        for bits, aid in spoofed:
            ok = None
            cands = sorted(self.bs.connected)
            for rnti in cands:
                try:
                    got, rec = decode_uci(self._protect(bits, rnti, n), [rnti])
                except NoMatch:
                    continue
                if isinstance(rec, SchedulingRequest):
                    ok = got
                    break
            if ok is not None:
                ctx = self.bs.connected[ok]
                ctx.last_activity = n
                if ctx.pending_sr_grant is None:
                    ctx.pending_sr_grant = n + self.bs.sr_latency_slots
            self._log("inject", action=aid, primitive="SpoofSr", decoded=ok is not None)

    def _bs_rlf(self, rnti: int, n: int) -> None:
        self.bs.release(rnti)
        self._log("bs_rlf", rnti=rnti)
        ue = self.ues[rnti]
        run = self.run_of[rnti]
        if run.rlf_ms is None:
            run.rlf_ms = n * self.slot_ms
        if ue.connected and not ue.in_ra:
            self._ue_link_failure(rnti, n)

    def _random_access(self, n: int) -> None:
        c = self.cfg.cell
        preambles = []
        for rnti in self.order:
            ue = self.ues[rnti]
            if not ue.ra.active:
                continue
            _, ev = ra_tick(ue, n, self.ue_rng[rnti], self.timing)
            if ev is RaEvent.MSG1:
                self.run_of[rnti].ra_attempts += 1
                preambles.append((ue.ra.preamble, ue.ra.contention_free, rnti))
            elif ev is RaEvent.FAILED:
                self._ra_failed(rnti, n)
        if not preambles:
            return
        self.rach_load[self._bucket(n)] += len(preambles)
        rtt = self.bs.responder.rtt_slots
        if c.rar_rtt_jitter_ms > 0:
            rtt += int(round(self.bs_rng.uniform(0.0, c.rar_rtt_jitter_ms) / self.slot_ms))
        at, rars, dropped = self.bs.responder.on_preambles(
            preambles, n, ta_of=lambda r: self.ues[r].true_ta, rtt_slots=rtt)
        if dropped:
            self._log("rach_overload", dropped=dropped)
        kept = []
        for rar in rars:
            if not self._reserve(self.dl_reserved, at, c.rar_rb):
                continue
            kept.append(rar)
            if not rar.contention_free:
                for k in range(c.ra_context_slots):
                    self._reserve(self.dl_reserved, at + k, c.ra_context_rb)
            if self.attacker is not None:
                sender = next(r for p, _cf, r in preambles if p == rar.preamble)
                ue = self.ues[sender]
                rx = ue.tx_power_dbm - self.attacker.path_loss_to_bs_db
                self.attacker.sniff_ra(n * self.slot_ms, ue.serving_beam_idx, rar.ta, rx)
        if kept:
            self.rar_emissions[self._bucket(at)] += len(kept)
            self._push(at, "rar", kept)

    def _timers(self, n: int) -> None:
        c = self.cfg.cell
        for rnti in self.order:
            ue = self.ues[rnti]
            scell_tick(ue, n)
            energy_tick(ue, self.slot_ms, c.base_current)
            run = self.run_of[rnti]
            run.energy[self._bucket(n)] += self.slot_ms * c.base_current * (1 + 0.79 * len(ue.scells))
        for rnti in inactive_rntis(self.bs, n):
            self.bs.release(rnti)
            ue = self.ues[rnti]
            ue.rnti = None
            ue.scells.clear()
            self.run_of[rnti].released_ms = n * self.slot_ms
            self._log("released", rnti=rnti)

    # ---- results ---------------------------------------------------------------

    def scell_divergence(self, rnti: int) -> bool:
        ctx = self.bs.connected.get(rnti)
        view = ctx.scell_view if ctx is not None else set()
        return set(self.ues[rnti].scells) != set(view)

    def report(self) -> MetricsReport:
        # the last bucket is shorter when the duration is not a whole number of buckets
        span_s = np.full(self.n_buckets, BUCKET_MS / 1000.0)
        span_s[-1] = (self.cfg.duration_ms - (self.n_buckets - 1) * BUCKET_MS) / 1000.0
        ues = {}
        for rnti in self.order:
            run = self.run_of[rnti]
            ue = self.ues[rnti]
            ctx = self.bs.connected.get(rnti)
            ues[str(rnti)] = UeMetrics(
                throughput_mbps=[float(x) for x in run.bits / 1e6 / span_s],
                ul_padding_mbps=[float(x) for x in run.padding_bits / 1e6 / span_s],
                energy_per_s=[float(x) for x in run.energy / (span_s * 1000.0 / BUCKET_MS)],
                energy_units=float(ue.energy_units),
                ra_attempts=run.ra_attempts,
                ra_outcomes=list(run.ra_outcomes),
                rlf_time_ms=run.rlf_ms,
                released_ms=run.released_ms,
                active_scells=sorted(ue.scells),
                bs_scell_view=sorted(ctx.scell_view) if ctx is not None else [],
                beam_aligned=ctx is None or ctx.beam_view == ue.serving_beam_idx,
                sib=ue.sib.label(),
            )
        cell = {
            "rach_load": [float(x) for x in self.rach_load],
            "rar_emissions": [float(x) for x in self.rar_emissions],
            "max_dl_rb_used": self.max_dl_rb,
            "max_ul_rb_used": self.max_ul_rb,
            "conservation_ok": self.conservation_ok,
        }
        sniffer = self.attacker.view.summary() if self.attacker is not None else None
        return MetricsReport(self.cfg.name, self.cfg.seed, self.cfg.duration_ms, BUCKET_MS, ues, cell,
                             sniffer, list(self.events))


def run(cfg: ScenarioConfig) -> MetricsReport:
    return Engine(cfg).run()
