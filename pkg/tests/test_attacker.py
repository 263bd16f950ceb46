import dataclasses

import pytest

from lowlayer.attacker import (AttackAction, Attacker, InjectDci, InjectMacCe, InjectPaging, OvershadowSib,
                               RepeatEvery, SpoofSr, expand_actions, sniff)
from lowlayer.codec.dci import DciKind, DciMessage, encode_dci, reference_ul_grant
from lowlayer.codec.mac import ScellActDeact
from lowlayer.codec.sib import SibRaConfig
from lowlayer.codec.uci import CsiReport, encode_csi
from lowlayer.simkit.engine import Engine, run
from lowlayer.simkit.scenarios import ATTACK_SCENARIOS, load_bundled

RNTI = 0x4601


def test_expand_single_and_repeat():
    actions = [AttackAction(5, InjectPaging()),
               AttackAction(10, RepeatEvery(4, SpoofSr(RNTI), 22)),
               AttackAction(50, InjectPaging())]
    sched = expand_actions(actions, 40)
    assert sorted(sched) == [5, 10, 14, 18]
    assert [i.action_id for i in sched[10]] == [1]
    assert all(isinstance(i.primitive, SpoofSr) for s in (10, 14, 18) for i in sched[s])


def test_expand_keeps_action_order_within_slot():
    actions = [AttackAction(3, OvershadowSib(SibRaConfig(2, 200, 0))), AttackAction(3, InjectPaging())]
    assert [i.action_id for i in expand_actions(actions, 10)[3]] == [0, 1]


def test_repeat_validation():
    with pytest.raises(ValueError):
        RepeatEvery(1, RepeatEvery(1, InjectPaging(), 5), 10)
    with pytest.raises(ValueError):
        RepeatEvery(0, InjectPaging(), 10)


def test_link_budget():
    a = Attacker(tx_power_dbm=10.0, path_loss_db={RNTI: 80.0}, default_path_loss_db=95.0)
    assert a.rx_at_ue(RNTI) == -70.0 and a.rx_at_ue(1) == -85.0 and a.rx_at_ue(RNTI, 0.0) == -80.0
    assert a.rx_at_bs(20.0) == -70.0


def test_sniffer_decodes_pdcch_and_csi():
    a = Attacker(known_rntis=frozenset({RNTI}))
    d = a.sniff_pdcch(1.0, encode_dci(reference_ul_grant(RNTI), 52), -80.0, 52)
    assert d.kind is DciKind.UL_GRANT
    a.sniff_pucch(2.0, encode_csi(CsiReport(RNTI, 12, -77.0)), -80.0)
    a.sniff_ra(3.0, 4, 11, -90.0)
    assert a.view.observed_csi_reports == [(2.0, RNTI, 12, -77.0)]
    assert a.view.observed_ra_exchanges == [(3.0, 4, 11)]
    assert a.view.summary() == {"observed_rntis": [RNTI], "dci_count": 1, "csi_count": 1, "ra_count": 1}


def test_sniffer_needs_signal_and_learns_rntis():
    a = Attacker(omniscient=False)
    assert a.sniff_pdcch(0.0, encode_dci(reference_ul_grant(RNTI), 52), -120.0, 52) is None
    assert a.candidates() == set()
    a.sniff_pdcch(0.0, encode_dci(reference_ul_grant(RNTI), 52), -80.0, 52)
    assert a.candidates() == {RNTI}


def test_ij_grant_turns_victim_into_full_band_jammer():
    m = run(load_bundled("induced_jamming"))
    ij = m.ue(17922)
    assert ij.ul_padding_mbps[0] == 0.0 and ij.ul_padding_mbps[-1] > 0.0


def test_sniffer_in_engine_and_mitigation():
    cfg = load_bundled("fig8_po_amplification")
    cfg = dataclasses.replace(cfg, duration_ms=3000.0)
    eng = Engine(cfg)
    eng.run()
    view = sniff(eng)
    assert view.observed_dcis and view.observed_csi_reports
    assert set(r for _, r, *_ in view.observed_csi_reports) == {17921, 17922}
    guarded = Engine(dataclasses.replace(cfg, mitigation_enabled=True))
    guarded.run()
    assert sniff(guarded).observed_dcis == [] and sniff(guarded).observed_csi_reports == []


@pytest.mark.parametrize("name", ATTACK_SCENARIOS)
def test_every_injection_is_attributable(name):
    cfg = load_bundled(name)
    m = run(cfg)
    injections = [e for e in m.events if e["event"] == "inject"]
    assert injections
    n = len(cfg.attacker.actions)
    assert all(0 <= e["action"] < n for e in injections)


@pytest.mark.parametrize("name", ATTACK_SCENARIOS)
def test_idle_attacker_is_side_effect_free(name):
    cfg = load_bundled(name)
    idle = run(cfg.without_attacks())
    absent = run(dataclasses.replace(cfg, attacker=None))
    assert idle.metrics_dict() == absent.metrics_dict()


def test_scell_divergence_iff_spoofed_ce():
    cfg = load_bundled("scell_deactivation")
    on, off = Engine(cfg), Engine(cfg.without_attacks())
    on.run()
    off.run()
    assert on.scell_divergence(17921) and not off.scell_divergence(17921)


def test_primitives_are_values():
    a = InjectDci(DciMessage(RNTI, DciKind.PDCCH_ORDER), 12.0)
    assert a == InjectDci(DciMessage(RNTI, DciKind.PDCCH_ORDER), 12.0)
    assert InjectMacCe(RNTI, ScellActDeact(0)).tx_power_dbm is None
