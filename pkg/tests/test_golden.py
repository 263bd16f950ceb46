"""Byte-for-byte comparison against frozen outputs in tests/golden/v1.

Regenerate deliberately with ``python tests/test_golden.py`` after a reviewed
behaviour change, then bump the directory version.
"""
import sys
from pathlib import Path

import pytest

from lowlayer.codec.dci import DciKind, DciMessage, encode_dci, reference_ul_grant
from lowlayer.codec.hexdump import hexdump, parse_hexdump
from lowlayer.codec.mac import MacPdu, ScellActDeact, TimingAdvanceCmd, encode_mac_pdu
from lowlayer.codec.sib import SibRaConfig, encode_sib_ra
from lowlayer.codec.uci import AckBitmap, CsiReport, encode_ack, encode_csi
from lowlayer.simkit.engine import run
from lowlayer.simkit.scenarios import load_bundled

GOLDEN = Path(__file__).parent / "golden" / "v1"
RNTI = 0x4601


def reference_messages() -> list:
    return [
        ("dci_ul_grant", encode_dci(reference_ul_grant(RNTI), 52)),
        ("dci_pdcch_order", encode_dci(DciMessage(RNTI, DciKind.PDCCH_ORDER, preamble_index=10, ssb_index=3), 52)),
        ("mac_scell_deact", encode_mac_pdu(MacPdu((ScellActDeact(0),)))),
        ("mac_ta_cmd", encode_mac_pdu(MacPdu((TimingAdvanceCmd(1, 40),), 16))),
        ("sib_ra_po", encode_sib_ra(SibRaConfig(2, 200, 0))),
        ("uci_csi", encode_csi(CsiReport(RNTI, 17, -80.0))),
        ("uci_ack", encode_ack(AckBitmap((True, False, True)), RNTI)),
    ]


def outputs() -> dict:
    return {
        "messages.hex": hexdump(reference_messages()),
        "fig8_report.json": run(load_bundled("fig8_po_amplification")).to_json(),
    }


@pytest.fixture(scope="module")
def current():
    return outputs()


@pytest.mark.parametrize("name", ["messages.hex", "fig8_report.json"])
def test_matches_golden(current, name):
    assert (GOLDEN / name).read_bytes() == current[name].encode("utf-8")


def test_golden_hexdump_parses():
    parsed = dict(parse_hexdump((GOLDEN / "messages.hex").read_text(encoding="utf-8")))
    assert len(parsed["dci_ul_grant"]) == 55 and parsed["dci_pdcch_order"][2:13] == "1" * 11


if __name__ == "__main__":
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, text in outputs().items():
        (GOLDEN / name).write_bytes(text.encode("utf-8"))
        print(GOLDEN / name, file=sys.stderr)
