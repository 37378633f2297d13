import json
import math

import pytest

from claim_ids import EXPECTED_CLAIM_IDS
from wcelab.suite import DEFAULT_TOLERANCES, run_claim_suite

# one suite run shared by the whole module; it is the expensive part
REPORT = run_claim_suite()


def entry(claim_id):
    hits = [e for e in REPORT.entries if e.claim_id == claim_id]
    assert len(hits) == 1, claim_id
    return hits[0]


def test_every_expected_claim_present_exactly_once():
    ids = [e.claim_id for e in REPORT.entries]
    assert sorted(ids) == sorted(EXPECTED_CLAIM_IDS)


def test_no_failures_and_one_discrepancy():
    counts = REPORT.counts()
    assert counts["fail"] == 0
    assert counts["discrepancy"] == 1
    assert REPORT.all_ok


def test_the_discrepancy_is_the_even_atom_mean():
    bad = [e for e in REPORT.entries if e.status == "discrepancy"]
    assert [e.claim_id for e in bad] == ["poisson-parity.mean-symbol-even-atom"]
    e = bad[0]
    # both the published and the independently derived value must be shown
    assert "published" in e.expected and "derived" in e.expected
    assert e.expected["published"] == pytest.approx(
        (math.cosh(1.0) - 1.0) / math.cosh(1.0), abs=1e-12
    )
    assert abs(e.expected["derived"] - 2.1639534137386534) < 1e-9
    assert abs(e.computed["value"] - e.expected["derived"]) < 1e-10
    assert e.note


def test_odd_atom_mean_matches_closed_form():
    e = entry("poisson-parity.mean-symbol-odd-atom")
    assert e.status == "pass"
    assert e.expected["value"] == pytest.approx(1.0 / math.tanh(1.0), abs=1e-12)
    assert abs(e.computed["value"] - e.computed["series_oracle"]) < 1e-10


def test_spectrum_entries_record_probe_evidence():
    for e in REPORT.entries:
        if e.claim_id.endswith("spectrum") or e.claim_id.endswith("spectrum-is-range"):
            assert "max_candidate_sigma_min" in e.computed
            assert e.computed["probe_floor_ok"] is True


def test_zero_inclusion_noted_not_failed():
    for cid in ("trivial-algebra.spectrum", "product-grid.spectrum", "symmetric-interval.spectrum"):
        e = entry(cid)
        assert e.status == "pass"
        assert "includes 0" in e.note


def test_json_round_trip():
    doc = json.loads(REPORT.to_json())
    assert doc["summary"] == REPORT.counts()
    assert len(doc["entries"]) == len(REPORT.entries)
    ids = {e["claim_id"] for e in doc["entries"]}
    assert ids == EXPECTED_CLAIM_IDS
    for e in doc["entries"]:
        assert e["status"] in ("pass", "fail", "discrepancy")
        assert e["reference"]


def test_text_format_has_summary_line():
    text = REPORT.format_text()
    assert "pass: 31" in text
    assert "discrepancy: 1" in text


def test_tolerance_override_propagates():
    report = run_claim_suite(tolerances={"identity": 1e-6})
    assert report.tolerances["identity"] == 1e-6
    assert report.tolerances["oracle"] == DEFAULT_TOLERANCES["oracle"]
