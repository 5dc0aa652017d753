import json

from qcentral.bench import legacy_float_rank, report_json, report_markdown, time_pipeline
from qcentral.cartan import CartanType


def test_single_word_rank_one():
    r = legacy_float_rank(CartanType("A", 2), (1, 0), precision=6)
    assert r["words"] == 1 and r["numeric_rank"] == 1 and r["discrepancy"] == 0


def test_small_block_agrees_at_generous_precision():
    r = legacy_float_rank(CartanType("A", 2), (1, 1), precision=12)
    assert r["exact_rank"] == 2 and r["discrepancy"] == 0


def test_d4_low_precision_underreports():
    r = legacy_float_rank(CartanType("D", 4), (2, 2, 1, 1), precision=4)
    assert r["exact_rank"] == 20
    assert r["numeric_rank"] < r["exact_rank"]
    r6 = legacy_float_rank(CartanType("D", 4), (2, 2, 1, 1), precision=6)
    assert r6["exact_rank"] == r["exact_rank"]


def test_time_pipeline_a2():
    rep = time_pipeline(CartanType("A", 2), verify_sites=1)
    assert rep["verified"] is True
    s = rep["stages_s"]
    assert s["total"] >= s["blocks"] >= 0
    md = report_markdown([rep], [])
    assert "A2" in md and str(s["total"]) in md
    assert json.loads(report_json([rep], []))["timings"][0]["terms"] == rep["terms"]
