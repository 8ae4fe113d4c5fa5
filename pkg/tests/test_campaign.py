"""Campaign rows: formatting, spacing policy, tamper detection."""
import json
import math
import os
import shutil

import pytest

from transmod.campaign import (
    CheckRow,
    _bound_row,
    _check_square,
    _integrity_row,
    _pow2_floor,
    _row_spacing,
    _slug,
    _thread_count,
    default_fixture_dir,
    rows_to_csv,
    run_campaign,
    summary,
)
from transmod.gallery import (
    bonk_squares,
    case_to_json,
    kissing_disks_domain,
    polar_rectangle_domain,
    twin_squares_domain,
)


def test_row_csv_format_is_17_digit_and_comma_free():
    row = CheckRow("a/b", "note, with comma", 1.0 / 3.0, 2.0, -0.5, "pass")
    line = row.csv()
    assert line == "a/b,note; with comma,0.33333333333333331,2,-0.5,pass"


def test_rows_to_csv_layout():
    rows = [CheckRow("x", "r", 1.0, 1.0, 0.0, "pass")]
    text = rows_to_csv(rows)
    assert text.startswith("check,reference,expected,observed,slack,status\n")
    assert text.endswith("\n")
    assert "\r" not in text
    assert len(text.splitlines()) == 2


def test_pow2_floor():
    assert _pow2_floor(1.0) == 1.0
    assert _pow2_floor(0.03) == 1.0 / 64
    assert _pow2_floor(1.0 / 128) == 1.0 / 128
    assert _pow2_floor(0.9) == 0.5


def test_row_spacing_clamps_to_feature_size():
    # wide slits run at the quick spacing; narrow ones are clamped
    assert _row_spacing(polar_rectangle_domain(2), 1.0) == 1.0 / 64
    assert _row_spacing(polar_rectangle_domain(20), 1.0) == 1.0 / 128
    assert _row_spacing(polar_rectangle_domain(20), 2.0) == 1.0 / 128
    assert _row_spacing(polar_rectangle_domain(2), 2.0) == 1.0 / 32
    assert _row_spacing(twin_squares_domain(20), 4.0) == 1.0 / 128
    # generators with an adaptive reference spacing keep it
    assert _row_spacing(kissing_disks_domain(32), 1.0) == kissing_disks_domain(32).ref_h
    assert _row_spacing(bonk_squares(3), 2.0) == 1.0 / 32  # eps/4 = 0.05


def test_oracle_square_row_passes_at_coarse_spacing():
    row = _check_square(1.0 / 32, seed=0)
    assert row.status == "pass"
    assert abs(row.observed - 1.0) <= 0.10
    assert row.check == "oracle/unit-square"


def test_integrity_row_detects_injected_constant():
    case = twin_squares_domain(5)
    good = case_to_json(case)
    assert _integrity_row(case, good).status == "pass"
    tampered = json.loads(json.dumps(good))
    tampered["bound"]["value"] = 21.0 / 5.0  # wrong constant
    row = _integrity_row(case, tampered)
    assert row.status == "fail"
    assert row.observed == 0.0


def test_bound_row_passes_then_fails_on_tight_constant():
    case = bonk_squares(1)
    shipped = case_to_json(case)
    ok = _bound_row(case, shipped, h_scale=1.0, seed=0)
    assert ok.status == "pass"
    assert ok.slack >= 0.0
    squeezed = json.loads(json.dumps(shipped))
    squeezed["bound"]["value"] = 0.01
    bad = _bound_row(case, squeezed, h_scale=1.0, seed=0)
    assert bad.status == "fail"
    assert bad.slack < 0.0


def test_thread_count_resolution(monkeypatch):
    monkeypatch.delenv("TRANSMOD_THREADS", raising=False)
    assert _thread_count(None) == 1
    assert _thread_count(4) == 4
    assert _thread_count(0) == 1
    monkeypatch.setenv("TRANSMOD_THREADS", "3")
    assert _thread_count(None) == 3


def _trimmed_fixture_dir(tmp_path, names):
    src = default_fixture_dir()
    d = tmp_path / "fixtures"
    d.mkdir()
    for name in names:
        shutil.copy(os.path.join(src, name), d / name)
    (d / "corpus.json").write_text(
        json.dumps({"cases": names}, indent=1, sort_keys=True) + "\n"
    )
    return str(d)


def test_trimmed_campaign_parallel_matches_serial(tmp_path):
    fixdir = _trimmed_fixture_dir(
        tmp_path, ["staircase-squares-n1.json", "staircase-squares-n3.json"]
    )
    serial = run_campaign(
        out_dir=str(tmp_path / "s"), seed=0, threads=1, fixture_dir=fixdir
    )
    threaded = run_campaign(
        out_dir=str(tmp_path / "t"), seed=0, threads=3, fixture_dir=fixdir
    )
    assert rows_to_csv(serial) == rows_to_csv(threaded)
    b1 = (tmp_path / "s" / "campaign.csv").read_bytes()
    b2 = (tmp_path / "t" / "campaign.csv").read_bytes()
    assert b1 == b2
    assert all(r.status == "pass" for r in serial)
    assert [r.check for r in serial] == sorted(r.check for r in serial)


def test_campaign_rejects_unknown_fixture(tmp_path):
    d = tmp_path / "fixtures"
    d.mkdir()
    (d / "corpus.json").write_text(json.dumps({"cases": ["mystery.json"]}))
    (d / "mystery.json").write_text("{}")
    with pytest.raises(ValueError):
        run_campaign(fixture_dir=str(d))


def test_summary_lists_failures():
    rows = [
        CheckRow("a", "r", 1.0, 1.0, 0.0, "pass"),
        CheckRow("b", "r", 1.0, 2.0, -1.0, "fail"),
    ]
    text = summary(rows)
    assert "1 of 2 checks FAIL" in text
    assert "b,r," in text
    assert summary(rows[:1]) == "all 1 checks pass"


def test_slug_matches_fixture_naming():
    assert _slug("slit-annulus n=10") == "slit-annulus-n10"
    assert _slug("twin-squares n=2") == "twin-squares-n2"
