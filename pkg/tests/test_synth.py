"""Corpus generator invariants the acceptance suite depends on."""

import json
import hashlib
from pathlib import Path

import pytest

from teamnet.metrics import default_lexicon
from teamnet.synth import (CorpusSpec, FILLERS, NEG_WORDS, POS_WORDS,
                           TeamScript, generate_corpus)


def small_spec(**overrides) -> CorpusSpec:
    fields = dict(days=12, lookback_days=3,
                  teams=(TeamScript("1", 4, 1, 30, 2, 1, 1, 2.0),))
    fields.update(overrides)
    return CorpusSpec(**fields)


def test_word_lists_match_bundled_lexicon():
    # Scored words must hit, filler must not; otherwise scripted sentiment
    # ratios would not be ground truth.
    lex = default_lexicon()
    assert all(w in lex.positive for w in POS_WORDS)
    assert all(w in lex.negative for w in NEG_WORDS)
    assert not any(w in lex.positive or w in lex.negative for w in FILLERS)


def test_team_needs_four_members():
    with pytest.raises(ValueError, match=">= 4 members"):
        TeamScript("1", 3, 0, 30, 1, 1, 1, 2.0)


def test_days_must_fit_handovers():
    with pytest.raises(ValueError, match="cannot fit"):
        small_spec(days=7)  # 2 tenures of >= 4 days need 8


def test_body_token_budget():
    with pytest.raises(ValueError, match="token budget"):
        TeamScript("1", 4, 0, 30, 15, 10, 1, 2.0)


def test_generation_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    generate_corpus(small_spec(), a)
    generate_corpus(small_spec(), b)
    for name in ("course.mbox", "rosters.csv", "aliases.tsv", "config.ini",
                 "manifest.json"):
        assert hashlib.sha256((a / name).read_bytes()).hexdigest() == \
            hashlib.sha256((b / name).read_bytes()).hexdigest(), name


def test_manifest_reports_tenures_and_totals(tmp_path):
    manifest = generate_corpus(small_spec(), tmp_path)
    team = manifest["teams"]["1"]
    assert team["handovers"] == 1
    assert [t[0] for t in team["tenures"]] == [0, 6]
    assert sum(t[1] for t in team["tenures"]) == 12
    assert team["tenures"][0][2] != team["tenures"][1][2]
    # per-day: broadcast + reply + 1 extra
    assert team["messages"] == 12 * 3
    assert team["reply_pairs"] == 12
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk == manifest


def test_committed_fixture_is_current(tmp_path):
    # scripts/make_fixture.py output must match what is in the repo.
    import sys
    scripts = Path(__file__).parent.parent / "scripts"
    sys.path.insert(0, str(scripts))
    try:
        from make_fixture import fixture_spec
    finally:
        sys.path.remove(str(scripts))
    generate_corpus(fixture_spec(), tmp_path)
    committed = Path(__file__).parent / "data" / "fixture"
    for path in sorted(committed.iterdir()):
        assert (tmp_path / path.name).read_bytes() == path.read_bytes(), path.name
