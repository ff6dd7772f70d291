"""Parsing, normalization, and team-tagging behavior."""

from datetime import datetime, timezone

import pytest

from teamnet.errors import ConfigError
from teamnet.ingest import (
    Message,
    MessageSet,
    TeamRoster,
    assign_teams,
    canonical_address,
    canonicalize_actors,
    export_message_csv,
    load_alias_map,
    load_rosters,
    parse_mbox,
    parse_message_csv,
)


def mbox_text(*messages: str) -> str:
    return "".join(f"From - Thu Jan  1 00:00:00 2026\n{m.lstrip()}\n\n" for m in messages)


def write_mbox(tmp_path, *messages: str):
    path = tmp_path / "test.mbox"
    path.write_text(mbox_text(*messages), encoding="utf-8")
    return path


WELL_FORMED = [
    """\
From: Alice <alice@x.edu>
To: bob@x.edu
Date: Thu, 01 Jan 2026 10:00:00 +0000
Message-ID: <m1@x>
Subject: kickoff

let's get started
""",
    """\
From: bob@x.edu
To: alice@x.edu
Cc: carol@x.edu
Date: Thu, 01 Jan 2026 11:30:00 +0000
Message-ID: <m2@x>
In-Reply-To: <m1@x>
Subject: Re: kickoff

sounds good
""",
    """\
From: carol@x.edu
To: alice@x.edu, bob@x.edu
Date: Fri, 02 Jan 2026 09:00:00 +0100
Message-ID: <m3@x>
Subject: notes

attached below
""",
]


def ts(day: int, hour: int = 12) -> datetime:
    return datetime(2026, 1, day, hour, tzinfo=timezone.utc)


def msg(id: str, sender: str, recipients, day: int = 1, **kw) -> Message:
    kw.setdefault("subject", "s")
    kw.setdefault("body", "b")
    return Message(id=id, sender=sender, recipients=tuple(recipients),
                   timestamp=ts(day), **kw)


class TestParseMbox:
    def test_three_well_formed_messages(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, *WELL_FORMED))
        assert len(ms) == 3
        assert ms.warnings == {}
        assert [m.id for m in ms.messages] == ["m1@x", "m2@x", "m3@x"]

    def test_missing_date_is_skipped_with_warning(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, """\
From: alice@x.edu
To: bob@x.edu
Message-ID: <nodate@x>
Subject: whoops

no date header
"""))
        assert len(ms) == 0
        assert ms.warnings == {"skipped_bad_date": 1}

    def test_to_and_cc_merged_and_deduplicated(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, """\
From: alice@x.edu
To: Bob <bob@x.edu>, carol@x.edu
Cc: BOB@X.EDU, dan@x.edu
Date: Thu, 01 Jan 2026 10:00:00 +0000
Message-ID: <m@x>

hi
"""))
        assert ms.messages[0].recipients == ("bob@x.edu", "carol@x.edu", "dan@x.edu")

    def test_duplicate_message_id_keeps_first(self, tmp_path):
        first, second = WELL_FORMED[0], WELL_FORMED[0].replace("kickoff", "copy")
        ms = parse_mbox(write_mbox(tmp_path, first, second))
        assert len(ms) == 1
        assert ms.messages[0].subject == "kickoff"
        assert ms.warnings == {"duplicate_id": 1}

    def test_timestamps_normalized_to_utc(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, *WELL_FORMED))
        assert ms.messages[2].timestamp == datetime(2026, 1, 2, 8, 0,
                                                    tzinfo=timezone.utc)

    def test_naive_date_assumed_utc_with_warning(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, """\
From: alice@x.edu
To: bob@x.edu
Date: Thu, 01 Jan 2026 10:00:00
Message-ID: <naive@x>

hi
"""))
        assert ms.messages[0].timestamp == datetime(2026, 1, 1, 10,
                                                    tzinfo=timezone.utc)
        assert ms.warnings == {"assumed_utc": 1}

    def test_reply_parents_from_references(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, """\
From: alice@x.edu
To: bob@x.edu
Date: Thu, 01 Jan 2026 10:00:00 +0000
Message-ID: <m9@x>
In-Reply-To: <m2@x>
References: <m1@x> <m2@x>

hi
"""))
        assert ms.messages[0].reply_parents == ("m2@x", "m1@x")

    def test_html_body_stripped_to_text(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, """\
From: alice@x.edu
To: bob@x.edu
Date: Thu, 01 Jan 2026 10:00:00 +0000
Message-ID: <h@x>
Content-Type: text/html

<html><body><p>great &amp; happy</p><script>alert(1)</script></body></html>
"""))
        body = ms.messages[0].body
        assert "great & happy" in body
        assert "<" not in body and "alert" not in body

    def test_missing_file_is_fatal(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_mbox(tmp_path / "absent.mbox")

    def test_missing_message_id_synthesized(self, tmp_path):
        ms = parse_mbox(write_mbox(tmp_path, """\
From: alice@x.edu
To: bob@x.edu
Date: Thu, 01 Jan 2026 10:00:00 +0000

hi
"""))
        assert len(ms) == 1
        assert ms.messages[0].id
        assert ms.warnings == {"missing_message_id": 1}


class TestMessageCsv:
    def test_two_valid_rows(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "id,sender,recipients,timestamp,subject,reply_parents,body\n"
            "a,alice@x.edu,bob@x.edu;carol@x.edu,2026-01-01T10:00:00+00:00,hi,,first\n"
            "b,bob@x.edu,alice@x.edu,2026-01-01T11:00:00+00:00,re,a,second\n",
            encoding="utf-8")
        ms = parse_message_csv(path)
        assert len(ms) == 2
        assert ms.messages[0].recipients == ("bob@x.edu", "carol@x.edu")
        assert ms.messages[1].reply_parents == ("a",)

    def test_missing_timestamp_column_is_fatal(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("id,sender,recipients,subject,reply_parents,body\n",
                        encoding="utf-8")
        with pytest.raises(ValueError, match="missing column: timestamp"):
            parse_message_csv(path)

    def test_bad_row_skipped_with_warning(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "id,sender,recipients,timestamp,subject,reply_parents,body\n"
            "a,alice@x.edu,bob@x.edu,not-a-time,hi,,x\n"
            "b,bob@x.edu,alice@x.edu,2026-01-01T11:00:00+00:00,re,,y\n",
            encoding="utf-8")
        ms = parse_message_csv(path)
        assert len(ms) == 1
        assert ms.warnings == {"skipped_bad_row": 1}

    def test_round_trip_preserves_every_field(self, tmp_path):
        original = parse_mbox(write_mbox(tmp_path, *WELL_FORMED))
        out = tmp_path / "out.csv"
        export_message_csv(original, out)
        again = parse_message_csv(out)
        assert again.messages == original.messages


class TestCanonicalize:
    def test_display_name_and_case_stripped(self):
        assert canonical_address("Alice <A@X.EDU>") == "a@x.edu"

    def test_canonical_address_idempotent(self):
        once = canonical_address("Bob Smith <Bob.Smith@Example.COM >")
        assert canonical_address(once) == once

    def test_alias_mapping_applied_to_sender(self):
        ms = MessageSet((msg("a", "a@gmail.com", ["b@x.edu"]),))
        out = canonicalize_actors(ms, aliases={"a@gmail.com": "a@x.edu"})
        assert out.messages[0].sender == "a@x.edu"

    def test_dummy_collector_removed_from_recipients(self):
        ms = MessageSet((msg("a", "a@x.edu", ["b@x.edu", "dummy@course.org"]),))
        out = canonicalize_actors(ms, dummy_addresses=["dummy@course.org"])
        assert out.messages[0].recipients == ("b@x.edu",)

    def test_message_only_to_collector_dropped(self):
        ms = MessageSet((msg("a", "a@x.edu", ["dummy@course.org"]),))
        out = canonicalize_actors(ms, dummy_addresses=["dummy@course.org"])
        assert len(out) == 0
        assert out.warnings == {"dummy_only_dropped": 1}

    def test_self_loop_dropped(self):
        ms = MessageSet((msg("a", "a@x.edu", ["A@X.EDU"]),))
        out = canonicalize_actors(ms)
        assert len(out) == 0
        assert out.warnings == {"self_loop_dropped": 1}

    def test_idempotent(self):
        ms = MessageSet((
            msg("a", "Alice <A@X.EDU>", ["Bob <b@x.edu>", "dummy@course.org"]),
            msg("b", "b@gmail.com", ["a@x.edu", "c@x.edu"], day=2),
        ))
        kw = dict(aliases={"b@gmail.com": "b@x.edu"},
                  dummy_addresses=["dummy@course.org"])
        once = canonicalize_actors(ms, **kw)
        twice = canonicalize_actors(once, **kw)
        assert twice.messages == once.messages

    def test_alias_chain_is_fatal(self):
        ms = MessageSet((msg("a", "a@x.edu", ["b@x.edu"]),))
        with pytest.raises(ConfigError, match="alias chain"):
            canonicalize_actors(ms, aliases={"a@b.com": "b@c.com",
                                             "b@c.com": "c@d.com"})

    def test_load_alias_map(self, tmp_path):
        path = tmp_path / "aliases.tsv"
        path.write_text("# personal -> course\n"
                        "A@Gmail.com\ta@x.edu\n"
                        "bob.s@mail.com\tbob@x.edu\n", encoding="utf-8")
        assert load_alias_map(path) == {"a@gmail.com": "a@x.edu",
                                        "bob.s@mail.com": "bob@x.edu"}


def rosters():
    return [
        TeamRoster("1", frozenset({"a@x.edu", "b@x.edu", "m@x.edu"}),
                   2.0, 2.0, 2.0, shared=frozenset({"m@x.edu"})),
        TeamRoster("2", frozenset({"c@x.edu", "d@x.edu", "m@x.edu"}),
                   3.0, 3.0, 3.0, shared=frozenset({"m@x.edu"})),
        TeamRoster("5", frozenset({"e@x.edu", "f@x.edu", "g@x.edu"}),
                   1.0, 1.0, 1.0),
    ]


class TestAssignTeams:
    def test_sender_and_all_recipients_in_one_team(self):
        ms = MessageSet((msg("a", "e@x.edu", ["f@x.edu", "g@x.edu"]),))
        out = assign_teams(ms, rosters())
        assert out.messages[0].team == "5"

    def test_cross_team_traffic_untagged(self):
        ms = MessageSet((msg("a", "a@x.edu", ["c@x.edu", "d@x.edu"]),))
        out = assign_teams(ms, rosters())
        assert out.messages[0].team is None

    def test_shared_member_majority_rule(self):
        # mentor m is in teams 1 and 2; two recipients from 2, one from 1
        ms = MessageSet((msg("a", "m@x.edu", ["c@x.edu", "d@x.edu", "a@x.edu"]),))
        out = assign_teams(ms, rosters())
        assert out.messages[0].team == "2"

    def test_tie_breaks_to_smallest_team_id(self):
        ms = MessageSet((msg("a", "m@x.edu", ["a@x.edu", "c@x.edu"]),))
        out = assign_teams(ms, rosters())
        assert out.messages[0].team == "1"


class TestLoadRosters:
    HEADER = "team,member,creativity,presentation,content\n"

    def test_members_grouped_and_ratings_parsed(self, tmp_path):
        path = tmp_path / "rosters.csv"
        path.write_text(self.HEADER +
                        "1,A@X.EDU,2.4,2.0,1.8\n"
                        "1,b@x.edu,2.4,2.0,1.8\n"
                        "2,c@x.edu,3.0,2.6,2.2\n", encoding="utf-8")
        loaded = load_rosters(path)
        assert [r.team for r in loaded] == ["1", "2"]
        assert loaded[0].members == frozenset({"a@x.edu", "b@x.edu"})
        assert loaded[0].creativity == 2.4
        assert loaded[1].shared == frozenset()

    def test_shared_members_flagged(self, tmp_path):
        path = tmp_path / "rosters.csv"
        path.write_text(self.HEADER +
                        "1,a@x.edu,2.0,2.0,2.0\n"
                        "1,m@x.edu,2.0,2.0,2.0\n"
                        "2,c@x.edu,3.0,3.0,3.0\n"
                        "2,m@x.edu,3.0,3.0,3.0\n", encoding="utf-8")
        loaded = load_rosters(path)
        assert loaded[0].shared == frozenset({"m@x.edu"})
        assert loaded[1].shared == frozenset({"m@x.edu"})

    def test_inconsistent_ratings_rejected(self, tmp_path):
        path = tmp_path / "rosters.csv"
        path.write_text(self.HEADER +
                        "1,a@x.edu,2.0,2.0,2.0\n"
                        "1,b@x.edu,2.5,2.0,2.0\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="inconsistent"):
            load_rosters(path)

    def test_rating_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "rosters.csv"
        path.write_text(self.HEADER + "1,a@x.edu,0.5,2.0,2.0\n", encoding="utf-8")
        with pytest.raises(ConfigError, match=r"outside \[1, 5\]"):
            load_rosters(path)
