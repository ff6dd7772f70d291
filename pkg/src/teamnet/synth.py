"""Deterministic synthetic corpus generator with scripted ground truth.

Builds an mbox archive plus rosters, aliases, run config, and a manifest
recording exactly what was generated: leader schedules and handover counts,
reply latencies, message compositions, and per-member traffic tallies.
Tests use the manifest as an independent oracle for the whole pipeline.

The script is exact by construction:

- Each team's day is a star around the scripted leader, so the leader holds
  maximal betweenness.  Windows that straddle a leadership boundary contain
  two overlapping stars whose centers tie exactly (the tie value is a small
  dyadic rational), which the incumbent rule resolves; each boundary
  therefore yields exactly one handover.
- Every message body has a fixed token composition, so sentiment ratios are
  exact.  Quoted lines and a signature block carrying contaminating words
  are appended everywhere to exercise the stripping rules.
- Every broadcast gets exactly one scripted reply via reply headers; all
  other subjects are unique, so no accidental subject-fallback pairs exist.

No randomness is involved; identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from email.utils import format_datetime
from pathlib import Path

DUMMY = "collector@vm.example"
ORIGIN = datetime(2026, 1, 5, tzinfo=timezone.utc)
TOKENS_PER_BODY = 20

POS_WORDS = ("great", "good", "excellent", "wonderful", "fantastic")
NEG_WORDS = ("bad", "awful", "terrible", "poor", "dreadful")
FILLERS = ("update", "regarding", "schedule", "document", "draft", "meeting",
           "review", "agenda", "notes", "item", "plan", "section", "budget",
           "report", "deadline")

# Invisible decorations: a quoted line and a signature full of sentiment
# words that correct scoring must ignore.
DECORATION = "> quoted awful terrible praise\n-- \nteam mailer great service"


@dataclass(frozen=True)
class TeamScript:
    """Scripted parameters for one synthetic team."""

    team: str
    size: int
    handovers: int
    latency_base_min: int
    pos_tokens: int
    neg_tokens: int
    extra_per_day: int
    creativity: float
    external_cc_every: int | None = None  # CC an outside mentor every N days
    alias_every: int | None = None  # leader uses a personal address every N days

    def __post_init__(self) -> None:
        if self.size < 4:
            raise ValueError("teams need >= 4 members for exact boundary ties")
        if self.pos_tokens + self.neg_tokens > TOKENS_PER_BODY:
            raise ValueError("body composition exceeds the token budget")
        if not 1.0 <= self.creativity <= 5.0:
            raise ValueError("creativity outside [1, 5]")


@dataclass(frozen=True)
class CorpusSpec:
    """Whole-corpus script: duration, window shape, and team scripts."""

    days: int
    lookback_days: int
    teams: tuple[TeamScript, ...]
    step_days: int = 1
    duplicate_every: int | None = 20  # re-emit a broadcast every N days
    inter_team_every: int | None = 9  # cross-team noise every N days
    malformed: int = 2  # dateless messages appended at the end

    def __post_init__(self) -> None:
        for script in self.teams:
            tenure = self.days // (script.handovers + 1)
            if tenure < self.lookback_days + 1:
                raise ValueError(
                    f"team {script.team}: {self.days} days cannot fit "
                    f"{script.handovers} handovers with lookback "
                    f"{self.lookback_days}")


def _member(team: str, i: int) -> str:
    return f"t{int(team):02d}.p{i}@course.example"


def _alias_pair(team: str) -> tuple[str, str]:
    return f"pat.zero.t{int(team):02d}@personal.example", _member(team, 0)


def _tenures(days: int, handovers: int) -> list[tuple[int, int]]:
    """(start_day, length) per tenure, lengths as equal as possible."""
    n = handovers + 1
    base, rem = divmod(days, n)
    out = []
    start = 0
    for i in range(n):
        length = base + (1 if i < rem else 0)
        out.append((start, length))
        start += length
    return out


def _body(script: TeamScript) -> str:
    words = []
    for i in range(script.pos_tokens):
        words.append(POS_WORDS[i % len(POS_WORDS)])
    for i in range(script.neg_tokens):
        words.append(NEG_WORDS[i % len(NEG_WORDS)])
    filler = TOKENS_PER_BODY - len(words)
    for i in range(filler):
        words.append(FILLERS[i % len(FILLERS)])
    return " ".join(words) + "\n" + DECORATION


@dataclass
class _Tally:
    sent: Counter = field(default_factory=Counter)
    received: Counter = field(default_factory=Counter)
    deliveries: int = 0
    actors: set = field(default_factory=set)
    messages: int = 0
    latencies: list = field(default_factory=list)
    edges: Counter = field(default_factory=Counter)


class _MboxWriter:
    def __init__(self) -> None:
        self.chunks: list[str] = []
        self.count = 0

    def add(self, sender_header: str, to: list[str], cc: list[str],
            ts: datetime | None, msg_id: str, subject: str, body: str,
            in_reply_to: str | None = None) -> None:
        lines = [f"From - Mon Jan  5 00:00:00 2026"]
        lines.append(f"From: {sender_header}")
        lines.append(f"To: {', '.join(to)}")
        if cc:
            lines.append(f"Cc: {', '.join(cc)}")
        if ts is not None:
            lines.append(f"Date: {format_datetime(ts)}")
        lines.append(f"Message-ID: <{msg_id}>")
        lines.append(f"Subject: {subject}")
        if in_reply_to:
            lines.append(f"In-Reply-To: <{in_reply_to}>")
        lines.append("")
        lines.append(body)
        lines.append("")
        self.chunks.append("\n".join(lines))
        self.count += 1

    def text(self) -> str:
        return "\n".join(self.chunks)


def generate_corpus(spec: CorpusSpec, outdir: str | Path) -> dict:
    """Write course.mbox, rosters.csv, aliases.tsv, config.ini, manifest.json.

    Returns the manifest dict (also written to disk).
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    writer = _MboxWriter()
    tallies = {s.team: _Tally() for s in spec.teams}
    schedules: dict[str, list[tuple[int, int, str]]] = {}
    aliases: dict[str, str] = {}
    duplicates = 0

    for script in spec.teams:
        if script.alias_every:
            raw, canon = _alias_pair(script.team)
            aliases[raw] = canon

    def emit_team_message(script: TeamScript, sender: str, recipients: list[str],
                          ts: datetime, msg_id: str, subject: str,
                          external: str | None = None,
                          in_reply_to: str | None = None,
                          sender_header: str | None = None) -> None:
        """One canonical team message plus its tally bookkeeping."""
        tally = tallies[script.team]
        cc = [DUMMY] + ([external] if external else [])
        writer.add(sender_header or sender, recipients, cc, ts, msg_id,
                   subject, _body(script), in_reply_to)
        tally.messages += 1
        tally.sent[sender] += 1
        tally.actors.add(sender)
        if external:
            tally.actors.add(external)
        for r in recipients:
            tally.received[r] += 1
            tally.actors.add(r)
            tally.deliveries += 1
            tally.edges[(sender, r)] += 1

    for script in spec.teams:
        members = [_member(script.team, i) for i in range(script.size)]
        tenures = _tenures(spec.days, script.handovers)
        schedules[script.team] = [
            (start, length, members[i % script.size])
            for i, (start, length) in enumerate(tenures)
        ]

    for day in range(spec.days):
        day_start = ORIGIN + timedelta(days=day)
        for ti, script in enumerate(spec.teams):
            members = [_member(script.team, i) for i in range(script.size)]
            leader = next(leader for start, length, leader
                          in schedules[script.team]
                          if start <= day < start + length)
            others = [m for m in members if m != leader]

            external = None
            if script.external_cc_every and day % script.external_cc_every == 0:
                external = f"mentor{int(script.team):02d}@outside.example"

            sender_header = leader
            if (script.alias_every and leader == members[0]
                    and day % script.alias_every == 0):
                raw, _ = _alias_pair(script.team)
                sender_header = f"Pat Zero <{raw}>"

            broadcast_id = f"b.t{script.team}.d{day}@synth"
            subject = f"brief team {script.team} day {day}"
            emit_team_message(script, leader, others,
                              day_start + timedelta(hours=9), broadcast_id,
                              subject, external=external,
                              sender_header=sender_header)

            latency = script.latency_base_min + 3 * (day % 7)
            replier = others[day % len(others)]
            reply_ts = day_start + timedelta(hours=9, minutes=latency)
            emit_team_message(script, replier, [leader], reply_ts,
                              f"r.t{script.team}.d{day}@synth",
                              f"Re: {subject}", in_reply_to=broadcast_id)
            tallies[script.team].latencies.append(float(latency))

            for j in range(script.extra_per_day):
                partner = others[(day + j) % len(others)]
                src, dst = ((leader, partner) if (day + j) % 2 == 0
                            else (partner, leader))
                emit_team_message(script, src, [dst],
                                  day_start + timedelta(hours=11, minutes=23 * j),
                                  f"e.t{script.team}.d{day}.j{j}@synth",
                                  f"note team {script.team} day {day} item {j}")

            if spec.duplicate_every and day % spec.duplicate_every == 5:
                writer.add(leader, others, [DUMMY],
                           day_start + timedelta(hours=9), broadcast_id,
                           subject, _body(script))
                duplicates += 1

        if spec.inter_team_every and day % spec.inter_team_every == 4 \
                and len(spec.teams) > 1:
            a = spec.teams[day % len(spec.teams)]
            b = spec.teams[(day % len(spec.teams) + 1) % len(spec.teams)]
            writer.add(_member(a.team, 1), [_member(b.team, 1)], [DUMMY],
                       day_start + timedelta(hours=15), f"n.d{day}@synth",
                       f"cross note day {day}", _body(a))

    for i in range(spec.malformed):
        writer.add("broken@course.example", ["someone@course.example"], [],
                   None, f"x.{i}@synth", f"dateless {i}", "no date header")

    (outdir / "course.mbox").write_text(writer.text(), encoding="utf-8")

    roster_lines = ["team,member,creativity,presentation,content"]
    for script in spec.teams:
        for i in range(script.size):
            roster_lines.append(
                f"{script.team},{_member(script.team, i)},{script.creativity},"
                f"{script.creativity},{script.creativity}")
    (outdir / "rosters.csv").write_text("\n".join(roster_lines) + "\n",
                                        encoding="utf-8")

    alias_lines = ["# personal address -> course address"]
    alias_lines += [f"{raw}\t{canon}" for raw, canon in sorted(aliases.items())]
    (outdir / "aliases.tsv").write_text("\n".join(alias_lines) + "\n",
                                        encoding="utf-8")

    config = "\n".join([
        "[inputs]",
        "mbox = course.mbox",
        "rosters = rosters.csv",
        "aliases = aliases.tsv",
        "",
        "[actors]",
        f"dummy_addresses = {DUMMY}",
        "",
        "[windows]",
        f"step_days = {spec.step_days}",
        f"lookback_days = {spec.lookback_days}",
        "",
        "[analysis]",
        "strong_tie_threshold = mean",
        "",
        "[output]",
        "directory = out",
    ]) + "\n"
    (outdir / "config.ini").write_text(config, encoding="utf-8")

    teams_manifest = {}
    for script in spec.teams:
        tally = tallies[script.team]
        members = [_member(script.team, i) for i in range(script.size)]
        teams_manifest[script.team] = {
            "members": members,
            "creativity": script.creativity,
            "handovers": script.handovers,
            "tenures": [list(t) for t in schedules[script.team]],
            "art_mean_min": sum(tally.latencies) / len(tally.latencies),
            "reply_pairs": len(tally.latencies),
            "pos_sent": 100.0 * script.pos_tokens / TOKENS_PER_BODY,
            "neg_sent": 100.0 * script.neg_tokens / TOKENS_PER_BODY,
            "msg_recvd": tally.deliveries,
            "num_actors": len(tally.actors),
            "messages": tally.messages,
            "sent": {m: tally.sent[m] for m in members},
            "received": {m: tally.received[m] for m in members},
            "edges": {f"{u} {v}": w for (u, v), w in sorted(tally.edges.items())},
        }

    manifest = {
        "origin": ORIGIN.isoformat(),
        "days": spec.days,
        "step_days": spec.step_days,
        "lookback_days": spec.lookback_days,
        "dummy_addresses": [DUMMY],
        "aliases": aliases,
        "expected_warnings": {
            "duplicate_id": duplicates,
            "skipped_bad_date": spec.malformed,
        },
        "total_messages": writer.count - duplicates - spec.malformed,
        "teams": teams_manifest,
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
