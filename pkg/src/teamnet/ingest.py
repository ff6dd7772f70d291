"""Email archive ingestion: parse, normalize, and team-tag messages.

The pipeline is parse_mbox / parse_message_csv -> canonicalize_actors ->
assign_teams.  All stages are pure: each returns a new MessageSet and keeps
a tally of data problems in MessageSet.warnings instead of failing on
individual bad messages.
"""

from __future__ import annotations

import csv
import hashlib
import html as html_lib
import logging
import mailbox
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from email.header import decode_header, make_header
from email.utils import getaddresses, parseaddr, parsedate_to_datetime
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigError

log = logging.getLogger("teamnet.ingest")

MESSAGE_CSV_COLUMNS = ("id", "sender", "recipients", "timestamp", "subject",
                       "reply_parents", "body")

_MSGID_RE = re.compile(r"<[^<>\s]+>")
_HTML_BREAK_RE = re.compile(r"(?i)<\s*br\s*/?>|</\s*p\s*>")
_HTML_BLOCK_RE = re.compile(r"(?is)<\s*(script|style)\b.*?</\s*\1\s*>")
_HTML_TAG_RE = re.compile(r"<[^>]+>")


@dataclass(frozen=True)
class Message:
    """One email, normalized to plain fields.

    recipients merges To and Cc; reply_parents holds the message-ids named
    by In-Reply-To and References.  timestamp is always UTC-aware.
    """

    id: str
    sender: str
    recipients: tuple[str, ...]
    timestamp: datetime
    subject: str
    body: str
    reply_parents: tuple[str, ...] = ()
    team: str | None = None


@dataclass(frozen=True)
class MessageSet:
    """Immutable, time-ordered collection of messages plus parse warnings."""

    messages: tuple[Message, ...]
    warnings: Mapping[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.messages)

    @property
    def actors(self) -> set[str]:
        found: set[str] = set()
        for m in self.messages:
            found.add(m.sender)
            found.update(m.recipients)
        return found

    @property
    def span(self) -> tuple[datetime, datetime]:
        if not self.messages:
            raise ValueError("empty message set has no span")
        return self.messages[0].timestamp, self.messages[-1].timestamp


@dataclass(frozen=True)
class TeamRoster:
    """Team membership and the ratings given to the team's final output.

    Ratings are on a 1..5 scale where 1 is best.  shared lists members who
    also belong to other teams (instructors/mentors).
    """

    team: str
    members: frozenset[str]
    creativity: float
    presentation: float
    content: float
    shared: frozenset[str] = frozenset()


def _finalize(messages: list[Message], warnings: Counter) -> MessageSet:
    messages.sort(key=lambda m: (m.timestamp, m.id))
    return MessageSet(tuple(messages), dict(sorted(warnings.items())))


def _warn(warnings: Counter, key: str, detail: str) -> None:
    warnings[key] += 1
    log.warning("%s: %s", key, detail)


def _decode_subject(raw: str | None) -> str:
    if not raw:
        return ""
    try:
        return str(make_header(decode_header(raw)))
    except Exception:
        return raw


def _strip_html(text: str) -> str:
    text = _HTML_BLOCK_RE.sub(" ", text)
    text = _HTML_BREAK_RE.sub("\n", text)
    text = _HTML_TAG_RE.sub(" ", text)
    return html_lib.unescape(text)


def _decode_payload(part) -> str | None:
    payload = part.get_payload(decode=True)
    if payload is None:
        return None
    charset = part.get_content_charset() or "utf-8"
    try:
        return payload.decode(charset, errors="replace")
    except LookupError:
        return payload.decode("utf-8", errors="replace")


def _extract_body(msg) -> str:
    """Plain-text body: prefer text/plain, fall back to de-tagged text/html."""
    if msg.is_multipart():
        plain = None
        html = None
        for part in msg.walk():
            if part.is_multipart() or part.get_filename():
                continue
            ctype = part.get_content_type()
            if ctype == "text/plain" and plain is None:
                plain = _decode_payload(part)
            elif ctype == "text/html" and html is None:
                html = _decode_payload(part)
        if plain is not None:
            return plain
        if html is not None:
            return _strip_html(html)
        return ""
    text = _decode_payload(msg)
    if text is None:
        return ""
    if msg.get_content_type() == "text/html":
        return _strip_html(text)
    return text


def _parse_date(raw: str | None, warnings: Counter) -> datetime | None:
    if not raw:
        return None
    try:
        ts = parsedate_to_datetime(raw)
    except (TypeError, ValueError):
        return None
    if ts is None:
        return None
    if ts.tzinfo is None:
        _warn(warnings, "assumed_utc", f"no timezone in date {raw!r}")
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def _clean_msgid(raw: str | None) -> str:
    if not raw:
        return ""
    match = _MSGID_RE.search(raw)
    if match:
        return match.group(0).strip("<>")
    return raw.strip().strip("<>")


def _parent_ids(msg) -> tuple[str, ...]:
    found: list[str] = []
    for header in ("In-Reply-To", "References"):
        for raw in msg.get_all(header, []):
            for mid in _MSGID_RE.findall(raw):
                mid = mid.strip("<>")
                if mid and mid not in found:
                    found.append(mid)
    return tuple(found)


def _merge_recipients(msg) -> tuple[str, ...]:
    """To + Cc addresses, order preserved, case-insensitively deduplicated."""
    seen: dict[str, str] = {}
    raw_fields = msg.get_all("To", []) + msg.get_all("Cc", [])
    for _, addr in getaddresses(raw_fields):
        addr = addr.strip()
        if addr and addr.lower() not in seen:
            seen[addr.lower()] = addr
    return tuple(seen.values())


def parse_mbox(path: str | Path) -> MessageSet:
    """Parse an RFC-4155-style mbox file into a MessageSet.

    Individual malformed messages (no sender, missing/unparseable date) are
    skipped and counted in the warnings; an unreadable file is fatal.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"mbox not found: {path}")
    warnings: Counter = Counter()
    messages: list[Message] = []
    seen_ids: set[str] = set()
    box = mailbox.mbox(str(path), create=False)
    try:
        for raw_msg in box:
            msg = _message_from_email(raw_msg, warnings)
            if msg is None:
                continue
            if msg.id in seen_ids:
                _warn(warnings, "duplicate_id", f"dropped duplicate {msg.id!r}")
                continue
            seen_ids.add(msg.id)
            messages.append(msg)
    finally:
        box.close()
    return _finalize(messages, warnings)


def _message_from_email(raw_msg, warnings: Counter) -> Message | None:
    sender = parseaddr(raw_msg.get("From") or "")[1].strip()
    if not sender:
        _warn(warnings, "skipped_no_sender", "message without usable From")
        return None
    ts = _parse_date(raw_msg.get("Date"), warnings)
    if ts is None:
        _warn(warnings, "skipped_bad_date",
              f"unparseable or missing Date from {sender!r}")
        return None
    recipients = _merge_recipients(raw_msg)
    if not recipients:
        _warn(warnings, "no_recipients", f"message from {sender!r} has no To/Cc")
    msg_id = _clean_msgid(raw_msg.get("Message-ID"))
    if not msg_id:
        digest = f"{sender}|{ts.isoformat()}|{raw_msg.get('Subject', '')}"
        msg_id = "generated-" + hashlib.sha1(digest.encode()).hexdigest()[:16] + "@local"
        _warn(warnings, "missing_message_id", f"synthesized id for {sender!r}")
    return Message(
        id=msg_id,
        sender=sender,
        recipients=recipients,
        timestamp=ts,
        subject=_decode_subject(raw_msg.get("Subject")),
        body=_extract_body(raw_msg),
        reply_parents=_parent_ids(raw_msg),
    )


def parse_message_csv(path: str | Path) -> MessageSet:
    """Parse the interchange CSV format (see MESSAGE_CSV_COLUMNS).

    recipients and reply_parents are `;`-separated; timestamp is ISO-8601.
    A missing required column is fatal; a bad row is skipped with a warning.
    """
    path = Path(path)
    warnings: Counter = Counter()
    messages: list[Message] = []
    seen_ids: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in MESSAGE_CSV_COLUMNS if c not in header]
        if missing:
            raise ValueError("missing column: " + ", ".join(missing))
        for lineno, row in enumerate(reader, start=2):
            msg = _message_from_csv_row(row, lineno, warnings)
            if msg is None:
                continue
            if msg.id in seen_ids:
                _warn(warnings, "duplicate_id", f"dropped duplicate {msg.id!r}")
                continue
            seen_ids.add(msg.id)
            messages.append(msg)
    return _finalize(messages, warnings)


def _message_from_csv_row(row, lineno: int, warnings: Counter) -> Message | None:
    msg_id = (row["id"] or "").strip()
    sender = (row["sender"] or "").strip()
    raw_ts = (row["timestamp"] or "").strip()
    if not msg_id or not sender:
        _warn(warnings, "skipped_bad_row", f"line {lineno}: empty id or sender")
        return None
    try:
        ts = datetime.fromisoformat(raw_ts.replace("Z", "+00:00"))
    except ValueError:
        _warn(warnings, "skipped_bad_row", f"line {lineno}: bad timestamp {raw_ts!r}")
        return None
    if ts.tzinfo is None:
        _warn(warnings, "assumed_utc", f"line {lineno}: naive timestamp")
        ts = ts.replace(tzinfo=timezone.utc)
    recipients = tuple(p for p in (row["recipients"] or "").split(";") if p)
    if not recipients:
        _warn(warnings, "no_recipients", f"line {lineno}: no recipients")
    parents = tuple(p for p in (row["reply_parents"] or "").split(";") if p)
    return Message(
        id=msg_id,
        sender=sender,
        recipients=recipients,
        timestamp=ts.astimezone(timezone.utc).replace(microsecond=0),
        subject=row["subject"] or "",
        body=row["body"] or "",
        reply_parents=parents,
    )


def export_message_csv(ms: MessageSet, path: str | Path) -> None:
    """Write the interchange CSV; parse_message_csv round-trips it exactly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MESSAGE_CSV_COLUMNS)
        for m in ms.messages:
            writer.writerow([
                m.id,
                m.sender,
                ";".join(m.recipients),
                m.timestamp.isoformat(),
                m.subject,
                ";".join(m.reply_parents),
                m.body,
            ])


def canonical_address(raw: str) -> str:
    """Lowercased bare address with any display name stripped.  Idempotent."""
    addr = parseaddr(raw)[1].strip().lower()
    return addr if addr else raw.strip().lower()


def load_alias_map(path: str | Path) -> dict[str, str]:
    """Read a 2-column TSV of raw -> canonical address mappings.

    Both columns are normalized; a canonical address that itself maps
    onward to a different address is a fatal configuration error.
    """
    aliases: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'raw<TAB>canonical'")
            raw, canon = canonical_address(parts[0]), canonical_address(parts[1])
            if raw in aliases and aliases[raw] != canon:
                raise ConfigError(f"{path}:{lineno}: conflicting alias for {raw!r}")
            aliases[raw] = canon
    _check_alias_chains(aliases)
    return aliases


def _check_alias_chains(aliases: Mapping[str, str]) -> None:
    problems = []
    for raw, canon in aliases.items():
        onward = aliases.get(canon)
        if onward is not None and onward != canon:
            problems.append(f"alias chain: {raw!r} -> {canon!r} -> {onward!r}")
    if problems:
        raise ConfigError(problems)


def canonicalize_actors(
    ms: MessageSet,
    aliases: Mapping[str, str] | None = None,
    dummy_addresses: Iterable[str] = (),
) -> MessageSet:
    """Normalize every sender/recipient to its canonical actor id.

    Applies lowercasing, display-name stripping, then the alias map.  The
    dummy collector addresses are removed from recipient lists everywhere
    (they are the observation channel, not actors).  Messages that end up
    addressed only to the sender, or only to the collector, are dropped
    with a counted warning.  Idempotent.
    """
    aliases = dict(aliases or {})
    _check_alias_chains(aliases)
    dummies = {aliases.get(a, a) for a in (canonical_address(d) for d in dummy_addresses)}
    warnings: Counter = Counter(ms.warnings)
    out: list[Message] = []
    for m in ms.messages:
        sender = canonical_address(m.sender)
        sender = aliases.get(sender, sender)
        if not sender:
            _warn(warnings, "skipped_bad_actor", f"unusable sender in {m.id!r}")
            continue
        recipients: list[str] = []
        for raw in m.recipients:
            addr = canonical_address(raw)
            addr = aliases.get(addr, addr)
            if not addr or addr in dummies:
                continue
            if addr not in recipients:
                recipients.append(addr)
        if m.recipients and not recipients:
            _warn(warnings, "dummy_only_dropped",
                  f"{m.id!r} had no recipients besides the collector")
            continue
        if recipients == [sender]:
            _warn(warnings, "self_loop_dropped", f"{m.id!r} addressed only to sender")
            continue
        out.append(replace(m, sender=sender, recipients=tuple(recipients)))
    return _finalize(out, warnings)


def assign_teams(ms: MessageSet, rosters: Iterable[TeamRoster]) -> MessageSet:
    """Tag each message with the team it belongs to.

    A message belongs to team T when its sender and at least one recipient
    are members of T.  If several teams qualify, the team containing most of
    the message's participants wins; remaining ties go to the smallest team
    id.  Everything else is tagged None (inter-team traffic).
    """
    rosters = list(rosters)
    membership: dict[str, set[str]] = {}
    for roster in rosters:
        for member in roster.members:
            membership.setdefault(member, set()).add(roster.team)
    members_of = {r.team: r.members for r in rosters}

    out: list[Message] = []
    for m in ms.messages:
        candidates = set()
        sender_teams = membership.get(m.sender, set())
        for addr in m.recipients:
            for team in membership.get(addr, set()) & sender_teams:
                candidates.add(team)
        team = None
        if candidates:
            participants = {m.sender, *m.recipients}
            team = min(
                candidates,
                key=lambda t: (-len(participants & members_of[t]), t),
            )
        out.append(replace(m, team=team))
    return MessageSet(tuple(out), dict(ms.warnings))


def load_rosters(
    path: str | Path,
    aliases: Mapping[str, str] | None = None,
) -> list[TeamRoster]:
    """Read team rosters from CSV `team,member,creativity,presentation,content`.

    Ratings repeat on every member row and must be consistent within a team;
    they must lie in [1, 5] (1 is best).  Members appearing in more than one
    team are flagged as shared on every roster that lists them.
    """
    aliases = dict(aliases or {})
    required = ("team", "member", "creativity", "presentation", "content")
    teams: dict[str, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ConfigError(f"{path}: missing column: " + ", ".join(missing))
        for lineno, row in enumerate(reader, start=2):
            team = (row["team"] or "").strip()
            member = canonical_address(row["member"] or "")
            member = aliases.get(member, member)
            if not team or not member:
                raise ConfigError(f"{path}:{lineno}: empty team or member")
            try:
                ratings = tuple(float(row[c]) for c in ("creativity", "presentation", "content"))
            except (TypeError, ValueError):
                raise ConfigError(f"{path}:{lineno}: ratings must be numeric") from None
            for value in ratings:
                if not 1.0 <= value <= 5.0:
                    raise ConfigError(f"{path}:{lineno}: rating {value} outside [1, 5]")
            entry = teams.setdefault(team, {"members": set(), "ratings": ratings})
            if entry["ratings"] != ratings:
                raise ConfigError(f"{path}:{lineno}: inconsistent ratings for team {team!r}")
            entry["members"].add(member)

    counts: Counter = Counter()
    for entry in teams.values():
        counts.update(entry["members"])
    shared = {member for member, n in counts.items() if n > 1}

    rosters = []
    for team in sorted(teams):
        entry = teams[team]
        rosters.append(TeamRoster(
            team=team,
            members=frozenset(entry["members"]),
            creativity=entry["ratings"][0],
            presentation=entry["ratings"][1],
            content=entry["ratings"][2],
            shared=frozenset(entry["members"] & shared),
        ))
    return rosters
