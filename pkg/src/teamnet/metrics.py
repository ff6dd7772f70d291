"""Team metrics: centralities, contribution balance, rotating leadership,
response times, and sentiment.

Betweenness runs on the symmetrized unweighted graph by default; pass
directed=True to keep edge direction.  Raw scores count each unordered
{s, t} pair once; normalization divides by (n-1)(n-2)/2 so a star center
scores 1.0.  Directed scores count ordered pairs and normalize by
(n-1)(n-2).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from . import kernels
from .errors import MetricUnavailable
from .graph import (
    CommGraph,
    WindowConfig,
    WindowedGraph,
    build_graph,
    mean_tie_strength,
    strong_tie_filter,
    window_series,
)
from .ingest import Message, MessageSet, TeamRoster

DEFAULT_ART_CUTOFF_MIN = 14 * 24 * 60.0  # replies beyond 14 days are non-responses

_TOKEN_RE = re.compile(r"[^\W\d_]+")
_REPLY_PREFIX_RE = re.compile(r"^(?:re|fw|fwd)\s*:\s*", re.IGNORECASE)


@dataclass(frozen=True)
class ActorScores:
    """Per-actor centrality scores; kind is \"betweenness\" or \"degree\"."""

    scores: Mapping[str, float]
    kind: str


@dataclass(frozen=True)
class LeaderSeries:
    """Per-window communication leader; None where no one brokers traffic."""

    days: tuple[int, ...]
    leaders: tuple[str | None, ...]


@dataclass(frozen=True)
class TemporalSurface:
    """Actor x day matrix of normalized betweenness (rows follow actors)."""

    actors: tuple[str, ...]
    days: tuple[int, ...]
    values: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class TeamMetricsRow:
    """One team's full metrics record.

    art_norm_min, pos_sent, and awvci are None when the underlying data is
    insufficient (no replies, no messages, no traffic); downstream reports
    render them as missing rather than zero.
    """

    team: str
    creativity: float
    bc_oscillations: int
    art_norm_min: float | None
    pos_sent: float | None
    awvci: float | None
    gbc_strong_tie: float
    group_dc: float
    msg_recvd: int
    num_actors: int


METRICS_CSV_COLUMNS = ("team", "creativity", "bc_oscillations", "art_norm_min",
                       "pos_sent", "awvci", "gbc_strong_tie", "group_dc",
                       "msg_recvd", "num_actors")


def betweenness(g: CommGraph, normalized: bool = False,
                directed: bool = False) -> ActorScores:
    """Shortest-path betweenness per node; zeros whenever n < 3."""
    order = sorted(g.nodes)
    n = len(order)
    if n < 3:
        return ActorScores({v: 0.0 for v in order}, "betweenness")
    idx = {v: i for i, v in enumerate(order)}
    if directed:
        fwd = {(idx[u], idx[v]) for (u, v) in g.edges}
        rev = {(v, u) for (u, v) in fwd}
        indptr, indices = kernels.csr_adjacency(n, fwd)
        rindptr, rindices = kernels.csr_adjacency(n, rev)
        counts = kernels.betweenness_counts(n, indptr, indices, rindptr, rindices)
        denom = (n - 1) * (n - 2)
    else:
        sym = set()
        for (u, v) in g.edges:
            sym.add((idx[u], idx[v]))
            sym.add((idx[v], idx[u]))
        indptr, indices = kernels.csr_adjacency(n, sym)
        counts = kernels.betweenness_counts(n, indptr, indices, indptr, indices)
        counts *= 0.5  # ordered-pair sums -> each {s, t} counted once
        denom = (n - 1) * (n - 2) / 2
    if normalized:
        counts /= denom
    return ActorScores({v: float(counts[i]) for v, i in idx.items()}, "betweenness")


def degree(g: CommGraph) -> ActorScores:
    """Symmetrized degree: number of distinct neighbors."""
    adj = g.neighbors()
    return ActorScores({v: float(len(adj[v])) for v in sorted(g.nodes)}, "degree")


def centralization(scores: ActorScores, n: int | None = None) -> float:
    """Freeman centralization: sum of (max - score) over the kind's maximum.

    Betweenness scores must be normalized (divisor n-1); degree scores must
    be raw neighbor counts (divisor (n-1)(n-2)).  Star graphs score 1.0,
    equal-score graphs 0.0, and n < 3 is defined as 0.
    """
    values = list(scores.scores.values())
    if n is None:
        n = len(values)
    if n < 3 or not values:
        return 0.0
    cmax = max(values)
    total = sum(cmax - v for v in values)
    denom = (n - 1) * (n - 2) if scores.kind == "degree" else n - 1
    return total / denom


def contribution_index(sent: int, received: int) -> float:
    """(sent - received) / (sent + received); +1 only sends, -1 only receives."""
    total = sent + received
    if total <= 0:
        raise MetricUnavailable("no traffic")
    return (sent - received) / total


def member_traffic(ms: MessageSet, roster: TeamRoster) -> dict[str, tuple[int, int]]:
    """(sent, received) counts per roster member over team-tagged messages."""
    sent: Counter = Counter()
    received: Counter = Counter()
    for m in ms.messages:
        if m.team != roster.team:
            continue
        if m.sender in roster.members:
            sent[m.sender] += 1
        for r in m.recipients:
            if r in roster.members:
                received[r] += 1
    return {v: (sent[v], received[v]) for v in sorted(roster.members)}


def awvci(ms: MessageSet, roster: TeamRoster) -> float:
    """Traffic-weighted variance of member contribution indices.

    Weights are each member's share of total team traffic; members without
    traffic are excluded (their index is undefined).
    """
    traffic = member_traffic(ms, roster)
    total = sum(s + r for s, r in traffic.values())
    if total == 0:
        raise MetricUnavailable("no team traffic")
    terms = [((s + r) / total, (s - r) / (s + r))
             for s, r in traffic.values() if s + r > 0]
    mean = sum(w * ci for w, ci in terms)
    return sum(w * (ci - mean) ** 2 for w, ci in terms)


def leadership_series(windows: Sequence[WindowedGraph], roster: TeamRoster,
                      directed: bool = False) -> LeaderSeries:
    """Per-window leader: the roster member with maximal betweenness.

    Exact ties keep the previous window's leader when it is among the tied
    set, else the lexicographically smallest member wins.  Windows with no
    edges, or where nobody brokers any path (all-zero betweenness), have no
    leader.
    """
    days: list[int] = []
    leaders: list[str | None] = []
    previous: str | None = None
    for w in windows:
        days.append(w.day_index)
        leader = None
        if w.graph.edges:
            scores = betweenness(w.graph, directed=directed).scores
            per_member = {v: scores.get(v, 0.0) for v in roster.members}
            best = max(per_member.values())
            if best > 0.0:
                tied = sorted(v for v, s in per_member.items() if s == best)
                leader = previous if previous in tied else tied[0]
        leaders.append(leader)
        previous = leader
    return LeaderSeries(tuple(days), tuple(leaders))


def count_handovers(ls: LeaderSeries) -> int:
    """Leader changes between adjacent windows; gaps neither count nor bridge."""
    return sum(1 for a, b in zip(ls.leaders, ls.leaders[1:])
               if a is not None and b is not None and a != b)


def normalized_subject(subject: str) -> str:
    """Case-folded subject with reply/forward prefixes iteratively stripped."""
    s = subject.strip().casefold()
    while True:
        stripped = _REPLY_PREFIX_RE.sub("", s, count=1).strip()
        if stripped == s:
            return s
        s = stripped


def response_times(ms: MessageSet, team: str,
                   cutoff_min: float = DEFAULT_ART_CUTOFF_MIN) -> tuple[float, int]:
    """Mean minutes from a message to its earliest reply, and the pair count.

    Replies are matched by reply headers; messages without them fall back to
    subject matching (same normalized subject, replier among the original
    recipients).  Latencies above the cutoff are discarded as non-responses.
    """
    if cutoff_min <= 0:
        raise ValueError("cutoff must be positive")
    team_msgs = [m for m in ms.messages if m.team == team]
    by_id = {m.id: m for m in team_msgs}
    by_subject: dict[str, list[Message]] = {}
    for m in team_msgs:
        by_subject.setdefault(normalized_subject(m.subject), []).append(m)

    earliest: dict[str, Message] = {}

    def consider(parent: Message, reply: Message) -> None:
        if reply.sender == parent.sender or reply.timestamp < parent.timestamp:
            return
        cur = earliest.get(parent.id)
        if cur is None or (reply.timestamp, reply.id) < (cur.timestamp, cur.id):
            earliest[parent.id] = reply

    for r in team_msgs:
        parents = [by_id[p] for p in r.reply_parents if p in by_id]
        if parents:
            for parent in parents:
                consider(parent, r)
            continue
        subject = normalized_subject(r.subject)
        if not subject:
            continue
        candidates = [m for m in by_subject[subject]
                      if (m.timestamp, m.id) < (r.timestamp, r.id)
                      and r.sender in m.recipients]
        if candidates:
            consider(max(candidates, key=lambda m: (m.timestamp, m.id)), r)

    latencies = []
    for parent_id in sorted(earliest):
        reply = earliest[parent_id]
        minutes = (reply.timestamp - by_id[parent_id].timestamp).total_seconds() / 60.0
        if minutes <= cutoff_min:
            latencies.append(minutes)
    if not latencies:
        raise MetricUnavailable("no replies detected")
    return sum(latencies) / len(latencies), len(latencies)


@dataclass(frozen=True)
class SentimentLexicon:
    """Positive/negative word lists; the sides must be disjoint and nonempty."""

    positive: frozenset[str]
    negative: frozenset[str]

    def __post_init__(self) -> None:
        if not self.positive or not self.negative:
            raise ValueError("lexicon sides must be nonempty")
        overlap = self.positive & self.negative
        if overlap:
            raise ValueError("words on both lexicon sides: "
                             + ", ".join(sorted(overlap)[:5]))


def load_word_list(path: str | Path) -> frozenset[str]:
    """One lowercase word per line; `#` starts a comment; blanks ignored."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.split("#", 1)[0].strip().casefold()
        if word:
            words.add(word)
    return frozenset(words)


def load_lexicon(positive_path: str | Path,
                 negative_path: str | Path) -> SentimentLexicon:
    return SentimentLexicon(load_word_list(positive_path),
                            load_word_list(negative_path))


def default_lexicon() -> SentimentLexicon:
    """The bundled general-purpose opinion word lists."""
    base = resources.files("teamnet").joinpath("lexicons")
    with resources.as_file(base.joinpath("positive.txt")) as pos, \
            resources.as_file(base.joinpath("negative.txt")) as neg:
        return load_lexicon(pos, neg)


def _visible_text(body: str) -> str:
    """Body minus quoted-reply lines and everything after a signature mark."""
    lines = []
    for line in body.splitlines():
        if line.rstrip() == "--":
            break
        if line.startswith(">"):
            continue
        lines.append(line)
    return "\n".join(lines)


def sentiment_score(text: str, lex: SentimentLexicon) -> tuple[float, float]:
    """Positive and negative lexicon hits per 100 tokens."""
    tokens = _TOKEN_RE.findall(_visible_text(text).lower())
    if not tokens:
        return 0.0, 0.0
    pos = sum(1 for t in tokens if t in lex.positive)
    neg = sum(1 for t in tokens if t in lex.negative)
    return 100.0 * pos / len(tokens), 100.0 * neg / len(tokens)


def team_sentiment(ms: MessageSet, team: str,
                   lex: SentimentLexicon) -> tuple[float, float, float]:
    """Equal-weight per-message averages: (positive, negative, emotionality)."""
    scores = [sentiment_score(m.body, lex) for m in ms.messages if m.team == team]
    if not scores:
        raise MetricUnavailable("no team messages")
    pos = sum(s[0] for s in scores) / len(scores)
    neg = sum(s[1] for s in scores) / len(scores)
    return pos, neg, pos + neg


def temporal_surface(windows: Sequence[WindowedGraph], roster: TeamRoster,
                     directed: bool = False) -> TemporalSurface:
    """Normalized betweenness per member per window (the rotation landscape)."""
    actors = tuple(sorted(roster.members))
    days = tuple(w.day_index for w in windows)
    columns = []
    for w in windows:
        scores = betweenness(w.graph, normalized=True, directed=directed).scores
        columns.append([scores.get(a, 0.0) for a in actors])
    values = tuple(tuple(col[i] for col in columns) for i in range(len(actors)))
    return TemporalSurface(actors, days, values)


def team_metrics(ms: MessageSet, roster: TeamRoster, cfg: WindowConfig,
                 lex: SentimentLexicon, *, strong_tie_threshold: float | None = None,
                 art_cutoff_min: float = DEFAULT_ART_CUTOFF_MIN,
                 directed: bool = False) -> TeamMetricsRow:
    """Assemble the team's full metrics row.

    Oscillations come from the unfiltered window series; the strong-tie
    betweenness centralization uses the full-course team graph filtered at
    the given threshold (default: its mean symmetrized tie strength).
    """
    windows = window_series(ms, cfg, team=roster.team, roster=roster)
    oscillations = count_handovers(leadership_series(windows, roster,
                                                     directed=directed))

    full = build_graph(ms, team=roster.team, roster=roster)
    threshold = strong_tie_threshold
    if threshold is None:
        threshold = mean_tie_strength(full)
    strong = strong_tie_filter(full, max(threshold, 1.0))
    gbc = centralization(betweenness(strong, normalized=True, directed=directed),
                         strong.n)
    group_dc = centralization(degree(full), full.n)

    try:
        art, _ = response_times(ms, roster.team, art_cutoff_min)
    except MetricUnavailable:
        art = None
    try:
        pos_sent = team_sentiment(ms, roster.team, lex)[0]
    except MetricUnavailable:
        pos_sent = None
    try:
        variance = awvci(ms, roster)
    except MetricUnavailable:
        variance = None

    msg_recvd = 0
    actors: set[str] = set()
    for m in ms.messages:
        if m.team != roster.team:
            continue
        actors.add(m.sender)
        actors.update(m.recipients)
        msg_recvd += sum(1 for r in m.recipients if r in roster.members)

    return TeamMetricsRow(
        team=roster.team,
        creativity=roster.creativity,
        bc_oscillations=oscillations,
        art_norm_min=art,
        pos_sent=pos_sent,
        awvci=variance,
        gbc_strong_tie=gbc,
        group_dc=group_dc,
        msg_recvd=msg_recvd,
        num_actors=len(actors),
    )
