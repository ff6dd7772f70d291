"""Communication graphs: full-span builds, sliding-window series, exports.

A CommGraph is a directed multigraph collapsed to weighted edges: one edge
per (sender, recipient) pair whose weight counts the messages between them
inside the graph's interval.  Window series slice the course into one graph
per day on a shared day axis anchored at the course origin (UTC midnight of
the first message's day).
"""

from __future__ import annotations

import csv
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .ingest import Message, MessageSet, TeamRoster

DAY = timedelta(days=1)


@dataclass(frozen=True)
class CommGraph:
    """Directed weighted communication graph over a time interval."""

    nodes: frozenset[str]
    edges: Mapping[tuple[str, str], int]
    interval: tuple[datetime, datetime]

    @property
    def n(self) -> int:
        return len(self.nodes)

    def neighbors(self) -> dict[str, set[str]]:
        """Symmetrized adjacency (distinct neighbors per node)."""
        adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        for (u, v) in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class WindowConfig:
    """Sliding-window settings for the per-day graph series.

    A window for day d covers the lookback_days up to and including d (right
    closed, so the day's own messages count).  cumulative=True instead grows
    every window from the course origin, for development-phase snapshots.
    """

    step_days: int = 1
    lookback_days: int = 7
    cumulative: bool = False

    def __post_init__(self) -> None:
        if self.step_days < 1:
            raise ValueError("step_days must be >= 1")
        if self.lookback_days < self.step_days:
            raise ValueError("lookback_days must be >= step_days")


@dataclass(frozen=True)
class WindowedGraph:
    day_index: int
    graph: CommGraph


def day_origin(ms: MessageSet) -> datetime:
    """UTC midnight of the first message's day."""
    first = ms.span[0]
    return datetime(first.year, first.month, first.day, tzinfo=timezone.utc)


def day_index_of(ts: datetime, origin: datetime) -> int:
    return (ts - origin) // DAY


def _graph_from_messages(
    messages: Iterable[Message],
    interval: tuple[datetime, datetime],
    roster: TeamRoster | None,
) -> CommGraph:
    weights: dict[tuple[str, str], int] = {}
    nodes: set[str] = set(roster.members) if roster else set()
    restrict = roster.members if roster else None
    for m in messages:
        if restrict is not None and m.sender not in restrict:
            continue
        if restrict is None:
            nodes.add(m.sender)
        for r in m.recipients:
            if r == m.sender:
                continue  # no self-loops
            if restrict is not None and r not in restrict:
                continue
            if restrict is None:
                nodes.add(r)
            key = (m.sender, r)
            weights[key] = weights.get(key, 0) + 1
    return CommGraph(frozenset(nodes), weights, interval)


def build_graph(
    ms: MessageSet,
    interval: tuple[datetime, datetime] | None = None,
    team: str | None = None,
    roster: TeamRoster | None = None,
) -> CommGraph:
    """Graph over [start, end] (inclusive), optionally restricted to one team.

    With a team filter, only messages tagged with that team contribute, and
    the node set is exactly the roster membership (isolated members kept,
    outside participants dropped).
    """
    if team is not None and roster is None:
        raise ValueError("team filter requires the team's roster")
    if interval is None:
        interval = ms.span
    start, end = interval
    if start > end:
        raise ValueError("interval start is after its end")
    stamps = [m.timestamp for m in ms.messages]
    lo = bisect_left(stamps, start)
    hi = bisect_right(stamps, end)
    selected = (m for m in ms.messages[lo:hi] if team is None or m.team == team)
    return _graph_from_messages(selected, interval, roster if team is not None else None)


def window_series(
    ms: MessageSet,
    cfg: WindowConfig,
    team: str | None = None,
    roster: TeamRoster | None = None,
) -> list[WindowedGraph]:
    """One graph per window from day 0 through the last day of the span.

    Day indices advance by cfg.step_days; the window with day_index d holds
    the messages whose day falls in (d*step - lookback, d*step].  Early
    windows clip at the course origin.
    """
    if not ms.messages:
        raise ValueError("empty message set")
    if team is not None and roster is None:
        raise ValueError("team filter requires the team's roster")
    origin = day_origin(ms)
    last_day = day_index_of(ms.span[1], origin)

    by_day: dict[int, list[Message]] = {}
    for m in ms.messages:
        if team is not None and m.team != team:
            continue
        by_day.setdefault(day_index_of(m.timestamp, origin), []).append(m)

    step, lookback = cfg.step_days, cfg.lookback_days
    count = -(-last_day // step) + 1  # ceil(last_day / step) + 1 windows
    series: list[WindowedGraph] = []
    for d in range(count):
        end_day = d * step
        start_day = -1 if cfg.cumulative else end_day - lookback
        msgs: list[Message] = []
        for day in range(max(start_day + 1, 0), end_day + 1):
            msgs.extend(by_day.get(day, ()))
        # Interval start clips at the course origin for the early windows.
        interval = (origin + max(start_day, 0) * DAY, origin + end_day * DAY)
        series.append(WindowedGraph(d, _graph_from_messages(msgs, interval, roster)))
    return series


def density(g: CommGraph) -> float:
    """Distinct directed edges over n(n-1); 0 when fewer than 2 nodes."""
    if g.n < 2:
        return 0.0
    return len(g.edges) / (g.n * (g.n - 1))


def symmetrized_weights(g: CommGraph) -> dict[tuple[str, str], int]:
    """Total message volume per unordered pair, keyed by the sorted pair."""
    totals: dict[tuple[str, str], int] = {}
    for (u, v), w in g.edges.items():
        key = (u, v) if u <= v else (v, u)
        totals[key] = totals.get(key, 0) + w
    return totals


def mean_tie_strength(g: CommGraph) -> float:
    """Mean symmetrized weight over pairs with any traffic (0 if no edges)."""
    totals = symmetrized_weights(g)
    if not totals:
        return 0.0
    return sum(totals.values()) / len(totals)


def strong_tie_filter(g: CommGraph, threshold: float) -> CommGraph:
    """Keep edges whose symmetrized weight meets the threshold; keep all nodes."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    totals = symmetrized_weights(g)
    kept = {
        (u, v): w
        for (u, v), w in g.edges.items()
        if totals[(u, v) if u <= v else (v, u)] >= threshold
    }
    return CommGraph(g.nodes, kept, g.interval)


def write_edge_csv(g: CommGraph, path: str | Path) -> None:
    """Edge list as `src,dst,weight`, sorted for stable output."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        for (u, v) in sorted(g.edges):
            writer.writerow([u, v, g.edges[(u, v)]])


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(g: CommGraph, path: str | Path, name: str = "comm") -> None:
    """DOT digraph with message counts as edge weights, for external layout."""
    lines = [f"digraph {_dot_quote(name)} {{"]
    for node in sorted(g.nodes):
        lines.append(f"  {_dot_quote(node)};")
    for (u, v) in sorted(g.edges):
        w = g.edges[(u, v)]
        lines.append(f"  {_dot_quote(u)} -> {_dot_quote(v)} [weight={w}, label={w}];")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
