"""Graph construction, windowing, density, and strong-tie filtering."""

import random
from datetime import datetime, timedelta, timezone

import pytest

from teamnet.graph import (
    CommGraph,
    WindowConfig,
    build_graph,
    day_origin,
    density,
    mean_tie_strength,
    strong_tie_filter,
    window_series,
    write_dot,
    write_edge_csv,
)
from teamnet.ingest import Message, MessageSet, TeamRoster

from oracles import brute_density


def ts(day: int, hour: int = 12) -> datetime:
    return datetime(2026, 3, 1, tzinfo=timezone.utc) + timedelta(days=day, hours=hour)


def msg(id: str, sender: str, recipients, day: int = 0, hour: int = 12,
        team=None) -> Message:
    return Message(id=id, sender=sender, recipients=tuple(recipients),
                   timestamp=ts(day, hour), subject="s", body="b", team=team)


def graph_of(*edge_weights) -> CommGraph:
    """CommGraph from (src, dst, w) triples; nodes inferred."""
    edges = {(u, v): w for u, v, w in edge_weights}
    nodes = {x for u, v, _ in edge_weights for x in (u, v)}
    return CommGraph(frozenset(nodes), edges, (ts(0), ts(0)))


ROSTER = TeamRoster("1", frozenset({"a", "b", "c", "idle"}), 2.0, 2.0, 2.0)


class TestBuildGraph:
    def test_one_message_two_recipients(self):
        ms = MessageSet((msg("m1", "a", ["b", "c"]),))
        g = build_graph(ms)
        assert g.edges == {("a", "b"): 1, ("a", "c"): 1}
        assert g.nodes == {"a", "b", "c"}

    def test_repeat_traffic_accumulates_weight(self):
        ms = MessageSet((msg("m1", "a", ["b"]), msg("m2", "a", ["b"], hour=13)))
        g = build_graph(ms)
        assert g.edges == {("a", "b"): 2}

    def test_self_recipient_ignored(self):
        ms = MessageSet((msg("m1", "a", ["a", "b"]),))
        g = build_graph(ms)
        assert g.edges == {("a", "b"): 1}
        assert g.nodes == {"a", "b"}

    def test_interval_endpoints_inclusive(self):
        ms = MessageSet((msg("m1", "a", ["b"], day=0),
                         msg("m2", "b", ["c"], day=1),
                         msg("m3", "c", ["a"], day=2)))
        g = build_graph(ms, interval=(ts(0), ts(1)))
        assert g.edges == {("a", "b"): 1, ("b", "c"): 1}

    def test_empty_interval_with_team_keeps_roster_nodes(self):
        ms = MessageSet((msg("m1", "a", ["b"], day=5, team="1"),))
        g = build_graph(ms, interval=(ts(0), ts(1)), team="1", roster=ROSTER)
        assert g.nodes == ROSTER.members
        assert g.edges == {}

    def test_team_filter_drops_outside_endpoints(self):
        ms = MessageSet((
            msg("m1", "a", ["b", "x@other"], team="1"),
            msg("m2", "x@other", ["y@other"], hour=13, team=None),
        ))
        g = build_graph(ms, team="1", roster=ROSTER)
        assert g.edges == {("a", "b"): 1}
        assert "idle" in g.nodes and "x@other" not in g.nodes

    def test_weight_conservation(self):
        rng = random.Random(7)
        actors = ["a", "b", "c", "d", "e"]
        messages = []
        for i in range(200):
            sender = rng.choice(actors)
            rcpts = rng.sample([x for x in actors if x != sender],
                               rng.randint(1, 3))
            messages.append(msg(f"m{i}", sender, rcpts, day=rng.randint(0, 5),
                                hour=rng.randint(0, 23)))
        ms = MessageSet(tuple(sorted(messages, key=lambda m: (m.timestamp, m.id))))
        g = build_graph(ms)
        assert sum(g.edges.values()) == sum(len(m.recipients) for m in ms.messages)


class TestWindowSeries:
    def test_day_zero_messages_fill_first_lookback_windows(self):
        ms = MessageSet(tuple(msg(f"m{i}", "a", ["b"], day=0, hour=i)
                              for i in range(3)))
        padded = MessageSet(ms.messages + (msg("late", "c", ["d"], day=9),))
        series = window_series(padded, WindowConfig(step_days=1, lookback_days=7))
        with_traffic = [w.day_index for w in series
                        if ("a", "b") in w.graph.edges]
        assert with_traffic == [0, 1, 2, 3, 4, 5, 6]

    def test_ten_day_span_gives_ten_windows(self):
        ms = MessageSet((msg("m1", "a", ["b"], day=0),
                         msg("m2", "a", ["b"], day=9)))
        series = window_series(ms, WindowConfig())
        assert [w.day_index for w in series] == list(range(10))

    def test_lookback_equal_step_partitions_messages(self):
        rng = random.Random(21)
        messages = [msg(f"m{i}", "a", ["b"], day=rng.randint(0, 14),
                        hour=rng.randint(0, 23)) for i in range(80)]
        ms = MessageSet(tuple(sorted(messages, key=lambda m: (m.timestamp, m.id))))
        for step in (1, 3):
            series = window_series(ms, WindowConfig(step_days=step,
                                                    lookback_days=step))
            counted = sum(sum(w.graph.edges.values()) for w in series)
            assert counted == len(ms)

    def test_interval_clips_at_origin(self):
        ms = MessageSet((msg("m1", "a", ["b"], day=0),
                         msg("m2", "a", ["b"], day=9)))
        series = window_series(ms, WindowConfig(lookback_days=7))
        origin = day_origin(ms)
        assert series[0].graph.interval == (origin, origin)
        assert series[9].graph.interval == (origin + timedelta(days=2),
                                            origin + timedelta(days=9))

    def test_cumulative_windows_grow_monotonically(self):
        ms = MessageSet((msg("m1", "a", ["b"], day=0),
                         msg("m2", "b", ["c"], day=4),
                         msg("m3", "c", ["a"], day=8)))
        series = window_series(ms, WindowConfig(cumulative=True))
        sizes = [sum(w.graph.edges.values()) for w in series]
        assert sizes == sorted(sizes)
        assert sizes[-1] == 3

    def test_team_windows_always_carry_roster_nodes(self):
        ms = MessageSet((msg("m1", "a", ["b"], day=0, team="1"),
                         msg("m2", "a", ["b"], day=6, team="1")))
        series = window_series(ms, WindowConfig(lookback_days=2), team="1",
                               roster=ROSTER)
        assert all(w.graph.nodes == ROSTER.members for w in series)
        assert series[4].graph.edges == {}

    def test_empty_message_set_rejected(self):
        with pytest.raises(ValueError):
            window_series(MessageSet(()), WindowConfig())

    def test_config_validation(self):
        with pytest.raises(ValueError):
            WindowConfig(step_days=0)
        with pytest.raises(ValueError):
            WindowConfig(step_days=3, lookback_days=2)


class TestDensity:
    def test_complete_directed_triangle(self):
        g = graph_of(("a", "b", 1), ("b", "a", 1), ("a", "c", 1),
                     ("c", "a", 1), ("b", "c", 1), ("c", "b", 1))
        assert density(g) == 1.0

    def test_single_edge_three_nodes(self):
        g = CommGraph(frozenset({"a", "b", "c"}), {("a", "b"): 1}, (ts(0), ts(0)))
        assert density(g) == pytest.approx(1 / 6)

    def test_tiny_graphs_are_zero(self):
        assert density(CommGraph(frozenset(), {}, (ts(0), ts(0)))) == 0.0
        assert density(CommGraph(frozenset({"a"}), {}, (ts(0), ts(0)))) == 0.0

    def test_matches_enumeration_on_random_graphs(self):
        rng = random.Random(99)
        for _ in range(50):
            n = rng.randint(2, 6)
            names = [f"v{i}" for i in range(n)]
            edges = {}
            for u in range(n):
                for v in range(n):
                    if u != v and rng.random() < 0.4:
                        edges[(names[u], names[v])] = rng.randint(1, 5)
            g = CommGraph(frozenset(names), edges, (ts(0), ts(0)))
            expected = brute_density(n, {(u, v) for u in range(n)
                                         for v in range(n)
                                         if (names[u], names[v]) in edges})
            assert density(g) == pytest.approx(expected)


class TestStrongTieFilter:
    def test_threshold_one_is_identity(self):
        g = graph_of(("a", "b", 3), ("b", "a", 1), ("b", "c", 2))
        assert strong_tie_filter(g, 1).edges == g.edges

    def test_symmetrized_weight_below_threshold_removes_both_directions(self):
        g = graph_of(("a", "b", 3), ("b", "a", 1))
        filtered = strong_tie_filter(g, 5)
        assert filtered.edges == {}
        assert filtered.nodes == g.nodes

    def test_symmetrized_weight_at_threshold_kept(self):
        g = graph_of(("a", "b", 3), ("b", "a", 1))
        assert strong_tie_filter(g, 4).edges == g.edges

    def test_idempotent(self):
        g = graph_of(("a", "b", 3), ("b", "a", 1), ("b", "c", 9), ("c", "a", 2))
        once = strong_tie_filter(g, 4)
        assert strong_tie_filter(once, 4).edges == once.edges

    def test_threshold_below_one_rejected(self):
        with pytest.raises(ValueError):
            strong_tie_filter(graph_of(("a", "b", 1)), 0)

    def test_mean_tie_strength(self):
        # pairs: a-b total 4, b-c total 2 -> mean 3
        g = graph_of(("a", "b", 3), ("b", "a", 1), ("b", "c", 2))
        assert mean_tie_strength(g) == 3.0
        assert mean_tie_strength(CommGraph(frozenset({"a"}), {}, (ts(0), ts(0)))) == 0.0


class TestExports:
    def test_edge_csv_sorted_and_stable(self, tmp_path):
        g = graph_of(("b", "a", 2), ("a", "b", 1), ("a", "c", 3))
        path = tmp_path / "edges.csv"
        write_edge_csv(g, path)
        assert path.read_text(encoding="utf-8").splitlines() == [
            "src,dst,weight", "a,b,1", "a,c,3", "b,a,2"]

    def test_dot_output(self, tmp_path):
        g = graph_of(("a", "b", 2))
        path = tmp_path / "g.dot"
        write_dot(g, path)
        text = path.read_text(encoding="utf-8")
        assert text.startswith('digraph "comm" {')
        assert '"a" -> "b" [weight=2, label=2];' in text
        assert text.endswith("}\n")
