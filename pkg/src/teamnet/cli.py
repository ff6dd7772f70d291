"""Command-line entry point.

Subcommands:
  analyze        full pipeline: parse, tag, measure, correlate, report
  correlate      correlation table from an existing metrics CSV
  export-graphs  whole-course and per-team edge lists (CSV + DOT)
  surface        per-team actor x day betweenness matrices

Exit codes: 0 success, 1 runtime failure, 2 configuration error.  Set
TEAMNET_LOG=debug|info|warning|error to control stderr logging.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import re
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, TeamnetError
from .graph import build_graph, window_series, write_dot, write_edge_csv
from .ingest import (
    MessageSet,
    TeamRoster,
    assign_teams,
    canonicalize_actors,
    load_alias_map,
    load_rosters,
    parse_mbox,
    parse_message_csv,
)
from .metrics import (
    METRICS_CSV_COLUMNS,
    SentimentLexicon,
    TeamMetricsRow,
    default_lexicon,
    load_lexicon,
    team_metrics,
    temporal_surface,
)
from .report import (
    emit_run_report,
    export_contribution_scatter,
    export_surface,
    format_correlation_text,
    read_metrics_csv,
    write_correlations_csv,
)
from .stats import CorrelationTable, correlation_matrix

log = logging.getLogger("teamnet.cli")

CONFIG_HELP = """\
config file keys (INI format; paths are relative to the config file):

[inputs]
  mbox            path to an mbox archive (this or messages_csv, not both)
  messages_csv    path to a message CSV in the interchange format
  rosters         team roster CSV: team,member,creativity,presentation,content
  aliases         optional TSV mapping raw addresses to canonical ones
  positive_words  optional lexicon file (one word per line, # comments);
  negative_words  both word lists must be given together, default: bundled

[actors]
  dummy_addresses comma-separated collector addresses to drop from recipients

[windows]
  step_days       window step in days (default 1)
  lookback_days   window length in days (default 7, must be >= step_days)
  cumulative      true to grow windows from the course start (default false)

[analysis]
  strong_tie_threshold  'mean' (default) or a fixed weight >= 1
  art_cutoff_min        reply latency cutoff in minutes (default 20160)
  directed              true to keep edge direction in betweenness

[output]
  directory       report directory (default 'out')
"""


class StageFailure(Exception):
    """Carries the pipeline stage name alongside the original error."""

    def __init__(self, stage: str, error: Exception):
        super().__init__(f"error in {stage} stage: {error}")
        self.stage = stage
        self.error = error


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageFailure:
        raise
    except Exception as exc:
        raise StageFailure(name, exc) from exc


def _load_inputs(cfg: RunConfig) -> tuple[MessageSet, list[TeamRoster],
                                          SentimentLexicon]:
    if cfg.mbox is not None:
        ms = parse_mbox(cfg.mbox)
    else:
        assert cfg.messages_csv is not None
        ms = parse_message_csv(cfg.messages_csv)
    aliases = load_alias_map(cfg.aliases) if cfg.aliases is not None else {}
    ms = canonicalize_actors(ms, aliases, cfg.dummy_addresses)
    rosters = load_rosters(cfg.rosters, aliases)
    ms = assign_teams(ms, rosters)
    if cfg.positive_words is not None and cfg.negative_words is not None:
        lexicon = load_lexicon(cfg.positive_words, cfg.negative_words)
    else:
        lexicon = default_lexicon()
    log.info("ingested %d messages, %d teams", len(ms), len(rosters))
    return ms, rosters, lexicon


def _compute_rows(cfg: RunConfig, ms: MessageSet, rosters: list[TeamRoster],
                  lexicon: SentimentLexicon) -> list[TeamMetricsRow]:
    rows = []
    for roster in rosters:
        rows.append(team_metrics(
            ms, roster, cfg.window, lexicon,
            strong_tie_threshold=cfg.strong_tie_threshold,
            art_cutoff_min=cfg.art_cutoff_min,
            directed=cfg.directed,
        ))
        log.info("team %s done", roster.team)
    return rows


def _correlate_rows(rows: list[TeamMetricsRow]) -> CorrelationTable | None:
    if len(rows) < 3:
        log.warning("only %d teams; correlation table skipped", len(rows))
        return None
    records = [asdict(row) for row in rows]
    columns = [c for c in METRICS_CSV_COLUMNS if c != "team"]
    try:
        return correlation_matrix(records, columns)
    except ValueError as exc:
        log.warning("correlation table skipped: %s", exc)
        return None


def _hash_inputs(cfg: RunConfig) -> dict[str, str]:
    hashes = {}
    for name, path in cfg.input_paths().items():
        hashes[name] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return hashes


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg: RunConfig = _stage("config", load_config, args.config)
    ms, rosters, lexicon = _stage("ingest", _load_inputs, cfg)
    rows = _stage("metrics", _compute_rows, cfg, ms, rosters, lexicon)
    table = _stage("stats", _correlate_rows, rows)

    def emit() -> list[Path]:
        paths = emit_run_report(rows, table, cfg.outdir, config=cfg.echo(),
                                input_hashes=_hash_inputs(cfg),
                                warnings=ms.warnings)
        scatter = cfg.outdir / "contribution_scatter.csv"
        export_contribution_scatter(ms, rosters, scatter)
        return paths + [scatter]

    paths = _stage("report", emit)
    for path in paths:
        print(path)
    return 0


def _safe_name(team: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", team)


def cmd_export_graphs(args: argparse.Namespace) -> int:
    cfg: RunConfig = _stage("config", load_config, args.config)
    ms, rosters, _ = _stage("ingest", _load_inputs, cfg)

    def emit() -> list[Path]:
        outdir = cfg.outdir / "graphs"
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        course = build_graph(ms)
        for suffix, writer in ((".csv", write_edge_csv), (".dot", write_dot)):
            path = outdir / f"course{suffix}"
            writer(course, path)
            paths.append(path)
        for roster in rosters:
            g = build_graph(ms, team=roster.team, roster=roster)
            for suffix, writer in ((".csv", write_edge_csv), (".dot", write_dot)):
                path = outdir / f"team_{_safe_name(roster.team)}{suffix}"
                writer(g, path)
                paths.append(path)
        return paths

    for path in _stage("report", emit):
        print(path)
    return 0


def cmd_surface(args: argparse.Namespace) -> int:
    cfg: RunConfig = _stage("config", load_config, args.config)
    ms, rosters, _ = _stage("ingest", _load_inputs, cfg)
    if args.team is not None:
        rosters = [r for r in rosters if r.team == args.team]
        if not rosters:
            raise StageFailure("config", ConfigError(f"unknown team: {args.team}"))

    def emit() -> list[Path]:
        cfg.outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        for roster in rosters:
            windows = window_series(ms, cfg.window, team=roster.team,
                                    roster=roster)
            surface = temporal_surface(windows, roster, directed=cfg.directed)
            path = cfg.outdir / f"surface_team_{_safe_name(roster.team)}.csv"
            export_surface(surface, path)
            paths.append(path)
        return paths

    for path in _stage("report", emit):
        print(path)
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    def validate() -> tuple[list[dict[str, object]], list[str]]:
        records = read_metrics_csv(args.metrics)
        if args.columns:
            columns = [c.strip() for c in args.columns.split(",") if c.strip()]
        else:
            columns = [c for c in METRICS_CSV_COLUMNS if c != "team"]
        if len(columns) < 2:
            raise ConfigError("need >= 2 columns")
        known = set(records[0]) if records else set(METRICS_CSV_COLUMNS)
        unknown = [c for c in columns if c not in known]
        if unknown:
            raise ConfigError("unknown column: " + ", ".join(unknown))
        return records, columns

    records, columns = _stage("config", validate)
    table = _stage("stats", correlation_matrix, records, columns)

    def emit() -> None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_correlations_csv(table, outdir / "correlations.csv")
        text = format_correlation_text(table)
        (outdir / "correlations.txt").write_text(text, encoding="utf-8")
        sys.stdout.write(text)

    _stage("report", emit)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teamnet",
        description="Team communication network analytics from email archives.",
        epilog=CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full pipeline")
    analyze.add_argument("--config", required=True, help="INI run configuration")
    analyze.set_defaults(func=cmd_analyze)

    correlate = sub.add_parser("correlate",
                               help="correlation table from a metrics CSV")
    correlate.add_argument("--metrics", required=True,
                           help="CSV with the team metrics columns")
    correlate.add_argument("--columns", default=None,
                           help="comma-separated column subset (default: all)")
    correlate.add_argument("--out", default=".", help="output directory")
    correlate.set_defaults(func=cmd_correlate)

    graphs = sub.add_parser("export-graphs",
                            help="edge lists and DOT files per team")
    graphs.add_argument("--config", required=True)
    graphs.set_defaults(func=cmd_export_graphs)

    surface = sub.add_parser("surface",
                             help="actor x day betweenness matrices per team")
    surface.add_argument("--config", required=True)
    surface.add_argument("--team", default=None, help="restrict to one team")
    surface.set_defaults(func=cmd_surface)
    return parser


def _setup_logging() -> None:
    level_name = os.environ.get("TEAMNET_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageFailure as failure:
        print(failure, file=sys.stderr)
        return 2 if isinstance(failure.error, ConfigError) else 1
    except ConfigError as exc:
        print(f"error in config stage: {exc}", file=sys.stderr)
        return 2
    except TeamnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
