"""Analysis artifacts: metric tables, correlation tables, surface matrices,
contribution scatters, line charts, and the run manifest.

Every emitted file is a deterministic function of its inputs: rows are
sorted, floats use fixed precision (6 decimals in CSV, 3 in text tables),
and no timestamps or environment details leak into the output.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .ingest import MessageSet, TeamRoster
from .metrics import (
    METRICS_CSV_COLUMNS,
    TeamMetricsRow,
    TemporalSurface,
    member_traffic,
)
from .stats import CorrelationCell, CorrelationTable

_INT_COLUMNS = {"bc_oscillations", "msg_recvd", "num_actors"}


@dataclass(frozen=True)
class TimeSeries:
    """A named per-day series; days must be strictly increasing."""

    name: str
    points: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        days = [d for d, _ in self.points]
        if any(b <= a for a, b in zip(days, days[1:])):
            raise ValueError(f"series {self.name!r}: days must strictly increase")


def _f6(value: float) -> str:
    return f"{value:.6f}"


def _f3_bare(value: float) -> str:
    """3 decimals without a leading zero: 0.830 -> .830, -0.83 -> -.830."""
    s = f"{value:.3f}"
    if s.startswith("0."):
        return s[1:]
    if s.startswith("-0."):
        return "-" + s[2:]
    return s


def export_surface(surface: TemporalSurface, path: str | Path) -> None:
    """CSV of the actor x day betweenness matrix (header: actor,day_<i>,...)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["actor"] + [f"day_{d}" for d in surface.days])
        for actor, row in zip(surface.actors, surface.values):
            writer.writerow([actor] + [_f6(x) for x in row])


def read_surface(path: str | Path) -> TemporalSurface:
    """Round-trip partner of export_surface."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        days = tuple(int(col.removeprefix("day_")) for col in header[1:])
        actors: list[str] = []
        values: list[tuple[float, ...]] = []
        for row in reader:
            actors.append(row[0])
            values.append(tuple(float(x) for x in row[1:]))
    return TemporalSurface(tuple(actors), days, tuple(values))


def export_contribution_scatter(ms: MessageSet, rosters: Iterable[TeamRoster],
                                path: str | Path) -> None:
    """CSV `actor,team,messages_total,contribution_index` per traffic-bearing
    member; actors without traffic have no defined index and are omitted."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["actor", "team", "messages_total", "contribution_index"])
        for roster in sorted(rosters, key=lambda r: r.team):
            for actor, (sent, received) in member_traffic(ms, roster).items():
                total = sent + received
                if total == 0:
                    continue
                ci = (sent - received) / total
                writer.writerow([actor, roster.team, total, _f6(ci)])


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_WIDTH, _HEIGHT = 800, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 60, 170, 20, 40


def render_timeseries_svg(series: Sequence[TimeSeries], path: str | Path) -> None:
    """Standalone SVG line chart: one polyline per series plus a legend.

    Output depends only on the input series, so identical data renders to
    byte-identical files.
    """
    if not series:
        raise ValueError("need at least one series")
    for s in series:
        if len(s.points) < 2:
            raise ValueError(f"series {s.name!r} needs >= 2 points")

    xs = [d for s in series for d, _ in s.points]
    ys = [v for s in series for _, v in s.points]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    if x_min == x_max:
        x_max = x_min + 1
    if y_min == y_max:
        y_min, y_max = y_min - 1.0, y_max + 1.0
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def to_x(day: float) -> float:
        return _MARGIN_L + (day - x_min) / (x_max - x_min) * plot_w

    def to_y(value: float) -> float:
        return _MARGIN_T + (y_max - value) / (y_max - y_min) * plot_h

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_MARGIN_T + plot_h}" stroke="black"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T + plot_h}" '
        f'x2="{_MARGIN_L + plot_w}" y2="{_MARGIN_T + plot_h}" stroke="black"/>',
        f'<text x="{_MARGIN_L}" y="{_HEIGHT - 16}" font-size="12" '
        f'text-anchor="middle">{x_min}</text>',
        f'<text x="{_MARGIN_L + plot_w}" y="{_HEIGHT - 16}" font-size="12" '
        f'text-anchor="middle">{x_max}</text>',
        f'<text x="{_MARGIN_L - 6}" y="{_MARGIN_T + plot_h}" font-size="12" '
        f'text-anchor="end">{y_min:.3g}</text>',
        f'<text x="{_MARGIN_L - 6}" y="{_MARGIN_T + 10}" font-size="12" '
        f'text-anchor="end">{y_max:.3g}</text>',
    ]
    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{to_x(d):.2f},{to_y(v):.2f}" for d, v in s.points)
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{pts}"/>')
        ly = _MARGIN_T + 14 + 18 * i
        lx = _MARGIN_L + plot_w + 12
        lines.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        lines.append(f'<text x="{lx + 28}" y="{ly}" font-size="12">{s.name}</text>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_metrics_csv(rows: Sequence[TeamMetricsRow], path: str | Path) -> None:
    """Team metrics table; missing values written as empty cells."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_CSV_COLUMNS)
        for row in sorted(rows, key=lambda r: r.team):
            record = []
            for column in METRICS_CSV_COLUMNS:
                value = getattr(row, column)
                if value is None:
                    record.append("")
                elif column == "team":
                    record.append(value)
                elif column in _INT_COLUMNS:
                    record.append(str(value))
                else:
                    record.append(_f6(value))
            writer.writerow(record)


def read_metrics_csv(path: str | Path) -> list[dict[str, object]]:
    """Parse a metrics CSV back into typed records (None for empty cells)."""
    records: list[dict[str, object]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in METRICS_CSV_COLUMNS if c not in header]
        if missing:
            raise ValueError("missing column: " + ", ".join(missing))
        for row in reader:
            record: dict[str, object] = {}
            for column in header:
                raw = (row[column] or "").strip()
                if column == "team":
                    record[column] = raw
                elif raw == "":
                    record[column] = None
                elif column in _INT_COLUMNS:
                    record[column] = int(raw)
                else:
                    record[column] = float(raw)
            records.append(record)
    return records


def write_correlations_csv(table: CorrelationTable, path: str | Path) -> None:
    """Upper triangle (plus diagonal) as `metric_a,metric_b,r,p,n,stars`."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric_a", "metric_b", "r", "p", "n", "stars"])
        for i, a in enumerate(table.columns):
            for b in table.columns[i:]:
                cell = table.cell(a, b)
                writer.writerow([a, b, _f6(cell.r),
                                 "" if cell.p is None else _f6(cell.p),
                                 cell.n, cell.stars])


def read_correlations_csv(path: str | Path) -> CorrelationTable:
    """Round-trip partner of write_correlations_csv."""
    columns: list[str] = []
    cells: dict[tuple[str, str], CorrelationCell] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            a, b = row["metric_a"], row["metric_b"]
            for name in (a, b):
                if name not in columns:
                    columns.append(name)
            p = None if row["p"] == "" else float(row["p"])
            cells[(a, b)] = CorrelationCell(float(row["r"]), p, int(row["n"]))
    return CorrelationTable(tuple(columns), cells)


def format_correlation_text(table: CorrelationTable) -> str:
    """Aligned text matrix: r with stars on one line, p beneath it."""
    width = max(max(len(c) for c in table.columns) + 2, 12)
    label_w = width

    def pad(text: str) -> str:
        return text.rjust(width)

    out = [" " * label_w + "".join(pad(c) for c in table.columns)]
    for a in table.columns:
        r_line = [a.ljust(label_w)]
        p_line = ["  sig.".ljust(label_w)]
        for b in table.columns:
            cell = table.cell(a, b)
            r_line.append(pad(_f3_bare(cell.r) + cell.stars))
            p_line.append(pad("" if cell.p is None else _f3_bare(cell.p)))
        out.append("".join(r_line))
        out.append("".join(p_line))
    return "\n".join(out) + "\n"


def emit_run_report(rows: Sequence[TeamMetricsRow],
                    table: CorrelationTable | None,
                    outdir: str | Path, *, config: Mapping[str, object],
                    input_hashes: Mapping[str, str],
                    warnings: Mapping[str, int]) -> list[Path]:
    """Write team_metrics.csv, correlations.csv/.txt, and manifest.json.

    A None table (too few teams for correlations) skips the two
    correlation files; everything else is still written.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = [outdir / "team_metrics.csv"]
    write_metrics_csv(rows, paths[0])
    if table is not None:
        corr_csv_path = outdir / "correlations.csv"
        corr_txt_path = outdir / "correlations.txt"
        write_correlations_csv(table, corr_csv_path)
        corr_txt_path.write_text(format_correlation_text(table), encoding="utf-8")
        paths += [corr_csv_path, corr_txt_path]
    manifest = {
        "version": __version__,
        "config": dict(sorted(config.items())),
        "input_hashes": dict(sorted(input_hashes.items())),
        "warnings": dict(sorted(warnings.items())),
        "teams": [row.team for row in sorted(rows, key=lambda r: r.team)],
    }
    manifest_path = outdir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    return paths + [manifest_path]
