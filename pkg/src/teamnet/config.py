"""Run configuration: a single INI file drives the whole pipeline.

All validation problems are collected and reported together; unknown
sections or keys are hard errors so typos cannot silently change a run.
Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .graph import WindowConfig

_KNOWN_KEYS = {
    "inputs": {"mbox", "messages_csv", "rosters", "aliases",
               "positive_words", "negative_words"},
    "actors": {"dummy_addresses"},
    "windows": {"step_days", "lookback_days", "cumulative"},
    "analysis": {"strong_tie_threshold", "art_cutoff_min", "directed"},
    "output": {"directory"},
}

_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one analysis run."""

    mbox: Path | None
    messages_csv: Path | None
    rosters: Path
    aliases: Path | None
    positive_words: Path | None
    negative_words: Path | None
    dummy_addresses: tuple[str, ...]
    window: WindowConfig
    strong_tie_threshold: float | None  # None means "mean tie strength"
    art_cutoff_min: float
    directed: bool
    outdir: Path

    def echo(self) -> dict[str, object]:
        """JSON-serializable snapshot for the run manifest."""
        return {
            "mbox": None if self.mbox is None else str(self.mbox),
            "messages_csv": (None if self.messages_csv is None
                             else str(self.messages_csv)),
            "rosters": str(self.rosters),
            "aliases": None if self.aliases is None else str(self.aliases),
            "positive_words": (None if self.positive_words is None
                               else str(self.positive_words)),
            "negative_words": (None if self.negative_words is None
                               else str(self.negative_words)),
            "dummy_addresses": list(self.dummy_addresses),
            "step_days": self.window.step_days,
            "lookback_days": self.window.lookback_days,
            "cumulative": self.window.cumulative,
            "strong_tie_threshold": ("mean" if self.strong_tie_threshold is None
                                     else self.strong_tie_threshold),
            "art_cutoff_min": self.art_cutoff_min,
            "directed": self.directed,
            "output": str(self.outdir),
        }

    def input_paths(self) -> dict[str, Path]:
        """Every configured input file, keyed by its config name."""
        named = {"mbox": self.mbox, "messages_csv": self.messages_csv,
                 "rosters": self.rosters, "aliases": self.aliases,
                 "positive_words": self.positive_words,
                 "negative_words": self.negative_words}
        return {name: path for name, path in named.items() if path is not None}


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate an INI run configuration."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    base = path.parent
    problems: list[str] = []

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            problems.append(f"unknown section [{section}]")
            continue
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                problems.append(f"unknown key {key!r} in [{section}]")

    def raw(section: str, key: str) -> str | None:
        if parser.has_option(section, key):
            value = parser.get(section, key).strip()
            return value if value else None
        return None

    def input_path(key: str, required: bool = False) -> Path | None:
        value = raw("inputs", key)
        if value is None:
            if required:
                problems.append(f"[inputs] {key} is required")
            return None
        resolved = base / value
        if not resolved.is_file():
            problems.append(f"[inputs] {key}: file not found: {resolved}")
        return resolved

    def as_int(section: str, key: str, default: int) -> int:
        value = raw(section, key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            problems.append(f"[{section}] {key}: not an integer: {value!r}")
            return default

    def as_float(section: str, key: str, default: float) -> float:
        value = raw(section, key)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            problems.append(f"[{section}] {key}: not a number: {value!r}")
            return default

    def as_bool(section: str, key: str, default: bool) -> bool:
        value = raw(section, key)
        if value is None:
            return default
        flag = _BOOL.get(value.lower())
        if flag is None:
            problems.append(f"[{section}] {key}: not a boolean: {value!r}")
            return default
        return flag

    mbox = input_path("mbox")
    messages_csv = input_path("messages_csv")
    if (mbox is None) == (messages_csv is None):
        problems.append("[inputs] exactly one of mbox or messages_csv is required")
    rosters = input_path("rosters", required=True)
    aliases = input_path("aliases")
    positive_words = input_path("positive_words")
    negative_words = input_path("negative_words")
    if (positive_words is None) != (negative_words is None):
        problems.append("[inputs] positive_words and negative_words "
                        "must be given together")

    dummy_raw = raw("actors", "dummy_addresses") or ""
    dummy_addresses = tuple(a.strip() for a in dummy_raw.split(",") if a.strip())

    step = as_int("windows", "step_days", 1)
    lookback = as_int("windows", "lookback_days", 7)
    cumulative = as_bool("windows", "cumulative", False)
    window: WindowConfig | None = None
    try:
        window = WindowConfig(step, lookback, cumulative)
    except ValueError as exc:
        problems.append(f"[windows] {exc}")

    threshold_raw = raw("analysis", "strong_tie_threshold")
    strong_tie_threshold: float | None = None
    if threshold_raw is not None and threshold_raw.lower() != "mean":
        try:
            strong_tie_threshold = float(threshold_raw)
        except ValueError:
            problems.append("[analysis] strong_tie_threshold: "
                            f"expected 'mean' or a number, got {threshold_raw!r}")
        else:
            if strong_tie_threshold < 1:
                problems.append("[analysis] strong_tie_threshold: must be >= 1")

    art_cutoff = as_float("analysis", "art_cutoff_min", 14 * 24 * 60.0)
    if art_cutoff <= 0:
        problems.append("[analysis] art_cutoff_min: must be positive")
    directed = as_bool("analysis", "directed", False)

    outdir = base / (raw("output", "directory") or "out")

    if problems:
        raise ConfigError(problems)
    assert window is not None and rosters is not None
    return RunConfig(
        mbox=mbox,
        messages_csv=messages_csv,
        rosters=rosters,
        aliases=aliases,
        positive_words=positive_words,
        negative_words=negative_words,
        dummy_addresses=dummy_addresses,
        window=window,
        strong_tie_threshold=strong_tie_threshold,
        art_cutoff_min=art_cutoff,
        directed=directed,
        outdir=outdir,
    )
