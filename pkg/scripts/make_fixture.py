#!/usr/bin/env python3
"""Regenerate the committed synthetic fixture under tests/data/fixture/.

The fixture is deterministic; rerunning this script must not change any
committed byte.  Teams cover handover counts 0, 1, 2, 3, and 5, one team
uses a sender alias, and one CCs an external mentor, so the ingest edge
cases stay exercised by the end-to-end tests.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from teamnet.synth import CorpusSpec, TeamScript, generate_corpus


def fixture_spec() -> CorpusSpec:
    return CorpusSpec(
        days=32,
        lookback_days=3,
        teams=(
            TeamScript("1", 4, 0, 30, 2, 1, 2, 2.4, alias_every=5),
            TeamScript("2", 5, 1, 240, 0, 2, 2, 2.6),
            TeamScript("3", 4, 2, 90, 4, 0, 2, 3.0, external_cc_every=10),
            TeamScript("4", 6, 3, 150, 1, 1, 2, 2.8),
            TeamScript("5", 4, 5, 45, 3, 2, 3, 1.4),
        ),
    )


def main() -> None:
    outdir = Path(__file__).resolve().parent.parent / "tests" / "data" / "fixture"
    manifest = generate_corpus(fixture_spec(), outdir)
    print(f"wrote {outdir} ({manifest['total_messages']} messages, "
          f"{len(manifest['teams'])} teams)")


if __name__ == "__main__":
    main()
