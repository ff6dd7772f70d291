"""Exception types shared across the package."""


class TeamnetError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TeamnetError):
    """Invalid configuration (bad file, unknown key, broken alias map).

    Carries the full list of problems so the CLI can report them all at
    once before any work starts.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class MetricUnavailable(TeamnetError):
    """A metric cannot be computed from this data (e.g. no replies found).

    Callers assembling per-team rows catch this and record a missing value
    instead of failing the run.
    """
