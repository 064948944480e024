"""Exception types shared across the package.

Argument errors use plain :class:`ValueError`; the classes here mark failures
the command line maps onto distinct exit codes.
"""


class InvalidData(ValueError):
    """An input file parsed but violates its schema or invariants."""


class ConfigError(ValueError):
    """An experiment configuration is inconsistent."""


class MissingData(FileNotFoundError):
    """A required data file (fixture, ensemble, model) is absent."""


class NumericalFailure(RuntimeError):
    """A numerical routine failed to produce a trustworthy result."""
