"""Exception hierarchy shared across the package.

The CLI maps these onto its exit codes: ConfigError -> 2,
NumericError -> 3, MissingArtifactError -> 4.
"""


class WmlabError(Exception):
    """Base class for all package errors."""


class ConfigError(WmlabError):
    """Invalid configuration: bad schema, out-of-range field, unknown name."""


class DataError(WmlabError):
    """Dataset construction or invariant violation (shape, range, overlap)."""


class NumericError(WmlabError):
    """Numerical failure during optimization (non-finite loss)."""


class MissingArtifactError(WmlabError):
    """A referenced checkpoint/report does not exist or fails its hash check."""
