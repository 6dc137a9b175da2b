"""Desk-scale watermarking laboratory.

Embeds query-response (trigger-set) watermarks into small image
classifiers, removes them with continual-learning attacks built around
attention anchoring and a lure task, and audits the selective-forgetting
outcome (main-task fidelity vs. watermark accuracy).
"""

from wmlab.errors import (
    ConfigError,
    DataError,
    MissingArtifactError,
    NumericError,
    WmlabError,
)

__version__ = "0.1.0"

__all__ = [
    "WmlabError",
    "ConfigError",
    "DataError",
    "NumericError",
    "MissingArtifactError",
    "__version__",
]
