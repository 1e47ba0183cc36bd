"""Broad learning system classifiers and a benchmark statistics harness."""

__version__ = "0.1.0"

from . import data, fuzzy, if_scores, linalg, network, stats, trainer  # noqa: F401
from .errors import BlsBenchError  # noqa: F401
