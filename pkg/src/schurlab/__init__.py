"""Schur-type partition generating functions, identities, asymptotics and probability models."""

from .partitions import Partition, SchurParams
from .qseries import NumericValue, QSeries, SeriesError

__all__ = ["NumericValue", "Partition", "QSeries", "SchurParams", "SeriesError"]
__version__ = "0.1.0"
