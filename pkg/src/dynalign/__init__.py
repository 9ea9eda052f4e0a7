"""Alignment of dynamic (temporal) networks by event and node conservation."""

__version__ = "0.1.0"

from .temporal import (  # noqa: E402
    Alignment,
    AlignmentError,
    DynamicNetwork,
    Event,
    NetworkFormatError,
    StaticNetwork,
    extend_durations,
    flatten,
    from_snapshots,
    load_edges,
    load_events,
    load_snapshots,
)
from .conservation import ds3, ideal_quality, pair_cet, pair_ncet, s3  # noqa: E402
from .search import AlignmentProblem, ObjectiveValue, SearchConfig, SearchTrace, run  # noqa: E402

__all__ = [
    "Alignment", "AlignmentError", "AlignmentProblem", "DynamicNetwork", "Event", "NetworkFormatError",
    "ObjectiveValue", "SearchConfig", "SearchTrace", "StaticNetwork", "ds3", "extend_durations",
    "flatten", "from_snapshots", "ideal_quality", "load_edges", "load_events", "load_snapshots",
    "pair_cet", "pair_ncet", "run", "s3",
]
