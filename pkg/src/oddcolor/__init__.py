"""Odd color class edge-colorings: construction, verification and graph codes."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    ColoringFormatError,
    EdgeColoring,
    HostGraph,
    PartialColoringError,
    has_odd_class,
    parity_signature,
    read_coloring,
    write_coloring,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "ColoringFormatError",
    "EdgeColoring",
    "HostGraph",
    "PartialColoringError",
    "has_odd_class",
    "parity_signature",
    "read_coloring",
    "write_coloring",
]
