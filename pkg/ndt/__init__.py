"""Normal Distributions Transform scan matching."""

from ndt.matcher import ndt_align, ndt_score
from ndt.models import (
    DEFAULT_CELL_SIZE,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    NdtCell,
    NdtCellGrid,
    NdtNumericalError,
    NdtResult,
    NdtScore,
    SparseReferenceError,
)
from ndt.reference import build_map_ndt, build_ndt, scan_to_points

__all__ = [
    "DEFAULT_CELL_SIZE",
    "DEFAULT_MAX_ITERATIONS",
    "DEFAULT_TOLERANCE",
    "NdtCell",
    "NdtCellGrid",
    "NdtNumericalError",
    "NdtResult",
    "NdtScore",
    "SparseReferenceError",
    "build_map_ndt",
    "build_ndt",
    "ndt_align",
    "ndt_score",
    "scan_to_points",
]
