"""Surveys of all hypersurfaces of a given shape, and the checks built on them."""
from .census import CSV_HEADER, CensusError, CensusRecord, census, census_budget, form_count
from .equiv import EquivResult, EquivStatus, equiv, orbit, pgl_order
from .verify import DEFAULT_GRID, verify_theorems

__all__ = [
    "CSV_HEADER",
    "CensusError",
    "CensusRecord",
    "census",
    "census_budget",
    "form_count",
    "EquivResult",
    "EquivStatus",
    "equiv",
    "orbit",
    "pgl_order",
    "DEFAULT_GRID",
    "verify_theorems",
]
