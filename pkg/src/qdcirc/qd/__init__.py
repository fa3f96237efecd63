"""Quality-diversity search: measures, archive, CMA emitters and scheduler."""
from .archive import DEFAULT_THRESHOLD_MIN, Archive, Elite, UpdateResult
from .emitter import CMAEmitter
from .measures import Measures, compute_measures, grid_shape
from .scheduler import Scheduler, StepReport, make_emitters

__all__ = [
    "DEFAULT_THRESHOLD_MIN",
    "Archive",
    "CMAEmitter",
    "Elite",
    "Measures",
    "Scheduler",
    "StepReport",
    "UpdateResult",
    "compute_measures",
    "grid_shape",
    "make_emitters",
]
