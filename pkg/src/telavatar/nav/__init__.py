from .geometry import Pose, normalize_angle, normalize_deg
from .grid import OccupancyGrid, MapError, load_map, inflate
from .planner import (
    PlannedPath, PlanError, GoalOutOfBounds, GoalOccupied, StartOccupied,
    Unreachable, plan, plan_cells, smooth, segment_free,
)
from .discretize import EmptyPath, discretize, replay, verify_discretization

__all__ = [
    "Pose", "normalize_angle", "normalize_deg",
    "OccupancyGrid", "MapError", "load_map", "inflate",
    "PlannedPath", "PlanError", "GoalOutOfBounds", "GoalOccupied",
    "StartOccupied", "Unreachable", "plan", "plan_cells", "smooth", "segment_free",
    "EmptyPath", "discretize", "replay", "verify_discretization",
]
