"""A* path planning on 8-connected occupancy grids plus line-of-sight smoothing.

Diagonal moves cost sqrt(2) and are blocked when either adjacent axis cell
is occupied (no corner cutting). Path costs are accumulated as exact
(axis_steps, diagonal_steps) counts so optimality checks do not drift.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .grid import Cell, OccupancyGrid

SQRT2 = math.sqrt(2.0)


class PlanError(Exception):
    pass


class GoalOutOfBounds(PlanError):
    pass


class GoalOccupied(PlanError):
    pass


class StartOccupied(PlanError):
    pass


class Unreachable(PlanError):
    pass


@dataclass(frozen=True)
class PlannedPath:
    waypoints: tuple[tuple[float, float], ...]
    cost: float


_STEPS = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)]


def neighbors(grid: OccupancyGrid, cell: Cell):
    i, j = cell
    for di, dj in _STEPS:
        nxt = (i + di, j + dj)
        if not grid.is_free(nxt):
            continue
        if di != 0 and dj != 0:
            # no corner cutting past an obstacle
            if not (grid.is_free((i + di, j)) and grid.is_free((i, j + dj))):
                continue
        yield nxt, (di != 0 and dj != 0)


def steps_cost(axis: int, diag: int, resolution: float) -> float:
    return (axis + diag * SQRT2) * resolution


def _octile(a: Cell, b: Cell) -> float:
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    return max(dx, dy) + (SQRT2 - 1.0) * min(dx, dy)


def plan_cells(grid: OccupancyGrid, start: Cell, goal: Cell) -> tuple[list[Cell], float]:
    """Optimal cell path from start to goal. Returns (cells, cost in meters)."""
    if not grid.in_bounds(goal):
        raise GoalOutOfBounds(f"goal cell {goal} outside {grid.width}x{grid.height} grid")
    if grid.occupied(goal):
        raise GoalOccupied(f"goal cell {goal} is occupied")
    if not grid.in_bounds(start) or grid.occupied(start):
        raise StartOccupied(f"start cell {start} is occupied or out of bounds")

    # g-values tracked as (axis, diag) step counts for exact costs
    best: dict[Cell, tuple[int, int]] = {start: (0, 0)}
    parent: dict[Cell, Cell] = {}
    tie = 0
    frontier = [(_octile(start, goal), 0.0, tie, start)]
    closed: set[Cell] = set()
    while frontier:
        _, g, _, cell = heapq.heappop(frontier)
        if cell in closed:
            continue
        closed.add(cell)
        if cell == goal:
            path = [cell]
            while cell != start:
                cell = parent[cell]
                path.append(cell)
            path.reverse()
            axis, diag = best[goal]
            return path, steps_cost(axis, diag, grid.resolution)
        axis, diag = best[cell]
        for nxt, is_diag in neighbors(grid, cell):
            if nxt in closed:
                continue
            cand = (axis + (not is_diag), diag + is_diag)
            cur = best.get(nxt)
            cand_g = cand[0] + cand[1] * SQRT2
            if cur is None or cand_g < cur[0] + cur[1] * SQRT2 - 1e-12:
                best[nxt] = cand
                parent[nxt] = cell
                tie += 1
                heapq.heappush(frontier, (cand_g + _octile(nxt, goal), cand_g, tie, nxt))
    raise Unreachable(f"no path from {start} to {goal}")


def plan(grid: OccupancyGrid, start_x: float, start_y: float,
         goal_x: float, goal_y: float) -> PlannedPath:
    """Optimal path between the nearest cells to the given world points."""
    start = grid.world_to_cell(start_x, start_y)
    goal = grid.world_to_cell(goal_x, goal_y)
    cells, cost = plan_cells(grid, start, goal)
    return PlannedPath(tuple(grid.cell_to_world(c) for c in cells), cost)


def segment_free(grid: OccupancyGrid, p: tuple[float, float], q: tuple[float, float]) -> bool:
    """Supersampled collision check at resolution/4 steps, endpoints included."""
    dist = math.hypot(q[0] - p[0], q[1] - p[1])
    n = max(1, int(math.ceil(dist / (grid.resolution / 4.0))))
    for k in range(n + 1):
        t = k / n
        x = p[0] + (q[0] - p[0]) * t
        y = p[1] + (q[1] - p[1]) * t
        if not grid.is_free(grid.world_to_cell(x, y)):
            return False
    return True


def smooth(grid: OccupancyGrid, cell_path: list[Cell]) -> PlannedPath:
    """Greedy line-of-sight shortcutting of a collision-free cell path."""
    if not cell_path:
        raise PlanError("empty cell path")
    points = [grid.cell_to_world(c) for c in cell_path]
    if len(points) == 1:
        return PlannedPath((points[0],), 0.0)
    keep = [points[0]]
    anchor = 0
    while anchor < len(points) - 1:
        far = anchor + 1
        for k in range(len(points) - 1, anchor + 1, -1):
            if segment_free(grid, points[anchor], points[k]):
                far = k
                break
        keep.append(points[far])
        anchor = far
    cost = sum(
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(keep, keep[1:])
    )
    return PlannedPath(tuple(keep), cost)
