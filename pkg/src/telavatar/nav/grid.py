"""Occupancy grid: map file parsing, world<->cell transforms, inflation.

Map file schema:
    {"resolution": 0.25, "origin": {"x": 0.0, "y": 0.0},
     "rows": ["....#", "....#", ...]}
'.' is free, '#' is occupied. Row index 0 is cell row j=0; cell (i, j) has
its center at (origin_x + i*resolution, origin_y + j*resolution).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

Cell = tuple[int, int]


class MapError(Exception):
    pass


@dataclass(frozen=True)
class OccupancyGrid:
    width: int
    height: int
    resolution: float
    origin_x: float
    origin_y: float
    cells: tuple[bool, ...]  # row-major, True = occupied

    def __post_init__(self):
        if self.resolution <= 0:
            raise MapError("resolution must be > 0")
        if self.width * self.height != len(self.cells):
            raise MapError("cells length does not match width*height")

    def in_bounds(self, cell: Cell) -> bool:
        i, j = cell
        return 0 <= i < self.width and 0 <= j < self.height

    def occupied(self, cell: Cell) -> bool:
        i, j = cell
        return self.cells[j * self.width + i]

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and not self.occupied(cell)

    def cell_to_world(self, cell: Cell) -> tuple[float, float]:
        i, j = cell
        return (self.origin_x + i * self.resolution, self.origin_y + j * self.resolution)

    def world_to_cell(self, x: float, y: float) -> Cell:
        """Nearest cell; may be out of bounds (callers check)."""
        return (
            int(round((x - self.origin_x) / self.resolution)),
            int(round((y - self.origin_y) / self.resolution)),
        )

    @staticmethod
    def from_json(obj: dict) -> "OccupancyGrid":
        try:
            resolution = float(obj["resolution"])
            origin = obj.get("origin", {})
            rows = obj["rows"]
        except (KeyError, TypeError) as e:
            raise MapError(f"bad map object: {e}") from e
        if not rows or not all(isinstance(r, str) for r in rows):
            raise MapError("rows must be a non-empty list of strings")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise MapError("all rows must have equal length")
        cells = []
        for r in rows:
            for ch in r:
                if ch == ".":
                    cells.append(False)
                elif ch == "#":
                    cells.append(True)
                else:
                    raise MapError(f"unknown map character {ch!r}")
        return OccupancyGrid(
            width=width,
            height=len(rows),
            resolution=resolution,
            origin_x=float(origin.get("x", 0.0)),
            origin_y=float(origin.get("y", 0.0)),
            cells=tuple(cells),
        )

    @staticmethod
    def from_rows(rows: list[str], resolution: float = 1.0,
                  origin: tuple[float, float] = (0.0, 0.0)) -> "OccupancyGrid":
        return OccupancyGrid.from_json(
            {"resolution": resolution, "origin": {"x": origin[0], "y": origin[1]}, "rows": rows}
        )

    def to_json(self) -> dict:
        rows = []
        for j in range(self.height):
            row = self.cells[j * self.width:(j + 1) * self.width]
            rows.append("".join("#" if c else "." for c in row))
        return {
            "resolution": self.resolution,
            "origin": {"x": self.origin_x, "y": self.origin_y},
            "rows": rows,
        }


def load_map(path: str) -> OccupancyGrid:
    try:
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
    except OSError as e:
        raise MapError(f"cannot read map file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise MapError(f"map file {path} is not valid JSON: {e}") from e
    return OccupancyGrid.from_json(obj)


def inflate(grid: OccupancyGrid, radius_m: float) -> OccupancyGrid:
    """Mark every cell within `radius_m` (center-to-center) of an obstacle occupied."""
    if radius_m < 0:
        raise ValueError("radius must be >= 0")
    if radius_m == 0:
        return grid
    r_cells = radius_m / grid.resolution
    reach = int(math.floor(r_cells))
    offsets = [
        (di, dj)
        for di in range(-reach, reach + 1)
        for dj in range(-reach, reach + 1)
        if di * di + dj * dj <= r_cells * r_cells + 1e-12
    ]
    out = list(grid.cells)
    for j in range(grid.height):
        for i in range(grid.width):
            if not grid.cells[j * grid.width + i]:
                continue
            for di, dj in offsets:
                ni, nj = i + di, j + dj
                if 0 <= ni < grid.width and 0 <= nj < grid.height:
                    out[nj * grid.width + ni] = True
    return OccupancyGrid(grid.width, grid.height, grid.resolution,
                         grid.origin_x, grid.origin_y, tuple(out))
