import math
import random

import pytest

from telavatar.nav.discretize import EmptyPath, discretize, replay, verify_discretization
from telavatar.nav.geometry import Pose
from telavatar.nav.grid import inflate
from telavatar.nav.planner import PlannedPath, plan_cells, smooth
from oracles import flood_reachable, free_cells, random_grid


def path_of(*points) -> PlannedPath:
    cost = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(points, points[1:]))
    return PlannedPath(tuple(points), cost)


def test_straight_axis_no_turn():
    cmds = discretize(path_of((0, 0), (1, 0)), Pose(0, 0, 0), max_drive=0.5)
    assert [c.op for c in cmds] == ["drive-forward", "drive-forward", "park"]
    assert [c.m for c in cmds[:2]] == [0.5, 0.5]


def test_ninety_degree_turn_in_quanta():
    cmds = discretize(path_of((0, 0), (0, 1)), Pose(0, 0, 0), max_drive=0.5, turn_quantum=15.0)
    assert [c.op for c in cmds] == ["turn-left"] * 6 + ["drive-forward", "drive-forward", "park"]
    assert all(c.deg == 15.0 for c in cmds[:6])


def test_residual_turn_exact():
    cmds = discretize(path_of((0, 0), (math.cos(math.radians(40)), math.sin(math.radians(40)))),
                      Pose(0, 0, 0), turn_quantum=15.0)
    turns = [c for c in cmds if c.op == "turn-left"]
    assert [t.deg for t in turns] == [15.0, 15.0, pytest.approx(10.0)]
    final = replay(cmds, Pose(0, 0, 0)).final
    assert final.theta == pytest.approx(math.radians(40), abs=1e-9)


def test_turn_right_for_negative_delta():
    cmds = discretize(path_of((0, 0), (0, -1)), Pose(0, 0, 0))
    assert cmds[0].op == "turn-right"


def test_u_turn_goes_left():
    cmds = discretize(path_of((0, 0), (-1, 0)), Pose(0, 0, 0), turn_quantum=45.0)
    turns = [c for c in cmds if c.op.startswith("turn")]
    assert all(t.op == "turn-left" for t in turns)
    assert sum(t.deg for t in turns) == pytest.approx(180.0)


def test_empty_path_rejected():
    with pytest.raises(EmptyPath):
        discretize(PlannedPath((), 0.0), Pose(0, 0, 0))


def test_single_waypoint_at_start_parks_only():
    cmds = discretize(path_of((0, 0)), Pose(0, 0, 0))
    assert [c.op for c in cmds] == ["park"]


def test_drive_commands_bounded_and_sum_exact():
    rng = random.Random(5)
    for _ in range(50):
        points = [(rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(rng.randint(2, 6))]
        path = path_of(*points)
        cmds = discretize(path, Pose(*points[0], rng.uniform(-math.pi, math.pi)),
                          max_drive=0.5, turn_quantum=15.0)
        drives = [c.m for c in cmds if c.op == "drive-forward"]
        assert all(0 < m <= 0.5 + 1e-12 for m in drives)
        turns = [c.deg for c in cmds if c.op.startswith("turn")]
        assert all(0 < d <= 15.0 + 1e-12 for d in turns)
        assert sum(drives) == pytest.approx(path.cost, abs=1e-9)
        assert cmds[-1].op == "park"


def test_replay_reaches_random_planned_goals():
    rng = random.Random(11)
    checked = 0
    while checked < 60:
        grid = inflate(random_grid(rng, 14, 14, occupancy=0.2), 0.25)
        free = free_cells(grid)
        if len(free) < 2:
            continue
        start_cell, goal_cell = rng.sample(free, 2)
        if not flood_reachable(grid, start_cell, goal_cell):
            continue
        cells, _ = plan_cells(grid, start_cell, goal_cell)
        path = smooth(grid, cells)
        start = Pose(*grid.cell_to_world(start_cell), rng.uniform(-math.pi, math.pi))
        cmds = discretize(path, start, max_drive=0.5, turn_quantum=15.0)
        verify_discretization(path, start, cmds, grid.resolution)
        final = replay(cmds, start).final
        gx, gy = path.waypoints[-1]
        assert math.hypot(final.x - gx, final.y - gy) <= 1e-6
        checked += 1
