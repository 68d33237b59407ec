"""Exact geometry of the infinite square lattice.

All distances are Manhattan (L1) and the nest/source sits at (0, 0).
Two canonical motion primitives are fixed here so that every simulation
step has a closed form:

* walks between nodes follow the x-first L-shaped shortest path, and
* local sweeps follow the counterclockwise square spiral with run
  lengths 1, 1, 2, 2, 3, 3, ... starting with a step east.

Both primitives support O(1) "where am I after n steps" and "at which
step is this node visited" queries, which the phase-level executor in
:mod:`foragesim.engine` relies on.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class Point(NamedTuple):
    """Integer lattice coordinate; equality is componentwise."""

    x: int
    y: int

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])


SOURCE = Point(0, 0)


def manhattan(u: Point, v: Point = SOURCE) -> int:
    """L1 distance between two nodes."""
    return abs(u[0] - v[0]) + abs(u[1] - v[1])


def ball_size(radius: int) -> int:
    """Number of lattice nodes at Manhattan distance <= radius from a node.

    Closed form 2r^2 + 2r + 1.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    return 2 * radius * radius + 2 * radius + 1


def sphere_size(distance: int) -> int:
    """Number of lattice nodes at Manhattan distance exactly `distance`."""
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance}")
    return 4 * distance if distance > 0 else 1


def nth_node_at_distance(distance: int, idx: int) -> Point:
    """idx-th node of the L1 sphere of radius `distance`, counterclockwise.

    The enumeration starts at (distance, 0); indices run over
    [0, 4*distance).  This is the fixed order used for sampling points on
    a sphere, so it must never change.
    """
    if distance < 1:
        raise ValueError(f"distance must be >= 1, got {distance}")
    if not 0 <= idx < 4 * distance:
        raise ValueError(f"idx {idx} out of range for distance {distance}")
    quadrant, t = divmod(idx, distance)
    if quadrant == 0:
        return Point(distance - t, t)
    if quadrant == 1:
        return Point(-t, distance - t)
    if quadrant == 2:
        return Point(-distance + t, -t)
    return Point(t, -distance + t)


def sample_uniform_ball(radius: int, rng: np.random.Generator) -> Point:
    """Exactly uniform node of the L1 ball of radius `radius`.

    Rejection from the bounding square [-r, r]^2; the acceptance rate is
    (2r^2+2r+1)/(2r+1)^2 >= 1/2, so the expected number of draws is
    bounded.  radius 0 consumes no draws.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return SOURCE
    side = 2 * radius + 1
    cells = side * side
    while True:
        v = int(rng.integers(0, cells))
        x = v // side - radius
        y = v % side - radius
        if abs(x) + abs(y) <= radius:
            return Point(x, y)


# ---------------------------------------------------------------------------
# Canonical straight-line walk: all x moves first, then all y moves.
# ---------------------------------------------------------------------------


def lpath(frm: Point, to: Point) -> list[Point]:
    """Node sequence of the canonical walk, excluding `frm`, including `to`."""
    x0, y0 = frm
    x1, y1 = to
    sx = 1 if x1 >= x0 else -1
    sy = 1 if y1 >= y0 else -1
    path = [Point(x, y0) for x in range(x0 + sx, x1 + sx, sx)]
    path += [Point(x1, y) for y in range(y0 + sy, y1 + sy, sy)]
    return path


def lpath_pos(frm: Point, to: Point, i: int) -> Point:
    """Position after i steps of the canonical walk (i = 0 gives `frm`)."""
    x0, y0 = frm
    x1, y1 = to
    dx = abs(x1 - x0)
    if i <= dx:
        return Point(x0 + (i if x1 >= x0 else -i), y0)
    j = i - dx
    return Point(x1, y0 + (j if y1 >= y0 else -j))


def lpath_hit_index(frm: Point, to: Point, target: Point) -> int | None:
    """1-based step at which the canonical walk visits `target`, else None."""
    x0, y0 = frm
    x1, y1 = to
    tx, ty = target
    if ty == y0 and (x0 < tx <= x1 or x1 <= tx < x0):
        return abs(tx - x0)
    if tx == x1 and (y0 < ty <= y1 or y1 <= ty < y0):
        return abs(x1 - x0) + abs(ty - y0)
    return None


# ---------------------------------------------------------------------------
# Canonical square spiral.
#
# Run lengths E1, N1, W2, S2, E3, N3, W4, S4, ...  Step index n = 0 is the
# spiral origin.  The L-infinity ring m (nodes with max(|x|,|y|) = m) is
# traversed by indices [(2m-1)^2, (2m+1)^2 - 1]: first the tail of the
# north leg, then the west, south and east legs.  After (2R+1)^2 - 1 steps
# the spiral has covered the full square [-R, R]^2 and sits at (R, -R).
# ---------------------------------------------------------------------------


def spiral_position(n: int) -> Point:
    """Offset from the spiral origin after n steps; injective over n >= 0."""
    if n < 0:
        raise ValueError(f"step index must be >= 0, got {n}")
    if n == 0:
        return SOURCE
    m = (math.isqrt(n) + 1) // 2
    t = n - (2 * m - 1) ** 2
    if t < 2 * m:  # north leg, entered at (m, -m+1)
        return Point(m, -m + 1 + t)
    t -= 2 * m - 1
    if t <= 2 * m:  # west leg
        return Point(m - t, m)
    t -= 2 * m
    if t <= 2 * m:  # south leg
        return Point(-m, m - t)
    t -= 2 * m  # east leg, ends at (m, -m)
    return Point(-m + t, -m)


def spiral_hit_index(offset: Point) -> int:
    """Inverse of :func:`spiral_position`: the unique n landing on `offset`."""
    x, y = offset
    if x == 0 and y == 0:
        return 0
    m = max(abs(x), abs(y))
    base = (2 * m - 1) ** 2
    if y == -m and x > -m:  # east leg, including the (m, -m) corner
        return base + 6 * m - 1 + (x + m)
    if x == m:  # north leg
        return base + (y + m - 1)
    if y == m:  # west leg
        return base + 2 * m - 1 + (m - x)
    return base + 4 * m - 1 + (m - y)  # south leg


def ceil_sqrt(n: int) -> int:
    """Smallest integer s with s*s >= n (exact for arbitrary-size ints)."""
    if n <= 0:
        return 0
    return math.isqrt(n - 1) + 1


def spiral_cover_steps(budget: int) -> int:
    """Steps actually executed for a requested sweep budget.

    A sweep of budget x must visit every node within L1 distance
    sqrt(x)/2 of its origin.  An exact square spiral of x steps covers
    slightly less, so the executor over-runs to the first full square:
    with R = ceil(sqrt(budget)/2) it runs (2R+1)^2 - 1 steps, covering
    the square [-R, R]^2 which contains the required L1 ball.  The
    over-run is at most 2*sqrt(x) + 4 steps and counts as walked time.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    r = (ceil_sqrt(budget) + 1) // 2
    return (2 * r + 1) ** 2 - 1


def spiral_cover_radius(budget: int) -> int:
    """Guaranteed covered L1 radius of a sweep with the given budget."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    return math.isqrt(budget) // 2


# ---------------------------------------------------------------------------
# Vectorized node enumeration, used by the step-level executor.
# ---------------------------------------------------------------------------


def lpath_nodes(frm: Point, to: Point, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes visited at steps lo+1 .. hi of the canonical walk frm -> to."""
    x0, y0 = frm
    x1, y1 = to
    dx = abs(x1 - x0)
    idx = np.arange(lo + 1, hi + 1, dtype=np.int64)
    sx = 1 if x1 >= x0 else -1
    sy = 1 if y1 >= y0 else -1
    xs = np.where(idx <= dx, x0 + sx * idx, x1)
    ys = np.where(idx <= dx, y0, y0 + sy * (idx - dx))
    return xs, ys


def spiral_nodes(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Spiral offsets at indices lo+1 .. hi (same order as stepping it)."""
    n = np.arange(lo + 1, hi + 1, dtype=np.int64)
    m = (np.sqrt(n.astype(np.float64)).astype(np.int64) + 1) // 2
    # correct float sqrt at exact-square boundaries
    lo_edge = (2 * m - 1) ** 2
    m = np.where(lo_edge > n, m - 1, m)
    m = np.where((2 * m + 1) ** 2 <= n, m + 1, m)
    m = np.maximum(m, 1)
    t = n - (2 * m - 1) ** 2
    xs = np.empty_like(n)
    ys = np.empty_like(n)
    north = t < 2 * m
    xs[north] = m[north]
    ys[north] = -m[north] + 1 + t[north]
    w = t - (2 * m - 1)
    west = (~north) & (w <= 2 * m)
    xs[west] = m[west] - w[west]
    ys[west] = m[west]
    s = w - 2 * m
    south = (~north) & (~west) & (s <= 2 * m)
    xs[south] = -m[south]
    ys[south] = m[south] - s[south]
    e = s - 2 * m
    east = (~north) & (~west) & (~south)
    xs[east] = -m[east] + e[east]
    ys[east] = -m[east]
    origin = n == 0
    xs[origin] = 0
    ys[origin] = 0
    return xs, ys
