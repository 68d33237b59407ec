"""Geometry primitives against brute-force enumeration oracles."""

import math

import numpy as np
import pytest

from foragesim.grid import (
    SOURCE,
    Point,
    ball_size,
    ceil_sqrt,
    lpath,
    lpath_hit_index,
    lpath_nodes,
    lpath_pos,
    manhattan,
    nth_node_at_distance,
    sample_uniform_ball,
    sphere_size,
    spiral_cover_radius,
    spiral_cover_steps,
    spiral_hit_index,
    spiral_nodes,
    spiral_position,
)
from foragesim.verify import iter_spiral_offsets


def enumerate_ball(r):
    return {
        (x, y)
        for x in range(-r, r + 1)
        for y in range(-r, r + 1)
        if abs(x) + abs(y) <= r
    }


def test_manhattan():
    assert manhattan(Point(0, 0), Point(0, 0)) == 0
    assert manhattan(Point(0, 0), Point(3, -4)) == 7
    assert manhattan(Point(2, 1), Point(3, 1)) == 1
    assert manhattan(Point(3, -4)) == 7  # source default


def test_manhattan_symmetry_and_triangle():
    rng = np.random.default_rng(1)
    pts = [Point(int(a), int(b)) for a, b in rng.integers(-50, 51, size=(60, 2))]
    for u, v, w in zip(pts, pts[1:], pts[2:]):
        assert manhattan(u, v) == manhattan(v, u)
        assert manhattan(u, w) <= manhattan(u, v) + manhattan(v, w)


def test_ball_size_small_literals():
    assert ball_size(0) == 1
    assert ball_size(1) == 5
    assert ball_size(2) == 13


def test_ball_size_matches_enumeration():
    for r in range(201):
        # count without materializing: sum over x of the y-range width
        count = sum(2 * (r - abs(x)) + 1 for x in range(-r, r + 1))
        assert ball_size(r) == count
    assert ball_size(2) == len(enumerate_ball(2))


def test_sphere_size():
    assert sphere_size(0) == 1
    for d in range(1, 40):
        assert sphere_size(d) == ball_size(d) - ball_size(d - 1)


def test_nth_node_order_and_bijection():
    assert nth_node_at_distance(1, 0) == (1, 0)
    assert nth_node_at_distance(1, 1) == (0, 1)
    assert nth_node_at_distance(2, 7) == (1, -1)
    for d in (1, 2, 3, 7, 19):
        nodes = [nth_node_at_distance(d, i) for i in range(4 * d)]
        assert len(set(nodes)) == 4 * d
        assert all(abs(x) + abs(y) == d for x, y in nodes)
        # counterclockwise: the winding angle increases monotonically
        angles = [math.atan2(y, x) for x, y in nodes]
        wraps = sum(1 for a, b in zip(angles, angles[1:]) if b < a)
        assert wraps <= 1


def test_nth_node_range_errors():
    with pytest.raises(ValueError):
        nth_node_at_distance(1, 4)
    with pytest.raises(ValueError):
        nth_node_at_distance(2, -1)
    with pytest.raises(ValueError):
        nth_node_at_distance(0, 0)


def test_sample_uniform_ball_degenerate_and_support():
    rng = np.random.default_rng(2)
    assert sample_uniform_ball(0, rng) == SOURCE
    for _ in range(500):
        p = sample_uniform_ball(8, rng)
        assert manhattan(p) <= 8


def test_sample_uniform_ball_frequencies_r1():
    rng = np.random.default_rng(3)
    counts = {}
    n = 100_000
    for _ in range(n):
        p = sample_uniform_ball(1, rng)
        counts[p] = counts.get(p, 0) + 1
    assert set(counts) == enumerate_ball(1)
    for c in counts.values():
        assert abs(c / n - 0.2) < 0.01


def test_sample_uniform_ball_chi_square_r2():
    from scipy.stats import chi2

    rng = np.random.default_rng(4)
    nodes = sorted(enumerate_ball(2))
    index = {p: i for i, p in enumerate(nodes)}
    counts = np.zeros(len(nodes))
    n = 1_000_000
    for _ in range(n):
        counts[index[sample_uniform_ball(2, rng)]] += 1
    expected = n / len(nodes)
    stat = float(np.sum((counts - expected) ** 2 / expected))
    assert stat < chi2.ppf(0.999, len(nodes) - 1)


def test_lpath_examples():
    assert lpath(Point(0, 0), Point(0, 0)) == []
    assert lpath(Point(0, 0), Point(2, 3)) == [
        Point(1, 0),
        Point(2, 0),
        Point(2, 1),
        Point(2, 2),
        Point(2, 3),
    ]
    assert lpath(Point(1, 1), Point(-1, 1)) == [Point(0, 1), Point(-1, 1)]


def test_lpath_is_shortest_and_unit_steps():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = Point(int(rng.integers(-30, 31)), int(rng.integers(-30, 31)))
        b = Point(int(rng.integers(-30, 31)), int(rng.integers(-30, 31)))
        path = lpath(a, b)
        assert len(path) == manhattan(a, b)
        prev = a
        for i, node in enumerate(path, start=1):
            assert manhattan(prev, node) == 1
            assert lpath_pos(a, b, i) == node
            prev = node
        if path:
            assert path[-1] == b
        assert lpath_pos(a, b, 0) == a


def test_lpath_hit_index_examples():
    assert lpath_hit_index(Point(0, 0), Point(2, 3), Point(2, 1)) == 3
    assert lpath_hit_index(Point(0, 0), Point(2, 3), Point(5, 5)) is None
    assert lpath_hit_index(Point(0, 0), Point(0, 3), Point(0, 1)) == 1


def test_lpath_hit_index_matches_enumeration():
    rng = np.random.default_rng(6)
    for _ in range(300):
        a = Point(int(rng.integers(-12, 13)), int(rng.integers(-12, 13)))
        b = Point(int(rng.integers(-12, 13)), int(rng.integers(-12, 13)))
        path = lpath(a, b)
        seen = {}
        for i, node in enumerate(path, start=1):
            seen.setdefault(node, i)
        for t in list(seen) + [a, Point(99, 99)]:
            assert lpath_hit_index(a, b, t) == seen.get(t)


def test_spiral_position_small_literals():
    assert spiral_position(0) == (0, 0)
    assert spiral_position(1) == (1, 0)
    assert spiral_position(3) == (0, 1)
    # first two full turns, from stepping the runs by hand
    expected = [
        (0, 0), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1),
        (1, -1), (2, -1), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (-1, 2),
        (-2, 2), (-2, 1), (-2, 0), (-2, -1), (-2, -2), (-1, -2), (0, -2),
        (1, -2), (2, -2), (3, -2),
    ]
    for n, pos in enumerate(expected):
        assert spiral_position(n) == pos


def test_spiral_position_matches_walker():
    walker = iter_spiral_offsets()
    for n in range(20_000):
        assert spiral_position(n) == next(walker)


def test_spiral_hit_index_literals_and_roundtrip():
    assert spiral_hit_index(Point(0, 0)) == 0
    assert spiral_hit_index(Point(1, 0)) == 1
    assert spiral_hit_index(Point(1, 1)) == 2
    for n in range(5000):
        assert spiral_hit_index(spiral_position(n)) == n
    for x in range(-20, 21):
        for y in range(-20, 21):
            assert spiral_position(spiral_hit_index(Point(x, y))) == (x, y)


def test_ceil_sqrt():
    for n in range(2000):
        assert ceil_sqrt(n) == math.isqrt(n - 1) + 1 if n else ceil_sqrt(n) == 0
    big = (1 << 40) + 7
    s = ceil_sqrt(big)
    assert (s - 1) ** 2 < big <= s * s


def test_spiral_cover_steps_literals():
    assert spiral_cover_steps(1) == 8
    assert spiral_cover_steps(16) == 24
    assert spiral_cover_steps(64) == 80


def test_spiral_cover_radius():
    for budget in range(1, 500):
        assert spiral_cover_radius(budget) == math.isqrt(budget) // 2


def test_spiral_cover_budget64_visits_ball4():
    steps = spiral_cover_steps(64)
    visited = {tuple(spiral_position(n)) for n in range(steps + 1)}
    ball = enumerate_ball(4)
    assert len(ball) == 41
    assert ball <= visited


def test_spiral_nodes_matches_scalar():
    rng = np.random.default_rng(7)
    ranges = [(0, 50), (97, 130), (1_000_000, 1_000_040)]
    ranges += [(int(a), int(a) + 25) for a in rng.integers(0, 10**12, size=5)]
    # exercise the float-sqrt corrections at ring boundaries
    for m in (3, 1000, 10**6):
        edge = (2 * m - 1) ** 2
        ranges.append((edge - 3, edge + 3))
    for lo, hi in ranges:
        xs, ys = spiral_nodes(lo, hi)
        for i, n in enumerate(range(lo + 1, hi + 1)):
            assert (int(xs[i]), int(ys[i])) == spiral_position(n)


def test_lpath_nodes_matches_scalar():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a = Point(int(rng.integers(-40, 41)), int(rng.integers(-40, 41)))
        b = Point(int(rng.integers(-40, 41)), int(rng.integers(-40, 41)))
        total = manhattan(a, b)
        lo = int(rng.integers(0, total + 1))
        hi = int(rng.integers(lo, total + 1))
        xs, ys = lpath_nodes(a, b, lo, hi)
        for i, step in enumerate(range(lo + 1, hi + 1)):
            assert (int(xs[i]), int(ys[i])) == lpath_pos(a, b, step)
