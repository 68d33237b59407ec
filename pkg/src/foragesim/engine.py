"""Synchronous-round execution of k agents against a placed treasure.

Time accounting: every edge traversal of every leg (outbound walk, sweep
step, return walk, and the commute/return legs of interleaved programs)
costs one round; internal computation is free; all agents start at the
source in round 0 and the system hitting time is the first round in
which any agent stands on the treasure node.

Two executors produce identical results from the same streams:

* phase level: O(1) closed-form interception checks per leg, and
* step level: explicit enumeration of every visited node.

The step-level walker is the slow, trusting-nothing route; agreement of
the two modes is itself a tested invariant.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from itertools import count
from typing import NamedTuple, Union

import numpy as np

from .grid import (
    SOURCE,
    Point,
    ball_size,
    ceil_sqrt,
    lpath_hit_index,
    lpath_nodes,
    lpath_pos,
    manhattan,
    nth_node_at_distance,
    sample_uniform_ball,
    spiral_hit_index,
    spiral_nodes,
    spiral_position,
)
from .protocols import (
    AdviceBits,
    AdviceWidth,
    AgentProgram,
    ConfigError,
    DistancePower,
    EMPTY_ADVICE,
    Explicit,
    FixedBudget,
    GrowthFunction,
    HeavyTail,
    InterleavedProgram,
    PhaseDirective,
    PhaseProgram,
    SCHEME_KNOWN_K,
    SCHEME_LOG_K,
    SCHEME_PSI,
    SCHEME_RHO_APPROX,
    UniformInBall,
    build_guess_set,
    ceil_div,
    decode_psi_subset,
    floor_log2,
    heavy_tail_sampler,
    oracle_assign,
    prog_harmonic,
    prog_interleaved,
    prog_known_k,
    prog_rho_approx,
    prog_uniform,
)

STEP_LEVEL = "step"
PHASE_LEVEL = "phase"
MODES = (STEP_LEVEL, PHASE_LEVEL)

_CHUNK = 1 << 15


class InvariantViolation(RuntimeError):
    """The engine produced a result that breaks a structural guarantee."""


def lower_bound(distance: int, k: int) -> int:
    """Baseline rounds D + ceil(D^2 / k); the competitiveness denominator.

    Any system of k agents needs D rounds to reach distance D and, on
    average, D^2/k further rounds for some agent to stumble on the right
    node of the D-sphere.
    """
    if distance < 1 or k < 1:
        raise ValueError("distance and agent count must be >= 1")
    return distance + ceil_div(distance * distance, k)


# ---------------------------------------------------------------------------
# World configuration.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomOnSphere:
    """Treasure drawn uniformly from the 4D nodes at exact distance D."""


@dataclass(frozen=True)
class FixedPlacement:
    point: Point


Placement = Union[RandomOnSphere, FixedPlacement]


@dataclass(frozen=True)
class WorldConfig:
    distance: int
    k: int
    cap: int
    placement: Placement = RandomOnSphere()

    def __post_init__(self) -> None:
        if self.distance < 1:
            raise ConfigError(f"treasure distance must be >= 1, got {self.distance}")
        if self.k < 1:
            raise ConfigError(f"agent count must be >= 1, got {self.k}")
        if self.cap < 1:
            raise ConfigError(f"round cap must be >= 1, got {self.cap}")
        if isinstance(self.placement, FixedPlacement):
            d = manhattan(self.placement.point)
            if d != self.distance:
                raise ConfigError(
                    f"fixed treasure at distance {d} does not match distance {self.distance}"
                )


@dataclass(frozen=True)
class TrialRecord:
    hitting_time: int | None  # None when censored at the cap
    censored: bool
    finder: int | None
    treasure: Point
    phase_counts: tuple[int, ...]
    mode: str
    seed: tuple[int, ...]
    cap: int
    advice: str
    sampling_error: float = 0.0  # TV bound of any approximate sampling used


# ---------------------------------------------------------------------------
# Phase resolution: directive + stream -> concrete legs.
# ---------------------------------------------------------------------------


class ResolvedPhase(NamedTuple):
    """A directive with its randomness spent: three concrete legs."""

    dest: Point
    out_len: int
    sweep_steps: int
    end: Point  # position after the sweep
    ret_len: int
    reach: int  # no visited node of this phase is farther from the source

    @property
    def total(self) -> int:
        return self.out_len + self.sweep_steps + self.ret_len


def resolve_phase(directive: PhaseDirective, rng: np.random.Generator) -> ResolvedPhase:
    """Sample the destination and fix the sweep length for one phase."""
    d = directive.destination
    kind = type(d)
    if kind is UniformInBall:
        dest = sample_uniform_ball(d.radius, rng)
    elif kind is HeavyTail:
        dist = heavy_tail_sampler(d.delta).sample(rng)
        dest = nth_node_at_distance(dist, int(rng.integers(0, 4 * dist)))
    elif kind is Explicit:
        dest = d.point
    else:
        raise ConfigError(f"unknown destination spec {d!r}")
    dx, dy = dest
    out_len = (dx if dx >= 0 else -dx) + (dy if dy >= 0 else -dy)
    b = directive.budget
    if type(b) is FixedBudget:
        budget = b.steps
    elif type(b) is DistancePower:
        budget = max(1, math.ceil(out_len**b.exponent))
    else:
        raise ConfigError(f"unknown budget spec {b!r}")
    r = (ceil_sqrt(budget) + 1) // 2
    steps = (2 * r + 1) ** 2 - 1  # spiral_cover_steps(budget)
    ex = dx + r  # spiral_position(steps) offset is (r, -r)
    ey = dy - r
    # outbound nodes stay within out_len of the source, the sweep square
    # within out_len + 2r, and the return path only walks inward
    return ResolvedPhase(
        dest, out_len, steps, Point(ex, ey),
        (ex if ex >= 0 else -ex) + (ey if ey >= 0 else -ey),
        out_len + 2 * r,
    )


@dataclass(frozen=True)
class PhaseOutcome:
    found: bool
    hit_time: int | None  # rounds from the phase start when found
    elapsed: int  # full phase length when not found
    destination: Point
    sweep_steps: int
    end: Point  # agent position when the phase ends


def phase_outcome(
    directive: PhaseDirective, treasure: Point, rng: np.random.Generator
) -> PhaseOutcome:
    """Closed-form outcome of one uninterrupted phase starting at the source.

    Checks, in walk order: the outbound path, interception by the sweep
    (the treasure's sweep index against the executed sweep length), and
    the return path.
    """
    plan = resolve_phase(directive, rng)
    h = lpath_hit_index(SOURCE, plan.dest, treasure)
    if h is not None:
        return PhaseOutcome(True, h, plan.total, plan.dest, plan.sweep_steps, treasure)
    h = spiral_hit_index(treasure - plan.dest)
    if 1 <= h <= plan.sweep_steps:
        return PhaseOutcome(
            True, plan.out_len + h, plan.total, plan.dest, plan.sweep_steps, treasure
        )
    h = lpath_hit_index(plan.end, SOURCE, treasure)
    if h is not None:
        return PhaseOutcome(
            True,
            plan.out_len + plan.sweep_steps + h,
            plan.total,
            plan.dest,
            plan.sweep_steps,
            treasure,
        )
    return PhaseOutcome(False, None, plan.total, plan.dest, plan.sweep_steps, SOURCE)


# ---------------------------------------------------------------------------
# Leg evaluators: the only place the two modes differ.
#
# Both expose walk(frm, to, lo, hi) and sweep(center, lo, hi) returning the
# smallest leg step index in (lo, hi] that lands on the treasure, or None.
# ---------------------------------------------------------------------------


class VisitRecorder:
    """Collects every node entered by the step-level walker, in walk order."""

    def __init__(self) -> None:
        self._xs: list[np.ndarray] = []
        self._ys: list[np.ndarray] = []

    def add(self, xs: np.ndarray, ys: np.ndarray) -> None:
        if len(xs):
            self._xs.append(xs)
            self._ys.append(ys)

    def trajectory(self) -> tuple[np.ndarray, np.ndarray]:
        if not self._xs:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        return np.concatenate(self._xs), np.concatenate(self._ys)


class _AnalyticLegs:
    __slots__ = ("treasure", "tx", "ty", "treasure_dist")

    def __init__(self, treasure: Point | None):
        self.treasure = treasure
        self.tx, self.ty = treasure if treasure is not None else (0, 0)
        self.treasure_dist = manhattan(treasure) if treasure is not None else 0

    def walk(self, frm: Point, to: Point, lo: int, hi: int) -> int | None:
        if self.treasure is None:
            return None
        h = lpath_hit_index(frm, to, self.treasure)
        if h is not None and lo < h <= hi:
            return h
        return None

    def sweep(self, center: Point, lo: int, hi: int) -> int | None:
        if self.treasure is None:
            return None
        h = spiral_hit_index((self.tx - center[0], self.ty - center[1]))
        if lo < h <= hi:
            return h
        return None

    def phase_hits(self, plan: ResolvedPhase) -> int | None:
        """First hit offset of one whole uninterrupted phase, or None."""
        if self.treasure is None or self.treasure_dist > plan.reach:
            return None
        h = lpath_hit_index(SOURCE, plan.dest, self.treasure)
        if h is not None:
            return h
        h = spiral_hit_index((self.tx - plan.dest[0], self.ty - plan.dest[1]))
        if 1 <= h <= plan.sweep_steps:
            return plan.out_len + h
        h = lpath_hit_index(plan.end, SOURCE, self.treasure)
        if h is not None:
            return plan.out_len + plan.sweep_steps + h
        return None


class _WalkingLegs:
    __slots__ = ("tx", "ty", "check", "recorder")

    def __init__(self, treasure: Point | None, recorder: VisitRecorder | None = None):
        self.check = treasure is not None
        self.tx, self.ty = treasure if treasure is not None else (0, 0)
        self.recorder = recorder

    def _scan(self, xs: np.ndarray, ys: np.ndarray) -> int | None:
        if self.check:
            eq = (xs == self.tx) & (ys == self.ty)
            if eq.any():
                i = int(np.argmax(eq))
                if self.recorder is not None:
                    self.recorder.add(xs[: i + 1], ys[: i + 1])
                return i
        if self.recorder is not None:
            self.recorder.add(xs, ys)
        return None

    def walk(self, frm: Point, to: Point, lo: int, hi: int) -> int | None:
        for a in range(lo, hi, _CHUNK):
            b = min(a + _CHUNK, hi)
            xs, ys = lpath_nodes(frm, to, a, b)
            i = self._scan(xs, ys)
            if i is not None:
                return a + 1 + i
        return None

    def sweep(self, center: Point, lo: int, hi: int) -> int | None:
        cx, cy = center
        for a in range(lo, hi, _CHUNK):
            b = min(a + _CHUNK, hi)
            xs, ys = spiral_nodes(a, b)
            xs = xs + cx
            ys = ys + cy
            i = self._scan(xs, ys)
            if i is not None:
                return a + 1 + i
        return None

    def phase_hits(self, plan: ResolvedPhase) -> int | None:
        """Whole-phase walk; every node is enumerated and tested."""
        h = self.walk(SOURCE, plan.dest, 0, plan.out_len)
        if h is not None:
            return h
        h = self.sweep(plan.dest, 0, plan.sweep_steps)
        if h is not None:
            return plan.out_len + h
        h = self.walk(plan.end, SOURCE, 0, plan.ret_len)
        if h is not None:
            return plan.out_len + plan.sweep_steps + h
        return None


# ---------------------------------------------------------------------------
# Single-agent execution.
# ---------------------------------------------------------------------------


class _DirectiveCache:
    """Lazily materialized prefix of a program's deterministic directives.

    Directive streams depend only on loop indices, never on randomness,
    so agents of one trial (and trials of one sweep) can share them.
    """

    __slots__ = ("_iter", "items")

    def __init__(self, program: PhaseProgram):
        self._iter = program.make_directives()
        self.items: list[PhaseDirective] = []

    def get(self, i: int) -> PhaseDirective | None:
        items = self.items
        while len(items) <= i:
            try:
                items.append(next(self._iter))
            except StopIteration:
                return None
        return items[i]


# PhaseProgram identity is its generator closure, so caches are keyed by
# object (weakly); InterleavedProgram is a plain value, so equal programs
# share sub-program caches across trials.
_simple_caches: "weakref.WeakKeyDictionary[PhaseProgram, _DirectiveCache]" = (
    weakref.WeakKeyDictionary()
)
_sub_caches: dict[InterleavedProgram, list[_DirectiveCache]] = {}


def _directives_for(program: PhaseProgram) -> _DirectiveCache:
    cache = _simple_caches.get(program)
    if cache is None:
        cache = _DirectiveCache(program)
        _simple_caches[program] = cache
    return cache


def _sub_directives_for(program: InterleavedProgram) -> list[_DirectiveCache]:
    caches = _sub_caches.get(program)
    if caches is None:
        caches = [_DirectiveCache(prog_known_k(p)) for p in program.sub_agent_counts()]
        _sub_caches[program] = caches
    return caches


def _run_phases(
    program: PhaseProgram,
    rng: np.random.Generator,
    cap: int,
    legs,
) -> tuple[int | None, int]:
    """Run a plain phase program until a hit, the cap, or exhaustion."""
    cache = _directives_for(program)
    phase_hits = legs.phase_hits
    t = 0
    phases = 0
    while t < cap:
        directive = cache.get(phases)
        if directive is None:
            break
        plan = resolve_phase(directive, rng)
        phases += 1
        if plan.total <= cap - t:
            h = phase_hits(plan)
            if h is not None:
                return t + h, phases
            t += plan.total
            continue
        # the cap interrupts this phase: walk it leg by leg, clipped
        n = plan.out_len
        take = n if n <= cap - t else cap - t
        h = legs.walk(SOURCE, plan.dest, 0, take)
        if h is not None:
            return t + h, phases
        t += take
        if take < n:
            return None, phases
        n = plan.sweep_steps
        take = n if n <= cap - t else cap - t
        h = legs.sweep(plan.dest, 0, take)
        if h is not None:
            return t + h, phases
        t += take
        if take < n:
            return None, phases
        take = plan.ret_len if plan.ret_len <= cap - t else cap - t
        h = legs.walk(plan.end, SOURCE, 0, take)
        if h is not None:
            return t + h, phases
        return None, phases  # by construction the cap falls inside this phase
    return None, phases


class _SubCursor:
    """Paused position of one persistent sub-program of an interleaved run."""

    __slots__ = ("cache", "rng", "next_idx", "plan", "leg", "off", "phases", "paused")

    def __init__(self, cache: _DirectiveCache, rng: np.random.Generator):
        self.cache = cache
        self.rng = rng
        self.next_idx = 0
        self.plan: ResolvedPhase | None = None
        self.leg = 0
        self.off = 0
        self.phases = 0
        self.paused = SOURCE  # position(), cached while the cursor rests

    def position(self) -> Point:
        if self.plan is None:
            return SOURCE
        if self.leg == 0:
            return lpath_pos(SOURCE, self.plan.dest, self.off)
        if self.leg == 1:
            return self.plan.dest + spiral_position(self.off)
        return lpath_pos(self.plan.end, SOURCE, self.off)

    def leg_len(self) -> int:
        plan = self.plan
        assert plan is not None
        if self.leg == 0:
            return plan.out_len
        if self.leg == 1:
            return plan.sweep_steps
        return plan.ret_len


def _run_interleaved(
    program: InterleavedProgram,
    seed_seq: np.random.SeedSequence,
    cap: int,
    legs,
) -> tuple[int | None, int]:
    """Slice persistent sub-programs in stages of doubling budgets.

    Commutes to the paused position and the return to the source after
    each slice cost wall-clock rounds but are not charged to the slice.
    """
    caches = _sub_directives_for(program)
    subs = [
        _SubCursor(cache, np.random.Generator(np.random.PCG64(child)))
        for cache, child in zip(caches, seed_seq.spawn(len(program.guesses)))
    ]
    walk = legs.walk
    sweep = legs.sweep
    phase_hits = legs.phase_hits

    def total_phases() -> int:
        return sum(s.phases for s in subs)

    t = 0
    for stage in count(1):
        for sub in subs:
            if t >= cap:
                return None, total_phases()
            pos = sub.paused
            if pos != SOURCE:  # commute back to where this guess paused
                dist = manhattan(pos)
                take = dist if dist <= cap - t else cap - t
                h = walk(SOURCE, pos, 0, take)
                if h is not None:
                    return t + h, total_phases()
                t += take
                if take < dist:
                    return None, total_phases()
            budget = 1 << stage
            while budget > 0:
                if t >= cap:
                    sub.paused = sub.position()
                    return None, total_phases()
                plan = sub.plan
                if plan is None:
                    directive = sub.cache.get(sub.next_idx)
                    if directive is None:
                        break  # sub-program exhausted; nothing left to slice
                    sub.next_idx += 1
                    plan = resolve_phase(directive, sub.rng)
                    sub.phases += 1
                    total = plan.total
                    # fast path: the whole phase fits into this slice
                    while total <= budget and total <= cap - t:
                        h = phase_hits(plan)
                        if h is not None:
                            return t + h, total_phases()
                        t += total
                        budget -= total
                        plan = None
                        if budget == 0:
                            break
                        directive = sub.cache.get(sub.next_idx)
                        if directive is None:
                            break
                        sub.next_idx += 1
                        plan = resolve_phase(directive, sub.rng)
                        sub.phases += 1
                        total = plan.total
                    sub.plan = plan
                    if plan is None:
                        if budget == 0:
                            break
                        continue
                    sub.leg = 0
                    sub.off = 0
                leg = sub.leg
                lo = sub.off
                if leg == 0:
                    rem = plan.out_len - lo
                elif leg == 1:
                    rem = plan.sweep_steps - lo
                else:
                    rem = plan.ret_len - lo
                if rem == 0:
                    if leg == 2:
                        sub.plan = None
                    else:
                        sub.leg = leg + 1
                        sub.off = 0
                    continue
                take = rem if rem <= budget else budget
                room = cap - t
                if take > room:
                    take = room
                hi = lo + take
                if leg == 0:
                    h = walk(SOURCE, plan.dest, lo, hi)
                elif leg == 1:
                    h = sweep(plan.dest, lo, hi)
                else:
                    h = walk(plan.end, SOURCE, lo, hi)
                if h is not None:
                    return t + (h - lo), total_phases()
                t += take
                sub.off = hi
                budget -= take
            pos = sub.position()
            sub.paused = pos
            if pos != SOURCE:  # park this guess at the source again
                dist = manhattan(pos)
                take = dist if dist <= cap - t else cap - t
                h = walk(pos, SOURCE, 0, take)
                if h is not None:
                    return t + h, total_phases()
                t += take
                if take < dist:
                    return None, total_phases()
    raise AssertionError("unreachable")


def _make_legs(mode: str, treasure: Point | None, recorder: VisitRecorder | None):
    if mode == PHASE_LEVEL:
        if recorder is not None:
            raise ConfigError("visit recording requires the step-level mode")
        return _AnalyticLegs(treasure)
    if mode == STEP_LEVEL:
        return _WalkingLegs(treasure, recorder)
    raise ConfigError(f"unknown mode {mode!r}")


def _run_agent(
    program: AgentProgram,
    treasure: Point | None,
    cap: int,
    seed_seq: np.random.SeedSequence,
    mode: str,
    recorder: VisitRecorder | None = None,
) -> tuple[int | None, int]:
    legs = _make_legs(mode, treasure, recorder)
    if isinstance(program, InterleavedProgram):
        return _run_interleaved(program, seed_seq, cap, legs)
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    return _run_phases(program, rng, cap, legs)


def agent_hitting_time(
    program: AgentProgram,
    treasure: Point,
    cap: int,
    stream: np.random.SeedSequence | int,
    mode: str = PHASE_LEVEL,
) -> int | None:
    """Rounds until this one agent first stands on the treasure.

    Returns None when the agent does not reach the treasure within `cap`
    rounds (or halts first).  Identical for both modes given the same
    stream.
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    seed_seq = stream if isinstance(stream, np.random.SeedSequence) else np.random.SeedSequence(stream)
    hit, _ = _run_agent(program, treasure, cap, seed_seq, mode)
    return hit


# ---------------------------------------------------------------------------
# Algorithm configuration: oracle scheme + program family in one place.
# ---------------------------------------------------------------------------

ALGO_KNOWN_K = "known-k"
ALGO_RHO_APPROX = "rho-approx"
ALGO_UNIFORM = "uniform"
ALGO_LOG_K = "log-k"
ALGO_PSI = "psi"
ALGO_HARMONIC = "harmonic"
ALGORITHMS = (ALGO_KNOWN_K, ALGO_RHO_APPROX, ALGO_UNIFORM, ALGO_LOG_K, ALGO_PSI, ALGO_HARMONIC)


@dataclass(frozen=True)
class AlgorithmConfig:
    """One of the six searches plus its oracle-side parameters.

    The search protocol proper is a function of the advice alone;
    `advice_for` is the oracle and `program_for` the agent-side decoder,
    so every piece of initial knowledge flows through the bit string.
    """

    name: str
    growth: GrowthFunction | None = None
    rho: float = 2.0
    delta: float = 1.0
    advice_width: AdviceWidth | None = None

    def __post_init__(self) -> None:
        if self.name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.name!r}")
        if self.name == ALGO_UNIFORM and self.growth is None:
            raise ConfigError("uniform search needs a growth function")
        if self.name == ALGO_PSI and self.advice_width is None:
            raise ConfigError("psi search needs an advice width schedule")
        if self.rho < 1:
            raise ConfigError(f"rho must be >= 1, got {self.rho}")
        if self.delta <= 0:
            raise ConfigError(f"delta must be > 0, got {self.delta}")

    def min_agents(self) -> int:
        return 4 if self.name in (ALGO_LOG_K, ALGO_PSI) else 1

    def advice_for(self, k: int) -> AdviceBits:
        if k < self.min_agents():
            raise ValueError(f"{self.name} needs k >= {self.min_agents()}, got {k}")
        if self.name == ALGO_KNOWN_K:
            return oracle_assign(SCHEME_KNOWN_K, k)
        if self.name == ALGO_RHO_APPROX:
            return oracle_assign(SCHEME_RHO_APPROX, k)
        if self.name == ALGO_LOG_K:
            return oracle_assign(SCHEME_LOG_K, k)
        if self.name == ALGO_PSI:
            return oracle_assign(SCHEME_PSI, k, advice_width=self.advice_width)
        return EMPTY_ADVICE

    def program_for(self, advice: AdviceBits) -> AgentProgram:
        if self.name == ALGO_KNOWN_K:
            return prog_known_k(advice.value())
        if self.name == ALGO_RHO_APPROX:
            return prog_rho_approx(advice, self.rho)
        if self.name == ALGO_UNIFORM:
            assert self.growth is not None
            return prog_uniform(self.growth)
        if self.name == ALGO_LOG_K:
            return prog_interleaved(build_guess_set(advice.value()), self.rho)
        if self.name == ALGO_PSI:
            return prog_interleaved(decode_psi_subset(advice, advice.length // 2), self.rho)
        return prog_harmonic(self.delta)

    def nominal_overhead(self, k: int) -> int:
        """Expected competitiveness scale of this search, used for cap sizing."""
        if self.name == ALGO_UNIFORM:
            assert self.growth is not None
            return self.growth(k)
        if self.name == ALGO_LOG_K:
            return max(1, floor_log2(k))
        if self.name == ALGO_PSI:
            assert self.advice_width is not None
            return max(1, ceil_div(max(1, floor_log2(k)), 1 << self.advice_width.width(k)))
        return 1

    def describe(self) -> str:
        if self.name == ALGO_UNIFORM:
            assert self.growth is not None
            return f"uniform[{self.growth.describe()}]"
        if self.name in (ALGO_RHO_APPROX, ALGO_LOG_K):
            return f"{self.name}[rho={self.rho:g}]"
        if self.name == ALGO_PSI:
            assert self.advice_width is not None
            return f"psi[eps={self.advice_width.eps:g},rho={self.rho:g}]"
        if self.name == ALGO_HARMONIC:
            return f"harmonic[delta={self.delta:g}]"
        return self.name


# ---------------------------------------------------------------------------
# System trials.
# ---------------------------------------------------------------------------


def _seed_tuple(seed: int | tuple[int, ...]) -> tuple[int, ...]:
    parts = (seed,) if isinstance(seed, int) else tuple(seed)
    if not parts or any(p < 0 for p in parts):
        raise ConfigError(f"seed material must be non-negative integers, got {seed!r}")
    return parts


def place_treasure(world: WorldConfig, seed: tuple[int, ...]) -> Point:
    if isinstance(world.placement, FixedPlacement):
        return world.placement.point
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed + (0,))))
    return nth_node_at_distance(world.distance, int(rng.integers(0, 4 * world.distance)))


def run_trial(
    algorithm: AlgorithmConfig,
    world: WorldConfig,
    seed: int | tuple[int, ...],
    mode: str = PHASE_LEVEL,
) -> TrialRecord:
    """Execute one system of k agents and report the minimum hitting time.

    Stream derivation is positional and k-independent: the treasure uses
    (seed..., 0) and agent a uses (seed..., 1, a), so adding agents never
    perturbs existing ones.  Ties on the hitting time go to the lowest
    agent index.  Agents are truncated at the best time found so far,
    which cannot change the minimum or the tie winner.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    parts = _seed_tuple(seed)
    advice = algorithm.advice_for(world.k)
    program = algorithm.program_for(advice)
    treasure = place_treasure(world, parts)
    best: int | None = None
    finder: int | None = None
    phase_counts = []
    for a in range(world.k):
        eff_cap = world.cap if best is None else min(world.cap, best)
        hit, phases = _run_agent(
            program, treasure, eff_cap, np.random.SeedSequence(parts + (1, a)), mode
        )
        phase_counts.append(phases)
        if hit is not None and (best is None or hit < best):
            best, finder = hit, a
    if best is not None and best < world.distance:
        raise InvariantViolation(
            f"hitting time {best} below the walk floor {world.distance}"
        )
    sampling_error = 0.0
    if algorithm.name == ALGO_HARMONIC:
        sampling_error = heavy_tail_sampler(algorithm.delta).params.tail_error_bound()
    return TrialRecord(
        hitting_time=best,
        censored=best is None,
        finder=finder,
        treasure=treasure,
        phase_counts=tuple(phase_counts),
        mode=mode,
        seed=parts,
        cap=world.cap,
        advice=advice.bits,
        sampling_error=sampling_error,
    )


# ---------------------------------------------------------------------------
# Ring coverage instrumentation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingSpec:
    """Annuli (2^(base+i), 2^(base+i+1)] for i = 1..count around the source.

    base is floor(log2(agent_bound))/2 - 2, so the rings span the band
    between roughly sqrt(agent_bound) and agent_bound.
    """

    agent_bound: int

    def __post_init__(self) -> None:
        k = self.agent_bound
        if k < 16 or k & (k - 1) != 0:
            raise ConfigError(f"agent bound must be a power of two >= 16, got {k}")

    @property
    def base(self) -> int:
        return floor_log2(self.agent_bound) // 2 - 2

    @property
    def count(self) -> int:
        return floor_log2(self.agent_bound) // 2

    def inner(self, i: int) -> int:
        self._check(i)
        return 1 << (self.base + i)

    def outer(self, i: int) -> int:
        self._check(i)
        return 1 << (self.base + i + 1)

    def size(self, i: int) -> int:
        return ball_size(self.outer(i)) - ball_size(self.inner(i))

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.count:
            raise ValueError(f"ring index {i} out of range 1..{self.count}")


@dataclass(frozen=True)
class CoverageStats:
    rings: RingSpec
    horizon: int
    agent_count: int
    trials: int
    mean_visited: tuple[float, ...]  # indexed by ring - 1

    def fraction(self, ring: int) -> float:
        return self.mean_visited[ring - 1] / self.rings.size(ring)


def focus_ring(k: int) -> int:
    """Ring index matched to an agent count: i with k = 2^(2i), rounded down."""
    if k < 4:
        raise ValueError(f"agent count must be >= 4 to have a ring, got {k}")
    return floor_log2(k) // 2


def _ring_counts(rings: RingSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Distinct visited nodes per ring (union over everything recorded)."""
    counts = np.zeros(rings.count, dtype=np.int64)
    if not len(xs):
        return counts
    off = np.int64(1) << np.int64(30)  # coordinates stay below 2^30 in any run
    keys = ((xs + off) << np.int64(31)) + (ys + off)
    uniq = np.unique(keys)
    ux = (uniq >> np.int64(31)) - off
    uy = (uniq & ((np.int64(1) << np.int64(31)) - 1)) - off
    d = np.abs(ux) + np.abs(uy)
    sel = d[(d > rings.inner(1)) & (d <= rings.outer(rings.count))]
    if not len(sel):
        return counts
    # ring of distance d: smallest power of two >= d has exponent base+i+1
    exp = np.ceil(np.log2(sel.astype(np.float64))).astype(np.int64)
    exp = np.where((np.int64(1) << exp) < sel, exp + 1, exp)
    exp = np.where((np.int64(1) << (exp - 1)) >= sel, exp - 1, exp)
    idx = exp - rings.base - 1
    np.add.at(counts, idx - 1, 1)
    return counts


def ring_coverage(
    algorithm: AlgorithmConfig,
    k: int,
    growth: GrowthFunction,
    horizon_scale: int,
    trials: int,
    master_seed: int,
) -> CoverageStats:
    """Mean distinct-node coverage per ring after 4 * horizon_scale rounds.

    The ring layout is sized from the largest power-of-two agent bound K
    with K * growth(K) <= horizon_scale; the run itself uses k agents in
    step-level mode with no treasure.  Preconditions: k is a power of two
    with k^2 <= horizon_scale, and the layout must contain the ring
    matched to k.
    """
    if k < 4 or k & (k - 1) != 0:
        raise ConfigError(f"agent count must be a power of two >= 4, got {k}")
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if horizon_scale < k * k:
        raise ConfigError(
            f"horizon scale {horizon_scale} too small: needs at least k^2 = {k * k}"
        )
    bound = 1
    while 2 * bound * growth(2 * bound) <= horizon_scale:
        bound *= 2
    if bound < 16:
        raise ConfigError(f"horizon scale {horizon_scale} too small for a ring layout")
    rings = RingSpec(bound)
    ring = focus_ring(k)
    if ring > rings.base:
        raise ConfigError(
            f"horizon scale {horizon_scale} too small for the ring matched to k={k}"
        )
    horizon = 4 * horizon_scale
    advice = algorithm.advice_for(k)
    program = algorithm.program_for(advice)
    totals = np.zeros(rings.count, dtype=np.float64)
    for trial in range(trials):
        recorder = VisitRecorder()
        for a in range(k):
            seq = np.random.SeedSequence((master_seed, trial, 1, a))
            _run_agent(program, None, horizon, seq, STEP_LEVEL, recorder)
        xs, ys = recorder.trajectory()
        totals += _ring_counts(rings, xs, ys)
    return CoverageStats(rings, horizon, k, trials, tuple(totals / trials))
