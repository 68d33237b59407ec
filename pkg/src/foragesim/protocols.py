"""Search protocols and the oracle side of the model.

A *program* is what a single agent runs: a lazy, unbounded sequence of
phases, each phase being "walk to a chosen node, sweep around it for a
budget, walk back to the source".  Programs are deterministic functions
of the advice they were built from; all randomness comes from the
per-agent streams supplied at execution time.

The oracle side assigns one advice bit string to all agents of a system
and is where the advice-size accounting lives: the length of the string
is the measured advice size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import count
from typing import Callable, Iterator, Sequence, Union

import numpy as np

from .grid import Point


class ConfigError(ValueError):
    """Invalid configuration value (bad parameter, malformed field)."""


class DecodeError(ValueError):
    """Advice bits cannot be decoded by the requested scheme."""


def ceil_div(num: int, den: int) -> int:
    return -(-num // den)


def ceil_sqrt_ratio(num: int, den: int) -> int:
    """Smallest integer R with R*R*den >= num (exact integer arithmetic)."""
    r = math.isqrt(num // den)
    while r * r * den < num:
        r += 1
    return r


# ---------------------------------------------------------------------------
# Growth functions (slowdown schedules and competitiveness normalizers).
# ---------------------------------------------------------------------------

_SLOW_THRESHOLD = 16  # sampled doubling checks start above this x
_SLOW_FACTOR = 1.95  # required Phi(2x) < factor * Phi(x)


@dataclass(frozen=True)
class GrowthFunction:
    """Integer-valued growth function family, logarithms base 2.

    kinds:
      constant:        f(x) = c                      (param c >= 1)
      polylog:         f(x) = ceil(log^beta max(x,2))
      log-over-sublog: f(x) = ceil(L / 2^((log L)^eps)), L = log max(x,2)

    Instances are validated on construction: sampled at x = 2^0 .. 2^40
    they must be non-decreasing and grow slowly under doubling
    (f(2x) < 1.95 * f(x) for sampled x > 16).  polylog exponents up to 3
    satisfy this; steeper schedules are rejected.
    """

    kind: str
    param: float

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "polylog", "log-over-sublog"):
            raise ConfigError(f"unknown growth function kind {self.kind!r}")
        if self.kind == "constant":
            if self.param < 1 or self.param != int(self.param):
                raise ConfigError("constant growth value must be an integer >= 1")
            return
        if self.param <= 0:
            raise ConfigError("growth exponent must be positive")
        samples = [self(1 << j) for j in range(41)]
        for a, b in zip(samples, samples[1:]):
            if b < a:
                raise ConfigError(f"growth function {self} is not non-decreasing")
        for j in range(_SLOW_THRESHOLD.bit_length(), 40):
            if samples[j + 1] >= _SLOW_FACTOR * samples[j]:
                raise ConfigError(
                    f"growth function {self} doubles too fast at x=2^{j}"
                )

    @classmethod
    def constant(cls, value: int) -> "GrowthFunction":
        return cls("constant", float(value))

    @classmethod
    def polylog(cls, exponent: float) -> "GrowthFunction":
        return cls("polylog", float(exponent))

    @classmethod
    def log_over_sublog(cls, exponent: float) -> "GrowthFunction":
        return cls("log-over-sublog", float(exponent))

    def __call__(self, x: int) -> int:
        if x < 1:
            raise ValueError(f"growth functions are defined for x >= 1, got {x}")
        if self.kind == "constant":
            return int(self.param)
        z = max(x, 2)
        lg = float(z.bit_length() - 1) if z & (z - 1) == 0 else math.log2(z)
        if self.kind == "polylog":
            return max(1, math.ceil(lg**self.param))
        sub = 2.0 ** (math.log2(lg) ** self.param) if lg > 1 else 1.0
        return max(1, math.ceil(lg / sub))

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant({int(self.param)})"
        return f"{self.kind}({self.param:g})"


# ---------------------------------------------------------------------------
# Advice bits and oracle encodings.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdviceBits:
    """Finite bit string handed to every agent; its length is the advice size."""

    bits: str = ""

    def __post_init__(self) -> None:
        if self.bits.strip("01") != "":
            raise ValueError(f"advice must be a string of 0/1, got {self.bits!r}")

    @property
    def length(self) -> int:
        return len(self.bits)

    def value(self) -> int:
        if not self.bits:
            raise DecodeError("cannot decode an empty advice string")
        return int(self.bits, 2)


EMPTY_ADVICE = AdviceBits("")

SCHEME_KNOWN_K = "known-k"
SCHEME_RHO_APPROX = "rho-approx"
SCHEME_LOG_K = "log-k"
SCHEME_PSI = "psi"
_SCHEMES = (SCHEME_KNOWN_K, SCHEME_RHO_APPROX, SCHEME_LOG_K, SCHEME_PSI)


def floor_log2(n: int) -> int:
    if n < 1:
        raise ValueError(f"floor_log2 needs n >= 1, got {n}")
    return n.bit_length() - 1


def ceil_log2_log2(k: int) -> int:
    """Exact ceil(log2 log2 k) for k >= 2: smallest m with k <= 2^(2^m)."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    m = 0
    while (1 << (1 << m)) < k:
        m += 1
    return m


@dataclass(frozen=True)
class AdviceWidth:
    """Advice-width schedule w(k) = ceil((log log k)^eps), eps in (0, 1].

    eps = 1 spends a full log log k bits; smaller eps interpolates down
    toward the triple-log regime.
    """

    eps: float
    PAD = 2  # slack added to the raw width so the field always fits

    def __post_init__(self) -> None:
        if not 0 < self.eps <= 1:
            raise ConfigError(f"advice width exponent must be in (0, 1], got {self.eps}")

    def width(self, k: int) -> int:
        if k < 4:
            raise ValueError(f"advice width is defined for k >= 4, got {k}")
        lg = float(k.bit_length() - 1) if k & (k - 1) == 0 else math.log2(k)
        return max(1, math.ceil(math.log2(lg) ** self.eps))


def guess_order(k: int) -> int:
    """Bucket index of k: floor(log log k), defined for k >= 4."""
    if k < 4:
        raise ValueError(f"guess order needs k >= 4, got {k}")
    return floor_log2(floor_log2(k))


@dataclass(frozen=True)
class GuessSet:
    """Candidate agent counts 2^i for 2^order <= i < 2^(order+1), ascending.

    For order = floor(log log k) the set always contains a 2-approximation
    of k, i.e. a guess g with g <= k < 2g.
    """

    order: int
    elements: tuple[int, ...]

    def two_approx_index(self, k: int) -> int:
        """Index of the unique element g with g <= k < 2g."""
        i = floor_log2(k) - (1 << self.order)
        if not 0 <= i < len(self.elements):
            raise ValueError(f"no 2-approximation of {k} in guess set order {self.order}")
        return i


def build_guess_set(order: int) -> GuessSet:
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    lo = 1 << order
    return GuessSet(order, tuple(1 << i for i in range(lo, 2 * lo)))


def encode_psi_advice(k: int, half_width: int) -> AdviceBits:
    """Two-field advice of exactly 2*half_width bits.

    First field: the guess-set order, zero-padded (most significant bits)
    to half_width.  Second field: the top half_width bits of the
    fixed-width order-bit index of the 2-approximation inside the guess
    set, zero-padded when half_width exceeds the order.
    """
    order = guess_order(k)
    if order.bit_length() > half_width:
        raise ConfigError(
            f"advice half-width {half_width} cannot hold guess order {order}"
        )
    first = format(order, "b").zfill(half_width)
    gs = build_guess_set(order)
    idx_bits = format(gs.two_approx_index(k), "b").zfill(order)
    if half_width >= order:
        second = idx_bits.zfill(half_width)
    else:
        second = idx_bits[:half_width]
    return AdviceBits(first + second)


def oracle_assign(
    scheme: str, k: int, *, advice_width: AdviceWidth | None = None
) -> AdviceBits:
    """Advice handed (identically) to each of the k agents.

    known-k:    k in minimal binary.
    rho-approx: floor(log k) in minimal binary, except k = 2^(2^m) where
                the all-ones value floor(log k) - 1 is used instead; for
                those k the count is a power of two, so halving the guess
                keeps it a 2-approximation while staying within
                ceil(log log k) bits.
    log-k:      floor(log log k) in minimal binary (k >= 4).
    psi:        exactly 2*(w(k) + 2) bits, see :func:`encode_psi_advice`.
    """
    if scheme not in _SCHEMES:
        raise ConfigError(f"unknown advice scheme {scheme!r}")
    if k < 1:
        raise ValueError(f"agent count must be >= 1, got {k}")
    if scheme == SCHEME_KNOWN_K:
        return AdviceBits(format(k, "b"))
    if scheme == SCHEME_RHO_APPROX:
        v = floor_log2(k)
        if v >= 2 and v & (v - 1) == 0 and k == 1 << v:
            v -= 1
        return AdviceBits(format(v, "b"))
    if k < 4:
        raise ValueError(f"scheme {scheme} needs k >= 4, got {k}")
    if scheme == SCHEME_LOG_K:
        return AdviceBits(format(guess_order(k), "b"))
    if advice_width is None:
        raise ConfigError("psi scheme requires an AdviceWidth")
    return encode_psi_advice(k, advice_width.width(k) + AdviceWidth.PAD)


def decode_psi_subset(advice: AdviceBits, half_width: int) -> tuple[int, ...]:
    """Contiguous guess-set block selected by a psi-scheme advice.

    The block is the run of guesses whose fixed-width index starts with
    the advice's second field; its size is max(1, ceil(2^order / 2^half_width))
    and it always contains the 2-approximation the oracle encoded.
    """
    if half_width < 1 or advice.length != 2 * half_width:
        raise DecodeError(
            f"psi advice must have 2*{half_width} bits, got {advice.length}"
        )
    order = int(advice.bits[:half_width], 2)
    gs = build_guess_set(order)
    second = advice.bits[half_width:]
    if half_width >= order:
        idx = int(second, 2)
        if idx >= len(gs.elements):
            raise DecodeError(f"guess index {idx} out of range for order {order}")
        return (gs.elements[idx],)
    block = 1 << (order - half_width)
    start = int(second, 2) * block
    return gs.elements[start : start + block]


# ---------------------------------------------------------------------------
# Phase directives and agent programs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformInBall:
    radius: int


@dataclass(frozen=True)
class HeavyTail:
    delta: float


@dataclass(frozen=True)
class Explicit:
    point: Point


@dataclass(frozen=True)
class FixedBudget:
    steps: int


@dataclass(frozen=True)
class DistancePower:
    exponent: float


Destination = Union[UniformInBall, HeavyTail, Explicit]
Budget = Union[FixedBudget, DistancePower]


@dataclass(frozen=True)
class PhaseDirective:
    """One phase: resolve a destination, sweep for a budget, return home."""

    destination: Destination
    budget: Budget

    def __post_init__(self) -> None:
        if isinstance(self.destination, UniformInBall) and self.destination.radius < 1:
            raise ConfigError("ball radius must be >= 1")
        if isinstance(self.destination, HeavyTail) and self.destination.delta <= 0:
            raise ConfigError("heavy-tail delta must be > 0")
        if isinstance(self.budget, FixedBudget) and self.budget.steps < 1:
            raise ConfigError("sweep budget must be >= 1")
        if isinstance(self.budget, DistancePower) and self.budget.exponent <= 2:
            raise ConfigError("sweep exponent must exceed 2")


@dataclass(frozen=True)
class PhaseProgram:
    """Plain program: an unbounded (or one-shot) stream of directives."""

    label: str
    make_directives: Callable[[], Iterator[PhaseDirective]]


@dataclass(frozen=True)
class InterleavedProgram:
    """Guess-driven program: one persistent sub-program per guess.

    Stage j = 1, 2, ... gives every guess a slice of 2^j sub-program
    steps (ascending guess order), commuting from the source to the
    paused position before each slice and returning to the source after
    it.  Commutes and returns count as walked time but not against the
    slice budget; sub-programs resume, they never restart.
    """

    label: str
    guesses: tuple[int, ...]
    rho: float

    def __post_init__(self) -> None:
        if not self.guesses:
            raise ConfigError("interleaved program needs at least one guess")
        if self.rho < 1:
            raise ConfigError(f"rho must be >= 1, got {self.rho}")

    def sub_agent_counts(self) -> tuple[int, ...]:
        return tuple(max(1, math.floor(g / self.rho)) for g in self.guesses)


AgentProgram = Union[PhaseProgram, InterleavedProgram]


def prog_known_k(k_assumed: int) -> PhaseProgram:
    """Double-loop search tuned for an assumed agent count.

    Stage j = 1, 2, ...; phase i = 1..j: uniform destination in the ball
    of radius 2^i, sweep budget ceil(2^(2i+2) / k_assumed).
    """
    if k_assumed < 1:
        raise ValueError(f"assumed agent count must be >= 1, got {k_assumed}")

    def gen() -> Iterator[PhaseDirective]:
        for stage in count(1):
            for i in range(1, stage + 1):
                yield PhaseDirective(
                    UniformInBall(1 << i),
                    FixedBudget(ceil_div(1 << (2 * i + 2), k_assumed)),
                )

    return PhaseProgram(f"known-k({k_assumed})", gen)


def prog_rho_approx(advice: AdviceBits, rho: float) -> PhaseProgram:
    """Known-count search driven by an approximate count from advice.

    Decodes the count guess 2^value and runs :func:`prog_known_k` with
    parameter max(1, floor(guess / rho)); rho = 2 matches the quality of
    the rho-approx oracle encoding.
    """
    if rho < 1:
        raise ConfigError(f"rho must be >= 1, got {rho}")
    k_a = 1 << advice.value()
    return prog_known_k(max(1, math.floor(k_a / rho)))


def prog_uniform(growth: GrowthFunction) -> PhaseProgram:
    """Advice-free search; the growth function sets the slowdown schedule.

    Epoch l = 0, 1, ...; stage i = 0..l; phase j = 0..i: destination
    uniform in the ball of radius ceil(sqrt(2^(i+j) / g(2^j))), sweep
    budget ceil(2^(i+2) / g(2^j)).
    """

    def gen() -> Iterator[PhaseDirective]:
        for epoch in count(0):
            for i in range(epoch + 1):
                for j in range(i + 1):
                    g = growth(1 << j)
                    yield PhaseDirective(
                        UniformInBall(ceil_sqrt_ratio(1 << (i + j), g)),
                        FixedBudget(ceil_div(1 << (i + 2), g)),
                    )

    return PhaseProgram(f"uniform({growth.describe()})", gen)


def prog_interleaved(
    guesses: GuessSet | Sequence[int], rho: float = 2.0
) -> InterleavedProgram:
    """Interleave known-count sub-programs over a set of count guesses."""
    elements = tuple(guesses.elements if isinstance(guesses, GuessSet) else guesses)
    return InterleavedProgram(f"interleaved({len(elements)} guesses)", elements, rho)


def prog_harmonic(delta: float) -> PhaseProgram:
    """Single-shot heavy-tail search; the agent halts after one phase.

    Destination at distance d with probability proportional to
    d^-(1+delta) (then uniform on that sphere), sweep budget
    ceil(d^(2+delta)).  Unsuccessful agents never find the treasure.
    """
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")

    def gen() -> Iterator[PhaseDirective]:
        yield PhaseDirective(HeavyTail(delta), DistancePower(2.0 + delta))

    return PhaseProgram(f"harmonic({delta:g})", gen)


# ---------------------------------------------------------------------------
# Heavy-tail destination sampling.
# ---------------------------------------------------------------------------

DEFAULT_TAIL_CUTOFF = 1_000_000


@dataclass(frozen=True)
class HarmonicParams:
    """Normalization of the heavy-tail node distribution.

    The node weight is normalizer / d^(2+delta); summing over the 4d
    nodes of each sphere gives the distance law
    P(distance = d) = 4 * normalizer * d^-(1+delta), so the normalizer
    is 1 / (4 * sum_{d>=1} d^-(1+delta)).
    """

    delta: float
    normalizer: float
    tail_cutoff: int

    def tail_error_bound(self) -> float:
        """Total-variation bound of the analytic-tail approximation.

        The midpoint integral bracket beyond the cutoff N misplaces at
        most 2 * 4c * N^-(1+delta) of probability mass; at the default
        cutoff this is far below the documented 1e-6.
        """
        return 8.0 * self.normalizer * self.tail_cutoff ** -(1.0 + self.delta)


def harmonic_normalizer(delta: float, tail_cutoff: int = DEFAULT_TAIL_CUTOFF) -> HarmonicParams:
    """Compute the normalizer to relative error <= 1e-9.

    Direct summation of d^-(1+delta) up to the cutoff plus a midpoint
    integral bracket for the remainder; the bracket width at the default
    cutoff is below 1e-9 of the series value for any delta > 0.05 and
    shrinks further with larger cutoffs.
    """
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if tail_cutoff < 1000:
        raise ValueError("tail cutoff too small for the target accuracy")
    d = np.arange(1, tail_cutoff + 1, dtype=np.float64)
    series = float(np.sum(d ** -(1.0 + delta)))
    series += (tail_cutoff + 0.5) ** -delta / delta
    params = HarmonicParams(delta, 1.0 / (4.0 * series), tail_cutoff)
    if params.tail_error_bound() > 1e-6:
        raise ValueError("tail cutoff too small for the 1e-6 sampling error bound")
    return params


class HeavyTailSampler:
    """Exact inverse-CDF sampler for the heavy-tail travel distance.

    Distances up to the cutoff are drawn from a tabulated prefix CDF;
    beyond it the analytic midpoint tail is inverted.  The total
    variation error of the tail approximation is below 1e-6.
    """

    def __init__(self, params: HarmonicParams):
        self.params = params
        d = np.arange(1, params.tail_cutoff + 1, dtype=np.float64)
        pmf = 4.0 * params.normalizer * d ** -(1.0 + params.delta)
        self.cdf = np.cumsum(pmf)

    def distance_cdf(self, d: int) -> float:
        """P(distance <= d) under the sampler's law."""
        if d < 1:
            return 0.0
        if d <= self.params.tail_cutoff:
            return float(self.cdf[d - 1])
        return 1.0 - self._tail_mass(d)

    def _tail_mass(self, d: int) -> float:
        p = self.params
        return 4.0 * p.normalizer * (d + 0.5) ** -p.delta / p.delta

    def sample(self, rng: np.random.Generator) -> int:
        u = float(rng.random())
        if u < float(self.cdf[-1]):
            return int(np.searchsorted(self.cdf, u, side="right")) + 1
        p = self.params
        # invert tail_mass(d) = 1 - u for the smallest integer d
        raw = (4.0 * p.normalizer / (p.delta * (1.0 - u))) ** (1.0 / p.delta) - 0.5
        return max(p.tail_cutoff + 1, math.ceil(raw))


_SAMPLERS: dict[tuple[float, int], HeavyTailSampler] = {}


def heavy_tail_sampler(delta: float, tail_cutoff: int = DEFAULT_TAIL_CUTOFF) -> HeavyTailSampler:
    """Cached sampler per (delta, cutoff); the table costs 8 MB at default size."""
    key = (delta, tail_cutoff)
    if key not in _SAMPLERS:
        _SAMPLERS[key] = HeavyTailSampler(harmonic_normalizer(delta, tail_cutoff))
    return _SAMPLERS[key]
