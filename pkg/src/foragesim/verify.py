"""Self-contained invariant suites behind the `verify` CLI subcommand.

Each suite checks a contract of the library against an independent
route: the sweep geometry against a literal unit-move walker, the advice
encodings against exhaustive enumeration, the phase-level executor
against the step-level one, and the ring instrumentation against its
coverage floor.  Suites return one result per check so the CLI can print
a machine-readable line for each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import islice
from typing import Iterator

import numpy as np

from .engine import (
    ALGO_HARMONIC,
    ALGO_KNOWN_K,
    ALGO_LOG_K,
    ALGO_PSI,
    ALGO_RHO_APPROX,
    ALGO_UNIFORM,
    AlgorithmConfig,
    PHASE_LEVEL,
    STEP_LEVEL,
    WorldConfig,
    focus_ring,
    lower_bound,
    ring_coverage,
    run_trial,
)
from .grid import ball_size, spiral_cover_steps, spiral_hit_index, spiral_position
from .protocols import (
    AdviceWidth,
    GrowthFunction,
    SCHEME_LOG_K,
    SCHEME_PSI,
    SCHEME_RHO_APPROX,
    build_guess_set,
    ceil_log2_log2,
    decode_psi_subset,
    floor_log2,
    guess_order,
    oracle_assign,
)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}.{self.name}: {self.detail}"


def iter_spiral_offsets() -> Iterator[tuple[int, int]]:
    """Unit-move walker for the canonical sweep: runs E1 N1 W2 S2 E3 N3 ...

    This is the trusted enumeration the closed forms are checked against;
    it never consults them.
    """
    x = y = 0
    yield (x, y)
    run = 1
    while True:
        for dx, dy, length in ((1, 0, run), (0, 1, run), (-1, 0, run + 1), (0, -1, run + 1)):
            for _ in range(length):
                x += dx
                y += dy
                yield (x, y)
        run += 2


def verify_spiral(
    budget_max: int = 4096,
    closed_form_steps: int = 1_000_000,
    inverse_bound: int = 64,
) -> list[CheckResult]:
    """Sweep geometry: closed forms, inverses, and the coverage contract."""
    results = []

    mismatch = None
    for n, pos in enumerate(islice(iter_spiral_offsets(), closed_form_steps + 1)):
        if spiral_position(n) != pos:
            mismatch = n
            break
    results.append(
        CheckResult(
            "spiral",
            "closed_form",
            mismatch is None,
            f"position agrees with unit-move walking for n <= {closed_form_steps}"
            if mismatch is None
            else f"first mismatch at n = {mismatch}",
        )
    )

    bad = 0
    side = 2 * inverse_bound + 1
    for x in range(-inverse_bound, inverse_bound + 1):
        for y in range(-inverse_bound, inverse_bound + 1):
            n = spiral_hit_index((x, y))
            if spiral_position(n) != (x, y):
                bad += 1
    limit = (2 * inverse_bound - 1) ** 2  # indices guaranteed inside the square
    for n in range(limit):
        if spiral_hit_index(spiral_position(n)) != n:
            bad += 1
    results.append(
        CheckResult(
            "spiral",
            "inverse",
            bad == 0,
            f"round trips over the {side}x{side} square and n < {limit}"
            if bad == 0
            else f"{bad} round-trip failures",
        )
    )

    # Walk once to the horizon needed by the largest budget, record first
    # visits, and check every budget's covered ball against it.
    max_r = (math.isqrt(budget_max - 1) + 2) // 2  # ceil(sqrt)/2, rounded up
    horizon = (2 * max_r + 1) ** 2 - 1
    first_visit: dict[tuple[int, int], int] = {}
    duplicates = 0
    for n, pos in enumerate(islice(iter_spiral_offsets(), horizon + 1)):
        if pos in first_visit:
            duplicates += 1
        else:
            first_visit[pos] = n
    results.append(
        CheckResult(
            "spiral",
            "self_avoiding",
            duplicates == 0,
            f"no node repeats within the first {horizon} steps"
            if duplicates == 0
            else f"{duplicates} repeated nodes",
        )
    )

    worst = [0] * (max_r + 1)  # slowest first visit within each L1 ball
    counts = [0] * (max_r + 1)
    for (x, y), n in first_visit.items():
        d = abs(x) + abs(y)
        if d <= max_r:
            worst[d] = max(worst[d], n)
            counts[d] += 1
    for r in range(1, max_r + 1):
        worst[r] = max(worst[r], worst[r - 1])
        counts[r] += counts[r - 1]
    size_ok = all(counts[r] == ball_size(r) for r in range(max_r + 1))
    results.append(
        CheckResult(
            "spiral",
            "ball_sizes",
            size_ok,
            f"walked node counts match 2r^2+2r+1 for r <= {max_r}",
        )
    )

    uncovered = 0
    for budget in range(1, budget_max + 1):
        covered_r = math.isqrt(budget) // 2
        if worst[covered_r] > spiral_cover_steps(budget):
            uncovered += 1
    results.append(
        CheckResult(
            "spiral",
            "coverage",
            uncovered == 0,
            f"budgets 1..{budget_max} visit their guaranteed L1 ball"
            if uncovered == 0
            else f"{uncovered} budgets miss nodes of their guaranteed ball",
        )
    )
    return results


def verify_advice(k_min: int = 4, k_max: int = 1 << 20) -> list[CheckResult]:
    """Exhaustive bit accounting for every advice scheme over [k_min, k_max]."""
    rho_bad = approx_bad = logk_bad = guess_bad = 0
    psi_bad = subset_bad = 0
    widths = (AdviceWidth(0.5), AdviceWidth(1.0))
    for k in range(k_min, k_max + 1):
        adv = oracle_assign(SCHEME_RHO_APPROX, k)
        if adv.length > ceil_log2_log2(k):
            rho_bad += 1
        guess = 1 << adv.value()
        if not (2 * guess >= k and guess <= 2 * k):
            approx_bad += 1

        adv = oracle_assign(SCHEME_LOG_K, k)
        order = guess_order(k)
        bound = math.log2(math.log2(math.log2(k)))  # 0 at k = 4, defined beyond
        if adv.length != order.bit_length() or adv.length > bound + 2 + 1e-9:
            logk_bad += 1

        gs = build_guess_set(order)
        two = gs.elements[gs.two_approx_index(k)]
        if not (two <= k < 2 * two) or len(gs.elements) != 1 << order:
            guess_bad += 1
        if len(gs.elements) > max(1, floor_log2(k)) and k >= 4:
            guess_bad += 1

        for aw in widths:
            width = aw.width(k) + AdviceWidth.PAD
            adv = oracle_assign(SCHEME_PSI, k, advice_width=aw)
            if adv.length != 2 * (aw.width(k) + 2):
                psi_bad += 1
            subset = decode_psi_subset(adv, width)
            want = max(1, -(-(1 << order) // (1 << width)))
            if len(subset) != want or two not in subset:
                subset_bad += 1

    span = f"k in [{k_min}, {k_max}]"
    return [
        CheckResult(
            "advice",
            "rho_length",
            rho_bad == 0,
            f"length <= ceil(log log k) for all {span}" if rho_bad == 0 else f"{rho_bad} violations",
        ),
        CheckResult(
            "advice",
            "rho_two_approx",
            approx_bad == 0,
            f"decoded guess is a 2-approximation for all {span}"
            if approx_bad == 0
            else f"{approx_bad} violations",
        ),
        CheckResult(
            "advice",
            "logk_length",
            logk_bad == 0,
            f"length <= log log log k + 2 for all {span}" if logk_bad == 0 else f"{logk_bad} violations",
        ),
        CheckResult(
            "advice",
            "guess_sets",
            guess_bad == 0,
            f"guess sets hold a 2-approximation and at most log k guesses for all {span}"
            if guess_bad == 0
            else f"{guess_bad} violations",
        ),
        CheckResult(
            "advice",
            "psi_length",
            psi_bad == 0,
            f"length is exactly 2*(width+2) for eps in (0.5, 1) and all {span}"
            if psi_bad == 0
            else f"{psi_bad} violations",
        ),
        CheckResult(
            "advice",
            "psi_subset",
            subset_bad == 0,
            f"decoded blocks have the exact size and keep the 2-approximation for all {span}"
            if subset_bad == 0
            else f"{subset_bad} violations",
        ),
    ]


def _mode_check_configs() -> list[AlgorithmConfig]:
    return [
        AlgorithmConfig(ALGO_KNOWN_K),
        AlgorithmConfig(ALGO_RHO_APPROX, rho=2.0),
        AlgorithmConfig(ALGO_UNIFORM, growth=GrowthFunction.polylog(1.5)),
        AlgorithmConfig(ALGO_UNIFORM, growth=GrowthFunction.polylog(2.0)),
        AlgorithmConfig(ALGO_LOG_K, rho=2.0),
        AlgorithmConfig(ALGO_PSI, advice_width=AdviceWidth(0.5), rho=2.0),
        AlgorithmConfig(ALGO_PSI, advice_width=AdviceWidth(1.0), rho=2.0),
        AlgorithmConfig(ALGO_HARMONIC, delta=0.5),
        AlgorithmConfig(ALGO_HARMONIC, delta=1.0),
    ]


def verify_modes(
    count: int = 1000,
    seed: int = 20250801,
    max_distance: int = 64,
    max_agents: int = 16,
    cap_limit: int = 30_000,
) -> list[CheckResult]:
    """Paired phase-level vs step-level runs over random configurations."""
    rng = np.random.default_rng(seed)
    configs = _mode_check_configs()
    mismatches = 0
    floor_bad = 0
    first = ""
    for t in range(count):
        cfg = configs[int(rng.integers(0, len(configs)))]
        k = int(rng.integers(cfg.min_agents(), max_agents + 1))
        distance = int(rng.integers(1, max_distance + 1))
        slack = int(rng.integers(2, 9))
        cap = min(cap_limit, max(distance + 2, slack * cfg.nominal_overhead(k) * lower_bound(distance, k)))
        world = WorldConfig(distance, k, cap)
        a = run_trial(cfg, world, (seed, t), PHASE_LEVEL)
        b = run_trial(cfg, world, (seed, t), STEP_LEVEL)
        same = (
            a.hitting_time == b.hitting_time
            and a.censored == b.censored
            and a.finder == b.finder
            and a.treasure == b.treasure
            and a.phase_counts == b.phase_counts
        )
        if not same:
            mismatches += 1
            if not first:
                first = f" (first at trial {t}: {cfg.describe()}, D={distance}, k={k})"
        if a.hitting_time is not None and a.hitting_time < distance:
            floor_bad += 1
    return [
        CheckResult(
            "modes",
            "equivalence",
            mismatches == 0,
            f"{count} paired runs identical" if mismatches == 0 else f"{mismatches} of {count} differ{first}",
        ),
        CheckResult(
            "modes",
            "hitting_floor",
            floor_bad == 0,
            "no non-censored run beat the walk floor D"
            if floor_bad == 0
            else f"{floor_bad} runs below D",
        ),
    ]


def verify_rings(trials: int = 20, seed: int = 7) -> list[CheckResult]:
    """Coverage floor of the ring matched to the agent count."""
    results = []
    for k, scale in ((4, 64), (16, 256)):
        stats = ring_coverage(
            AlgorithmConfig(ALGO_KNOWN_K),
            k,
            GrowthFunction.constant(1),
            scale,
            trials,
            seed,
        )
        ring = focus_ring(k)
        frac = stats.fraction(ring)
        results.append(
            CheckResult(
                "rings",
                f"coverage_k{k}",
                frac >= 0.1,
                f"ring {ring} mean covered fraction {frac:.3f} >= 0.1 "
                f"(horizon {stats.horizon}, {trials} trials)",
            )
        )
    return results


SUITES = {
    "spiral": verify_spiral,
    "advice": verify_advice,
    "modes": verify_modes,
    "rings": verify_rings,
}
