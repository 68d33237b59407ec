"""Central-place multi-agent treasure search on the infinite grid.

Library + CLI for simulating systems of non-communicating agents that
search the integer lattice from a shared source, measuring hitting times
and empirical competitiveness against the D + D^2/k baseline, with exact
bit accounting for the advice each search protocol consumes.
"""

from .grid import (
    SOURCE,
    Point,
    ball_size,
    lpath,
    lpath_hit_index,
    manhattan,
    nth_node_at_distance,
    sample_uniform_ball,
    spiral_cover_radius,
    spiral_cover_steps,
    spiral_hit_index,
    spiral_position,
)
from .protocols import (
    AdviceBits,
    AdviceWidth,
    ConfigError,
    DecodeError,
    EMPTY_ADVICE,
    GrowthFunction,
    GuessSet,
    HarmonicParams,
    PhaseDirective,
    build_guess_set,
    decode_psi_subset,
    harmonic_normalizer,
    oracle_assign,
    prog_harmonic,
    prog_interleaved,
    prog_known_k,
    prog_rho_approx,
    prog_uniform,
)
from .engine import (
    ALGORITHMS,
    AlgorithmConfig,
    CoverageStats,
    FixedPlacement,
    InvariantViolation,
    PHASE_LEVEL,
    RandomOnSphere,
    RingSpec,
    STEP_LEVEL,
    TrialRecord,
    WorldConfig,
    agent_hitting_time,
    focus_ring,
    lower_bound,
    phase_outcome,
    ring_coverage,
    run_trial,
)
from .harness import CellSummary, ExperimentSpec, run_experiment, summarize

__version__ = "0.1.0"
