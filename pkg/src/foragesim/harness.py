"""Batch experiment front-end: sweeps, statistics, and CSV emission.

A sweep runs `trials` independent systems for every (distance, agent
count) cell of a grid, with per-trial streams derived from (master seed,
cell index, trial index); outputs are deterministic functions of the
experiment spec.  Hitting-time distributions are right-skewed, so cells
report medians alongside means.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .engine import (
    ALGO_HARMONIC,
    ALGO_LOG_K,
    ALGO_PSI,
    ALGO_RHO_APPROX,
    ALGO_UNIFORM,
    AlgorithmConfig,
    FixedPlacement,
    MODES,
    PHASE_LEVEL,
    Placement,
    RandomOnSphere,
    TrialRecord,
    WorldConfig,
    lower_bound,
    run_trial,
)
from .grid import Point, manhattan
from .protocols import AdviceWidth, ConfigError, GrowthFunction

SCHEMA_VERSION = 1
CELL_COLUMNS = (
    "algorithm",
    "params",
    "D",
    "k",
    "trials",
    "mean",
    "median",
    "ci95",
    "censored",
    "competitiveness",
    "advice_bits",
    "seed",
    "mode",
    "schema_version",
)
TRIAL_COLUMNS = (
    "trial",
    "hitting_time",
    "censored",
    "finder",
    "treasure_x",
    "treasure_y",
    "phases",
    "advice_bits",
    "sampling_error",
    "seed",
    "mode",
    "schema_version",
)

_CAP_LIMIT = 1 << 62
_BOOTSTRAP_RESAMPLES = 1000
_BOOTSTRAP_SEED = 0xB007


@dataclass(frozen=True)
class ExperimentSpec:
    algorithm: AlgorithmConfig
    distances: tuple[int, ...]
    agent_counts: tuple[int, ...]
    trials: int
    cap_multiplier: int = 50
    master_seed: int = 0
    mode: str = PHASE_LEVEL
    placement: Placement = RandomOnSphere()

    def __post_init__(self) -> None:
        if not self.distances or not self.agent_counts:
            raise ConfigError("distances and agent_counts must be non-empty")
        if any(d < 1 for d in self.distances):
            raise ConfigError("distances: every entry must be >= 1")
        if any(k < self.algorithm.min_agents() for k in self.agent_counts):
            raise ConfigError(
                f"agent_counts: {self.algorithm.name} needs k >= {self.algorithm.min_agents()}"
            )
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.cap_multiplier < 1:
            raise ConfigError("cap_multiplier must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be >= 0")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if isinstance(self.placement, FixedPlacement):
            d = manhattan(self.placement.point)
            bad = [x for x in self.distances if x != d]
            if bad:
                raise ConfigError(
                    f"placement: fixed point at distance {d} conflicts with distances {bad}"
                )

    def cap_for(self, distance: int, k: int) -> int:
        cap = self.cap_multiplier * self.algorithm.nominal_overhead(k) * lower_bound(distance, k)
        if cap > _CAP_LIMIT:
            raise ConfigError(
                f"cap for D={distance}, k={k} exceeds the arithmetic guard 2^62"
            )
        return cap

    def cells(self) -> list[tuple[int, int]]:
        return [(d, k) for d in self.distances for k in self.agent_counts]


@dataclass(frozen=True)
class SummaryStats:
    n: int
    censored: int
    mean: float | None
    median: float | None
    ci95: float | None  # 95% half-width; None when not estimable


def summarize(samples: Sequence[int], censored: int = 0) -> SummaryStats:
    """Mean/median/CI over the non-censored hitting times of one cell.

    The half-width uses the normal approximation from 30 samples up and a
    percentile bootstrap below that; a single sample has no interval.
    All-censored cells report no mean.
    """
    n = len(samples)
    if n == 0:
        return SummaryStats(0, censored, None, None, None)
    mean = statistics.fmean(samples)
    median = float(statistics.median(samples))
    if n == 1:
        ci = None
    elif n >= 30:
        ci = 1.96 * statistics.stdev(samples) / math.sqrt(n)
    else:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(_BOOTSTRAP_SEED)))
        arr = np.asarray(samples, dtype=np.float64)
        idx = rng.integers(0, n, size=(_BOOTSTRAP_RESAMPLES, n))
        means = arr[idx].mean(axis=1)
        lo, hi = np.percentile(means, [2.5, 97.5])
        ci = float(hi - lo) / 2.0
    return SummaryStats(n, censored, mean, median, ci)


@dataclass(frozen=True)
class CellSummary:
    algorithm: str
    params: str
    distance: int
    k: int
    trials: int
    stats: SummaryStats
    competitiveness: float | None  # mean / (D + ceil(D^2/k))
    advice_bits: int
    seed: int
    mode: str

    def row(self) -> dict[str, str]:
        s = self.stats
        return {
            "algorithm": self.algorithm,
            "params": self.params,
            "D": str(self.distance),
            "k": str(self.k),
            "trials": str(self.trials),
            "mean": _fmt(s.mean),
            "median": _fmt(s.median),
            "ci95": _fmt(s.ci95),
            "censored": str(s.censored),
            "competitiveness": _fmt(self.competitiveness),
            "advice_bits": str(self.advice_bits),
            "seed": str(self.seed),
            "mode": self.mode,
            "schema_version": str(SCHEMA_VERSION),
        }


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.6g}"


def _param_string(cfg: AlgorithmConfig) -> str:
    if cfg.name == ALGO_UNIFORM:
        assert cfg.growth is not None
        return f"phi={cfg.growth.describe()}"
    if cfg.name in (ALGO_RHO_APPROX, ALGO_LOG_K):
        return f"rho={cfg.rho:g}"
    if cfg.name == ALGO_PSI:
        assert cfg.advice_width is not None
        return f"eps={cfg.advice_width.eps:g};rho={cfg.rho:g}"
    if cfg.name == ALGO_HARMONIC:
        return f"delta={cfg.delta:g}"
    return "-"


def run_cell(
    spec: ExperimentSpec, cell_index: int, distance: int, k: int
) -> tuple[CellSummary, list[TrialRecord]]:
    cap = spec.cap_for(distance, k)
    world = WorldConfig(distance, k, cap, spec.placement)
    records = [
        run_trial(spec.algorithm, world, (spec.master_seed, cell_index, t), spec.mode)
        for t in range(spec.trials)
    ]
    samples = [r.hitting_time for r in records if r.hitting_time is not None]
    stats = summarize(samples, censored=sum(r.censored for r in records))
    comp = None if stats.mean is None else stats.mean / lower_bound(distance, k)
    summary = CellSummary(
        algorithm=spec.algorithm.name,
        params=_param_string(spec.algorithm),
        distance=distance,
        k=k,
        trials=spec.trials,
        stats=stats,
        competitiveness=comp,
        advice_bits=spec.algorithm.advice_for(k).length,
        seed=spec.master_seed,
        mode=spec.mode,
    )
    return summary, records


def run_experiment(spec: ExperimentSpec) -> list[CellSummary]:
    """All cells of the sweep, ordered by (distance index, count index)."""
    return [
        run_cell(spec, ci, d, k)[0] for ci, (d, k) in enumerate(spec.cells())
    ]


# ---------------------------------------------------------------------------
# CSV emission (schema v1, stable column order).
# ---------------------------------------------------------------------------


def write_cells_csv(summaries: Iterable[CellSummary], fh: IO[str]) -> None:
    writer = csv.DictWriter(fh, fieldnames=CELL_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for s in summaries:
        writer.writerow(s.row())


def trial_row(record: TrialRecord, trial: int) -> dict[str, str]:
    return {
        "trial": str(trial),
        "hitting_time": "" if record.hitting_time is None else str(record.hitting_time),
        "censored": str(int(record.censored)),
        "finder": "" if record.finder is None else str(record.finder),
        "treasure_x": str(record.treasure.x),
        "treasure_y": str(record.treasure.y),
        "phases": "|".join(str(c) for c in record.phase_counts),
        "advice_bits": record.advice,
        "sampling_error": "0" if record.sampling_error == 0.0 else f"{record.sampling_error:.3g}",
        "seed": ":".join(str(s) for s in record.seed),
        "mode": record.mode,
        "schema_version": str(SCHEMA_VERSION),
    }


def write_trials_csv(records: Iterable[TrialRecord], fh: IO[str]) -> None:
    writer = csv.DictWriter(fh, fieldnames=TRIAL_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for t, r in enumerate(records):
        writer.writerow(trial_row(r, t))


def read_cells_csv(fh: IO[str]) -> list[dict[str, str]]:
    reader = csv.DictReader(fh)
    if reader.fieldnames is None or set(CELL_COLUMNS) - set(reader.fieldnames):
        raise ConfigError("input CSV does not carry the sweep cell schema")
    return list(reader)


# ---------------------------------------------------------------------------
# Spec parsing (JSON object with exactly the ExperimentSpec field names).
# ---------------------------------------------------------------------------

_ALGO_KEYS = {"name", "phi", "rho", "delta", "psi_eps"}
_PHI_KEYS = {"kind", "param"}
_SPEC_KEYS = {
    "algorithm",
    "distances",
    "agent_counts",
    "trials",
    "cap_multiplier",
    "master_seed",
    "mode",
    "placement",
}


def _reject_unknown(d: dict, allowed: set[str], path: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")


def growth_from_dict(d: dict, path: str = "phi") -> GrowthFunction:
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object with kind/param")
    _reject_unknown(d, _PHI_KEYS, path)
    try:
        return GrowthFunction(str(d["kind"]), float(d["param"]))
    except KeyError as e:
        raise ConfigError(f"{path}.{e.args[0]}: missing") from None


def algorithm_from_dict(d: dict, path: str = "algorithm") -> AlgorithmConfig:
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object")
    _reject_unknown(d, _ALGO_KEYS, path)
    if "name" not in d:
        raise ConfigError(f"{path}.name: missing")
    kwargs: dict = {"name": str(d["name"])}
    if "phi" in d:
        kwargs["growth"] = growth_from_dict(d["phi"], f"{path}.phi")
    if "rho" in d:
        kwargs["rho"] = float(d["rho"])
    if "delta" in d:
        kwargs["delta"] = float(d["delta"])
    if "psi_eps" in d:
        kwargs["advice_width"] = AdviceWidth(float(d["psi_eps"]))
    return AlgorithmConfig(**kwargs)


def spec_from_dict(d: dict) -> ExperimentSpec:
    if not isinstance(d, dict):
        raise ConfigError("spec: expected a JSON object")
    _reject_unknown(d, _SPEC_KEYS, "spec")
    for key in ("algorithm", "distances", "agent_counts", "trials"):
        if key not in d:
            raise ConfigError(f"spec.{key}: missing")
    placement: Placement = RandomOnSphere()
    raw = d.get("placement", "sphere")
    if raw != "sphere":
        if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
            raise ConfigError('spec.placement: must be "sphere" or a [x, y] pair')
        placement = FixedPlacement(Point(int(raw[0]), int(raw[1])))
    return ExperimentSpec(
        algorithm=algorithm_from_dict(d["algorithm"]),
        distances=tuple(int(x) for x in d["distances"]),
        agent_counts=tuple(int(x) for x in d["agent_counts"]),
        trials=int(d["trials"]),
        cap_multiplier=int(d.get("cap_multiplier", 50)),
        master_seed=int(d.get("master_seed", 0)),
        mode=str(d.get("mode", PHASE_LEVEL)),
        placement=placement,
    )


def load_spec(path: str) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"spec file {path}: invalid JSON ({e})") from None
    return spec_from_dict(raw)
