import logging
import math
from dataclasses import dataclass, fields
from multiprocessing import Pool

import numpy as np

from core.services.params import (
    STEALTH,
    DomainError,
    ModelParams,
    check_depth,
    check_level,
    check_strategy,
)
from simulator.services.cycles import (
    MAX_ARRIVALS,
    ArrivalStream,
    CycleEvent,
    run_cycle_stealth,
    run_cycle_stubborn,
)

logger = logging.getLogger(__name__)

REVENUE_RATIO = "revenue_ratio"
EVENT_PROBS = "event_probs"
COMBINED_REWARD = "combined_reward"
METRICS = (REVENUE_RATIO, EVENT_PROBS, COMBINED_REWARD)

BATCHES = 100


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    std_error: float
    cycles: int
    seed: int
    truncated_cycles: int = 0


@dataclass(frozen=True)
class EventEstimate:
    double_spending: SimEstimate
    move_funds: SimEstimate
    service: SimEstimate


@dataclass(frozen=True)
class ChunkTally:
    cycles: int = 0
    adversary_blocks: int = 0
    honest_blocks: int = 0
    replaced_blocks: int = 0
    double_spending: int = 0
    move_funds: int = 0
    service: int = 0
    not_applicable: int = 0
    truncated: int = 0

    def __add__(self, other):
        return ChunkTally(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})


@dataclass(frozen=True)
class ChunkTask:
    alpha: float
    gamma: float
    strategy: str
    level: float
    k: int
    cycles: int
    seed: int
    chunk_index: int
    max_arrivals: int


@dataclass(frozen=True)
class WaldTask:
    gap: int
    alpha: float
    walks: int
    seed: int
    chunk_index: int


_EVENT_FIELDS = {
    CycleEvent.DOUBLE_SPENDING: "double_spending",
    CycleEvent.MOVE_FUNDS: "move_funds",
    CycleEvent.SERVICE: "service",
    CycleEvent.NOT_APPLICABLE: "not_applicable",
}


def chunk_stream(seed, chunk_index):
    sequence = np.random.SeedSequence(seed, spawn_key=(chunk_index,))
    return ArrivalStream(np.random.default_rng(sequence))


def simulate_chunk(task):
    params = ModelParams(task.alpha, task.gamma)
    run_cycle = run_cycle_stealth if task.strategy == STEALTH else run_cycle_stubborn
    rng = chunk_stream(task.seed, task.chunk_index)
    counts = {name: 0 for name in _EVENT_FIELDS.values()}
    adversary = honest = replaced = truncated = 0
    for _ in range(task.cycles):
        outcome = run_cycle(params, task.level, task.k, rng, task.max_arrivals)
        adversary += outcome.adversary_blocks_to_offset
        honest += outcome.honest_blocks_to_offset
        replaced += outcome.replaced_confirmed_blocks
        counts[_EVENT_FIELDS[outcome.event]] += 1
        truncated += outcome.truncated
    return ChunkTally(
        cycles=task.cycles,
        adversary_blocks=adversary,
        honest_blocks=honest,
        replaced_blocks=replaced,
        truncated=truncated,
        **counts,
    )


def chunk_sizes(cycles, batches=BATCHES):
    return [cycles * (c + 1) // batches - cycles * c // batches for c in range(batches)]


def _map_chunks(function, tasks, workers):
    if workers <= 1:
        return [function(task) for task in tasks]
    with Pool(processes=workers) as pool:
        return pool.map(function, tasks)


def run_chunks(params, strategy, level, k, cycles, seed, workers=1, batches=BATCHES, max_arrivals=MAX_ARRIVALS):
    """Simulate `cycles` attack cycles split in `batches` independently seeded chunks.

    Chunk c always covers the same cycle range and draws from the stream keyed
    on (seed, c), so the returned tallies do not depend on `workers`.
    """
    if cycles < 1:
        raise DomainError(f"cycles must be >= 1 (got {cycles})")
    strategy = check_strategy(strategy)
    level = check_level(level)
    k = check_depth(k)
    tasks = [
        ChunkTask(params.alpha, params.gamma, strategy, level, k, size, seed, index, max_arrivals)
        for index, size in enumerate(chunk_sizes(cycles, batches))
        if size > 0
    ]
    tallies = _map_chunks(simulate_chunk, tasks, workers)
    truncated = sum(t.truncated for t in tallies)
    if truncated:
        logger.warning("simulation truncated %s cycles (max_arrivals=%s)", truncated, max_arrivals)
    return tallies


def total_tally(tallies):
    total = ChunkTally()
    for tally in tallies:
        total = total + tally
    return total


def _batch_means(numerators, denominators, total_numerator, total_denominator, cycles, seed, truncated):
    numerators = np.asarray(numerators, dtype=float)
    denominators = np.asarray(denominators, dtype=float)
    mean = total_numerator / total_denominator if total_denominator else 0.0
    usable = denominators > 0
    if usable.sum() >= 2:
        batch = numerators[usable] / denominators[usable]
        std_error = float(np.std(batch, ddof=1) / math.sqrt(batch.size))
    else:
        std_error = math.nan
    return SimEstimate(mean=mean, std_error=std_error, cycles=cycles, seed=seed, truncated_cycles=truncated)


def ratio_estimate(tallies, seed, reward_r=0.0):
    total = total_tally(tallies)
    numerators = [t.adversary_blocks + reward_r * t.replaced_blocks for t in tallies]
    denominators = [t.adversary_blocks + t.honest_blocks for t in tallies]
    return _batch_means(
        numerators,
        denominators,
        total.adversary_blocks + reward_r * total.replaced_blocks,
        total.adversary_blocks + total.honest_blocks,
        total.cycles,
        seed,
        total.truncated,
    )


def event_estimate(tallies, seed):
    total = total_tally(tallies)
    cycles = [t.cycles for t in tallies]

    def frequency(name):
        return _batch_means(
            [getattr(t, name) for t in tallies],
            cycles,
            getattr(total, name),
            total.cycles,
            total.cycles,
            seed,
            total.truncated,
        )

    return EventEstimate(
        double_spending=frequency("double_spending"),
        move_funds=frequency("move_funds"),
        service=frequency("service"),
    )


def estimate(
    params,
    strategy,
    level,
    k,
    metric,
    cycles,
    seed,
    reward_r=0.0,
    workers=1,
    batches=BATCHES,
    max_arrivals=MAX_ARRIVALS,
):
    if metric not in METRICS:
        raise DomainError(f"metric must be one of {', '.join(METRICS)} (got {metric!r})")
    if metric == COMBINED_REWARD:
        if level != k + 1:
            raise DomainError(f"combined_reward needs level = k + 1 (got level={level}, k={k})")
        if reward_r < 0:
            raise DomainError(f"reward must be >= 0 (got {reward_r})")
    tallies = run_chunks(params, strategy, level, k, cycles, seed, workers, batches, max_arrivals)
    if metric == EVENT_PROBS:
        return event_estimate(tallies, seed)
    return ratio_estimate(tallies, seed, reward_r if metric == COMBINED_REWARD else 0.0)


def simulate_wald_chunk(task):
    rng = chunk_stream(task.seed, task.chunk_index)
    extra = 0
    for _ in range(task.walks):
        lead = task.gap + 1
        while lead > 1:
            if rng.random() < task.alpha:
                lead += 1
                extra += 1
            else:
                lead -= 1
    return ChunkTally(cycles=task.walks, adversary_blocks=extra)


def simulate_wald_extension(gap, alpha, walks, seed, workers=1, batches=BATCHES):
    """Extra adversarial arrivals until a lead of gap + 1 shrinks to 1."""
    if gap < 1 or not 0 < alpha < 0.5:
        raise DomainError(f"need gap >= 1 and 0 < alpha < 0.5 (got gap={gap}, alpha={alpha})")
    if walks < 1:
        raise DomainError(f"walks must be >= 1 (got {walks})")
    tasks = [
        WaldTask(gap, alpha, size, seed, index)
        for index, size in enumerate(chunk_sizes(walks, batches))
        if size > 0
    ]
    tallies = _map_chunks(simulate_wald_chunk, tasks, workers)
    total = total_tally(tallies)
    return _batch_means(
        [t.adversary_blocks for t in tallies],
        [t.cycles for t in tallies],
        total.adversary_blocks,
        total.cycles,
        total.cycles,
        seed,
        0,
    )
