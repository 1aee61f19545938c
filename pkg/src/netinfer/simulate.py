"""Synthetic cascades: continuous-time independent cascade with exponential delays."""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cascades import Cascade, CascadeSet
from .graphs import Graph

IC_EXPONENTIAL = "independent_cascade_exponential"
UNIFORM_SEED = "uniform_random_node"


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    cascade_count: int = 1000
    infection_prob: float = 0.1
    delay_scale: float = 1.0
    max_cascade_size: int | None = None
    rng_seed: int = 0
    model: str = IC_EXPONENTIAL
    seed_strategy: str = UNIFORM_SEED
    max_retries: int = 100

    def __post_init__(self):
        if self.model != IC_EXPONENTIAL:
            raise ValueError(f"unsupported model {self.model!r}")
        if self.seed_strategy != UNIFORM_SEED:
            raise ValueError(f"unsupported seed strategy {self.seed_strategy!r}")
        if self.cascade_count < 1:
            raise ValueError("cascade_count must be positive")
        if not 0.0 < self.infection_prob <= 1.0:
            raise ValueError("infection_prob must lie in (0, 1]")
        if not self.delay_scale > 0:
            raise ValueError("delay_scale must be positive")
        if self.max_cascade_size is not None and self.max_cascade_size < 1:
            raise ValueError("max_cascade_size must be positive")
        if self.max_retries < 1:
            raise ValueError("max_retries must be positive")


def _spread(out: dict[int, list[int]], seed: int, cfg: SimConfig, rng) -> list[tuple[int, float]]:
    limit = cfg.max_cascade_size or math.inf
    infected: dict[int, float] = {}
    heap = [(0.0, seed)]
    while heap and len(infected) < limit:
        t, u = heapq.heappop(heap)
        if u in infected:
            continue
        infected[u] = t
        targets = [v for v in out[u] if v not in infected]
        if not targets:
            continue
        hit = rng.random(len(targets)) < cfg.infection_prob
        delays = rng.exponential(cfg.delay_scale, int(hit.sum()))
        for v, d in zip((v for v, h in zip(targets, hit) if h), delays):
            heapq.heappush(heap, (t + float(d), v))
    return list(infected.items())


def _one(out, nodes, cfg: SimConfig, index: int) -> Cascade:
    rng = np.random.default_rng([cfg.rng_seed, index])
    for _ in range(cfg.max_retries):
        seed = nodes[int(rng.integers(len(nodes)))]
        entries = _spread(out, seed, cfg, rng)
        if len(entries) >= 2:
            return Cascade(tuple(entries))
    raise SimulationError(
        f"cascade {index}: no cascade with >= 2 infections after {cfg.max_retries} tries; "
        "graph too sparse for these parameters")


def simulate(g: Graph, cfg: SimConfig, workers: int = 1, count: int | None = None) -> CascadeSet:
    if g.n == 0:
        raise ValueError("graph is empty")
    out = g.out_neighbors()
    nodes = sorted(g.nodes)
    count = cfg.cascade_count if count is None else count
    job = lambda i: _one(out, nodes, cfg, i)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            cascades = list(ex.map(job, range(count)))
    else:
        cascades = [job(i) for i in range(count)]
    return CascadeSet.from_cascades(cascades)


def simulate_batch(g: Graph, cfg: SimConfig, counts: list[int], workers: int = 1) -> list[CascadeSet]:
    """One cascade set per count; smaller sets are prefixes of larger ones."""
    if not counts:
        return []
    full = simulate(g, cfg, workers, count=max(counts))
    return [full[:c] for c in counts]
