"""Desk-scale benchmark runs and the end-to-end experiment pipeline."""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .cascades import CascadeSet, write_cascades
from .config import AUTO_K, ExperimentConfig, config_hash, to_kv
from .evaluation import community_report, edge_metrics, structure_metrics
from .graphs import CommunityPartition, GenConfig, Graph, planted_partition, write_graph, write_partition
from .inference import (ParticipationIndex, _dense_vectors, _index_from, baseline_time_adjacency,
                        infer, similarity_matrix, write_inferred)
from .simulate import SimConfig, simulate_batch

log = logging.getLogger(__name__)

ALGOS = {"dani": infer, "baseline": baseline_time_adjacency}
SWEEP_COLUMNS = ("algo", "cascades", "repeat", "f_measure", "nmi", "pwf",
                 "density_gap", "conductance_gap", "nc", "runtime_ms")

# 128 nodes in four communities of unequal size, power-law degrees averaging 16
BENCH_SIZES = (20, 28, 36, 44)
BENCH_PROB = 0.06


def benchmark_graph(mu: float, seed: int) -> tuple[Graph, CommunityPartition]:
    cfg = GenConfig(n=128, community_sizes=BENCH_SIZES, avg_degree=16, max_degree=48,
                    degree_exponent=2.0, mu=mu, rng_seed=seed)
    return planted_partition(cfg)


def benchmark_sim(seed: int, count: int = 2000) -> SimConfig:
    return SimConfig(cascade_count=count, infection_prob=BENCH_PROB, rng_seed=seed)


def desk_graph(seed: int = 0, mu: float = 0.1) -> tuple[Graph, CommunityPartition]:
    """1000 nodes, 7692 links, LFR-style size/degree heterogeneity."""
    return planted_partition(GenConfig(n=1000, mu=mu, avg_degree=15.384, max_degree=50,
                                       edge_count=7692, rng_seed=seed))


def run_trend(seeds, counts=(250, 500, 1000, 2000), mu: float = 0.1) -> dict[str, np.ndarray]:
    """F-measure per algorithm, shape (len(seeds), len(counts)), K = |E|."""
    out = {a: np.zeros((len(seeds), len(counts))) for a in ALGOS}
    for i, seed in enumerate(seeds):
        g, _ = benchmark_graph(mu, seed)
        sets = simulate_batch(g, benchmark_sim(seed, max(counts)), list(counts))
        for j, cs in enumerate(sets):
            for name, algo in ALGOS.items():
                out[name][i, j] = edge_metrics(g, algo(cs, g.m, "undirected")).f_measure
    return out


def run_community(seeds, mus=(0.1, 0.3, 0.5), count: int = 2000, detector_seed: int = 0) -> dict[str, np.ndarray]:
    """NMI of detected communities on inferred graphs, shape (len(seeds), len(mus))."""
    out = {a: np.zeros((len(seeds), len(mus))) for a in ALGOS}
    for i, seed in enumerate(seeds):
        for j, mu in enumerate(mus):
            g, part = benchmark_graph(mu, seed)
            cs = simulate_batch(g, benchmark_sim(seed, count), [count])[0]
            for name, algo in ALGOS.items():
                rep = community_report(g, part, algo(cs, g.m, "undirected"), detector_seed=detector_seed)
                out[name][i, j] = rep.nmi
    return out


def similarity_blocks(part: CommunityPartition, cs: CascadeSet) -> tuple[float, float]:
    """Mean similarity over intra- and inter-community ordered node pairs."""
    arrays, nodes, _ = _dense_vectors(cs)
    idx: ParticipationIndex = _index_from(arrays, len(nodes), {}, {})
    psi = similarity_matrix(idx)
    comm = np.array([part.assignment[u] for u in nodes])
    rows = np.repeat(np.arange(psi.shape[0]), np.diff(psi.indptr))
    same = comm[rows] == comm[psi.indices]
    sizes = np.bincount(comm)
    intra_pairs = int((sizes * (sizes - 1)).sum())
    inter_pairs = len(nodes) * (len(nodes) - 1) - intra_pairs
    return (float(psi.data[same].sum()) / intra_pairs,
            float(psi.data[~same].sum()) / inter_pairs)


# ---------------------------------------------------------------- pipeline


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class _Stage:
    name: str

    def __enter__(self):
        return self

    def __exit__(self, typ, exc, tb):
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_pipeline(cfg: ExperimentConfig, out_dir=None, workers: int = 1) -> Path:
    """generate -> simulate -> infer (each algorithm) -> evaluate, per repeat and count."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(to_kv(cfg))
    chash = config_hash(replace(cfg, output_dir=""))
    counts = sorted(set(cfg.counts))
    rows = []
    for r in range(cfg.eval.repeats):
        rdir = out / f"repeat_{r}"
        rdir.mkdir(exist_ok=True)
        with _Stage("generate"):
            gcfg = replace(cfg.gen, rng_seed=cfg.gen.rng_seed + r)
            g, part = planted_partition(gcfg)
            write_graph(g, rdir / "graph.tsv")
            write_partition(part, rdir / "partition.tsv")
        with _Stage("simulate"):
            scfg = replace(cfg.sim, rng_seed=cfg.sim.rng_seed + r, cascade_count=max(counts))
            sets = simulate_batch(g, scfg, counts, workers)
            for cs in sets:
                write_cascades(cs, rdir / f"cascades_{len(cs)}.txt")
        k = g.m if cfg.infer.k in (AUTO_K, "auto") else int(cfg.infer.k)
        for cs in sets:
            for name, algo in ALGOS.items():
                with _Stage(f"infer:{name}"):
                    t0 = time.perf_counter()
                    inferred = algo(cs, k, cfg.infer.mode, workers=workers)
                    runtime_ms = (time.perf_counter() - t0) * 1e3
                    write_inferred(inferred, rdir / f"inferred_{name}_{len(cs)}.tsv")
                with _Stage(f"evaluate:{name}"):
                    em = edge_metrics(g, inferred)
                    cm = community_report(g, part, inferred, detector_seed=cfg.eval.detector_seed)
                    report = {
                        "algo": name, "cascades": len(cs), "repeat": r, "k": k,
                        "gen_seed": gcfg.rng_seed, "sim_seed": scfg.rng_seed,
                        "detector_seed": cfg.eval.detector_seed, "config_hash": chash,
                        "edges": em.to_dict(),
                        "structure": structure_metrics(g, inferred).to_dict(),
                        "community": cm.to_dict(),
                    }
                    (rdir / f"report_{name}_{len(cs)}.json").write_text(
                        json.dumps(report, indent=2, sort_keys=True) + "\n")
                rows.append((name, len(cs), r, em.f_measure, cm.nmi, cm.pwf, cm.density_gap,
                             cm.conductance_gap, cm.nc, round(runtime_ms, 3)))
                log.info("repeat=%d cascades=%d algo=%s F=%.4f nmi=%.4f",
                         r, len(cs), name, em.f_measure, cm.nmi)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        w.writerows([_fmt(x) for x in row] for row in rows)
    return out
