"""Ground-truth graphs: community-structured generator and edge/partition file I/O.

The generator is a light LFR-style planted partition: community sizes and node
degrees come from truncated power laws, each node splits its degree into an
internal part and an external part using the mixing parameter ``mu``, and the
two stub sets are wired by configuration-model matching.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import networkx as nx
import numpy as np
from scipy.optimize import brentq

log = logging.getLogger(__name__)


class GenerationError(ValueError):
    pass


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]
    directed: bool = False

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not self.directed and u > v:
                raise ValueError(f"undirected edge ({u}, {v}) not canonical")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u}, {v}) references unknown node")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], directed: bool = False,
                   nodes: Iterable[int] | None = None) -> "Graph":
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            es.add((u, v) if directed or u < v else (v, u))
        ns = set(nodes) if nodes is not None else set()
        for u, v in es:
            ns.add(u)
            ns.add(v)
        return cls(frozenset(ns), frozenset(es), directed)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def undirected_edges(self) -> set[tuple[int, int]]:
        if not self.directed:
            return set(self.edges)
        return {(min(u, v), max(u, v)) for u, v in self.edges}

    def adjacency(self) -> dict[int, set[int]]:
        """Undirected neighbour sets, including isolated nodes."""
        adj: dict[int, set[int]] = {u: set() for u in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def out_neighbors(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {u: [] for u in self.nodes}
        for u, v in sorted(self.edges):
            out[u].append(v)
            if not self.directed:
                out[v].append(u)
        for u in out:
            out[u].sort()
        return out

    def to_networkx(self, undirected: bool = True) -> nx.Graph:
        g = nx.Graph() if undirected or not self.directed else nx.DiGraph()
        g.add_nodes_from(sorted(self.nodes))
        g.add_edges_from(sorted(self.edges))
        return g


@dataclass(frozen=True)
class CommunityPartition:
    assignment: dict[int, int]
    overlapping: bool = False

    def communities(self) -> dict[int, frozenset[int]]:
        groups: dict[int, set[int]] = {}
        for node, c in self.assignment.items():
            groups.setdefault(c, set()).add(node)
        return {c: frozenset(s) for c, s in groups.items()}

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self.assignment)

    def __len__(self):
        return len(set(self.assignment.values()))

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[int]]) -> "CommunityPartition":
        assignment = {}
        for c, grp in enumerate(groups):
            for u in grp:
                if u in assignment:
                    raise ValueError(f"node {u} assigned twice")
                assignment[u] = c
        return cls(assignment)


@dataclass(frozen=True)
class GenConfig:
    n: int = 1000
    mu: float = 0.1
    avg_degree: float = 15.0
    max_degree: int = 50
    community_sizes: tuple[int, ...] | None = None
    min_community: int = 20
    max_community: int = 50
    # minus exponents; None for degrees means every node gets ~avg_degree
    degree_exponent: float | None = 2.0
    community_exponent: float = 1.0
    edge_count: int | None = None
    rng_seed: int = 0
    match_rounds: int = 50

    def __post_init__(self):
        if self.n < 2:
            raise GenerationError("n must be at least 2")
        if not 0.0 <= self.mu <= 1.0:
            raise GenerationError(f"mu must lie in [0, 1], got {self.mu}")
        if self.avg_degree <= 0 or self.max_degree < 1:
            raise GenerationError("degrees must be positive")
        if self.avg_degree > self.max_degree:
            raise GenerationError("avg_degree exceeds max_degree")
        if self.community_sizes is not None:
            if sum(self.community_sizes) != self.n:
                raise GenerationError("community sizes must sum to n")
            if min(self.community_sizes) < 1:
                raise GenerationError("community sizes must be positive")
        elif not 1 <= self.min_community <= self.max_community:
            raise GenerationError("need 1 <= min_community <= max_community")


SIZE_RETRIES = 100


def _power_law_ints(rng, lo: int, hi: int, exponent: float, size: int) -> np.ndarray:
    ks = np.arange(lo, hi + 1, dtype=float)
    p = ks ** -exponent
    return rng.choice(ks.astype(int), size=size, p=p / p.sum())


def _community_sizes(cfg: GenConfig, rng) -> list[int]:
    if cfg.community_sizes is not None:
        return list(cfg.community_sizes)
    lo, hi = cfg.min_community, min(cfg.max_community, cfg.n)
    if lo > cfg.n:
        raise GenerationError("min_community larger than n")
    sizes: list[int] = []
    while sum(sizes) < cfg.n:
        sizes.append(int(_power_law_ints(rng, lo, hi, cfg.community_exponent, 1)[0]))
    excess = sum(sizes) - cfg.n
    for i in np.argsort(sizes)[::-1]:
        cut = min(excess, sizes[i] - lo)
        sizes[i] -= cut
        excess -= cut
        if not excess:
            break
    if excess:
        # every community is at the floor; fold the last one into the rest
        last = sizes.pop()
        need = last - excess
        for i in range(len(sizes)):
            add = min(need, hi - sizes[i])
            sizes[i] += add
            need -= add
        if need or not sizes:
            raise GenerationError("cannot split n into communities within [min, max]")
    return sizes


def _truncated_mean(x0: float, hi: float, t: float) -> float:
    if abs(t - 1.0) < 1e-12:
        return (hi - x0) / math.log(hi / x0)
    if abs(t - 2.0) < 1e-12:
        return math.log(hi / x0) / (1 / x0 - 1 / hi)
    a, b = 1 - t, 2 - t
    return (a / b) * (hi ** b - x0 ** b) / (hi ** a - x0 ** a)


def _stochastic_round(rng, x: np.ndarray) -> np.ndarray:
    base = np.floor(x)
    return (base + (rng.random(len(x)) < (x - base))).astype(int)


def _degrees(cfg: GenConfig, avg: float, rng) -> np.ndarray:
    n, hi = cfg.n, float(cfg.max_degree)
    if cfg.degree_exponent is None or avg >= hi:
        return np.minimum(_stochastic_round(rng, np.full(n, avg)), cfg.max_degree)
    t = cfg.degree_exponent
    if _truncated_mean(1.0, hi, t) > avg:
        raise GenerationError("avg_degree too small for the degree exponent and max_degree")
    x0 = brentq(lambda x: _truncated_mean(x, hi, t) - avg, 1.0, avg)
    # inverse-CDF sampling of a continuous truncated power law
    u = rng.random(n)
    if abs(t - 1.0) < 1e-12:
        x = x0 * (hi / x0) ** u
    else:
        a = 1 - t
        x = (x0 ** a + u * (hi ** a - x0 ** a)) ** (1 / a)
    return np.clip(_stochastic_round(rng, x), 1, cfg.max_degree)


def _assign(k_in: np.ndarray, sizes: list[int], rng) -> np.ndarray:
    n = len(k_in)
    member = np.full(n, -1)
    free = np.array(sizes)
    # hardest nodes first; random order among equals
    order = np.lexsort((rng.random(n), -k_in))
    for u in order:
        ok = np.flatnonzero((free > 0) & (np.array(sizes) - 1 >= k_in[u]))
        if not len(ok):
            raise GenerationError(
                f"internal degree {k_in[u]} does not fit any community with free room")
        c = ok[rng.choice(len(ok), p=free[ok] / free[ok].sum())]
        member[u] = c
        free[c] -= 1
    return member


def _match(stubs: list[int], rng, edges: set, valid, rounds: int) -> int:
    """Pair stubs into new edges; returns the number of stubs dropped."""
    pending = list(stubs)
    for _ in range(rounds):
        if len(pending) < 2:
            break
        rng.shuffle(pending)
        left = []
        for i in range(0, len(pending) - 1, 2):
            a, b = pending[i], pending[i + 1]
            e = (a, b) if a < b else (b, a)
            if a != b and e not in edges and valid(a, b):
                edges.add(e)
            else:
                left += (a, b)
        if len(pending) % 2:
            left.append(pending[-1])
        pending = left
    return len(pending)


def planted_partition(cfg: GenConfig) -> tuple[Graph, CommunityPartition]:
    if cfg.edge_count is None:
        g, part = _wire(cfg, cfg.avg_degree, np.random.default_rng(cfg.rng_seed))
    else:
        # over-generate, then thin uniformly down to the exact edge count
        target = 2 * cfg.edge_count / cfg.n
        for attempt, factor in enumerate(np.arange(1.05, 1.55, 0.05)):
            rng = np.random.default_rng([cfg.rng_seed, attempt])
            g, part = _wire(cfg, min(factor * target, cfg.max_degree), rng)
            if g.m >= cfg.edge_count:
                break
        else:
            raise GenerationError(f"could not wire {cfg.edge_count} edges")
        ordered = sorted(g.edges)
        keep = rng.choice(len(ordered), size=cfg.edge_count, replace=False)
        g = Graph(g.nodes, frozenset(ordered[i] for i in keep), directed=False)
    log.info("generated n=%d m=%d communities=%d connected=%s",
             g.n, g.m, len(part), is_connected(g))
    return g, part


def _wire(cfg: GenConfig, avg: float, rng) -> tuple[Graph, CommunityPartition]:
    deg = _degrees(cfg, avg, rng)
    k_out = np.minimum(_stochastic_round(rng, cfg.mu * deg), deg)
    k_in = deg - k_out
    # redraw sampled community sizes until every internal degree fits somewhere
    tries = 1 if cfg.community_sizes is not None else SIZE_RETRIES
    for attempt in range(tries):
        sizes = _community_sizes(cfg, rng)
        if cfg.mu > 0 and len(sizes) < 2:
            raise GenerationError("mu > 0 needs at least two communities")
        try:
            member = _assign(k_in, sizes, rng)
            break
        except GenerationError:
            if attempt == tries - 1:
                raise

    edges: set[tuple[int, int]] = set()
    dropped = 0
    for c in range(len(sizes)):
        stubs = [int(u) for u in np.flatnonzero(member == c) for _ in range(k_in[u])]
        dropped += _match(stubs, rng, edges, lambda a, b: True, cfg.match_rounds)
    stubs = [u for u in range(cfg.n) for _ in range(k_out[u])]
    dropped += _match(stubs, rng, edges, lambda a, b: member[a] != member[b], cfg.match_rounds)
    if dropped:
        log.debug("dropped %d unmatched stubs", dropped)
    g = Graph(frozenset(range(cfg.n)), frozenset(edges), directed=False)
    return g, CommunityPartition({u: int(member[u]) for u in range(cfg.n)})


def is_connected(g: Graph) -> bool:
    return g.n > 0 and nx.is_connected(g.to_networkx())


def realized_mixing(g: Graph, part: CommunityPartition) -> float:
    """Mean over non-isolated nodes of the fraction of edges leaving the node's community."""
    adj = g.adjacency()
    fr = [sum(part.assignment[v] != part.assignment[u] for v in nb) / len(nb)
          for u, nb in adj.items() if nb]
    return float(np.mean(fr)) if fr else 0.0


# ---------------------------------------------------------------- file I/O


def format_graph(g: Graph) -> str:
    out = [f"# n={g.n} directed={int(g.directed)}"]
    isolated = g.nodes - {x for e in g.edges for x in e}
    if isolated:
        out.append("# isolated=" + ",".join(map(str, sorted(isolated))))
    out.extend(f"{u}\t{v}" for u, v in sorted(g.edges))
    return "\n".join(out) + "\n"


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(format_graph(g), encoding="ascii")


def load_graph(path, format: str = "edge_tsv", directed: bool | None = None) -> Graph:
    if format != "edge_tsv":
        raise ValueError(f"unknown graph format {format!r}")
    header_directed = False
    nodes: set[int] = set()
    edges = []
    for lineno, line in enumerate(Path(path).read_text(encoding="ascii").splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, _, val = tok.partition("=")
                if key == "directed":
                    header_directed = val == "1"
                elif key == "isolated" and val:
                    nodes.update(int(x) for x in val.split(","))
            continue
        tok = line.split()
        if len(tok) != 2 or not (tok[0].isdigit() and tok[1].isdigit()):
            raise GraphFormatError(f"line {lineno}: expected 'u<TAB>v', got {line!r}")
        u, v = int(tok[0]), int(tok[1])
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop on node {u}")
        edges.append((u, v))
    d = header_directed if directed is None else directed
    return Graph.from_edges(edges, directed=d, nodes=nodes)


def format_partition(p: CommunityPartition) -> str:
    return "".join(f"{u}\t{c}\n" for u, c in sorted(p.assignment.items()))


def write_partition(p: CommunityPartition, path) -> None:
    Path(path).write_text(format_partition(p), encoding="ascii")


def load_partition(path) -> CommunityPartition:
    assignment: dict[int, int] = {}
    labels: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="ascii").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) != 2 or not tok[0].isdigit():
            raise GraphFormatError(f"line {lineno}: expected 'node<TAB>community'")
        u = int(tok[0])
        if u in assignment:
            raise GraphFormatError(f"line {lineno}: node {u} assigned twice")
        assignment[u] = labels.setdefault(tok[1], len(labels))
    return CommunityPartition(assignment)
