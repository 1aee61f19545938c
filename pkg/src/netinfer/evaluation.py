"""Scoring inferred graphs against ground truth: edges, node structure, communities."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from itertools import combinations

import networkx as nx
import numpy as np

from .graphs import CommunityPartition, Graph
from .inference import InferredGraph

REL_ERR_FLOOR = 1.0


@dataclass
class EdgeReport:
    precision: float
    recall: float
    f_measure: float
    true_edge_count: int
    inferred_edge_count: int
    hit_count: int

    def to_dict(self):
        return asdict(self)


@dataclass
class StructureReport:
    node_recovery: float
    degree_rel_err: float
    clustering_rel_err: float

    def to_dict(self):
        return asdict(self)


@dataclass
class CommunityReport:
    nmi: float
    pwf: float
    density_gap: float
    conductance_gap: float
    nc: float
    truth_communities: int
    inferred_communities: int
    detector_seed: int | None
    nmi_degenerate: bool = False

    def to_dict(self):
        return asdict(self)


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def as_graph(inferred: InferredGraph | Graph, nodes=None, directed: bool | None = None) -> Graph:
    """Graph view of an inferred edge list, optionally over a fixed node set."""
    if isinstance(inferred, Graph):
        if nodes is None:
            return inferred
        return Graph.from_edges(inferred.edges, inferred.directed, set(nodes) | inferred.nodes)
    d = inferred.directed if directed is None else directed
    return Graph.from_edges(((u, v) for u, v, _ in inferred.edges), d, nodes)


def edge_metrics(truth: Graph, inferred: InferredGraph | Graph) -> EdgeReport:
    if truth.directed:
        t = set(truth.edges)
        e = inferred.edge_set() if isinstance(inferred, InferredGraph) else set(inferred.edges)
    else:
        t = set(truth.edges)
        pairs = inferred.edge_set() if isinstance(inferred, InferredGraph) else inferred.edges
        e = {(min(u, v), max(u, v)) for u, v in pairs}
    hits = len(t & e)
    p = hits / len(e) if e else 0.0
    r = hits / len(t) if t else 0.0
    return EdgeReport(p, r, _f1(p, r), len(t), len(e), hits)


def structure_metrics(truth: Graph, inferred: InferredGraph | Graph) -> StructureReport:
    nodes = sorted(truth.nodes)
    tg = truth.to_networkx()
    ig = as_graph(inferred, nodes).to_networkx()
    active = [u for u in nodes if tg.degree(u) > 0]
    recovered = sum(1 for u in active if ig.degree(u) > 0) if active else 0
    tc, ic = nx.clustering(tg), nx.clustering(ig)

    def rel(a, b):
        return abs(a - b) / max(a, REL_ERR_FLOOR)

    deg = [rel(tg.degree(u), ig.degree(u)) for u in nodes]
    clu = [rel(tc[u], ic[u]) for u in nodes]
    return StructureReport(
        node_recovery=recovered / len(active) if active else 0.0,
        degree_rel_err=float(np.mean(deg)) if deg else 0.0,
        clustering_rel_err=float(np.mean(clu)) if clu else 0.0,
    )


# ---------------------------------------------------------------- partitions


def _contingency(a: CommunityPartition, b: CommunityPartition) -> Counter:
    if a.nodes != b.nodes:
        raise ValueError("partitions cover different node sets")
    return Counter((a.assignment[u], b.assignment[u]) for u in a.assignment)


def nmi_with_flag(a: CommunityPartition, b: CommunityPartition) -> tuple[float, bool]:
    joint = _contingency(a, b)
    total = sum(joint.values())
    if total == 0:
        return 1.0, True
    rows = Counter(a.assignment.values())
    cols = Counter(b.assignment.values())
    num = -2.0 * math.fsum(n * math.log(n * total / (rows[i] * cols[j])) for (i, j), n in joint.items())
    den = (math.fsum(n * math.log(n / total) for n in rows.values())
           + math.fsum(n * math.log(n / total) for n in cols.values()))
    if den == 0:
        # both partitions are a single block
        return (1.0 if len(rows) == len(cols) else 0.0), True
    if len(joint) == len(rows) == len(cols):
        # blocks correspond one-to-one: same partition up to relabelling
        return 1.0, False
    return min(max(num / den, 0.0), 1.0), False


def nmi(a: CommunityPartition, b: CommunityPartition) -> float:
    return nmi_with_flag(a, b)[0]


def pwf(a: CommunityPartition, b: CommunityPartition) -> float:
    """Pairwise F-measure; ``a`` is the reference partition."""
    joint = _contingency(a, b)

    def pairs(counts):
        return sum(c * (c - 1) // 2 for c in counts)

    ha = pairs(Counter(a.assignment.values()).values())
    hb = pairs(Counter(b.assignment.values()).values())
    common = pairs(joint.values())
    if ha == 0 and hb == 0:
        return 1.0
    p = common / hb if hb else 0.0
    r = common / ha if ha else 0.0
    return _f1(p, r)


def _internal_boundary(s: set, g: Graph) -> tuple[int, int]:
    m = c = 0
    for u, v in g.undirected_edges():
        a, b = u in s, v in s
        if a and b:
            m += 1
        elif a or b:
            c += 1
    return m, c


def density(s, g: Graph) -> float:
    s = set(s)
    if len(s) < 2:
        return 0.0
    m, _ = _internal_boundary(s, g)
    return m / (len(s) * (len(s) - 1) / 2)


def conductance(s, g: Graph) -> float:
    m, c = _internal_boundary(set(s), g)
    den = 2 * m + c
    return c / den if den else 0.0


def nc(truth: CommunityPartition, inferred: CommunityPartition) -> float:
    ct, ci = len(truth), len(inferred)
    if ct == 0:
        raise ValueError("truth partition has no communities")
    return abs(ct - ci) / ct


def _community_averages(part: CommunityPartition, g: Graph) -> tuple[float, float]:
    """Mean density and mean conductance over all communities, one pass over edges."""
    a = part.assignment
    internal, boundary = Counter(), Counter()
    for u, v in g.undirected_edges():
        cu, cv = a.get(u), a.get(v)
        if cu is not None and cu == cv:
            internal[cu] += 1
        else:
            if cu is not None:
                boundary[cu] += 1
            if cv is not None:
                boundary[cv] += 1
    sizes = Counter(a.values())
    dens, cond = [], []
    for c, size in sizes.items():
        m, b = internal[c], boundary[c]
        dens.append(m / (size * (size - 1) / 2) if size >= 2 else 0.0)
        cond.append(b / (2 * m + b) if 2 * m + b else 0.0)
    return float(np.mean(dens)), float(np.mean(cond))


# ---------------------------------------------------------------- detection


def label_propagation(g: Graph, rng_seed: int = 0, max_rounds: int = 100) -> CommunityPartition:
    """Asynchronous label propagation over the undirected projection.

    Each round visits nodes in a seeded random order; a node takes the most
    frequent label among its neighbours, smallest label on ties.  Stops when a
    round changes nothing or after ``max_rounds``.
    """
    adj = {u: sorted(nb) for u, nb in g.adjacency().items()}
    nodes = sorted(adj)
    labels = {u: u for u in nodes}
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_rounds):
        changed = False
        for i in rng.permutation(len(nodes)):
            u = nodes[i]
            if not adj[u]:
                continue
            counts = Counter(labels[v] for v in adj[u])
            top = max(counts.values())
            new = min(lab for lab, c in counts.items() if c == top)
            if new != labels[u]:
                labels[u] = new
                changed = True
        if not changed:
            break
    # renumber communities by their smallest member
    first: dict[int, int] = {}
    for u in nodes:
        first.setdefault(labels[u], len(first))
    return CommunityPartition({u: first[labels[u]] for u in nodes})


def community_report(truth_graph: Graph, truth_part: CommunityPartition,
                     inferred: InferredGraph | Graph, inferred_part: CommunityPartition | None = None,
                     detector_seed: int = 0) -> CommunityReport:
    nodes = sorted(truth_graph.nodes)
    ig = as_graph(inferred, nodes, directed=truth_graph.directed)
    seed = None
    if inferred_part is None:
        inferred_part = label_propagation(ig, detector_seed)
        seed = detector_seed
    shared = truth_part.nodes & inferred_part.nodes
    if not shared:
        raise ValueError("partitions share no nodes")
    tp = CommunityPartition({u: truth_part.assignment[u] for u in shared})
    ip = CommunityPartition({u: inferred_part.assignment[u] for u in shared})
    score, degenerate = nmi_with_flag(tp, ip)
    td, tc = _community_averages(truth_part, truth_graph)
    idn, icn = _community_averages(inferred_part, ig)
    return CommunityReport(
        nmi=score,
        pwf=pwf(tp, ip),
        density_gap=abs(td - idn),
        conductance_gap=abs(tc - icn),
        nc=nc(truth_part, inferred_part),
        truth_communities=len(truth_part),
        inferred_communities=len(inferred_part),
        detector_seed=seed,
        nmi_degenerate=degenerate,
    )


def brute_force_pairs(part: CommunityPartition) -> set[frozenset[int]]:
    """All unordered same-community node pairs (used as a cross-check)."""
    out = set()
    for members in part.communities().values():
        out.update(frozenset(p) for p in combinations(sorted(members), 2))
    return out
