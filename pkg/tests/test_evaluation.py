import math
from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netinfer.evaluation import (brute_force_pairs, community_report, conductance, density, edge_metrics,
                                 label_propagation, nc, nmi, nmi_with_flag, pwf, structure_metrics)
from netinfer.graphs import CommunityPartition, GenConfig, Graph, planted_partition
from netinfer.inference import InferredGraph


def ranked(edges):
    return InferredGraph([(u, v, 1.0) for u, v in edges], directed=False, k=len(edges))


def ref_nmi(a, b):
    # straight loop over nodes, natural logs, as printed
    nodes = sorted(a.assignment)
    ca, cb = sorted(set(a.assignment.values())), sorted(set(b.assignment.values()))
    n = len(nodes)
    mat = [[sum(1 for u in nodes if a.assignment[u] == i and b.assignment[u] == j) for j in cb] for i in ca]
    r = [sum(row) for row in mat]
    c = [sum(col) for col in zip(*mat)]
    num = 0.0
    for i in range(len(ca)):
        for j in range(len(cb)):
            if mat[i][j]:
                num += mat[i][j] * math.log(mat[i][j] * n / (r[i] * c[j]))
    den = sum(x * math.log(x / n) for x in r) + sum(x * math.log(x / n) for x in c)
    return -2 * num / den


def test_edge_metrics_examples():
    truth = Graph.from_edges([(0, 1), (1, 2), (2, 3), (3, 0)])
    assert edge_metrics(truth, truth).f_measure == 1.0
    rep = edge_metrics(truth, ranked([(0, 2), (1, 3)]))
    assert rep.f_measure == 0.0 and rep.hit_count == 0
    rep = edge_metrics(truth, ranked([(1, 0), (2, 1), (3, 2), (0, 2)]))
    assert (rep.precision, rep.recall, rep.f_measure) == (0.75, 0.75, 0.75)
    assert rep.true_edge_count == rep.inferred_edge_count == 4 and rep.hit_count == 3


def test_edge_metrics_directed():
    truth = Graph.from_edges([(0, 1), (1, 2)], directed=True)
    rep = edge_metrics(truth, InferredGraph([(1, 0, 1.0), (1, 2, 0.5)], directed=True))
    assert rep.hit_count == 1


def test_structure_examples():
    tri = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
    path = Graph.from_edges([(0, 1), (1, 2)])
    same = structure_metrics(tri, tri)
    assert (same.node_recovery, same.degree_rel_err, same.clustering_rel_err) == (1.0, 0.0, 0.0)
    assert structure_metrics(tri, ranked([])).node_recovery == 0.0
    # every node of the triangle sits in one triangle; the path has none
    triangles = sum(1 for a, b, c in combinations(range(3), 3)
                    if {(a, b), (b, c), (a, c)} <= tri.edges)
    assert triangles == 1
    assert structure_metrics(tri, path).clustering_rel_err == 1.0


def test_nmi_examples():
    p = CommunityPartition.from_groups([[0, 1], [2, 3, 4]])
    assert nmi(p, p) == 1.0
    one = CommunityPartition.from_groups([[0, 1, 2, 3]])
    singles = CommunityPartition.from_groups([[0], [1], [2], [3]])
    assert nmi(one, singles) == pytest.approx(ref_nmi(one, singles), abs=1e-12)
    assert nmi(one, singles) == 0.0
    relabeled = CommunityPartition({0: 7, 1: 7, 2: 3, 3: 3, 4: 3})
    assert nmi(p, relabeled) == 1.0


def test_nmi_degenerate():
    one = CommunityPartition.from_groups([[0, 1, 2]])
    assert nmi_with_flag(one, one) == (1.0, True)
    with pytest.raises(ValueError):
        nmi(one, CommunityPartition.from_groups([[0, 1]]))


partitions = st.lists(st.integers(0, 4), min_size=2, max_size=15).map(
    lambda labels: CommunityPartition(dict(enumerate(labels))))


@given(partitions, partitions)
def test_nmi_properties(a, b):
    if a.nodes != b.nodes:
        b = CommunityPartition({u: b.assignment.get(u, 0) for u in a.nodes})
    v = nmi(a, b)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(nmi(b, a), abs=1e-12)
    if len(a) > 1 or len(b) > 1:
        assert v == pytest.approx(min(max(ref_nmi(a, b), 0), 1), abs=1e-12)
    assert nmi(a, a) == 1.0


@given(partitions, partitions)
def test_pwf_properties(a, b):
    if a.nodes != b.nodes:
        b = CommunityPartition({u: b.assignment.get(u, 0) for u in a.nodes})
    v = pwf(a, b)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(pwf(b, a))
    assert pwf(a, a) == 1.0
    ha, hb = brute_force_pairs(a), brute_force_pairs(b)
    if ha and hb and ha & hb:
        p, r = len(ha & hb) / len(hb), len(ha & hb) / len(ha)
        assert v == pytest.approx(2 * p * r / (p + r))


def test_pwf_examples():
    a = CommunityPartition.from_groups([[0, 1], [2, 3]])
    b = CommunityPartition.from_groups([[0, 1, 2], [3]])
    assert pwf(a, b) == pytest.approx(0.4)
    assert pwf(a, CommunityPartition.from_groups([[0], [1], [2], [3]])) == 0.0


def test_density_and_conductance():
    clique = Graph.from_edges(combinations(range(4), 2))
    assert density(range(4), clique) == 1.0
    assert density(range(4), Graph.from_edges([], nodes=range(4))) == 0.0
    assert density(range(4), Graph.from_edges([(0, 1), (1, 2), (2, 3)])) == 0.5
    assert density([0], clique) == 0.0
    assert conductance(range(4), clique) == 0.0
    assert conductance([0], clique) == 1.0
    g = Graph.from_edges([(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 5)])
    assert conductance(range(4), g) == pytest.approx(0.2)


def test_nc():
    groups = lambda k: CommunityPartition.from_groups([[i] for i in range(k)])  # noqa: E731
    assert nc(groups(5), groups(5)) == 0
    assert nc(groups(28), groups(14)) == 0.5
    assert nc(groups(10), groups(25)) == 1.5
    with pytest.raises(ValueError):
        nc(CommunityPartition({}), groups(3))


def test_label_propagation_basic():
    cliques = Graph.from_edges(list(combinations(range(5), 2)) + list(combinations(range(5, 9), 2)))
    part = label_propagation(cliques, rng_seed=3)
    assert sorted(map(sorted, part.communities().values())) == [list(range(5)), list(range(5, 9))]
    empty = Graph.from_edges([], nodes=range(6))
    assert len(label_propagation(empty)) == 6


@given(st.integers(0, 2**31), st.integers(2, 6))
def test_label_propagation_respects_components(seed, k):
    # k disjoint paths never merge
    edges = [(10 * c + i, 10 * c + i + 1) for c in range(k) for i in range(4)]
    part = label_propagation(Graph.from_edges(edges), rng_seed=seed)
    for u, v in combinations(sorted(part.assignment), 2):
        if u // 10 != v // 10:
            assert part.assignment[u] != part.assignment[v]


def test_label_propagation_recovers_planted():
    scores = []
    for seed in range(10):
        g, truth = planted_partition(GenConfig(n=128, community_sizes=(32,) * 4, avg_degree=16,
                                               max_degree=16, degree_exponent=None, mu=0.1, rng_seed=seed))
        scores.append(nmi(truth, label_propagation(g, rng_seed=seed)))
    assert np.mean(scores) >= 0.9


def test_community_report_self_and_empty():
    g, truth = planted_partition(GenConfig(n=64, community_sizes=(32, 32), avg_degree=10,
                                           max_degree=10, degree_exponent=None, mu=0.05, rng_seed=1))
    rep = community_report(g, truth, g, detector_seed=0)
    assert rep.nmi == pytest.approx(1.0) and rep.pwf == pytest.approx(1.0)
    assert rep.density_gap == pytest.approx(0.0) and rep.conductance_gap == pytest.approx(0.0)
    assert rep.detector_seed == 0 and rep.to_dict()["nc"] == 0.0
    rep = community_report(g, truth, ranked([]))
    assert rep.inferred_communities == 64
    singles = CommunityPartition({u: u for u in g.nodes})
    assert rep.nmi == nmi(truth, singles)
    assert rep.pwf == 0.0


def test_external_partition_skips_detector():
    g = Graph.from_edges([(0, 1), (2, 3)])
    truth = CommunityPartition.from_groups([[0, 1], [2, 3]])
    rep = community_report(g, truth, g, inferred_part=truth)
    assert rep.detector_seed is None and rep.nmi == 1.0


def test_brute_force_pairs():
    p = CommunityPartition.from_groups([[0, 1, 2], [3]])
    assert brute_force_pairs(p) == {frozenset(x) for x in [(0, 1), (0, 2), (1, 2)]}
    assert sum(c * (c - 1) // 2 for c in Counter(p.assignment.values()).values()) == 3
