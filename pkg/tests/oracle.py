"""Exact-rational reference scorer, written straight from the formulas.

Shares no code with ``netinfer.inference``: plain dicts and ``Fraction``.
"""

from collections import defaultdict
from fractions import Fraction
import math


def labels(cascade):
    finite = sorted((t, node) for node, t in cascade if not math.isinf(t))
    return {node: i + 1 for i, (_, node) in enumerate(finite)}


def transition(lab):
    d = {}
    for u, lu in lab.items():
        for v, lv in lab.items():
            if lu < lv:
                d[(u, v)] = Fraction(1, lv * (lv - lu))
    rowsum = defaultdict(Fraction)
    for (u, _), w in d.items():
        rowsum[u] += w
    return {(u, v): w / rowsum[u] for (u, v), w in d.items()}


def total_transition(cascades):
    acc = defaultdict(Fraction)
    for c in cascades:
        for key, w in transition(labels(c)).items():
            acc[key] += w
    rowsum = defaultdict(Fraction)
    for (u, _), w in acc.items():
        rowsum[u] += w
    return {(u, v): w / rowsum[u] for (u, v), w in acc.items()}


def psi(u, v, cascades):
    labs = [labels(c) for c in cascades]
    in_u = {i for i, lab in enumerate(labs) if u in lab}
    in_v = {i for i, lab in enumerate(labs) if v in lab}
    union = in_u | in_v
    if not union:
        return Fraction(0)
    num = sum(1 for i in in_u & in_v if labs[i][u] < labs[i][v])
    return Fraction(num, len(union))


def scores(cascades):
    p = total_transition(cascades)
    return {(u, v): w * psi(u, v, cascades) for (u, v), w in p.items()}


def baseline(cascades):
    acc = defaultdict(Fraction)
    for c in cascades:
        lab = labels(c)
        for u, lu in lab.items():
            for v, lv in lab.items():
                if lu < lv:
                    acc[(u, v)] += Fraction(1, lv - lu)
    return dict(acc)
