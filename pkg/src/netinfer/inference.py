"""Edge scoring from cascade vectors and top-K edge selection.

Per cascade vector of length n, every ordered pair with ``label(u) < label(v)``
gets weight ``1 / (label(v) * (label(v) - label(u)))``; rows are normalised to
form a per-cascade transition matrix.  The per-cascade matrices are summed and
row-normalised again into ``P_C``.  Each positive entry is multiplied by a
Jaccard-style co-participation similarity to give the final edge score.

All matrices are sparse ``scipy.sparse.csr_array`` over dense node indices.
Accumulation uses correctly rounded summation, so the result does not depend on
cascade order, chunking or worker count, and duplicating every cascade yields
bit-identical scores.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .cascades import CascadeSet, CascadeVector

log = logging.getLogger(__name__)

DIRECTED = "directed"
UNDIRECTED = "undirected"
DENSE_LIMIT = 10_000
CHUNK = 2048


def diffusion_weight(lu: int, lv: int) -> float:
    if not 1 <= lu < lv:
        raise ValueError(f"need 1 <= lu < lv, got lu={lu}, lv={lv}")
    return 1.0 / (lv * (lv - lu))


@dataclass(frozen=True)
class _SparsePairs:
    matrix: sp.csr_array
    # nodes[i] is the external id of dense index i; None means identity
    nodes: tuple[int, ...] | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def _index(self, node: int) -> int | None:
        if self.nodes is None:
            return node if 0 <= node < self.n else None
        pos = _position(self.nodes, node)
        return pos

    def __getitem__(self, key: tuple[int, int]) -> float:
        u, v = (self._index(k) for k in key)
        if u is None or v is None:
            return 0.0
        return float(self.matrix[u, v])

    def items(self) -> Iterator[tuple[int, int, float]]:
        m = self.matrix
        names = self.nodes
        for u in range(self.n):
            for k in range(m.indptr[u], m.indptr[u + 1]):
                v = int(m.indices[k])
                if names is None:
                    yield u, v, float(m.data[k])
                else:
                    yield names[u], names[v], float(m.data[k])

    def to_dict(self) -> dict[tuple[int, int], float]:
        return {(u, v): w for u, v, w in self.items()}

    def row_sums(self) -> np.ndarray:
        m = self.matrix
        return np.array([math.fsum(m.data[m.indptr[i]:m.indptr[i + 1]]) for i in range(self.n)])

    def to_dense(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        if self.n > limit:
            raise MemoryError(f"refusing dense {self.n}x{self.n} allocation (limit {limit})")
        return self.matrix.toarray()


def _position(nodes: Sequence[int], node: int) -> int | None:
    i = int(np.searchsorted(nodes, node))
    if i < len(nodes) and nodes[i] == node:
        return i
    return None


class TransitionMatrix(_SparsePairs):
    """Row-stochastic sparse matrix; rows with no successors stay empty."""


class ScoreMatrix(_SparsePairs):
    """Combined edge scores; positive only where ``u`` preceded ``v`` somewhere."""


@dataclass
class ParticipationIndex:
    index: dict[int, frozenset[int]]
    ordered_pos: dict[tuple[int, int], int]
    n: int
    # derived caches for vectorised scoring
    sizes: np.ndarray = field(repr=False)
    precede: sp.csr_array = field(repr=False)


@dataclass
class InferredGraph:
    edges: list[tuple[int, int, float]]
    directed: bool = True
    k: int = 0
    saturated: bool = False

    @property
    def mode(self) -> str:
        return DIRECTED if self.directed else UNDIRECTED

    def edge_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u, v, _ in self.edges}

    def __len__(self):
        return len(self.edges)


# ---------------------------------------------------------------- per-cascade


@lru_cache(maxsize=512)
def _template(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions (i, j) with i < j and normalised transition weights for a length-n vector."""
    i, j = np.triu_indices(n, k=1)
    li, lj = i + 1.0, j + 1.0
    d = 1.0 / (lj * (lj - li))
    rows = np.empty(n)
    start = 0
    for r in range(n):
        cnt = n - 1 - r
        rows[r] = math.fsum(d[start:start + cnt].tolist()) if cnt else 1.0
        start += cnt
    vals = d / rows[i]
    for arr in (i, j, vals):
        arr.setflags(write=False)
    return i, j, vals


@lru_cache(maxsize=512)
def _gap_template(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    i, j = np.triu_indices(n, k=1)
    vals = 1.0 / (j - i)
    return i, j, vals


def _pairs(cvs: Sequence[np.ndarray], template) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols, vals = [], [], []
    for nodes in cvs:
        if len(nodes) < 2:
            continue
        i, j, w = template(len(nodes))
        rows.append(nodes[i])
        cols.append(nodes[j])
        vals.append(w)
    if not rows:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def _collect_pairs(arrays: Sequence[np.ndarray], template, workers: int = 1):
    chunks = [arrays[s:s + CHUNK] for s in range(0, len(arrays), CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda c: _pairs(c, template), chunks))
    else:
        parts = [_pairs(c, template) for c in chunks]
    if not parts:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    return tuple(np.concatenate(p) for p in zip(*parts))


def _exact_sum(rows, cols, vals, n: int) -> sp.csr_array:
    """Sum duplicate (row, col) entries with correctly rounded summation."""
    if len(rows) == 0:
        return sp.csr_array((n, n), dtype=float)
    keys = rows.astype(np.int64) * n + cols
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    vals = vals[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(keys)) + 1))
    ends = np.append(starts[1:], len(keys))
    out = vals[starts].copy()
    multi = np.flatnonzero(ends - starts > 1)
    if len(multi):
        vl = vals.tolist()
        for g in multi.tolist():
            out[g] = math.fsum(vl[starts[g]:ends[g]])
    uk = keys[starts]
    return sp.csr_array((out, (uk // n, uk % n)), shape=(n, n))


def _row_normalise(m: sp.csr_array) -> sp.csr_array:
    m = m.copy()
    sums = np.empty(m.shape[0])
    for r in range(m.shape[0]):
        a, b = m.indptr[r], m.indptr[r + 1]
        sums[r] = math.fsum(m.data[a:b].tolist()) if b > a else 1.0
    counts = np.diff(m.indptr)
    m.data = m.data / np.repeat(sums, counts)
    return m


def _node_arrays(cvs: Sequence[CascadeVector], n: int | None) -> tuple[list[np.ndarray], int]:
    arrays = []
    top = -1
    for cv in cvs:
        labels = [lab for _, lab in cv.entries]
        if labels != list(range(1, len(labels) + 1)):
            raise ValueError("cascade vector labels must be 1..n in order")
        a = np.fromiter((nd for nd, _ in cv.entries), dtype=np.int64, count=len(cv))
        if len(a):
            top = max(top, int(a.max()))
        arrays.append(a)
    if n is None:
        n = top + 1
    elif top >= n:
        raise ValueError(f"node {top} outside dimension {n}")
    return arrays, n


# ---------------------------------------------------------------- public ops


def cascade_transition_matrix(cv: CascadeVector, n: int) -> TransitionMatrix:
    arrays, n = _node_arrays([cv], n)
    rows, cols, vals = _pairs(arrays, _template)
    return TransitionMatrix(_exact_sum(rows, cols, vals, n))


def aggregate_transitions(cvs: Sequence[CascadeVector], n: int | None = None, workers: int = 1) -> TransitionMatrix:
    arrays, n = _node_arrays(cvs, n)
    return _aggregate(arrays, n, workers)


def _aggregate(arrays, n, workers=1) -> TransitionMatrix:
    rows, cols, vals = _collect_pairs(arrays, _template, workers)
    return TransitionMatrix(_row_normalise(_exact_sum(rows, cols, vals, n)))


def build_participation_index(cvs: Sequence[CascadeVector], n: int | None = None) -> ParticipationIndex:
    arrays, n = _node_arrays(cvs, n)
    members: dict[int, set[int]] = {}
    ordered_pos: dict[tuple[int, int], int] = {}
    for ci, cv in enumerate(cvs):
        for node, lab in cv.entries:
            members.setdefault(node, set()).add(ci)
            ordered_pos[(ci, node)] = lab
    index = {u: frozenset(s) for u, s in members.items()}
    return _index_from(arrays, n, index, ordered_pos)


def _index_from(arrays, n, index, ordered_pos, workers=1) -> ParticipationIndex:
    sizes = np.zeros(n, dtype=np.int64)
    for a in arrays:
        np.add.at(sizes, a, 1)
    rows, cols, _ = _collect_pairs(arrays, _gap_template, workers)
    precede = sp.csr_array((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))
    precede.sum_duplicates()
    precede.sort_indices()
    return ParticipationIndex(index, ordered_pos, n, sizes, precede)


def similarity(u: int, v: int, idx: ParticipationIndex) -> float:
    iu = idx.index.get(u, frozenset())
    iv = idx.index.get(v, frozenset())
    union = len(iu | iv)
    if union == 0:
        return 0.0
    pos = idx.ordered_pos
    num = sum(1 for c in iu & iv if pos[(c, u)] < pos[(c, v)])
    return num / union


def _lookup(m: sp.csr_array, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    n = m.shape[1]
    counts = np.diff(m.indptr)
    keys = np.repeat(np.arange(m.shape[0], dtype=np.int64), counts) * n + m.indices
    want = rows.astype(np.int64) * n + cols
    pos = np.searchsorted(keys, want)
    pos_c = np.minimum(pos, max(len(keys) - 1, 0))
    hit = (pos < len(keys)) & (keys[pos_c] == want) if len(keys) else np.zeros(len(want), bool)
    out = np.zeros(len(want), dtype=m.dtype)
    out[hit] = m.data[pos_c[hit]]
    return out


def _coords(m: sp.csr_array) -> tuple[np.ndarray, np.ndarray]:
    rows = np.repeat(np.arange(m.shape[0], dtype=np.int64), np.diff(m.indptr))
    return rows, m.indices.astype(np.int64)


def psi_values(idx: ParticipationIndex, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Vectorised similarity for the given (u, v) pairs."""
    num = _lookup(idx.precede, rows, cols)
    rev = _lookup(idx.precede, cols, rows)
    den = idx.sizes[rows] + idx.sizes[cols] - num - rev
    out = np.zeros(len(rows))
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


def similarity_matrix(idx: ParticipationIndex) -> sp.csr_array:
    """Similarity for every ordered pair with a nonzero numerator."""
    rows, cols = _coords(idx.precede)
    return sp.csr_array((psi_values(idx, rows, cols), (rows, cols)), shape=(idx.n, idx.n))


def score_edges(p: TransitionMatrix, idx: ParticipationIndex) -> ScoreMatrix:
    m = p.matrix
    rows, cols = _coords(m)
    alpha = m.data * psi_values(idx, rows, cols)
    out = sp.csr_array((alpha, m.indices.copy(), m.indptr.copy()), shape=m.shape)
    return ScoreMatrix(out, p.nodes)


def top_k(a: ScoreMatrix | TransitionMatrix, k: int, directed: bool = True) -> InferredGraph:
    if k < 0:
        raise ValueError("K must be non-negative")
    m = a.matrix
    rows, cols = _coords(m)
    vals = np.asarray(m.data, dtype=float)
    keep = vals > 0
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    if not directed and len(rows):
        lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
        keys = lo * m.shape[0] + hi
        order = np.argsort(keys, kind="stable")
        keys, vals = keys[order], vals[order]
        starts = np.concatenate(([0], np.flatnonzero(np.diff(keys)) + 1))
        vals = np.maximum.reduceat(vals, starts)
        rows, cols = keys[starts] // m.shape[0], keys[starts] % m.shape[0]
    names = np.asarray(a.nodes, dtype=np.int64) if a.nodes is not None else None
    if names is not None:
        rows, cols = names[rows], names[cols]
    order = np.lexsort((cols, rows, -vals))[:k]
    edges = [(int(rows[i]), int(cols[i]), float(vals[i])) for i in order]
    saturated = k > len(vals)
    if saturated:
        log.warning("K=%d exceeds %d positive-score pairs; returning all", k, len(vals))
    return InferredGraph(edges, directed=directed, k=k, saturated=saturated)


def _dense_vectors(cs: CascadeSet) -> tuple[list[np.ndarray], tuple[int, ...], list[CascadeVector]]:
    nodes = tuple(sorted(cs.node_universe))
    where = {u: i for i, u in enumerate(nodes)}
    cvs = cs.vectors()
    arrays = [np.fromiter((where[u] for u, _ in cv.entries), dtype=np.int64, count=len(cv)) for cv in cvs]
    return arrays, nodes, cvs


def score_cascades(cs: CascadeSet, workers: int = 1) -> ScoreMatrix:
    """Full score matrix for a cascade set, indexed by the original node ids."""
    arrays, nodes, cvs = _dense_vectors(cs)
    n = len(nodes)
    p = _aggregate(arrays, n, workers)
    idx = _index_from(arrays, n, {}, {}, workers)
    s = score_edges(p, idx)
    return ScoreMatrix(s.matrix, nodes)


def infer(cs: CascadeSet, k: int, mode: str = DIRECTED, workers: int = 1) -> InferredGraph:
    return top_k(score_cascades(cs, workers), k, directed=_directed(mode))


def baseline_scores(cs: CascadeSet, workers: int = 1) -> ScoreMatrix:
    arrays, nodes, _ = _dense_vectors(cs)
    rows, cols, vals = _collect_pairs(arrays, _gap_template, workers)
    return ScoreMatrix(_exact_sum(rows, cols, vals, len(nodes)), nodes)


def baseline_time_adjacency(cs: CascadeSet, k: int, mode: str = DIRECTED, workers: int = 1) -> InferredGraph:
    return top_k(baseline_scores(cs, workers), k, directed=_directed(mode))


def _directed(mode: str) -> bool:
    if mode not in (DIRECTED, UNDIRECTED):
        raise ValueError(f"mode must be {DIRECTED!r} or {UNDIRECTED!r}, got {mode!r}")
    return mode == DIRECTED


# ---------------------------------------------------------------- serialization


def format_inferred(g: InferredGraph, header: bool = True) -> str:
    out = [f"# K={g.k} mode={g.mode}"] if header else []
    out.extend(f"{u}\t{v}\t{s!r}" for u, v, s in g.edges)
    return "\n".join(out) + "\n"


def write_inferred(g: InferredGraph, path, header: bool = True) -> None:
    Path(path).write_text(format_inferred(g, header), encoding="ascii")


def read_inferred(path) -> InferredGraph:
    edges = []
    k, directed = None, True
    for lineno, line in enumerate(Path(path).read_text(encoding="ascii").splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, _, val = tok.partition("=")
                if key == "K":
                    k = int(val)
                elif key == "mode":
                    directed = _directed(val)
            continue
        tok = line.split("\t")
        if len(tok) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 'u<TAB>v<TAB>score'")
        score = float(tok[2]) if len(tok) == 3 else 1.0
        edges.append((int(tok[0]), int(tok[1]), score))
    return InferredGraph(edges, directed=directed, k=len(edges) if k is None else k,
                         saturated=k is not None and k > len(edges))
