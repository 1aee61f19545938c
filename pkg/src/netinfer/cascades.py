"""Cascade observations: parsing, validation and the infection-label transform."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

SNAP = "snap"
TSV = "tsv"


class CascadeFormatError(ValueError):
    """Malformed cascade input. ``lineno`` is 1-based, or None when unknown."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Cascade:
    """One observed contagion: ``(node, time)`` pairs, ``math.inf`` for uninfected."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        seen = set()
        for node, t in self.entries:
            if node < 0:
                raise ValueError(f"negative node id {node}")
            if node in seen:
                raise ValueError(f"node {node} appears twice in cascade")
            if not t >= 0:  # also rejects NaN
                raise ValueError(f"invalid infection time {t} for node {node}")
            seen.add(node)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "Cascade":
        return cls(tuple((int(n), float(t)) for n, t in pairs))

    def infected(self) -> list[tuple[int, float]]:
        return [(n, t) for n, t in self.entries if math.isfinite(t)]

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class CascadeVector:
    """Cascade rewritten as ``(node, label)`` with labels 1..n in ascending order."""

    entries: tuple[tuple[int, int], ...]

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    def label(self, node: int) -> int:
        for n, lab in self.entries:
            if n == node:
                return lab
        return 0

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class CascadeSet:
    cascades: tuple[Cascade, ...]
    node_universe: frozenset[int]
    # optional id -> display name from the first section of a SNAP file
    names: dict[int, str] = field(default_factory=dict, compare=False)

    @classmethod
    def from_cascades(cls, cascades: Iterable[Cascade], names: dict[int, str] | None = None):
        cascades = tuple(cascades)
        universe = frozenset(n for c in cascades for n, t in c.entries if math.isfinite(t))
        return cls(cascades, universe, dict(names or {}))

    def vectors(self) -> list[CascadeVector]:
        return [to_cascade_vector(c) for c in self.cascades]

    def __len__(self):
        return len(self.cascades)

    def __iter__(self):
        return iter(self.cascades)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return CascadeSet.from_cascades(self.cascades[i], self.names)
        return self.cascades[i]


def to_cascade_vector(c: Cascade) -> CascadeVector:
    # ties on time fall back to ascending node id
    ordered = sorted(c.infected(), key=lambda e: (e[1], e[0]))
    return CascadeVector(tuple((node, i + 1) for i, (node, _) in enumerate(ordered)))


def cascade_stats(cs: CascadeSet) -> dict:
    lengths = [len(c.infected()) for c in cs.cascades]
    return {
        "count": len(lengths),
        "mean_length": sum(lengths) / len(lengths) if lengths else 0.0,
        "max_length": max(lengths, default=0),
        "node_count": len(cs.node_universe),
    }


def _parse_time(tok: str, lineno: int) -> float:
    tok = tok.strip()
    try:
        t = float(tok)
    except ValueError:
        raise CascadeFormatError(f"bad time {tok!r}", lineno) from None
    if math.isnan(t):
        raise CascadeFormatError("time is NaN", lineno)
    if t < 0:
        raise CascadeFormatError(f"negative time {tok}", lineno)
    return t


def _parse_node(tok: str, lineno: int) -> int:
    tok = tok.strip()
    if not tok.isdigit():
        raise CascadeFormatError(f"bad node id {tok!r}", lineno)
    return int(tok)


def _cascade_from_line(pairs: list[tuple[int, float]], lineno: int) -> Cascade:
    seen = set()
    for node, _ in pairs:
        if node in seen:
            raise CascadeFormatError(f"duplicate node {node} in cascade", lineno)
        seen.add(node)
    return Cascade(tuple(pairs))


def _is_name_section(head: Sequence[str], tail: Sequence[str]) -> bool:
    # A trailing blank line after cascades must not turn them into names.
    if any(";" in ln for ln in head):
        return False
    if any(ln.strip() for ln in tail):
        return True
    for ln in head:
        tok = ln.split(",", 1)
        try:
            float(tok[1])
        except (IndexError, ValueError):
            return True
    return False


def _parse_snap(lines: Sequence[str]) -> CascadeSet:
    # An optional `id,name` section is separated from cascades by one blank line.
    blank = next((i for i, ln in enumerate(lines) if not ln.strip()), None)
    if blank is not None and not _is_name_section(lines[:blank], lines[blank + 1:]):
        blank = None
    names: dict[int, str] = {}
    start = 0
    if blank is not None:
        for i in range(blank):
            tok = lines[i].split(",", 1)
            if len(tok) != 2:
                raise CascadeFormatError("expected '<id>,<name>'", i + 1)
            names[_parse_node(tok[0], i + 1)] = tok[1].strip()
        start = blank + 1

    cascades = []
    for i in range(start, len(lines)):
        line = lines[i].strip()
        lineno = i + 1
        if not line:
            continue
        pairs = []
        for item in line.split(";"):
            if not item.strip():
                continue
            tok = item.split(",")
            if len(tok) != 2:
                raise CascadeFormatError(f"expected 'node,time' got {item!r}", lineno)
            pairs.append((_parse_node(tok[0], lineno), _parse_time(tok[1], lineno)))
        cascades.append(_cascade_from_line(pairs, lineno))
    return CascadeSet.from_cascades(cascades, names)


def _parse_tsv(lines: Sequence[str]) -> CascadeSet:
    groups: dict[str, list[tuple[int, float]]] = {}
    first_line: dict[str, int] = {}
    seen: dict[str, set[int]] = {}
    for i, raw in enumerate(lines):
        lineno = i + 1
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        tok = line.split("\t")
        if len(tok) != 3:
            raise CascadeFormatError("expected 'cascade_id<TAB>node<TAB>time'", lineno)
        cid = tok[0].strip()
        node = _parse_node(tok[1], lineno)
        t = _parse_time(tok[2], lineno)
        if cid not in groups:
            groups[cid], first_line[cid], seen[cid] = [], lineno, set()
        if node in seen[cid]:
            raise CascadeFormatError(f"duplicate node {node} in cascade {cid}", lineno)
        seen[cid].add(node)
        groups[cid].append((node, t))
    return CascadeSet.from_cascades(Cascade(tuple(p)) for p in groups.values())


def parse_cascades(path, format: str = SNAP) -> CascadeSet:
    text = Path(path).read_text(encoding="ascii")
    return parse_cascades_text(text, format)


def parse_cascades_text(text: str, format: str = SNAP) -> CascadeSet:
    lines = text.splitlines()
    if format == SNAP:
        return _parse_snap(lines)
    if format == TSV:
        return _parse_tsv(lines)
    raise ValueError(f"unknown cascade format {format!r}")


def _fmt_time(t: float) -> str:
    return "inf" if math.isinf(t) else repr(float(t))


def format_cascades(cs: CascadeSet, format: str = SNAP) -> str:
    out = []
    if format == SNAP:
        # always emit the node section so the separator is unambiguous
        ids = {n for c in cs.cascades for n, _ in c.entries} | set(cs.names)
        if ids:
            out.extend(f"{k},{cs.names.get(k, k)}" for k in sorted(ids))
            out.append("")
        for c in cs.cascades:
            out.append(";".join(f"{n},{_fmt_time(t)}" for n, t in c.entries))
    elif format == TSV:
        for i, c in enumerate(cs.cascades):
            out.extend(f"{i}\t{n}\t{_fmt_time(t)}" for n, t in c.entries)
    else:
        raise ValueError(f"unknown cascade format {format!r}")
    return "\n".join(out) + "\n" if out else ""


def write_cascades(cs: CascadeSet, path, format: str = SNAP) -> None:
    Path(path).write_text(format_cascades(cs, format), encoding="ascii")
