"""Static and dynamic network containers, parsers and conversions.

A dynamic network is a node set plus a set of undirected events
``(u, v, t_start, t_end)``.  Events on the same node pair never overlap or
touch: any such pair is merged into one event when the network is built.
"""
from __future__ import annotations

import io
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, NamedTuple, Sequence

import numpy as np


class NetworkFormatError(ValueError):
    """Raised for malformed network input (bad line, negative duration, loop)."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class AlignmentError(ValueError):
    pass


class Event(NamedTuple):
    u: int
    v: int
    t_start: float
    t_end: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


def _merge_intervals(intervals):
    """Merge overlapping or abutting intervals; input need not be sorted."""
    merged = []
    for ts, te in sorted(intervals):
        if merged and ts <= merged[-1][1]:
            if te > merged[-1][1]:
                merged[-1] = (merged[-1][0], te)
        else:
            merged.append((ts, te))
    return merged


def _intern(labels: Iterable[str]) -> tuple[list[str], dict[str, int]]:
    order: list[str] = []
    index: dict[str, int] = {}
    for lab in labels:
        if lab not in index:
            index[lab] = len(order)
            order.append(lab)
    return order, index


class DynamicNetwork:
    """Immutable node set plus event set with a per-pair event index.

    ``pair_events[(i, j)]`` (``i < j``) holds the time-sorted, disjoint
    ``(t_start, t_end)`` intervals of that pair.
    """

    __slots__ = ("labels", "index", "pair_events", "events")

    def __init__(self, labels: Sequence[str], events: Iterable[tuple[int, int, float, float]]):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise NetworkFormatError("duplicate node labels")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        n = len(self.labels)
        raw = defaultdict(list)
        for u, v, ts, te in events:
            u, v, ts, te = int(u), int(v), float(ts), float(te)
            if not (0 <= u < n and 0 <= v < n):
                raise NetworkFormatError(f"event endpoint out of range: ({u}, {v})")
            if u == v:
                raise NetworkFormatError(f"self-loop event on node {self.labels[u]!r}")
            if te < ts:
                raise NetworkFormatError(f"negative duration: t_end {te} < t_start {ts}")
            if u > v:
                u, v = v, u
            raw[(u, v)].append((ts, te))
        self.pair_events = {p: tuple(_merge_intervals(iv)) for p, iv in sorted(raw.items())}
        self.events = tuple(
            Event(u, v, ts, te) for (u, v), ivs in self.pair_events.items() for ts, te in ivs
        )

    @classmethod
    def from_labeled(cls, events: Iterable[tuple[str, str, float, float]], nodes: Iterable[str] = ()):
        events = list(events)
        labels, index = _intern([*nodes, *(x for e in events for x in e[:2])])
        return cls(labels, [(index[u], index[v], ts, te) for u, v, ts, te in events])

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_events(self) -> int:
        return len(self.events)

    def total_duration(self) -> float:
        return math.fsum(e.duration for e in self.events)

    def intervals(self, u: int, v: int) -> tuple[tuple[float, float], ...]:
        if u > v:
            u, v = v, u
        return self.pair_events.get((u, v), ())

    def labeled_events(self) -> set[tuple[str, str, float, float]]:
        out = set()
        for e in self.events:
            a, b = sorted((self.labels[e.u], self.labels[e.v]))
            out.add((a, b, e.t_start, e.t_end))
        return out

    def with_events(self, events) -> "DynamicNetwork":
        """Same node set, new index-based event list (re-validated and merged)."""
        return DynamicNetwork(self.labels, events)

    def __eq__(self, other):
        if not isinstance(other, DynamicNetwork):
            return NotImplemented
        return set(self.labels) == set(other.labels) and self.labeled_events() == other.labeled_events()

    def __hash__(self):
        return hash((frozenset(self.labels), frozenset(self.labeled_events())))

    def __repr__(self):
        return f"DynamicNetwork(nodes={self.n_nodes}, events={self.n_events})"


class StaticNetwork:
    """Simple undirected graph; ``edges`` holds index pairs with ``i < j``."""

    __slots__ = ("labels", "index", "edges")

    def __init__(self, labels: Sequence[str], edges: Iterable[tuple[int, int]]):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise NetworkFormatError("duplicate node labels")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        n = len(self.labels)
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise NetworkFormatError(f"edge endpoint out of range: ({u}, {v})")
            if u == v:
                raise NetworkFormatError(f"self-loop on node {self.labels[u]!r}")
            es.add((min(u, v), max(u, v)))
        self.edges = frozenset(es)

    @classmethod
    def from_labeled(cls, edges: Iterable[tuple[str, str]], nodes: Iterable[str] = ()):
        edges = list(edges)
        labels, index = _intern([*nodes, *(x for e in edges for x in e)])
        return cls(labels, [(index[u], index[v]) for u, v in edges])

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in self.labels]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def labeled_edges(self) -> set[frozenset[str]]:
        return {frozenset((self.labels[u], self.labels[v])) for u, v in self.edges}

    def __eq__(self, other):
        if not isinstance(other, StaticNetwork):
            return NotImplemented
        return set(self.labels) == set(other.labels) and self.labeled_edges() == other.labeled_edges()

    def __hash__(self):
        return hash((frozenset(self.labels), frozenset(self.labeled_edges())))

    def __repr__(self):
        return f"StaticNetwork(nodes={self.n_nodes}, edges={self.n_edges})"


@dataclass(frozen=True, eq=False)
class Alignment:
    """Injective map from nodes ``0..n1-1`` of the smaller network into ``0..n2-1``."""

    mapping: np.ndarray
    n2: int

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64)
        if m.ndim != 1:
            raise AlignmentError("mapping must be one-dimensional")
        if len(m) > self.n2:
            raise AlignmentError(f"|V1| = {len(m)} exceeds |V2| = {self.n2}")
        if len(m) and (m.min() < 0 or m.max() >= self.n2):
            raise AlignmentError("mapping target out of range (incomplete mapping)")
        if len(np.unique(m)) != len(m):
            raise AlignmentError("mapping is not injective")
        m.setflags(write=False)
        object.__setattr__(self, "mapping", m)

    @property
    def n1(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "Alignment":
        return cls(np.arange(n), n)

    @classmethod
    def by_labels(cls, labels1: Sequence[str], labels2: Sequence[str]) -> "Alignment":
        """Ground-truth alignment pairing equal labels."""
        index2 = {lab: i for i, lab in enumerate(labels2)}
        try:
            return cls(np.array([index2[lab] for lab in labels1], dtype=np.int64), len(labels2))
        except KeyError as exc:
            raise AlignmentError(f"label {exc.args[0]!r} has no counterpart") from None

    def __getitem__(self, u):
        return int(self.mapping[u])

    def __len__(self):
        return len(self.mapping)

    def __eq__(self, other):
        if not isinstance(other, Alignment):
            return NotImplemented
        return self.n2 == other.n2 and np.array_equal(self.mapping, other.mapping)

    def __hash__(self):
        return hash((self.n2, self.mapping.tobytes()))


def check_alignment(f: Alignment, n1: int, n2: int) -> None:
    if f.n1 != n1 or f.n2 != n2:
        raise AlignmentError(
            f"alignment shape ({f.n1} -> {f.n2}) does not match networks ({n1} -> {n2})"
        )


# ---------------------------------------------------------------- parsing


def _text_lines(source):
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _parse_time(tok, lineno):
    try:
        t = float(tok)
    except ValueError:
        raise NetworkFormatError(f"bad timestamp {tok!r}", lineno) from None
    if not math.isfinite(t):
        raise NetworkFormatError(f"non-finite timestamp {tok!r}", lineno)
    return t


def load_events(source: IO | str | bytes) -> DynamicNetwork:
    """Parse ``u v t_start t_end`` lines.

    A line holding a single label declares a node that may have no events.
    """
    nodes, events = [], []
    for lineno, fields in _text_lines(source):
        if len(fields) == 1:
            nodes.append(fields[0])
            continue
        if len(fields) != 4:
            raise NetworkFormatError(f"expected 4 fields, got {len(fields)}", lineno)
        u, v = fields[0], fields[1]
        ts, te = _parse_time(fields[2], lineno), _parse_time(fields[3], lineno)
        if u == v:
            raise NetworkFormatError(f"self-loop event on {u!r}", lineno)
        if te < ts:
            raise NetworkFormatError(f"negative duration ({ts} > {te})", lineno)
        events.append((u, v, ts, te))
    return DynamicNetwork.from_labeled(events, nodes)


def load_snapshots(source: IO | str | bytes) -> list[StaticNetwork]:
    """Parse ``u v t`` lines (edge (u, v) present in snapshot t >= 1).

    Every returned snapshot carries the union node set.
    """
    by_t = defaultdict(list)
    labels = []
    for lineno, fields in _text_lines(source):
        if len(fields) == 1:
            labels.append(fields[0])
            continue
        if len(fields) != 3:
            raise NetworkFormatError(f"expected 3 fields, got {len(fields)}", lineno)
        u, v, t = fields
        try:
            t = int(t)
        except ValueError:
            raise NetworkFormatError(f"snapshot index {t!r} is not an integer", lineno) from None
        if t < 1:
            raise NetworkFormatError(f"snapshot index must be >= 1, got {t}", lineno)
        if u == v:
            raise NetworkFormatError(f"self-loop on {u!r}", lineno)
        by_t[t].append((u, v))
        labels += [u, v]
    if not by_t:
        raise NetworkFormatError("no snapshot edges found")
    nodes, _ = _intern(labels)
    return [StaticNetwork.from_labeled(by_t.get(t, []), nodes) for t in range(1, max(by_t) + 1)]


def load_edges(source: IO | str | bytes) -> StaticNetwork:
    """Parse a static ``u v`` edge list (single-label lines declare nodes)."""
    nodes, edges = [], []
    for lineno, fields in _text_lines(source):
        if len(fields) == 1:
            nodes.append(fields[0])
            continue
        if len(fields) != 2:
            raise NetworkFormatError(f"expected 2 fields, got {len(fields)}", lineno)
        if fields[0] == fields[1]:
            raise NetworkFormatError(f"self-loop on {fields[0]!r}", lineno)
        edges.append((fields[0], fields[1]))
    return StaticNetwork.from_labeled(edges, nodes)


def format_time(t: float) -> str:
    if float(t).is_integer() and abs(t) < 2**53:
        return str(int(t))
    return repr(float(t))


def dumps_events(net: DynamicNetwork) -> str:
    """Canonical text form: isolated nodes first, then events sorted by labels and time."""
    busy = {x for p in net.pair_events for x in p}
    lines = [lab for i, lab in sorted(enumerate(net.labels), key=lambda x: x[1]) if i not in busy]
    rows = sorted(net.labeled_events())
    lines += [f"{u} {v} {format_time(ts)} {format_time(te)}" for u, v, ts, te in rows]
    return "".join(line + "\n" for line in lines)


def dumps_edges(g: StaticNetwork) -> str:
    busy = {x for e in g.edges for x in e}
    lines = sorted(lab for i, lab in enumerate(g.labels) if i not in busy)
    lines += [" ".join(sorted(e)) for e in sorted(tuple(sorted(e)) for e in g.labeled_edges())]
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------- conversions


def from_snapshots(snapshots: Sequence[StaticNetwork]) -> DynamicNetwork:
    """Edge (u, v) of snapshot t (1-based) becomes event (u, v, t, t + 1)."""
    if not snapshots:
        raise ValueError("empty snapshot list")
    labels, index = _intern(lab for g in snapshots for lab in g.labels)
    events = []
    for t, g in enumerate(snapshots, start=1):
        for u, v in g.edges:
            events.append((index[g.labels[u]], index[g.labels[v]], t, t + 1))
    return DynamicNetwork(labels, events)


def flatten(net: DynamicNetwork) -> StaticNetwork:
    return StaticNetwork(net.labels, net.pair_events.keys())


def extend_durations(net: DynamicNetwork, delta_t: float) -> DynamicNetwork:
    if delta_t < 0:
        raise ValueError(f"delta_t must be non-negative, got {delta_t}")
    if delta_t == 0:
        return net
    return net.with_events((e.u, e.v, e.t_start, e.t_end + delta_t) for e in net.events)


def relabel(net: DynamicNetwork, mapping: Mapping[str, str]) -> DynamicNetwork:
    labels = [mapping.get(lab, lab) for lab in net.labels]
    return DynamicNetwork(labels, net.events)
