"""Dynamic graphlets and dynamic graphlet degree vectors (DGDVs).

A dynamic graphlet instance is a sequence of distinct events ordered by
start time in which every event shares a node with the event right before
it and starts within ``delta_t`` of that event's end.  Two instances are the
same graphlet when a node relabeling maps one event sequence onto the other
position by position.  An orbit is a class of graphlet nodes under the
automorphisms of that sequence.

The catalog is generated, never tabulated.  With up to 4 nodes and 6 events
it has 981 graphlets and 3,727 orbits.

Events sharing a start time have no intrinsic order; every ordering of tied
events that forms a valid sequence is counted.  This keeps counts
independent of node labels.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .temporal import DynamicNetwork

Edge = tuple[int, int]


def _relabel(seq, perm):
    return tuple((min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in seq)


def _n_nodes(seq) -> int:
    return max(b for _, b in seq) + 1


def _extensions(seq, max_nodes):
    """Local edges that may follow ``seq``: touch the last event, add at most one node."""
    n = _n_nodes(seq)
    last = set(seq[-1])
    top = n + 1 if n < max_nodes else n
    for a, b in itertools.combinations(range(top), 2):
        if b == n and a == n:
            continue
        if a in last or b in last:
            yield (a, b)


def _canonical(seq):
    """Return (canonical sequence, perm) with perm mapping seq labels onto it."""
    n = _n_nodes(seq)
    best = None
    for perm in itertools.permutations(range(n)):
        cand = _relabel(seq, perm)
        if best is None or cand < best[0]:
            best = (cand, perm)
    return best


def _orbits(seq):
    """Orbit index (0-based, by first-member order) for each node of ``seq``."""
    n = _n_nodes(seq)
    auts = [p for p in itertools.permutations(range(n)) if _relabel(seq, p) == seq]
    orbit = [-1] * n
    k = 0
    for v in range(n):
        if orbit[v] >= 0:
            continue
        for p in auts:
            orbit[p[v]] = k
        k += 1
    return orbit


@dataclass
class DynamicCatalog:
    """Generated graphlet/orbit catalog plus the transition table used for counting.

    ``graphlets[g]`` is a canonical event sequence over local labels; orbit
    ids of graphlet ``g`` are ``orbit_offset[g] + local orbit``.  States are
    sequences labelled by first appearance (both orientations of the first
    event), each carrying the global orbit of every local node.
    """

    max_nodes: int
    max_events: int
    graphlets: list = field(default_factory=list)
    orbit_offset: list = field(default_factory=list)
    n_orbits: int = 0
    state_orbits: list = field(default_factory=list)
    transitions: list = field(default_factory=list)

    @property
    def n_graphlets(self) -> int:
        return len(self.graphlets)

    def orbit_labels(self) -> list[str]:
        """Human-readable orbit names: ``<graphlet events>@<node>``."""
        out = []
        for g, seq in enumerate(self.graphlets):
            orbit = _orbits(seq)
            seen = set()
            for v, o in enumerate(orbit):
                if o in seen:
                    continue
                seen.add(o)
                out.append("-".join(f"{a}{b}" for a, b in seq) + f"@{v}")
        return out


@lru_cache(maxsize=8)
def dynamic_catalog(max_nodes: int = 4, max_events: int = 6) -> DynamicCatalog:
    if max_nodes < 2 or max_events < 1:
        raise ValueError("need max_nodes >= 2 and max_events >= 1")
    # Enumerate oriented states level by level.
    root = ((0, 1),)
    levels = [[root]]
    for _ in range(max_events - 1):
        nxt = []
        seen = set()
        for seq in levels[-1]:
            for e in _extensions(seq, max_nodes):
                child = seq + (e,)
                if child not in seen:
                    seen.add(child)
                    nxt.append(child)
        levels.append(nxt)
    states = [s for lvl in levels for s in lvl]

    canon = {s: _canonical(s) for s in states}
    graphlets = sorted({c for c, _ in canon.values()}, key=lambda s: (len(s), _n_nodes(s), s))
    gid = {g: i for i, g in enumerate(graphlets)}
    offsets, total, local = [], 0, {}
    for g in graphlets:
        orb = _orbits(g)
        local[g] = orb
        offsets.append(total)
        total += max(orb) + 1

    cat = DynamicCatalog(max_nodes, max_events, graphlets, offsets, total)
    sid = {s: i for i, s in enumerate(states)}
    for s in states:
        g, perm = canon[s]
        base = offsets[gid[g]]
        cat.state_orbits.append(tuple(base + local[g][perm[v]] for v in range(_n_nodes(s))))
        trans = {}
        if len(s) < max_events:
            for e in _extensions(s, max_nodes):
                trans[e] = sid[s + (e,)]
        cat.transitions.append(trans)
    return cat


def _successors(net: DynamicNetwork, delta_t: float):
    """For each event, the events that may follow it in a graphlet sequence."""
    events = net.events
    incident = [[] for _ in range(net.n_nodes)]
    for k, e in enumerate(events):
        incident[e.u].append(k)
        incident[e.v].append(k)
    succ = []
    for k, e in enumerate(events):
        out = set()
        for x in (e.u, e.v):
            for j in incident[x]:
                if j == k:
                    continue
                f = events[j]
                if f.t_start >= e.t_start and abs(f.t_start - e.t_end) <= delta_t:
                    out.add(j)
        succ.append(sorted(out))
    return succ


def dynamic_gdv(
    net: DynamicNetwork,
    max_nodes: int = 4,
    max_events: int = 6,
    delta_t: float = 1.0,
) -> np.ndarray:
    """Per-node orbit touch counts, shape ``(n_nodes, catalog.n_orbits)``."""
    for e in net.events:
        if not (math.isfinite(e.t_start) and math.isfinite(e.t_end)):
            raise ValueError("non-finite timestamp in network")
    cat = dynamic_catalog(max_nodes, max_events)
    K = cat.n_orbits
    counts = [0] * (net.n_nodes * K)
    events = net.events
    succ = _successors(net, delta_t)
    trans = cat.transitions
    state_orbits = cat.state_orbits

    def visit(state, last, nodes, local, path):
        for node, orb in zip(nodes, state_orbits[state]):
            counts[node * K + orb] += 1
        tr = trans[state]
        if not tr:
            return
        n = len(nodes)
        for j in succ[last]:
            if j in path:
                continue
            e = events[j]
            a = local.get(e.u, n)
            b = local.get(e.v, n)
            key = (a, b) if a < b else (b, a)
            child = tr.get(key)
            if child is None:
                continue
            if a == n or b == n:
                new = e.u if a == n else e.v
                local[new] = n
                nodes.append(new)
                path.append(j)
                visit(child, j, nodes, local, path)
                path.pop()
                nodes.pop()
                del local[new]
            else:
                path.append(j)
                visit(child, j, nodes, local, path)
                path.pop()

    for k, e in enumerate(events):
        visit(0, k, [e.u, e.v], {e.u: 0, e.v: 1}, [k])
    return np.array(counts, dtype=np.int64).reshape(net.n_nodes, K)
