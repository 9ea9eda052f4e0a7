"""Static graphlets on 2-4 nodes and graphlet degree vectors (GDVs).

The catalog of connected graphs and their automorphism orbits is generated
by brute-force canonicalization.  Graphlets are ordered by (nodes, edges,
max degree) and orbits within a graphlet by node degree, which reproduces
the conventional 0..14 orbit numbering (orbit 0 is the degree).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .temporal import StaticNetwork


def _relabel(edges, perm):
    return tuple(sorted((min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in edges))


def _connected(n, edges):
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


@dataclass(frozen=True)
class StaticCatalog:
    graphlets: tuple          # canonical edge tuples
    n_orbits: int
    # (n, adjacency bitmask over local pairs) -> orbit id per local node
    lookup: dict

    @property
    def n_graphlets(self) -> int:
        return len(self.graphlets)


def _mask(n, edges):
    pairs = list(itertools.combinations(range(n), 2))
    return sum(1 << pairs.index(e) for e in edges)


@lru_cache(maxsize=4)
def static_catalog(max_nodes: int = 4) -> StaticCatalog:
    found = {}
    for n in range(2, max_nodes + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for r in range(n - 1, len(pairs) + 1):
            for edges in itertools.combinations(pairs, r):
                if not _connected(n, edges):
                    continue
                canon = min(_relabel(edges, p) for p in itertools.permutations(range(n)))
                found.setdefault((n, canon), None)

    def degs(n, edges):
        d = [0] * n
        for a, b in edges:
            d[a] += 1
            d[b] += 1
        return d

    keys = sorted(found, key=lambda k: (k[0], len(k[1]), max(degs(*k)), k[1]))
    orbit_of = {}
    total = 0
    for n, canon in keys:
        d = degs(n, canon)
        auts = [p for p in itertools.permutations(range(n)) if _relabel(canon, p) == canon]
        classes = []
        for v in range(n):
            cls = frozenset(p[v] for p in auts)
            if cls not in classes:
                classes.append(cls)
        classes.sort(key=lambda c: (d[min(c)], min(c)))
        local = {}
        for k, cls in enumerate(classes):
            for v in cls:
                local[v] = total + k
        orbit_of[(n, canon)] = local
        total += len(classes)

    lookup = {}
    for n in range(2, max_nodes + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for r in range(n - 1, len(pairs) + 1):
            for edges in itertools.combinations(pairs, r):
                if not _connected(n, edges):
                    continue
                for p in itertools.permutations(range(n)):
                    canon = _relabel(edges, p)
                    if (n, canon) in orbit_of:
                        local = orbit_of[(n, canon)]
                        lookup[(n, _mask(n, edges))] = tuple(local[p[v]] for v in range(n))
                        break
    return StaticCatalog(tuple(k[1] for k in keys), total, lookup)


def _connected_subsets(adj, max_size):
    """ESU enumeration: every connected node subset of size 2..max_size exactly once."""
    n = len(adj)
    for v in range(n):
        yield from _extend([v], {w for w in adj[v] if w > v}, v, adj, max_size)


def _extend(sub, ext, root, adj, max_size):
    if len(sub) > 1:
        yield sub
    if len(sub) == max_size:
        return
    ext = set(ext)
    nbhd = set(sub).union(*(adj[x] for x in sub))
    while ext:
        w = ext.pop()
        new_ext = ext | {x for x in adj[w] if x > root and x not in nbhd}
        yield from _extend(sub + [w], new_ext, root, adj, max_size)


def static_gdv(g: StaticNetwork, max_nodes: int = 4) -> np.ndarray:
    """Per-node counts of the catalog's orbits, shape ``(n_nodes, 15)`` for 4 nodes."""
    cat = static_catalog(max_nodes)
    adj = g.adjacency()
    out = np.zeros((g.n_nodes, cat.n_orbits), dtype=np.int64)
    pair_index = {
        k: {p: i for i, p in enumerate(itertools.combinations(range(k), 2))}
        for k in range(2, max_nodes + 1)
    }
    for sub in _connected_subsets(adj, max_nodes):
        k = len(sub)
        idx = pair_index[k]
        mask = 0
        for (i, a), (j, b) in itertools.combinations(enumerate(sub), 2):
            if b in adj[a]:
                mask |= 1 << idx[(i, j)]
        for node, orb in zip(sub, cat.lookup[(k, mask)]):
            out[node, orb] += 1
    return out
