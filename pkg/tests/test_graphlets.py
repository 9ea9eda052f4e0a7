from __future__ import annotations

import itertools

import numpy as np
import pytest

from dynalign.dynamic_graphlets import dynamic_catalog, dynamic_gdv
from dynalign.graphlets import static_catalog, static_gdv
from dynalign.temporal import DynamicNetwork, StaticNetwork

from conftest import random_dynamic, random_static

# ---------------------------------------------------------------- static

# Orbit lookup keyed by (nodes, edges, max degree, node degree); written out by hand.
_ORBIT = {
    (2, 1, 1, 1): 0,
    (3, 2, 2, 1): 1, (3, 2, 2, 2): 2,
    (3, 3, 2, 2): 3,
    (4, 3, 2, 1): 4, (4, 3, 2, 2): 5,
    (4, 3, 3, 1): 6, (4, 3, 3, 3): 7,
    (4, 4, 2, 2): 8,
    (4, 4, 3, 1): 9, (4, 4, 3, 2): 10, (4, 4, 3, 3): 11,
    (4, 5, 3, 2): 12, (4, 5, 3, 3): 13,
    (4, 6, 3, 3): 14,
}


def _connected(nodes, edges):
    nodes = list(nodes)
    seen, stack = {nodes[0]}, [nodes[0]]
    while stack:
        x = stack.pop()
        for a, b in edges:
            for p, q in ((a, b), (b, a)):
                if p == x and q not in seen:
                    seen.add(q)
                    stack.append(q)
    return len(seen) == len(nodes)


def gdv_oracle(g: StaticNetwork) -> np.ndarray:
    out = np.zeros((g.n_nodes, 15), dtype=np.int64)
    for k in (2, 3, 4):
        for sub in itertools.combinations(range(g.n_nodes), k):
            es = [(a, b) for a, b in itertools.combinations(sub, 2) if (a, b) in g.edges]
            if not es or not _connected(sub, es):
                continue
            deg = {v: sum(v in e for e in es) for v in sub}
            mx = max(deg.values())
            for v in sub:
                out[v, _ORBIT[(k, len(es), mx, deg[v])]] += 1
    return out


def test_static_catalog_has_15_orbits():
    cat = static_catalog()
    assert cat.n_orbits == 15 and cat.n_graphlets == 9


def test_triangle():
    g = StaticNetwork.from_labeled([("a", "b"), ("b", "c"), ("a", "c")])
    x = static_gdv(g)
    assert (x[:, 0] == 2).all() and (x[:, 3] == 1).all()
    assert x[:, [1, 2]].sum() == 0 and x[:, 4:].sum() == 0


def test_path_end_and_isolated():
    g = StaticNetwork.from_labeled([("a", "b"), ("b", "c"), ("c", "d")], nodes=["z"])
    x = static_gdv(g)
    end = x[g.index["a"]]
    assert end[0] == 1 and end[1] == 1 and end[4] == 1 and end.sum() == 3
    assert x[g.index["z"]].sum() == 0


def test_static_gdv_matches_enumeration_oracle(rng):
    for p in (0.15, 0.3, 0.6):
        g = random_static(rng, 11, p)
        np.testing.assert_array_equal(static_gdv(g), gdv_oracle(g))


def test_orbit_totals_divisible_and_degree(rng):
    for _ in range(5):
        g = random_static(rng, 14, 0.35)
        x = static_gdv(g)
        np.testing.assert_array_equal(x[:, 0], g.degrees())
        assert x[:, 3].sum() % 3 == 0
        assert x[:, 8].sum() % 4 == 0
        assert x[:, 14].sum() % 4 == 0


# ---------------------------------------------------------------- dynamic


def test_dynamic_catalog_size():
    cat = dynamic_catalog(4, 6)
    assert cat.n_orbits == 3727
    assert len(cat.orbit_labels()) == 3727


def test_single_event():
    net = DynamicNetwork.from_labeled([("a", "b", 1, 2)])
    x = dynamic_gdv(net)
    assert x[:, 0].tolist() == [1, 1] and x.sum() == 2


def test_two_event_path():
    net = DynamicNetwork.from_labeled([("a", "b", 1, 2), ("b", "c", 2, 3)])
    x = dynamic_gdv(net)
    a, b, c = (net.index[k] for k in "abc")
    labels = dynamic_catalog().orbit_labels()
    centre, first_end, second_end = labels.index("01-02@0"), labels.index("01-02@1"), labels.index("01-02@2")
    assert x[b, centre] == 1 and x[a, first_end] == 1 and x[c, second_end] == 1
    assert x[a, centre] == x[c, centre] == 0
    assert x[b, 0] == 2


def test_separated_events_only_single_event_graphlets():
    net = DynamicNetwork.from_labeled([("a", "b", 0, 1), ("b", "c", 5, 6), ("a", "c", 10, 10), ("c", "d", 20, 21)])
    x = dynamic_gdv(net)
    assert x[:, 1:].sum() == 0
    assert x[:, 0].tolist() == [2, 2, 3, 1]


def test_non_finite_rejected():
    net = DynamicNetwork.from_labeled([("a", "b", 0, float("inf"))])
    with pytest.raises(ValueError):
        dynamic_gdv(net)


def _canonical_and_orbits(seq):
    """Minimum relabeled sequence plus orbit id per original node (independent of the package)."""
    nodes = sorted({x for e in seq for x in e})
    best, best_maps = None, []
    for perm in itertools.permutations(range(len(nodes))):
        m = dict(zip(nodes, perm))
        cand = tuple(tuple(sorted((m[a], m[b]))) for a, b in seq)
        if best is None or cand < best:
            best, best_maps = cand, [m]
        elif cand == best:
            best_maps.append(m)
    # nodes sharing a canonical position under some optimal relabeling are in one orbit
    return best, best_maps


def dgdv_oracle(net: DynamicNetwork, delta_t=1.0, max_nodes=4, max_events=6):
    cat = dynamic_catalog(max_nodes, max_events)
    gid = {g: i for i, g in enumerate(cat.graphlets)}
    out = np.zeros((net.n_nodes, cat.n_orbits), dtype=np.int64)
    evs = net.events

    def ok(prev, nxt):
        return (nxt.t_start >= prev.t_start and abs(nxt.t_start - prev.t_end) <= delta_t
                and len({prev.u, prev.v} & {nxt.u, nxt.v}) > 0)

    for k in range(1, max_events + 1):
        for seq in itertools.permutations(range(len(evs)), k):
            es = [evs[i] for i in seq]
            if any(not ok(a, b) for a, b in zip(es, es[1:])):
                continue
            nodes = {x for e in es for x in (e.u, e.v)}
            if len(nodes) > max_nodes:
                continue
            canon, maps = _canonical_and_orbits([(e.u, e.v) for e in es])
            g = canon
            # local orbit numbering: by first canonical position of each orbit
            n = len(nodes)
            auts = [p for p in itertools.permutations(range(n))
                    if tuple(tuple(sorted((p[a], p[b]))) for a, b in g) == g]
            orbit, nxt_id = [-1] * n, 0
            for v in range(n):
                if orbit[v] < 0:
                    for p in auts:
                        orbit[p[v]] = nxt_id
                    nxt_id += 1
            base = cat.orbit_offset[gid[g]]
            m = maps[0]
            for v in nodes:
                out[v, base + orbit[m[v]]] += 1
    return out


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_dynamic_gdv_matches_sequence_enumeration(seed):
    rng = np.random.default_rng(seed)
    labels = [f"v{i}" for i in range(5)]
    events = []
    for _ in range(7):
        u, v = rng.choice(5, 2, replace=False)
        ts = int(rng.integers(0, 6))
        events.append((u, v, ts, ts + int(rng.integers(0, 2))))
    net = DynamicNetwork(labels, events)
    np.testing.assert_array_equal(dynamic_gdv(net), dgdv_oracle(net))


def test_dynamic_gdv_order_preserving_retiming():
    # every gap is either <= 0.6 or >= 4, so scaling by 1.5 keeps all delta_t adjacencies
    base = [("a", "b", 0, 0), ("b", "c", 0.3, 0.3), ("c", "d", 0.6, 0.6), ("a", "c", 5, 5), ("c", "d", 5.2, 5.2)]
    net = DynamicNetwork.from_labeled(base)
    shifted = DynamicNetwork.from_labeled([(u, v, 1.5 * s + 3, 1.5 * e + 3) for u, v, s, e in base])
    np.testing.assert_array_equal(dynamic_gdv(net), dynamic_gdv(shifted))


def test_dynamic_gdv_label_invariance(rng):
    net = random_dynamic(rng, 7, 14, horizon=8)
    perm = rng.permutation(7)
    renamed = DynamicNetwork([net.labels[i] for i in perm],
                             [(int(np.flatnonzero(perm == e.u)[0]), int(np.flatnonzero(perm == e.v)[0]),
                               e.t_start, e.t_end) for e in net.events])
    a, b = dynamic_gdv(net), dynamic_gdv(renamed)
    for lab in net.labels:
        np.testing.assert_array_equal(a[net.index[lab]], b[renamed.index[lab]])
