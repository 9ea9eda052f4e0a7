"""Edge conservation: static S3 and dynamic DS3.

Sums over node pairs run over unordered distinct pairs of the smaller
network.  A score whose denominator is zero (nothing to conserve on either
side) is reported as 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .temporal import Alignment, DynamicNetwork, StaticNetwork, check_alignment

Intervals = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class StaticEdgeScore:
    n_conserved: int
    n_nonconserved: int

    @property
    def s3(self) -> float:
        denom = self.n_conserved + self.n_nonconserved
        return self.n_conserved / denom if denom else 0.0


@dataclass(frozen=True)
class DynamicEdgeScore:
    t_conserved: float
    t_nonconserved: float

    @property
    def ds3(self) -> float:
        denom = self.t_conserved + self.t_nonconserved
        return self.t_conserved / denom if denom > 0 else 0.0


def conserved_time(e: tuple[float, float], e2: tuple[float, float]) -> float:
    """Overlap length of two ``(t_start, t_end)`` intervals."""
    return max(0.0, min(e[1], e2[1]) - max(e[0], e2[0]))


def intervals_cet(a: Intervals, b: Intervals) -> float:
    """Total pairwise overlap of two sorted, disjoint interval lists (two-pointer merge)."""
    i = j = 0
    terms = []
    while i < len(a) and j < len(b):
        s1, e1 = a[i]
        s2, e2 = b[j]
        lo = s1 if s1 > s2 else s2
        hi = e1 if e1 < e2 else e2
        if hi > lo:
            terms.append(hi - lo)
        if e1 < e2:
            i += 1
        else:
            j += 1
    return math.fsum(terms)


def _duration(ivs: Intervals) -> float:
    return math.fsum(te - ts for ts, te in ivs)


def pair_cet(net1: DynamicNetwork, pair1, net2: DynamicNetwork, pair2) -> float:
    return intervals_cet(net1.intervals(*pair1), net2.intervals(*pair2))


def pair_ncet(net1: DynamicNetwork, pair1, net2: DynamicNetwork, pair2) -> float:
    a, b = net1.intervals(*pair1), net2.intervals(*pair2)
    return max(0.0, _duration(a) + _duration(b) - 2.0 * intervals_cet(a, b))


def ds3(net1: DynamicNetwork, net2: DynamicNetwork, f: Alignment) -> DynamicEdgeScore:
    """Alignment CET/NCET in O(|T1| + |T2|).

    Pairs of ``net1`` with events are merged against their images.  Events of
    ``net2`` between two image nodes whose preimage pair is eventless add
    their full duration to the non-conserved time.
    """
    check_alignment(f, net1.n_nodes, net2.n_nodes)
    m = f.mapping
    inverse = {int(t): s for s, t in enumerate(m)}
    cet_terms, ncet_terms = [], []
    for (u, v), ivs in net1.pair_events.items():
        img = net2.intervals(int(m[u]), int(m[v]))
        c = intervals_cet(ivs, img)
        cet_terms.append(c)
        ncet_terms.append(_duration(ivs) + _duration(img) - 2.0 * c)
    p1 = net1.pair_events
    for (x, y), ivs in net2.pair_events.items():
        a, b = inverse.get(x), inverse.get(y)
        if a is None or b is None:
            continue
        if (min(a, b), max(a, b)) not in p1:
            ncet_terms.append(_duration(ivs))
    return DynamicEdgeScore(math.fsum(cet_terms), max(0.0, math.fsum(ncet_terms)))


def s3(g1: StaticNetwork, g2: StaticNetwork, f: Alignment) -> StaticEdgeScore:
    """Conserved / non-conserved edge counts in O(|E1| + |E2|)."""
    check_alignment(f, g1.n_nodes, g2.n_nodes)
    m = f.mapping
    e2 = g2.edges
    nc = sum(1 for u, v in g1.edges if (min(m[u], m[v]), max(m[u], m[v])) in e2)
    image = set(m.tolist())
    induced = sum(1 for x, y in e2 if x in image and y in image)
    return StaticEdgeScore(nc, len(g1.edges) + induced - 2 * nc)


# ---------------------------------------------------------------- brute-force oracles


def ds3_bruteforce(net1: DynamicNetwork, net2: DynamicNetwork, f: Alignment) -> DynamicEdgeScore:
    """Double loop over all node pairs of net1 and all event pairs; test oracle."""
    check_alignment(f, net1.n_nodes, net2.n_nodes)
    tc = tn = 0.0
    for u in range(net1.n_nodes):
        for v in range(u + 1, net1.n_nodes):
            a = net1.intervals(u, v)
            b = net2.intervals(f[u], f[v])
            c = sum(conserved_time(x, y) for x in a for y in b)
            d = sum(te - ts for ts, te in a) + sum(te - ts for ts, te in b)
            tc += c
            tn += d - 2 * c
    return DynamicEdgeScore(tc, tn)


def s3_bruteforce(g1: StaticNetwork, g2: StaticNetwork, f: Alignment) -> StaticEdgeScore:
    check_alignment(f, g1.n_nodes, g2.n_nodes)
    nc = nn = 0
    for u in range(g1.n_nodes):
        for v in range(u + 1, g1.n_nodes):
            in1 = (u, v) in g1.edges
            in2 = (min(f[u], f[v]), max(f[u], f[v])) in g2.edges
            nc += in1 and in2
            nn += in1 != in2
    return StaticEdgeScore(nc, nn)


def ideal_quality(net, noisy, ground_truth: Alignment | None = None, alpha: float = 1.0, node_sim=None) -> float:
    """Objective value of the ground-truth (label-identity) alignment of ``net`` to ``noisy``.

    ``node_sim`` is a similarity matrix over (net, noisy) nodes; it may be
    omitted when ``alpha == 1``.
    """
    from .signatures import node_conservation

    if sorted(net.labels) != sorted(noisy.labels):
        raise ValueError("node labels of the two networks do not correspond one-to-one")
    if ground_truth is None:
        ground_truth = Alignment.by_labels(net.labels, noisy.labels)
    edge = ds3(net, noisy, ground_truth).ds3 if alpha > 0 else 0.0
    if alpha < 1:
        if node_sim is None:
            raise ValueError("node similarities required when alpha < 1")
        node = node_conservation(node_sim, ground_truth)
    else:
        node = 0.0
    return alpha * edge + (1 - alpha) * node
