"""Noise models for dynamic networks.

``time_swap`` shuffles timestamps between events and keeps the flattened
topology.  ``rewire`` exchanges endpoints between events and keeps every
event's own timestamps.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .temporal import DynamicNetwork

log = logging.getLogger(__name__)

DEFAULT_LEVELS = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.40, 0.60, 0.80, 1.0)
REWIRE_ATTEMPTS = 100


@dataclass(frozen=True)
class NoiseSpec:
    scheme: Literal["time_swap", "rewire"] = "time_swap"
    level: float = 0.0
    seed: int = 0
    replicate_count: int = 5

    def __post_init__(self):
        if self.scheme not in ("time_swap", "rewire"):
            raise ValueError(f"unknown noise scheme {self.scheme!r}")
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"noise level must be in [0, 1], got {self.level}")
        if self.replicate_count < 1:
            raise ValueError("replicate_count must be >= 1")


def replicate_rng(seed: int, level: float, replicate: int) -> np.random.Generator:
    """Stream for one (level, replicate) cell of a sweep."""
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, int(round(level * 1_000_000)), replicate])


def time_swap_events(net: DynamicNetwork, p: float, rng: np.random.Generator) -> list[tuple]:
    """Event list after timestamp swapping, before any same-pair merging."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    ev = [list(e) for e in net.events]
    m = len(ev)
    if m < 2 or p == 0:
        return [tuple(e) for e in ev]
    for i in range(m):
        if rng.random() >= p:
            continue
        j = int(rng.integers(m - 1))
        if j >= i:
            j += 1
        ev[i][2:], ev[j][2:] = ev[j][2:], ev[i][2:]
    return [tuple(e) for e in ev]


def time_swap(net: DynamicNetwork, p: float, rng: np.random.Generator) -> DynamicNetwork:
    """Same-pair events that collide after swapping are merged."""
    return net.with_events(time_swap_events(net, p, rng))


def _collides(index, pair, ts, te):
    return any(s <= te and ts <= e for s, e in index[pair].values())


def rewire(net: DynamicNetwork, p: float, rng: np.random.Generator) -> DynamicNetwork:
    """Endpoint exchange between random event pairs.

    Event ``(u, v)`` and partner ``(u2, v2)`` become either ``(u, v2)`` and
    ``(u2, v)`` or ``(u, u2)`` and ``(v, v2)``, each with probability 0.5.
    A draw that creates a self-loop or an event touching another event on
    the same pair is undone and a new partner drawn, up to
    ``REWIRE_ATTEMPTS`` times.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    ev = [list(e) for e in net.events]
    m = len(ev)
    if m < 2 or p == 0:
        return net
    index = defaultdict(dict)
    for k, (u, v, ts, te) in enumerate(ev):
        index[(u, v)][k] = (ts, te)

    def key(a, b):
        return (a, b) if a < b else (b, a)

    skipped = 0
    for i in range(m):
        if rng.random() >= p:
            continue
        for _ in range(REWIRE_ATTEMPTS):
            j = int(rng.integers(m - 1))
            if j >= i:
                j += 1
            u, v, ts, te = ev[i]
            u2, v2, ts2, te2 = ev[j]
            if rng.random() < 0.5:
                a, b = (u, v2), (u2, v)
            else:
                a, b = (u, u2), (v, v2)
            if a[0] == a[1] or b[0] == b[1]:
                continue
            pa, pb = key(*a), key(*b)
            del index[key(u, v)][i]
            del index[key(u2, v2)][j]
            ok = not _collides(index, pa, ts, te)
            if ok:
                index[pa][i] = (ts, te)
                ok = not _collides(index, pb, ts2, te2)
                if not ok:
                    del index[pa][i]
            if ok:
                index[pb][j] = (ts2, te2)
                ev[i] = [pa[0], pa[1], ts, te]
                ev[j] = [pb[0], pb[1], ts2, te2]
                break
            index[key(u, v)][i] = (ts, te)
            index[key(u2, v2)][j] = (ts2, te2)
        else:
            skipped += 1
    if skipped:
        log.info("rewire: %d of %d events left unmodified after %d attempts", skipped, m, REWIRE_ATTEMPTS)
    return net.with_events(ev)


def randomize(net: DynamicNetwork, spec: NoiseSpec, replicate: int = 0) -> DynamicNetwork:
    rng = replicate_rng(spec.seed, spec.level, replicate)
    if spec.scheme == "time_swap":
        return time_swap(net, spec.level, rng)
    return rewire(net, spec.level, rng)
