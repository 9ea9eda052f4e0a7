from __future__ import annotations

import numpy as np
import pytest

from dynalign.temporal import DynamicNetwork, StaticNetwork


def random_dynamic(rng: np.random.Generator, n: int, m: int, fractional: bool = False,
                   horizon: float = 30.0) -> DynamicNetwork:
    labels = [f"v{i}" for i in range(n)]
    events = []
    for _ in range(m):
        u, v = rng.choice(n, size=2, replace=False)
        if fractional:
            ts = float(rng.uniform(0, horizon))
            te = ts + float(rng.exponential(2.0))
        else:
            ts = int(rng.integers(0, int(horizon)))
            te = ts + int(rng.integers(0, 5))
        events.append((u, v, ts, te))
    return DynamicNetwork(labels, events)


def random_static(rng: np.random.Generator, n: int, p: float) -> StaticNetwork:
    labels = [f"v{i}" for i in range(n)]
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return StaticNetwork(labels, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
