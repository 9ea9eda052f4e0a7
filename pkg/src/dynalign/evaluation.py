"""Alignment quality measures and experiment protocols.

* node correctness against a known mapping,
* precision/recall and ROC summaries for network discrimination,
* noise sweeps of an original network against its randomized copies,
* small synthetic dynamic-network generators for discrimination tests.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import conservation
from .randomization import DEFAULT_LEVELS, NoiseSpec, randomize
from .search import AlignmentProblem, SearchConfig, run
from .signatures import SignatureMatrix, signatures, similarity_matrix
from .temporal import (
    Alignment,
    AlignmentError,
    DynamicNetwork,
    StaticNetwork,
    flatten,
    from_snapshots,
)


def node_correctness(f: Alignment, truth: Alignment) -> float:
    if f.n1 != truth.n1 or f.n2 != truth.n2:
        raise AlignmentError("alignments are over different node sets")
    if f.n1 == 0:
        return 0.0
    return float(np.mean(f.mapping == truth.mapping))


# ---------------------------------------------------------------- discrimination curves


@dataclass
class DiscriminationSet:
    labels: list                       # model label per network
    quality: np.ndarray                # symmetric (n, n); diagonal unused
    names: list = field(default_factory=list)

    def __post_init__(self):
        q = np.asarray(self.quality, dtype=np.float64)
        n = len(self.labels)
        if q.shape != (n, n):
            raise ValueError(f"quality matrix shape {q.shape} does not match {n} networks")
        if not np.allclose(q, q.T, equal_nan=True):
            raise ValueError("quality matrix must be symmetric")
        self.quality = q

    def pairs(self):
        """(quality, similar?) for every unordered pair."""
        n = len(self.labels)
        out = []
        for i, j in itertools.combinations(range(n), 2):
            out.append((float(self.quality[i, j]), self.labels[i] == self.labels[j]))
        return out


@dataclass
class CurveSummary:
    aupr: float
    auroc: float
    f_cross: float
    f_max: float
    points: list                       # dicts: threshold, precision, recall, fpr, f


def _fscore(p, r):
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def pr_roc(dset_or_pairs) -> CurveSummary:
    """Threshold sweep over alignment qualities.

    A pair is called similar when its quality exceeds the threshold ``r``.
    Thresholds are the midpoints between consecutive distinct observed
    qualities plus one threshold below and one at the top of the range, so
    every attainable classification is visited once.  Precision with no
    predicted positives is taken as 1.
    """
    pairs = dset_or_pairs.pairs() if isinstance(dset_or_pairs, DiscriminationSet) else list(dset_or_pairs)
    q = np.array([p[0] for p in pairs], dtype=np.float64)
    sim = np.array([bool(p[1]) for p in pairs])
    n_pos, n_neg = int(sim.sum()), int((~sim).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("need at least one similar and one dissimilar pair")
    vals = np.unique(q)
    thresholds = [-math.inf] + list((vals[:-1] + vals[1:]) / 2) + [float(vals[-1])]
    points = []
    for r in thresholds:
        pred = q > r
        tp = int((pred & sim).sum())
        fp = int((pred & ~sim).sum())
        tn = int((~pred & ~sim).sum())
        precision = tp / (tp + fp) if tp + fp else 1.0
        recall = tp / n_pos
        fpr = 1.0 - tn / n_neg
        points.append(
            {"threshold": r, "precision": precision, "recall": recall, "fpr": fpr,
             "f": _fscore(precision, recall)}
        )
    pts = sorted(points, key=lambda d: (d["recall"], -d["precision"]))
    rec = np.array([d["recall"] for d in pts])
    prec = np.array([d["precision"] for d in pts])
    aupr = float(np.trapezoid(prec, rec)) if hasattr(np, "trapezoid") else float(np.trapz(prec, rec))
    roc = sorted(points, key=lambda d: (d["fpr"], d["recall"]))
    x = np.array([d["fpr"] for d in roc])
    y = np.array([d["recall"] for d in roc])
    auroc = float(np.trapezoid(y, x)) if hasattr(np, "trapezoid") else float(np.trapz(y, x))
    cross = min(points, key=lambda d: (abs(d["precision"] - d["recall"]), -d["f"]))
    f_max = max(d["f"] for d in points)
    return CurveSummary(aupr, auroc, cross["f"], f_max, points)


# ---------------------------------------------------------------- synthetic networks

MODELS = ("preferential", "geometric", "duplication")


def _geometric_snapshots(n, k, rng, avg_degree=4.0, drift=0.03):
    radius = math.sqrt(avg_degree / (math.pi * max(n - 1, 1)))
    pos = rng.random((n, 2))
    snaps = []
    for _ in range(k):
        d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=2)
        iu, ju = np.nonzero(np.triu(d <= radius, 1))
        snaps.append(list(zip(iu.tolist(), ju.tolist())))
        pos = pos + rng.normal(0.0, drift, pos.shape)
        pos = np.abs(pos)
        pos = np.where(pos > 1, 2 - pos, pos)
    return snaps


def _preferential_snapshots(n, k, rng, avg_degree=4.0, churn=0.2):
    m = max(1, int(round(avg_degree / 2)))
    edges = set()
    deg = np.zeros(n)
    core = min(n, m + 1)
    for a, b in itertools.combinations(range(core), 2):
        edges.add((a, b))
        deg[a] += 1
        deg[b] += 1
    for v in range(core, n):
        w = deg[:v] + 1.0
        targets = rng.choice(v, size=min(m, v), replace=False, p=w / w.sum())
        for t in targets:
            edges.add((int(t), v))
            deg[t] += 1
            deg[v] += 1
    snaps = [sorted(edges)]
    for _ in range(k - 1):
        cur = sorted(edges)
        drop = [e for e in cur if rng.random() < churn]
        for a, b in drop:
            edges.discard((a, b))
            deg[a] -= 1
            deg[b] -= 1
        added = 0
        tries = 0
        while added < len(drop) and tries < 100 * (len(drop) + 1):
            tries += 1
            w = deg + 1.0
            a, b = rng.choice(n, size=2, replace=False, p=w / w.sum())
            e = (int(min(a, b)), int(max(a, b)))
            if e in edges:
                continue
            edges.add(e)
            deg[a] += 1
            deg[b] += 1
            added += 1
        snaps.append(sorted(edges))
    return snaps


def _duplication_snapshots(n, k, rng, retain=0.8, link=0.2, activity=0.3):
    # duplication-divergence backbone; each edge is active in a random subset of snapshots
    adj = [set() for _ in range(n)]
    adj[0].add(1)
    adj[1].add(0)
    for v in range(2, n):
        parent = int(rng.integers(v))
        for w in sorted(adj[parent]):
            if rng.random() < retain:
                adj[v].add(w)
                adj[w].add(v)
        if rng.random() < link or not adj[v]:
            adj[v].add(parent)
            adj[parent].add(v)
    edges = sorted({(min(a, b), max(a, b)) for a in range(n) for b in adj[a]})
    active = rng.random((len(edges), k)) < activity
    for i in np.flatnonzero(~active.any(axis=1)):
        active[i, rng.integers(k)] = True
    return [[e for e, on in zip(edges, active[:, t]) if on] for t in range(k)]


def generate_synthetic(model: str, nodes: int, snapshots: int, seed: int, **params) -> DynamicNetwork:
    """Snapshot-sequence generators converted to event form.

    ``preferential``: degree-proportional growth, then per-snapshot edge
    churn with degree-proportional replacement.  ``geometric``: nodes in the
    unit square linked within a radius, drifting slightly between snapshots.
    Both take ``avg_degree`` (default 4).  ``duplication``: each new node
    copies a random node's links (each kept with probability ``retain``) and
    links to it with probability ``link``; every edge is then active in each
    snapshot with probability ``activity``.  Duplicated nodes are often
    structurally identical once time is ignored.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    if nodes < 2 or snapshots < 1:
        raise ValueError("need nodes >= 2 and snapshots >= 1")
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, MODELS.index(model)])
    gen = {"preferential": _preferential_snapshots, "geometric": _geometric_snapshots,
           "duplication": _duplication_snapshots}[model]
    labels = [f"n{i}" for i in range(nodes)]
    snaps = [StaticNetwork(labels, es) for es in gen(nodes, snapshots, rng, **params)]
    return from_snapshots(snaps)


# ---------------------------------------------------------------- protocols


class SignatureCache:
    """Per-network signatures, computed once and reused across pairs."""

    def __init__(self):
        self._store = {}

    def get(self, net) -> SignatureMatrix:
        key = id(net)
        if key not in self._store:
            self._store[key] = (net, signatures(net))
        return self._store[key][1]


def align_pair(net1, net2, cfg: SearchConfig, cache: SignatureCache | None = None, similarity=None):
    """Run one search in ``cfg.mode``; dynamic inputs are flattened for static mode."""
    if cfg.mode == "static" and isinstance(net1, DynamicNetwork):
        net1, net2 = flatten(net1), flatten(net2)
    if similarity is None and cfg.alpha < 1:
        cache = cache or SignatureCache()
        similarity = similarity_matrix(cache.get(net1), cache.get(net2))
    problem = AlignmentProblem(net1, net2, cfg.alpha, similarity)
    return run(cfg, problem)


def discriminate(networks: Sequence[DynamicNetwork], labels: Sequence[str], cfg: SearchConfig,
                 progress: Callable | None = None) -> tuple[DiscriminationSet, list]:
    """Align every unordered pair; quality is the returned objective value."""
    n = len(networks)
    q = np.zeros((n, n))
    nets = [flatten(x) for x in networks] if cfg.mode == "static" else list(networks)
    cache = SignatureCache()
    rows = []
    for i, j in itertools.combinations(range(n), 2):
        a, b = (i, j) if nets[i].n_nodes <= nets[j].n_nodes else (j, i)
        trace = align_pair(nets[a], nets[b], cfg, cache)
        q[i, j] = q[j, i] = trace.objective.total
        rows.append({"i": i, "j": j, "similar": labels[i] == labels[j], "mode": cfg.mode,
                     "quality": trace.objective.total, "edge": trace.objective.edge_term,
                     "node": trace.objective.node_term, "generations": trace.generations})
        if progress:
            progress(rows[-1])
    return DiscriminationSet(list(labels), q), rows


def noise_sweep(original: DynamicNetwork, levels: Sequence[float] = DEFAULT_LEVELS, replicates: int = 5,
                scheme: str = "time_swap", seed: int = 0, configs: Sequence[SearchConfig] = (),
                ideal_alpha: float = 1.0, progress: Callable | None = None) -> list[dict]:
    """Align ``original`` to noisy copies of itself at each noise level.

    Every (level, replicate) records the ground-truth quality: the dynamic
    objective at ``ideal_alpha`` and S3 of the flattened pair.  Each config
    in ``configs`` adds a search run.  Without configs one row per cell is
    emitted with mode ``ideal``; otherwise one row per cell and config mode.
    """
    cache = SignatureCache()
    rows = []
    need_sim = ideal_alpha < 1 or any(c.alpha < 1 for c in configs)
    flat0 = flatten(original)
    for level in levels:
        spec = NoiseSpec(scheme, level, seed, replicates)
        for rep in range(replicates):
            noisy = randomize(original, spec, rep)
            truth = Alignment.by_labels(original.labels, noisy.labels)
            flat1 = flatten(noisy)
            dyn_sim = stat_sim = None
            if need_sim:
                dyn_sim = similarity_matrix(cache.get(original), signatures(noisy))
            ideal = conservation.ideal_quality(original, noisy, truth, ideal_alpha, dyn_sim)
            truth_s3 = conservation.s3(flat0, flat1, truth).s3
            base = {"level": level, "replicate": rep, "scheme": scheme,
                    "ideal_objective": ideal, "truth_s3": truth_s3,
                    "truth_ds3": conservation.ds3(original, noisy, truth).ds3}
            if not configs:
                rows.append({**base, "mode": "ideal"})
                if progress:
                    progress(rows[-1])
                continue
            for cfg in configs:
                if cfg.mode == "dynamic":
                    trace = align_pair(original, noisy, cfg, similarity=dyn_sim if cfg.alpha < 1 else None)
                else:
                    if stat_sim is None and cfg.alpha < 1:
                        stat_sim = similarity_matrix(cache.get(flat0), signatures(flat1))
                    trace = align_pair(flat0, flat1, cfg, similarity=stat_sim if cfg.alpha < 1 else None)
                rows.append({**base, "mode": cfg.mode, "alpha": cfg.alpha, "seed": cfg.seed,
                             "objective": trace.objective.total, "edge": trace.objective.edge_term,
                             "node": trace.objective.node_term,
                             "node_correctness": node_correctness(trace.alignment, truth),
                             "generations": trace.generations})
                if progress:
                    progress(rows[-1])
    return rows


def summarize_sweep(rows: Sequence[dict]) -> list[dict]:
    """Means over replicates per (level, mode)."""
    groups = {}
    for r in rows:
        groups.setdefault((r["level"], r["mode"]), []).append(r)
    out = []
    for (level, mode), rs in sorted(groups.items()):
        agg = {"level": level, "mode": mode, "replicates": len(rs)}
        for k in ("ideal_objective", "truth_s3", "truth_ds3", "objective", "node_correctness"):
            vals = [r[k] for r in rs if k in r]
            if vals:
                agg[k] = float(np.mean(vals))
        out.append(agg)
    return out


__all__ = [
    "CurveSummary", "DiscriminationSet", "MODELS", "align_pair", "discriminate", "generate_synthetic",
    "node_correctness", "noise_sweep", "pr_roc", "summarize_sweep",
]
