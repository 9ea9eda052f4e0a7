"""Genetic search over one-to-one node mappings.

The objective is ``alpha * edge + (1 - alpha) * node`` where ``edge`` is DS3
(dynamic mode) or S3 (static mode) and ``node`` is the mean similarity of
aligned node pairs.

Individuals are full permutations of the larger network's nodes; the first
``n1`` entries are the alignment and the rest are the unmapped targets.
Each generation draws its random numbers as one block from a stream keyed by
``(seed, generation)``; row ``i`` of the block belongs to population slot
``i``.  Crossover runs serially and scoring is pure, so results do not
depend on the worker count.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import ClassVar, Literal

import numpy as np
import scipy.sparse as sparse
from numba import njit

from . import conservation
from .signatures import SimilarityMatrix, network_similarity, node_conservation
from .temporal import Alignment, AlignmentError, DynamicNetwork, StaticNetwork, check_alignment

log = logging.getLogger(__name__)

# Fixed evaluation block size; keeps float reductions identical for any thread count.
_BLOCK = 64
# Largest pair-by-pair CET table built for vectorized scoring.
_MAX_TABLE = 20_000_000
# Validate every individual of every generation (slow; for debugging).
DEBUG_CHECKS = os.environ.get("DYNALIGN_DEBUG", "") not in ("", "0")


@dataclass
class SearchConfig:
    alpha: float = 0.5
    population_size: int = 2000
    max_generations: int = 10_000
    elite_fraction: float = 0.5
    stop_epsilon: float = 1e-4
    stop_window: int = 500
    seed: int = 0
    mode: Literal["static", "dynamic"] = "dynamic"
    threads: int = 1

    REFERENCE_POPULATION: ClassVar[int] = 15_000

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 < self.elite_fraction < 1.0:
            raise ValueError(f"elite_fraction must be in (0, 1), got {self.elite_fraction}")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_generations < 0 or self.stop_window < 1:
            raise ValueError("max_generations must be >= 0 and stop_window >= 1")
        if self.mode not in ("static", "dynamic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        return {**asdict(self), "reference_population_size": self.REFERENCE_POPULATION}


@dataclass(frozen=True)
class ObjectiveValue:
    total: float
    edge_term: float
    node_term: float


@dataclass
class SearchTrace:
    best: list = field(default_factory=list)
    mean: list = field(default_factory=list)
    wall_time: list = field(default_factory=list)
    alignment: Alignment | None = None
    objective: ObjectiveValue | None = None
    generations: int = 0
    stop_reason: str = ""


def _rng(seed: int, generation: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, generation])


# ---------------------------------------------------------------- operators


def random_alignment(n1: int, n2: int, rng: np.random.Generator) -> Alignment:
    if n1 > n2:
        raise AlignmentError(f"cannot align {n1} nodes into {n2}")
    return Alignment(rng.permutation(n2)[:n1], n2)


@njit(cache=True)
def _crossover_kernel(pa, pb, rot, bit):
    n = pa.shape[0]
    pos_a = np.empty(n, dtype=np.int64)
    for i in range(n):
        pos_a[pa[i]] = i
    child = pa.copy()
    done = np.zeros(n, dtype=np.bool_)
    cycle = np.empty(n, dtype=np.int64)
    n_cycles = 0
    for start in range(n):
        if done[start] or pa[start] == pb[start]:
            continue
        L = 0
        i = start
        while True:
            cycle[L] = i
            L += 1
            done[i] = True
            i = pos_a[pb[i]]
            if i == start:
                break
        r = int(rot[n_cycles] * L)
        k = (L - 1) // 2
        if (L - 1) % 2 == 1 and bit[n_cycles] < 0.5:
            k += 1
        n_cycles += 1
        if k == 0:
            continue
        first = cycle[r]
        for j in range(k):
            c = cycle[(r + j) % L]
            child[c] = pb[c]
        child[cycle[(r + k) % L]] = pa[first]
    return child


@njit(cache=True)
def _crossover_batch(pop, parents, rot, bit):
    out = np.empty((parents.shape[0], pop.shape[1]), dtype=np.int64)
    for s in range(parents.shape[0]):
        out[s] = _crossover_kernel(pop[parents[s, 0]], pop[parents[s, 1]], rot[s], bit[s])
    return out


def crossover_permutations(pa: np.ndarray, pb: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Child halfway between two permutations of ``0..n-1``.

    The relative permutation is split into cycles; on each cycle of length L
    the child applies k of the L - 1 transpositions leading from ``pa`` to
    ``pb``, starting at a random point of the cycle, with k = (L - 1) / 2
    rounded by a random bit.  Positions where the parents agree are fixed
    points and keep their common value.
    """
    n = len(pa)
    return _crossover_kernel(np.asarray(pa, dtype=np.int64), np.asarray(pb, dtype=np.int64),
                             rng.random(n), rng.random(n))


def _full_permutation(f: Alignment) -> np.ndarray:
    used = np.zeros(f.n2, dtype=bool)
    used[f.mapping] = True
    return np.concatenate([f.mapping, np.flatnonzero(~used)])


def crossover(parent_a: Alignment, parent_b: Alignment, rng: np.random.Generator) -> Alignment:
    if parent_a.n1 != parent_b.n1 or parent_a.n2 != parent_b.n2:
        raise AlignmentError("parents are defined over different node sets")
    child = crossover_permutations(_full_permutation(parent_a), _full_permutation(parent_b), rng)
    return Alignment(child[: parent_a.n1], parent_a.n2)


def elite_indices(scores: np.ndarray, fraction: float) -> np.ndarray:
    """Indices of the top ``fraction`` of the population, best first (ties by index)."""
    n = len(scores)
    n_elite = max(1, min(n - 1, int(n * fraction)))
    order = np.lexsort((np.arange(n), -np.asarray(scores)))
    return order[:n_elite]


# ---------------------------------------------------------------- objective


class AlignmentProblem:
    """Objective inputs for one pair of networks.

    ``evaluate`` scores one alignment through the reference scorers;
    ``evaluate_batch`` scores many alignments at once from precomputed
    pair tables and agrees with ``evaluate`` to rounding error.
    """

    def __init__(self, net1, net2, alpha: float = 0.5, similarity: SimilarityMatrix | None = None):
        if net1.n_nodes > net2.n_nodes:
            raise AlignmentError(
                f"first network must be the smaller one ({net1.n_nodes} > {net2.n_nodes})"
            )
        if type(net1) is not type(net2):
            raise TypeError("networks must both be static or both be dynamic")
        self.net1, self.net2 = net1, net2
        self.alpha = float(alpha)
        self.mode = "dynamic" if isinstance(net1, DynamicNetwork) else "static"
        self.n1, self.n2 = net1.n_nodes, net2.n_nodes
        self.similarity = None
        if self.alpha < 1.0:
            if similarity is None:
                similarity = network_similarity(net1, net2)
            if similarity.shape != (self.n1, self.n2):
                raise ValueError(
                    f"similarity shape {similarity.shape} does not match networks ({self.n1}, {self.n2})"
                )
            self.similarity = similarity
        else:
            log.info("alpha = 1: node conservation not computed")
        self._tables = None

    # reference path
    def evaluate(self, f: Alignment) -> ObjectiveValue:
        check_alignment(f, self.n1, self.n2)
        edge = node = 0.0
        if self.alpha > 0:
            if self.mode == "dynamic":
                edge = conservation.ds3(self.net1, self.net2, f).ds3
            else:
                edge = conservation.s3(self.net1, self.net2, f).s3
        if self.alpha < 1:
            node = node_conservation(self.similarity, f)
        return ObjectiveValue(self.alpha * edge + (1 - self.alpha) * node, edge, node)

    # vectorized path
    def _build_tables(self):
        n2 = self.n2
        if self.mode == "dynamic":
            pairs1 = list(self.net1.pair_events)
            pairs2 = list(self.net2.pair_events)
        else:
            pairs1 = sorted(self.net1.edges)
            pairs2 = sorted(self.net2.edges)
        t = {}
        t["pu1"] = np.array([p[0] for p in pairs1], dtype=np.int64)
        t["pv1"] = np.array([p[1] for p in pairs1], dtype=np.int64)
        t["pu2"] = np.array([p[0] for p in pairs2], dtype=np.int64)
        t["pv2"] = np.array([p[1] for p in pairs2], dtype=np.int64)
        pid2 = np.full((n2, n2), -1, dtype=np.int64)
        pid2[t["pu2"], t["pv2"]] = np.arange(len(pairs2))
        pid2[t["pv2"], t["pu2"]] = np.arange(len(pairs2))
        t["pid2"] = pid2
        if self.mode == "dynamic":
            if len(pairs1) * len(pairs2) > _MAX_TABLE:
                self._tables = False
                return
            t["cet"] = _cet_table(self.net1, self.net2)
            t["d1"] = self.net1.total_duration()
            t["w2"] = np.array([sum(te - ts for ts, te in ivs) for ivs in self.net2.pair_events.values()])
        else:
            t["e1"] = len(pairs1)
        self._tables = t

    def _edge_batch(self, maps: np.ndarray) -> np.ndarray:
        t = self._tables
        b = maps.shape[0]
        img = t["pid2"][maps[:, t["pu1"]], maps[:, t["pv1"]]]
        inimg = np.zeros((b, self.n2), dtype=bool)
        inimg[np.arange(b)[:, None], maps] = True
        both = inimg[:, t["pu2"]] & inimg[:, t["pv2"]]
        if self.mode == "dynamic":
            cols = np.broadcast_to(np.arange(img.shape[1]), img.shape)
            tc = np.where(img >= 0, t["cet"][cols, np.maximum(img, 0)], 0.0).sum(axis=1)
            tn = t["d1"] + (both * t["w2"]).sum(axis=1) - 2.0 * tc
            tn = np.maximum(tn, 0.0)
        else:
            tc = (img >= 0).sum(axis=1).astype(np.float64)
            tn = t["e1"] + both.sum(axis=1) - 2.0 * tc
        denom = tc + tn
        out = np.zeros(b)
        np.divide(tc, denom, out=out, where=denom > 0)
        return out

    def _block(self, maps: np.ndarray) -> np.ndarray:
        """Objective totals and terms, shape (3, len(maps))."""
        b = maps.shape[0]
        edge = np.zeros(b)
        node = np.zeros(b)
        if self.alpha > 0:
            if self._tables is False:
                edge = np.array([self.evaluate(Alignment(m, self.n2)).edge_term for m in maps])
            else:
                edge = self._edge_batch(maps)
        if self.alpha < 1:
            node = self.similarity.values[np.arange(self.n1), maps].sum(axis=1) / max(self.n1, 1)
        return np.vstack([self.alpha * edge + (1 - self.alpha) * node, edge, node])

    def evaluate_batch(self, maps: np.ndarray, threads: int = 1) -> np.ndarray:
        """Totals for a (B, n1) array of mappings."""
        if self._tables is None and self.alpha > 0:
            self._build_tables()
        maps = np.ascontiguousarray(maps[:, : self.n1], dtype=np.int64)
        blocks = [maps[i : i + _BLOCK] for i in range(0, len(maps), _BLOCK)]
        if not blocks:
            return np.zeros(0)
        if threads > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(self._block, blocks))
        else:
            parts = [self._block(blk) for blk in blocks]
        return np.concatenate([p[0] for p in parts])


def _cet_table(net1: DynamicNetwork, net2: DynamicNetwork) -> np.ndarray:
    """CET for every (pair of net1 with events, pair of net2 with events)."""
    p1 = {p: i for i, p in enumerate(net1.pair_events)}
    p2 = {p: i for i, p in enumerate(net2.pair_events)}
    ev1 = np.array([(e.t_start, e.t_end, p1[(e.u, e.v)]) for e in net1.events]).reshape(-1, 3)
    ev2 = np.array([(e.t_start, e.t_end, p2[(e.u, e.v)]) for e in net2.events]).reshape(-1, 3)
    table = np.zeros((len(p1), len(p2)))
    if not len(ev1) or not len(ev2):
        return table
    ind2 = sparse.csr_matrix(
        (np.ones(len(ev2)), (np.arange(len(ev2)), ev2[:, 2].astype(np.int64))),
        shape=(len(ev2), len(p2)),
    )
    chunk = max(1, 4_000_000 // len(ev2))
    for s in range(0, len(ev1), chunk):
        e1 = ev1[s : s + chunk]
        ov = np.minimum(e1[:, 1:2], ev2[None, :, 1]) - np.maximum(e1[:, 0:1], ev2[None, :, 0])
        np.maximum(ov, 0.0, out=ov)
        per_pair = np.asarray((ind2.T @ ov.T).T)
        np.add.at(table, e1[:, 2].astype(np.int64), per_pair)
    return table


def evaluate(problem: AlignmentProblem, f: Alignment) -> ObjectiveValue:
    return problem.evaluate(f)


def make_problem(net1, net2, cfg: SearchConfig, similarity=None) -> AlignmentProblem:
    """Problem in the configured mode; dynamic inputs are flattened for static mode."""
    from .temporal import flatten

    if cfg.mode == "static":
        if isinstance(net1, DynamicNetwork):
            net1, net2 = flatten(net1), flatten(net2)
    elif not isinstance(net1, DynamicNetwork):
        raise TypeError("dynamic mode needs dynamic networks")
    return AlignmentProblem(net1, net2, cfg.alpha, similarity)


# ---------------------------------------------------------------- driver


def _check_population(pop: np.ndarray) -> None:
    if not (np.sort(pop, axis=1) == np.arange(pop.shape[1])).all():
        raise AlignmentError("population contains a non-injective individual")


def run(cfg: SearchConfig, problem: AlignmentProblem, callback=None) -> SearchTrace:
    """Evolve a population of alignments and return the best one of the final generation."""
    n1, n2 = problem.n1, problem.n2
    P = cfg.population_size
    t0 = time.perf_counter()
    pop = np.empty((P, n2), dtype=np.int64)
    rng = _rng(cfg.seed, 0)
    for slot in range(P):
        pop[slot] = rng.permutation(n2)
    scores = problem.evaluate_batch(pop, cfg.threads)
    trace = SearchTrace()

    def record():
        trace.best.append(float(scores.max()))
        trace.mean.append(float(scores.mean()))
        trace.wall_time.append(time.perf_counter() - t0)

    record()
    reason = "max_generations"
    gen = 0
    while gen < cfg.max_generations:
        gen += 1
        elite = elite_indices(scores, cfg.elite_fraction)
        n_elite = len(elite)
        new = np.empty_like(pop)
        new[:n_elite] = pop[elite]
        rng = _rng(cfg.seed, gen)
        n_child = P - n_elite
        parents = rng.integers(P, size=(n_child, 2))
        rot = rng.random((n_child, n2))
        bit = rng.random((n_child, n2))
        new[n_elite:] = _crossover_batch(pop, parents, rot, bit)
        if DEBUG_CHECKS:
            _check_population(new)
        child_scores = problem.evaluate_batch(new[n_elite:], cfg.threads)
        scores = np.concatenate([scores[elite], child_scores])
        pop = new
        record()
        if callback is not None:
            callback(gen, trace)
        if gen >= cfg.stop_window and trace.best[-1] - trace.best[-1 - cfg.stop_window] < cfg.stop_epsilon:
            reason = "converged"
            break
    best = int(elite_indices(scores, cfg.elite_fraction)[0])
    trace.alignment = Alignment(pop[best, :n1], n2)
    trace.objective = problem.evaluate(trace.alignment)
    trace.generations = gen
    trace.stop_reason = reason
    return trace
