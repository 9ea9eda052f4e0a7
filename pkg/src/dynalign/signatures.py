"""Node signatures, PCA reduction and graphlet-based node similarity.

Similarities are cosine similarities of the PCA-reduced signatures mapped
into [0, 1] as ``(1 + cos) / 2``, so that node conservation lives on the
same scale as edge conservation.  A zero vector has cosine 0 with anything.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import IO, Literal

import numpy as np

from .temporal import Alignment, DynamicNetwork, StaticNetwork, _text_lines, check_alignment

VARIANCE_KEPT = 0.99


@dataclass(frozen=True)
class SignatureMatrix:
    rows: np.ndarray                       # (n_nodes, dim), nonnegative integers
    kind: Literal["static", "dynamic"]
    labels: tuple = ()

    def __post_init__(self):
        if self.rows.ndim != 2:
            raise ValueError("signature rows must be 2-D")
        if (self.rows < 0).any():
            raise ValueError("signature counts must be nonnegative")

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class ReducedSignatures:
    rows: np.ndarray          # (n_vectors, k)
    k: int
    basis: np.ndarray         # (k, dim) principal axes
    explained: np.ndarray     # explained variance ratio of the kept components
    zero_variance: bool = False


def signatures(net, kind: str | None = None) -> SignatureMatrix:
    """GDV for a StaticNetwork, DGDV (4 nodes, 6 events, delta_t 1) for a DynamicNetwork."""
    if isinstance(net, DynamicNetwork):
        from .dynamic_graphlets import dynamic_gdv

        return SignatureMatrix(dynamic_gdv(net), "dynamic", net.labels)
    if isinstance(net, StaticNetwork):
        from .graphlets import static_gdv

        return SignatureMatrix(static_gdv(net), "static", net.labels)
    raise TypeError(f"unsupported network type {type(net).__name__}")


def reduce(vectors: np.ndarray, variance: float = VARIANCE_KEPT) -> ReducedSignatures:
    """Mean-centred PCA keeping the fewest components reaching ``variance``.

    Component signs are fixed so that each axis's largest-magnitude
    coordinate is positive.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least 2 vectors")
    centred = x - x.mean(axis=0)
    _, sing, vt = np.linalg.svd(centred, full_matrices=False)
    var = sing**2
    total = var.sum()
    scale = max(1.0, float(np.abs(centred).max()))
    if total <= (1e-12 * scale) ** 2 * x.shape[0]:
        return ReducedSignatures(
            np.zeros((x.shape[0], 1)), 1, np.zeros((1, x.shape[1])), np.zeros(1), True
        )
    ratio = np.cumsum(var) / total
    k = int(np.searchsorted(ratio, variance - 1e-12) + 1)
    k = min(k, len(var))
    basis = vt[:k].copy()
    for row in basis:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    return ReducedSignatures(centred @ basis.T, k, basis, var[:k] / total)


def cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    dots = a @ b.T
    denom = np.outer(na, nb)
    out = np.zeros_like(dots)
    np.divide(dots, denom, out=out, where=denom > 0)
    return np.clip(out, -1.0, 1.0)


def node_similarity(y_u: np.ndarray, y_v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(y_u), np.linalg.norm(y_v)
    if nu == 0 or nv == 0:
        return 0.5
    cos = float(np.dot(y_u, y_v) / (nu * nv))
    return (1.0 + min(1.0, max(-1.0, cos))) / 2.0


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray        # (n1, n2) in [0, 1]
    labels1: tuple = ()
    labels2: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("similarity matrix must be 2-D")
        if v.size and (np.nanmin(v) < 0 or np.nanmax(v) > 1 or np.isnan(v).any()):
            raise ValueError("similarities must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def shape(self):
        return self.values.shape


def similarity_matrix(sig1: SignatureMatrix, sig2: SignatureMatrix) -> SimilarityMatrix:
    """PCA over the pooled vectors of both networks, then rescaled cosine."""
    if sig1.dim != sig2.dim:
        raise ValueError("signature dimensions differ")
    red = reduce(np.vstack([sig1.rows, sig2.rows]))
    n1 = sig1.rows.shape[0]
    y1, y2 = red.rows[:n1], red.rows[n1:]
    s = (1.0 + cosine_matrix(y1, y2)) / 2.0
    meta = {"k": red.k, "zero_variance": red.zero_variance, "kind": sig1.kind}
    return SimilarityMatrix(s, sig1.labels, sig2.labels, meta)


def network_similarity(net1, net2) -> SimilarityMatrix:
    return similarity_matrix(signatures(net1), signatures(net2))


def node_conservation(sim: SimilarityMatrix, f: Alignment) -> float:
    n1, n2 = sim.shape
    check_alignment(f, n1, n2)
    if n1 == 0:
        return 0.0
    return math.fsum(sim.values[np.arange(n1), f.mapping]) / n1


def load_similarity_file(source: IO | str | bytes, net1, net2) -> SimilarityMatrix:
    """``u v s`` lines, ``u`` in net1 and ``v`` in net2; absent pairs are 0."""
    s = np.zeros((net1.n_nodes, net2.n_nodes))
    for lineno, fields in _text_lines(source):
        if len(fields) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(fields)}")
        u, v, val = fields
        if u not in net1.index:
            raise ValueError(f"line {lineno}: unknown node {u!r} in first network")
        if v not in net2.index:
            raise ValueError(f"line {lineno}: unknown node {v!r} in second network")
        try:
            x = float(val)
        except ValueError:
            raise ValueError(f"line {lineno}: bad similarity {val!r}") from None
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"line {lineno}: similarity {x} outside [0, 1]")
        s[net1.index[u], net2.index[v]] = x
    return SimilarityMatrix(s, net1.labels, net2.labels, {"kind": "file"})


def dumps_signatures(sig: SignatureMatrix) -> str:
    buf = io.StringIO()
    for lab, row in zip(sig.labels, sig.rows):
        buf.write(lab + " " + " ".join(str(int(c)) for c in row) + "\n")
    return buf.getvalue()


def load_signatures(source: IO | str | bytes, kind: str = "static") -> SignatureMatrix:
    labels, rows = [], []
    for lineno, fields in _text_lines(source):
        try:
            rows.append([int(x) for x in fields[1:]])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer count") from None
        labels.append(fields[0])
    if len({len(r) for r in rows}) > 1:
        raise ValueError("signature rows have different lengths")
    return SignatureMatrix(np.array(rows, dtype=np.int64), kind, tuple(labels))
