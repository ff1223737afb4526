"""Undirected simple graphs, edge-list ingestion and topology statistics."""
from __future__ import annotations

import hashlib
import io
import logging
import os
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import EmptyGraphError, NodeIdError, ParseError

logger = logging.getLogger(__name__)

_SPLIT = re.compile(r"[,\s]+")
COMMENT_PREFIXES = ("#", "%")


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected, unweighted simple graph.

    Nodes are dense integer ids ``0..N-1``; ``labels[i]`` is the external
    label of node ``i``. ``adjacency[i]`` is the sorted tuple of neighbors.
    """

    labels: tuple
    adjacency: tuple
    edge_count: int
    index: dict = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], nodes: Iterable | None = None) -> "Graph":
        """Build a graph from label pairs.

        ``nodes`` fixes (a prefix of) the label order and allows isolated
        nodes. Self-loops are dropped and duplicate edges merged.
        """
        g, _ = _build(edges, nodes)
        return g

    @classmethod
    def from_networkx(cls, G) -> "Graph":
        return cls.from_edges(G.edges(), nodes=G.nodes())

    def to_networkx(self):
        import networkx as nx

        G = nx.Graph()
        G.add_nodes_from(self.labels)
        G.add_edges_from((self.labels[u], self.labels[v]) for u, v in self.edges())
        return G

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.labels == other.labels and self.adjacency == other.adjacency

    def __hash__(self):
        return hash((self.labels, self.adjacency))

    def edges(self):
        """Yield each edge once as ``(u, v)`` with ``u < v``."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if v > u:
                    yield u, v

    def neighbors(self, v: int) -> tuple:
        return self.adjacency[_check_node(self, v)]

    def node_id(self, label) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise NodeIdError(f"unknown node label {label!r}") from None

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=len(self.adjacency))

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` arrays of the adjacency structure."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter(
            (v for nbrs in self.adjacency for v in nbrs), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    def adjacency_matrix(self) -> sp.csr_matrix:
        indptr, indices = self.csr
        n = self.node_count
        data = np.ones(indices.size, dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(n, n))

    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        """Induced subgraph; kept nodes are re-densified in increasing id order."""
        keep = sorted(set(int(v) for v in nodes))
        remap = {old: new for new, old in enumerate(keep)}
        adjacency = tuple(
            tuple(remap[u] for u in self.adjacency[old] if u in remap) for old in keep
        )
        labels = tuple(self.labels[old] for old in keep)
        m = sum(len(a) for a in adjacency) // 2
        return Graph(labels, adjacency, m, {lab: i for i, lab in enumerate(labels)})

    def remove_node(self, v: int) -> "Graph":
        v = _check_node(self, v)
        return self.subgraph(u for u in range(self.node_count) if u != v)

    @cached_property
    def fingerprint(self) -> str:
        """Short content hash over labels and edges, used for provenance headers."""
        h = hashlib.sha256()
        for lab in self.labels:
            h.update(str(lab).encode())
            h.update(b"\x00")
        h.update(b"\x01")
        for u, v in self.edges():
            h.update(f"{u} {v}\n".encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class TopologyStats:
    n: int
    m: int
    avg_degree: float
    transitivity: float


def _check_node(g: Graph, v) -> int:
    try:
        iv = int(v)
    except (TypeError, ValueError):
        raise NodeIdError(f"node id must be an integer, got {v!r}") from None
    if iv != v or not 0 <= iv < g.node_count:
        raise NodeIdError(f"node id {v!r} out of range [0, {g.node_count})")
    return iv


def _build(edges, nodes=None):
    index: dict = {}
    labels: list = []

    def intern(label):
        i = index.get(label)
        if i is None:
            i = index[label] = len(labels)
            labels.append(label)
        return i

    if nodes is not None:
        for lab in nodes:
            intern(lab)
    neigh: list[set] = [set() for _ in labels]
    loops = dupes = 0
    for a, b in edges:
        u, v = intern(a), intern(b)
        while len(neigh) < len(labels):
            neigh.append(set())
        if u == v:
            loops += 1
            continue
        if v in neigh[u]:
            dupes += 1
            continue
        neigh[u].add(v)
        neigh[v].add(u)
    while len(neigh) < len(labels):
        neigh.append(set())
    adjacency = tuple(tuple(sorted(s)) for s in neigh)
    m = sum(len(s) for s in neigh) // 2
    return Graph(tuple(labels), adjacency, m, index), {"self_loops": loops, "duplicate_edges": dupes}


def _lines(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            yield from _lines(fh)
        return
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    for line in source:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line


def load_edge_list(
    source,
    delimiter: str | None = None,
    comments: Sequence[str] = COMMENT_PREFIXES,
    diagnostics: dict | None = None,
) -> Graph:
    """Read an edge list into a :class:`Graph`.

    Parameters
    ----------
    source : path, bytes, binary/text stream or iterable of lines
        One edge per line, two endpoint labels separated by whitespace or a
        comma (or by ``delimiter`` when given).
    comments : sequence of str
        Lines starting with any of these prefixes are skipped.
    diagnostics : dict, optional
        Filled with the counts of dropped self-loops and merged duplicates.

    Labels are kept as strings and mapped to dense ids in first-seen order.
    """
    path = source if isinstance(source, (str, os.PathLike)) else None
    comments = tuple(comments)

    def pairs():
        for lineno, line in enumerate(_lines(source), start=1):
            s = line.strip()
            if not s or s.startswith(comments):
                continue
            if delimiter is None:
                tokens = [t for t in _SPLIT.split(s) if t]
            else:
                tokens = [t.strip() for t in s.split(delimiter)]
            if len(tokens) != 2 or not all(tokens):
                raise ParseError(f"expected 2 tokens, got {len(tokens)}: {s!r}", line=lineno, path=path)
            yield tokens[0], tokens[1]

    g, diag = _build(pairs())
    if g.node_count == 0:
        raise EmptyGraphError("edge list contains no edges" + (f": {path}" if path else ""))
    if diag["self_loops"] or diag["duplicate_edges"]:
        logger.info(
            "dropped %d self-loop(s), merged %d duplicate edge(s)",
            diag["self_loops"],
            diag["duplicate_edges"],
        )
    if diagnostics is not None:
        diagnostics.update(diag)
    return g


def connected_components(g: Graph) -> list[list[int]]:
    """Components in order of their smallest node id."""
    seen = np.zeros(g.node_count, dtype=bool)
    comps = []
    for s in range(g.node_count):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component.

    Ties go to the component holding the smallest dense id.
    """
    if g.node_count == 0:
        raise EmptyGraphError("graph has no nodes")
    best = None
    for comp in connected_components(g):
        if best is None or len(comp) > len(best):
            best = comp
    if len(best) == g.node_count:
        return g
    return g.subgraph(best)


def topology_stats(g: Graph) -> TopologyStats:
    n = g.node_count
    if n == 0:
        raise EmptyGraphError("graph has no nodes")
    k = g.degrees.astype(np.float64)
    triples = float(np.sum(k * (k - 1.0)))
    if triples == 0.0:
        zeta = 0.0
    else:
        A = g.adjacency_matrix()
        # (A^2 o A).sum() counts every triangle 6 times; triples above are doubled too
        closed = float((A @ A).multiply(A).sum())
        zeta = closed / triples
    return TopologyStats(n=n, m=g.edge_count, avg_degree=2.0 * g.edge_count / n, transitivity=zeta)


def degree(g: Graph, v: int) -> int:
    return len(g.adjacency[_check_node(g, v)])


def degree_scores(g: Graph):
    from .scores import ScoreVector

    return ScoreVector(g.degrees.astype(np.float64), "degree", g.labels)
