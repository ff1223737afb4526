"""Signed modularity vitalities.

The vitality of node ``v`` is ``Q(G) - Q(G - v)``: the modularity of the full
graph minus the modularity after deleting ``v`` and its edges, with the
community structure held fixed. Positive values mark hubs, negative values
bridges.

Two engines compute it. The incremental engine keeps the global aggregates
``S1 = sum_k intra_k`` and ``S2 = sum_k (2 intra_k + inter_k)**2`` so that

    Q = S1 / m - S2 / (4 m**2)

and per node only patches the communities touched by the node's edges and
memberships. :func:`vitality_by_recompute` deletes the node physically and
re-tallies the whole graph; it is the reference the engine is tested against.
"""
from __future__ import annotations

import math
from collections import defaultdict

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator

from .exceptions import UndefinedModularityError
from .graph import Graph
from .modularity import _crisp_masses, _fuzzy_masses, quality
from .scores import ScoreVector
from .validation import check_cover, check_graph, check_is_fitted, check_partition


def _require_edges(g: Graph):
    if g.edge_count == 0:
        raise UndefinedModularityError("modularity is undefined on a graph without edges")


def _reduced_quality(s1, s2, m_reduced):
    with np.errstate(divide="ignore", invalid="ignore"):
        q = s1 / m_reduced - s2 / (4.0 * m_reduced * m_reduced)
    return np.where(m_reduced > 0, q, np.nan)


def modularity_vitality(g, p) -> ScoreVector:
    """Crisp modularity vitality of every node.

    Vectorized over nodes: all mass changes are integers, so ``S1`` and
    ``S2`` after each removal are exact and only the final quotient rounds.
    """
    g = check_graph(g)
    p = check_partition(p, g)
    _require_edges(g)
    labels = p.labels
    k = p.n_communities
    n = g.node_count
    intra, inter = _crisp_masses(g, labels, k)
    intra = intra.astype(np.int64)
    vol = 2 * intra + inter.astype(np.int64)
    m = g.edge_count
    s1 = int(intra.sum())
    s2 = int(np.dot(vol, vol))

    # node x community neighbor counts
    onehot = sp.csr_matrix((np.ones(n, dtype=np.int64), (np.arange(n), labels)), shape=(n, k))
    A = sp.csr_matrix(
        (np.ones(g.csr[1].size, dtype=np.int64), g.csr[1], g.csr[0]), shape=(n, n)
    )
    counts = (A @ onehot).tocoo()
    rows, cols, cnt = counts.row, counts.col, counts.data.astype(np.int64)
    deg = g.degrees
    own_vol = vol[labels]

    same = cnt * (cols == labels[rows])
    n_same = np.zeros(n, dtype=np.int64)
    np.add.at(n_same, rows, same)
    other = np.where(cols != labels[rows], cnt * (cnt - 2 * vol[cols]), 0)
    d_s2 = np.zeros(n, dtype=np.int64)
    np.add.at(d_s2, rows, other)
    own = deg + n_same
    d_s2 += own * (own - 2 * own_vol)

    q_full = s1 / m - s2 / (4.0 * m * m)
    m_red = (m - deg).astype(np.float64)
    q_red = _reduced_quality((s1 - n_same).astype(np.float64), (s2 + d_s2).astype(np.float64), m_red)
    return ScoreVector(q_full - q_red, "mv", g.labels)


def _omv_chunk(adjacency, memberships, vol, s1, s2, m, q_full, nodes):
    out = np.empty(len(nodes), dtype=np.float64)
    for i, v in enumerate(nodes):
        mv = memberships[v]
        mv_set = set(mv)
        av = 1.0 / len(mv)
        d_in = defaultdict(float)
        d_out = defaultdict(float)
        nbrs = adjacency[v]
        for u in nbrs:
            mu = memberships[u]
            au = 1.0 / len(mu)
            for c in mv:
                shared = c in mu
                if shared:
                    d_in[c] += (av + au) / 2.0
                if len(mu) > 1 or not shared:
                    d_out[c] += (av + 1.0 - (au if shared else 0.0)) / 2.0
            for c in mu:
                shared = c in mv_set
                if len(mv) > 1 or not shared:
                    d_out[c] += (au + 1.0 - (av if shared else 0.0)) / 2.0
        m_red = m - len(nbrs)
        if m_red == 0:
            out[i] = math.nan
            continue
        d_s1 = math.fsum(d_in.values())
        terms = []
        for c in set(d_in) | set(d_out):
            dv = 2.0 * d_in.get(c, 0.0) + d_out.get(c, 0.0)
            terms.append(dv * (dv - 2.0 * vol[c]))
        s2_red = s2 + math.fsum(terms)
        out[i] = q_full - ((s1 - d_s1) / m_red - s2_red / (4.0 * m_red * m_red))
    return out


def overlapping_modularity_vitality(g, c, n_jobs=None) -> ScoreVector:
    """Fuzzy (overlapping) modularity vitality of every node.

    Costs ``O(deg(v) * memberships)`` per node after one full tally.
    ``n_jobs`` splits the nodes into contiguous chunks evaluated in parallel;
    the output does not depend on it.
    """
    g = check_graph(g)
    c = check_cover(c, g)
    _require_edges(g)
    intra, inter = _fuzzy_masses(g.adjacency, c.memberships, c.n_communities)
    vol = 2.0 * intra + inter
    m = float(g.edge_count)
    s1 = math.fsum(intra)
    s2 = math.fsum(vol * vol)
    q_full = s1 / m - s2 / (4.0 * m * m)
    nodes = np.arange(g.node_count)
    n_jobs = 1 if n_jobs is None else n_jobs
    if n_jobs == 1 or g.node_count < 2:
        values = _omv_chunk(g.adjacency, c.memberships, vol, s1, s2, m, q_full, nodes)
    else:
        n_chunks = max(1, min(g.node_count, 4 * (n_jobs if n_jobs > 0 else 8)))
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_omv_chunk)(g.adjacency, c.memberships, vol, s1, s2, m, q_full, chunk)
            for chunk in np.array_split(nodes, n_chunks)
        )
        values = np.concatenate(parts)
    return ScoreVector(values, "omv", g.labels)


def vitality_by_recompute(g, communities, overlapping: bool = True, nodes=None) -> ScoreVector:
    """Reference vitalities by deleting each node and re-tallying from scratch.

    Remaining nodes keep their memberships (and so their coefficients);
    communities left empty contribute nothing. ``O(N * |E|)``.
    """
    g = check_graph(g)
    _require_edges(g)
    if overlapping:
        cover = check_cover(communities, g)
        k = cover.n_communities
        intra, inter = _fuzzy_masses(g.adjacency, cover.memberships, k)
    else:
        cover = check_partition(communities, g)
        k = cover.n_communities
        intra, inter = _crisp_masses(g, cover.labels, k)
    q_full = quality(intra, inter, g.edge_count)
    nodes = range(g.node_count) if nodes is None else nodes
    values = np.full(g.node_count, np.nan)
    for v in nodes:
        sub = g.remove_node(v)
        if sub.edge_count == 0:
            continue
        if overlapping:
            rest = cover.memberships[:v] + cover.memberships[v + 1:]
            a, b = _fuzzy_masses(sub.adjacency, rest, k)
        else:
            a, b = _crisp_masses(sub, np.delete(cover.labels, v), k)
        values[v] = q_full - quality(a, b, sub.edge_count)
    return ScoreVector(values, "omv" if overlapping else "mv", g.labels)


class ModularityVitality(BaseEstimator):
    """Modularity vitality as an estimator.

    ``fit(G, communities)`` computes one score per node; communities may be a
    :class:`Partition`, a crisp :class:`Cover` or a sequence of labels.

    Attributes
    ----------
    scores_ : ScoreVector
    modularity_ : float
        Quality of the full graph under the given communities.
    degrees_ : ndarray
        Node degrees, used as the first tie-break when ranking.
    """

    overlapping = False

    def _score(self, g, communities):
        return modularity_vitality(g, communities)

    def _quality(self, g, communities):
        from .modularity import newman_modularity

        return newman_modularity(g, communities)

    def fit(self, G, communities, y=None):
        g = check_graph(G)
        if communities is None:
            raise ValueError(f"{type(self).__name__}.fit requires a community structure")
        self.scores_ = self._score(g, communities)
        self.modularity_ = self._quality(g, communities)
        self.degrees_ = g.degrees.copy()
        self.n_nodes_ = g.node_count
        return self

    def transform(self, G=None):
        check_is_fitted(self, "scores_")
        return np.array(self.scores_.values)

    def fit_transform(self, G, communities, y=None):
        return self.fit(G, communities).transform()

    def rank(self, strategy="positive_first"):
        from .ranking import rank

        check_is_fitted(self, "scores_")
        return rank(self.scores_, strategy, degrees=self.degrees_)


class OverlappingModularityVitality(ModularityVitality):
    """Vitality of the fuzzy overlapping modularity; accepts any :class:`Cover`."""

    overlapping = True

    def __init__(self, n_jobs=None):
        self.n_jobs = n_jobs

    def _score(self, g, communities):
        return overlapping_modularity_vitality(g, communities, n_jobs=self.n_jobs)

    def _quality(self, g, communities):
        from .modularity import overlapping_modularity

        return overlapping_modularity(g, communities)
