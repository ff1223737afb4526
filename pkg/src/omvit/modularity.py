"""Newman modularity and its fuzzy overlapping variant.

Both qualities share one expression over per-community edge masses::

    Q = sum_k [ intra_k / m - ((2 * intra_k + inter_k) / (2 m))**2 ]

Crisp masses count edges; fuzzy masses weight every edge end by the average
of the belonging coefficients involved.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .community import Cover, Partition
from .exceptions import UndefinedModularityError
from .graph import Graph
from .validation import check_cover, check_graph, check_partition


@dataclass(frozen=True, eq=False)
class CommunityTally:
    """Intra/inter edge masses per community plus the graph's edge count."""

    intra: np.ndarray
    inter: np.ndarray
    total_edges: float

    @property
    def n_communities(self) -> int:
        return self.intra.size

    @property
    def volume(self) -> np.ndarray:
        """``2 * intra + inter`` per community (the fuzzy degree sum)."""
        return 2.0 * self.intra + self.inter

    def records(self) -> list[dict]:
        return [
            {"community_id": k, "intra": float(a), "inter": float(b)}
            for k, (a, b) in enumerate(zip(self.intra, self.inter))
        ]


def quality(intra, inter, m) -> float:
    """Evaluate the modularity expression on raw masses."""
    if m <= 0:
        raise UndefinedModularityError("modularity is undefined on a graph without edges")
    two_m = 2.0 * m
    return math.fsum(
        float(a) / m - ((2.0 * float(a) + float(b)) / two_m) ** 2 for a, b in zip(intra, inter)
    )


def _crisp_masses(g: Graph, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    indptr, indices = g.csr
    src = np.repeat(np.arange(g.node_count), np.diff(indptr))
    upper = indices > src
    cu, cv = labels[src[upper]], labels[indices[upper]]
    same = cu == cv
    intra = np.bincount(cu[same], minlength=k).astype(np.float64)
    inter = (np.bincount(cu[~same], minlength=k) + np.bincount(cv[~same], minlength=k)).astype(np.float64)
    return intra, inter


def _fuzzy_masses(adjacency, memberships, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Fuzzy intra/inter masses for a membership table.

    ``memberships`` need not satisfy the Cover invariants: the vitality
    oracle passes restricted tables in which some communities are empty.
    Equal weights are counted before multiplying so the sums stay exact for
    crisp inputs and tight otherwise.
    """
    intra_w: list[Counter] = [Counter() for _ in range(k)]
    inter_w: list[Counter] = [Counter() for _ in range(k)]
    for u, nbrs in enumerate(adjacency):
        mu = memberships[u]
        au = 1.0 / len(mu)
        for v in nbrs:
            mv = memberships[v]
            av = 1.0 / len(mv)
            for c in mu:
                shared = c in mv
                if shared and v > u:
                    intra_w[c][(au + av) / 2.0] += 1
                # v counts as outside c when it has some other community
                if len(mv) > 1 or not shared:
                    inter_w[c][(au + 1.0 - (av if shared else 0.0)) / 2.0] += 1
    intra = np.array([math.fsum(w * n for w, n in cnt.items()) for cnt in intra_w], dtype=np.float64)
    inter = np.array([math.fsum(w * n for w, n in cnt.items()) for cnt in inter_w], dtype=np.float64)
    return intra, inter


def crisp_tallies(g, p) -> CommunityTally:
    g = check_graph(g)
    p = check_partition(p, g)
    intra, inter = _crisp_masses(g, p.labels, p.n_communities)
    return CommunityTally(intra, inter, float(g.edge_count))


def fuzzy_tallies(g, c) -> CommunityTally:
    g = check_graph(g)
    c = check_cover(c, g)
    intra, inter = _fuzzy_masses(g.adjacency, c.memberships, c.n_communities)
    return CommunityTally(intra, inter, float(g.edge_count))


def newman_modularity(g, p: Partition) -> float:
    t = crisp_tallies(g, p)
    return quality(t.intra, t.inter, t.total_edges)


def overlapping_modularity(g, c: Cover) -> float:
    t = fuzzy_tallies(g, c)
    return quality(t.intra, t.inter, t.total_edges)
