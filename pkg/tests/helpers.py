"""Random fixtures and independent dense oracles for the test-suite."""
import itertools

import numpy as np

from omvit import Graph, Partition, belonging_coefficients


def clique_edges(n, offset=0):
    return [(offset + i, offset + j) for i, j in itertools.combinations(range(n), 2)]


def random_graph(rng, n_min=2, n_max=300, min_edges=1):
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        mean_deg = rng.uniform(1.0, 8.0)
        p = min(1.0, mean_deg / max(n - 1, 1))
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < p
        g = Graph.from_edges(zip(iu[keep].tolist(), ju[keep].tolist()), nodes=range(n))
        if g.edge_count >= min_edges:
            return g


def random_partition(rng, n):
    k = int(rng.integers(1, max(2, n // 4) + 1))
    return Partition.from_labels(rng.integers(0, k, size=n).tolist())


def random_cover(rng, n, max_memberships=3):
    k = int(rng.integers(1, max(2, n // 4) + 1))
    rows = []
    for _ in range(n):
        size = int(rng.integers(1, min(k, max_memberships) + 1))
        rows.append(rng.choice(k, size=size, replace=False).tolist())
    return belonging_coefficients(rows)


def dense(g):
    A = np.zeros((g.node_count, g.node_count))
    for u, v in g.edges():
        A[u, v] = A[v, u] = 1.0
    return A


def pairwise_modularity(g, labels):
    """(1/2m) sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j)."""
    A = dense(g)
    k = A.sum(axis=1)
    two_m = k.sum()
    labels = np.asarray(labels)
    delta = labels[:, None] == labels[None, :]
    return float(((A - np.outer(k, k) / two_m) * delta).sum() / two_m)


def brute_fuzzy_masses(A, memberships, n_communities):
    """Direct double sum over node pairs for the fuzzy intra/inter masses."""
    n = A.shape[0]
    a = np.zeros((n, n_communities))
    for i, m in enumerate(memberships):
        for c in m:
            a[i, c] = 1.0 / len(m)
    member = a > 0
    intra = np.zeros(n_communities)
    inter = np.zeros(n_communities)
    for c in range(n_communities):
        for i in range(n):
            if not member[i, c]:
                continue
            for j in range(n):
                if A[i, j] == 0:
                    continue
                if member[j, c]:
                    intra[c] += 0.5 * (a[i, c] + a[j, c]) / 2.0
                others = member[j].copy()
                others[c] = False
                if others.any():
                    inter[c] += (a[i, c] + 1.0 - a[j, c]) / 2.0
    return intra, inter


def brute_quality(intra, inter, m):
    return sum(a / m - ((2 * a + b) / (2 * m)) ** 2 for a, b in zip(intra, inter))


def brute_overlapping_modularity(g, cover):
    intra, inter = brute_fuzzy_masses(dense(g), cover.memberships, cover.n_communities)
    return brute_quality(intra, inter, g.edge_count)
