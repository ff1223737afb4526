"""Overlapping covers, SLPA detection and cover/partition files."""
from __future__ import annotations

import hashlib
import io
import os
import random
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import ConsistencyError, CoverageError, ParameterError, ParseError
from .graph import Graph
from .validation import check_graph, check_is_fitted

COVER_FORMAT = "omvit-cover v1"
PARTITION_FORMAT = "omvit-partition v1"


@dataclass(frozen=True, eq=False)
class Cover:
    """Overlapping community assignment.

    ``memberships[v]`` is the sorted tuple of community ids of node ``v``.
    Belonging coefficients are uniform, ``1 / len(memberships[v])``.
    """

    memberships: tuple
    n_communities: int

    def __post_init__(self):
        mem = tuple(tuple(sorted(set(int(c) for c in m))) for m in self.memberships)
        object.__setattr__(self, "memberships", mem)
        k = int(self.n_communities)
        used = np.zeros(k, dtype=bool)
        for v, m in enumerate(mem):
            if not m:
                raise CoverageError(f"node {v} belongs to no community")
            if m[0] < 0 or m[-1] >= k:
                raise ConsistencyError(f"node {v} references community outside [0, {k})")
            used[list(m)] = True
        if not used.all():
            raise ConsistencyError(f"community {int(np.flatnonzero(~used)[0])} is empty")

    def __eq__(self, other):
        if not isinstance(other, Cover):
            return NotImplemented
        return self.n_communities == other.n_communities and self.memberships == other.memberships

    def __hash__(self):
        return hash((self.memberships, self.n_communities))

    @property
    def node_count(self) -> int:
        return len(self.memberships)

    def __len__(self) -> int:
        return len(self.memberships)

    @cached_property
    def communities(self) -> tuple:
        members: list[list[int]] = [[] for _ in range(self.n_communities)]
        for v, m in enumerate(self.memberships):
            for c in m:
                members[c].append(v)
        return tuple(tuple(c) for c in members)

    @cached_property
    def belonging(self) -> tuple:
        return tuple({c: 1.0 / len(m) for c in m} for m in self.memberships)

    @property
    def is_crisp(self) -> bool:
        return all(len(m) == 1 for m in self.memberships)

    def coefficient(self, v: int, c: int) -> float:
        m = self.memberships[v]
        return 1.0 / len(m) if c in m else 0.0

    def canonical(self) -> "Cover":
        """Relabel communities by (size descending, smallest member)."""
        order = sorted(range(self.n_communities), key=lambda c: (-len(self.communities[c]), self.communities[c][0]))
        remap = {old: new for new, old in enumerate(order)}
        return type(self)(tuple(tuple(remap[c] for c in m) for m in self.memberships), self.n_communities)

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for m in self.memberships:
            h.update((",".join(map(str, m)) + "\n").encode())
        return h.hexdigest()[:16]


class Partition(Cover):
    """Crisp cover: every node has exactly one community."""

    def __post_init__(self):
        super().__post_init__()
        for v, m in enumerate(self.memberships):
            if len(m) != 1:
                raise ConsistencyError(f"node {v} has {len(m)} communities in a partition")

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Build from one community label per node; labels are densified in sorted order."""
        labels = list(labels)
        uniq = {c: i for i, c in enumerate(sorted(set(labels)))}
        return cls(tuple((uniq[c],) for c in labels), len(uniq))

    @cached_property
    def labels(self) -> np.ndarray:
        return np.array([m[0] for m in self.memberships], dtype=np.int64)


@dataclass(frozen=True)
class CoverStats:
    community_count: int
    overlap_fraction: float
    avg_memberships: float


def belonging_coefficients(memberships: Sequence[Iterable[int]]) -> Cover:
    """Cover with uniform coefficients ``1/O_v`` from per-node community lists.

    Community ids may be arbitrary hashables; they are densified in sorted
    order when they are not already ``0..K-1``.
    """
    rows = [list(m) for m in memberships]
    for v, m in enumerate(rows):
        if not m:
            raise CoverageError(f"node {v} belongs to no community")
    ids = sorted({c for m in rows for c in m})
    remap = {c: i for i, c in enumerate(ids)}
    return Cover(tuple(tuple(remap[c] for c in m) for m in rows), len(ids))


def as_partition(p, n_nodes: int | None = None) -> Partition:
    if isinstance(p, Partition):
        part = p
    elif isinstance(p, Cover):
        if not p.is_crisp:
            raise ConsistencyError("cover has overlapping nodes; collapse it to a partition first")
        part = Partition(p.memberships, p.n_communities)
    else:
        part = Partition.from_labels(p)
    if n_nodes is not None and part.node_count != n_nodes:
        raise ConsistencyError(f"partition has {part.node_count} nodes, graph has {n_nodes}")
    return part


def cover_stats(cover: Cover) -> CoverStats:
    counts = np.fromiter((len(m) for m in cover.memberships), dtype=np.int64)
    n = counts.size
    return CoverStats(
        community_count=cover.n_communities,
        overlap_fraction=float(np.count_nonzero(counts >= 2)) / n,
        avg_memberships=float(counts.sum()) / n,
    )


def collapse_to_partition(cover: Cover) -> Partition:
    """Keep, per node, the community with the largest coefficient.

    Uniform coefficients make every membership of a node tie, so the rule
    reduces to the smallest community id. Emptied communities are dropped
    and the survivors renumbered in their original order.
    """
    best = [min(m, key=lambda c: (-cover.coefficient(v, c), c)) for v, m in enumerate(cover.memberships)]
    keep = sorted(set(best))
    remap = {c: i for i, c in enumerate(keep)}
    return Partition(tuple((remap[c],) for c in best), len(keep))


def _remove_nested(sets: list[frozenset]) -> list[frozenset]:
    out: list[frozenset] = []
    # kept communities by member; a strict superset of s must hold min(s)
    holding: dict[int, list[frozenset]] = {}
    for s in sorted(set(sets), key=lambda s: (-len(s), min(s))):
        if any(s < t for t in holding.get(min(s), ())):
            continue
        out.append(s)
        for v in s:
            holding.setdefault(v, []).append(s)
    return out


def slpa_detect(
    g: Graph,
    n_iter: int = 100,
    threshold: float = 0.01,
    seed: int = 0,
    remove_nested: bool = True,
) -> Cover:
    """Speaker-listener label propagation.

    Every node starts with its own label in memory. In each of ``n_iter``
    sweeps the nodes are visited in a freshly shuffled order; each neighbor
    speaks one label drawn from its memory in proportion to frequency, and the
    listener stores the most frequent label heard (ties drawn uniformly).
    Labels whose share of a node's memory is at least ``threshold`` become
    memberships. With ``remove_nested`` communities strictly contained in
    another are discarded.
    """
    if not isinstance(n_iter, (int, np.integer)) or n_iter < 1:
        raise ParameterError(f"n_iter must be a positive integer, got {n_iter!r}")
    if not 0.0 < threshold < 1.0:
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold!r}")
    n = g.node_count
    if n == 0:
        raise ParameterError("cannot detect communities on an empty graph")
    rng = random.Random(int(seed))
    # list-valued memory: a uniform pick is a frequency-proportional pick
    memory = [[v] for v in range(n)]
    order = list(range(n))
    adjacency = g.adjacency
    pick = rng.choice
    for _ in range(n_iter):
        rng.shuffle(order)
        for v in order:
            nbrs = adjacency[v]
            if not nbrs:
                continue
            heard: dict = {}
            for u in nbrs:
                lab = pick(memory[u])
                heard[lab] = heard.get(lab, 0) + 1
            top = max(heard.values())
            tied = [lab for lab, c in heard.items() if c == top]
            if len(tied) > 1:
                tied.sort()
                memory[v].append(pick(tied))
            else:
                memory[v].append(tied[0])

    kept: list[list[int]] = []
    for v in range(n):
        freq = Counter(memory[v])
        total = len(memory[v])
        labs = sorted(lab for lab, c in freq.items() if c / total >= threshold)
        if not labs:
            labs = [min(freq, key=lambda lab: (-freq[lab], lab))]
        kept.append(labs)

    groups: dict[int, set] = {}
    for v, labs in enumerate(kept):
        for lab in labs:
            groups.setdefault(lab, set()).add(v)
    sets = [frozenset(s) for s in groups.values()]
    sets = _remove_nested(sets) if remove_nested else sorted(set(sets), key=lambda s: (-len(s), min(s)))

    memberships: list[list[int]] = [[] for _ in range(n)]
    for cid, s in enumerate(sets):
        for v in s:
            memberships[v].append(cid)
    return Cover(tuple(tuple(m) for m in memberships), len(sets)).canonical()


class SLPA(BaseEstimator):
    """Estimator wrapper around :func:`slpa_detect`.

    Parameters
    ----------
    n_iter : int, default=100
        Number of listening sweeps.
    threshold : float, default=0.01
        Minimum label share kept as a membership.
    random_state : int, default=0
    remove_nested : bool, default=True

    Attributes
    ----------
    cover_ : Cover
    n_communities_ : int
    """

    def __init__(self, n_iter=100, threshold=0.01, random_state=0, remove_nested=True):
        self.n_iter = n_iter
        self.threshold = threshold
        self.random_state = random_state
        self.remove_nested = remove_nested

    def fit(self, G, y=None):
        g = check_graph(G)
        self.cover_ = slpa_detect(g, self.n_iter, self.threshold, self.random_state, self.remove_nested)
        self.n_communities_ = self.cover_.n_communities
        self.graph_fingerprint_ = g.fingerprint
        return self

    def fit_predict(self, G, y=None) -> Cover:
        return self.fit(G).cover_

    def partition(self) -> Partition:
        check_is_fitted(self, "cover_")
        return collapse_to_partition(self.cover_)


# -- file format -----------------------------------------------------------


def dumps_cover(cover: Cover, graph: Graph | None = None, partition: bool = False) -> str:
    if graph is not None and graph.node_count != cover.node_count:
        raise ConsistencyError(f"cover has {cover.node_count} nodes, graph has {graph.node_count}")
    labels = graph.labels if graph is not None else range(cover.node_count)
    fmt = PARTITION_FORMAT if partition else COVER_FORMAT
    out = io.StringIO()
    out.write(f"# {fmt} nodes={cover.node_count} communities={cover.n_communities}\n")
    for lab, m in zip(labels, cover.memberships):
        out.write(f"{lab}\t{','.join(map(str, m))}\n")
    return out.getvalue()


def save_cover(cover: Cover, dest, graph: Graph | None = None) -> None:
    text = dumps_cover(cover, graph, partition=isinstance(cover, Partition))
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif isinstance(dest, io.TextIOBase):
        dest.write(text)
    else:
        dest.write(text.encode("utf-8"))


def save_partition(partition: Partition, dest, graph: Graph | None = None) -> None:
    save_cover(as_partition(partition), dest, graph)


def _read_text(source) -> tuple[str, str | None]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read().decode("utf-8"), os.fspath(source)
    if isinstance(source, bytes):
        return source.decode("utf-8"), None
    data = source.read()
    return (data.decode("utf-8") if isinstance(data, bytes) else data), None


def load_cover(source, graph: Graph | None = None) -> Cover:
    """Read a cover file.

    Lines are ``label<TAB>c1,c2,...``; community ids are integers and are
    densified in increasing order. With ``graph`` given, rows are aligned to
    the graph's dense ids: unknown labels raise :class:`ConsistencyError`,
    graph nodes without a row raise :class:`CoverageError`.
    """
    text, path = _read_text(source)
    rows: dict = {}
    order: list = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith(("#", "%")):
            continue
        parts = s.split("\t") if "\t" in s else s.split(None, 1)
        lab = parts[0].strip()
        spec = parts[1].strip() if len(parts) > 1 else ""
        if not spec:
            raise CoverageError(f"{path or '<cover>'}:{lineno}: node {lab!r} lists no community")
        try:
            comms = [int(t) for t in spec.replace(" ", "").split(",") if t]
        except ValueError:
            raise ParseError(f"community ids must be integers: {spec!r}", line=lineno, path=path) from None
        if lab in rows:
            raise ParseError(f"node {lab!r} listed twice", line=lineno, path=path)
        rows[lab] = comms
        order.append(lab)

    if graph is None:
        member_rows = [rows[lab] for lab in order]
    else:
        for lab in order:
            if lab not in graph.index:
                raise ConsistencyError(f"cover assigns node {lab!r} which is absent from the graph")
        missing = [lab for lab in graph.labels if lab not in rows]
        if missing:
            raise CoverageError(f"{len(missing)} graph node(s) missing from cover, e.g. {missing[0]!r}")
        member_rows = [rows[lab] for lab in graph.labels]
    if not member_rows:
        raise CoverageError("cover file lists no nodes")
    return belonging_coefficients(member_rows)


def load_partition(source, graph: Graph | None = None) -> Partition:
    return as_partition(load_cover(source, graph))
