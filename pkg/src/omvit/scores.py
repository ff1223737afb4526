"""Per-node score vectors and their text format."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConsistencyError, ParseError

SCORE_FORMAT = "omvit-scores v1"


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Signed per-node centrality values in dense-id order.

    Undefined entries (node removal leaves no edges) are ``nan``.
    """

    values: np.ndarray
    measure: str
    labels: tuple = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("score values must be one-dimensional")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.labels and len(self.labels) != values.size:
            raise ConsistencyError(f"{len(self.labels)} labels for {values.size} scores")
        if np.isinf(values).any():
            raise ValueError("scores must be finite or nan")

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @property
    def undefined(self) -> np.ndarray:
        return np.isnan(self.values)


def format_score(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def dumps_scores(scores: ScoreVector, graph_hash: str = "-", cover_hash: str = "-") -> str:
    lines = [f"# {SCORE_FORMAT} measure={scores.measure} graph={graph_hash} cover={cover_hash}"]
    labels = scores.labels or tuple(range(len(scores)))
    for lab, x in zip(labels, scores.values):
        lines.append(f"{lab}\t{format_score(x)}")
    return "\n".join(lines) + "\n"


def parse_header(line: str) -> dict:
    fields = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            fields[k] = v
    return fields


def loads_scores(text: str, graph=None, path=None) -> tuple[ScoreVector, dict]:
    """Parse a score file; returns the vector and its header fields.

    With ``graph`` given, rows are matched to the graph's labels and every
    node must appear exactly once.
    """
    header: dict = {}
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if SCORE_FORMAT in line:
                header = parse_header(line.replace(SCORE_FORMAT, ""))
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'label<TAB>score'", line=lineno, path=path)
        try:
            rows.append((parts[0], float(parts[1])))
        except ValueError:
            raise ParseError(f"bad score {parts[1]!r}", line=lineno, path=path) from None
    measure = header.get("measure", "unknown")
    if graph is None:
        labels, vals = zip(*rows) if rows else ((), ())
        return ScoreVector(np.array(vals, dtype=np.float64), measure, tuple(labels)), header
    if header.get("graph") not in (None, "-", graph.fingerprint):
        raise ConsistencyError(
            f"score file was computed on graph {header['graph']}, not {graph.fingerprint}"
        )
    values = np.full(graph.node_count, np.nan)
    seen = np.zeros(graph.node_count, dtype=bool)
    for lab, x in rows:
        i = graph.index.get(lab)
        if i is None:
            raise ConsistencyError(f"score file names node {lab!r} absent from the graph")
        if seen[i]:
            raise ConsistencyError(f"node {lab!r} scored twice")
        seen[i] = True
        values[i] = x
    if not seen.all():
        missing = graph.labels[int(np.flatnonzero(~seen)[0])]
        raise ConsistencyError(f"score file has no entry for node {missing!r}")
    return ScoreVector(values, measure, graph.labels), header
