"""Seed orderings from signed scores."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError, ParseError
from .scores import ScoreVector, format_score
from .validation import check_fraction

STRATEGIES = ("positive_first", "negative_first", "absolute")
_ALIASES = {
    "pos": "positive_first",
    "neg": "negative_first",
    "abs": "absolute",
    "positive": "positive_first",
    "negative": "negative_first",
}
RANKING_FORMAT = "omvit-ranking v1"


def normalize_strategy(strategy: str) -> str:
    s = _ALIASES.get(strategy, strategy)
    if s not in STRATEGIES:
        raise ParameterError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    return s


@dataclass(frozen=True, eq=False)
class Ranking:
    strategy: str
    order: np.ndarray
    source_measure: str

    def __len__(self) -> int:
        return self.order.size


def rank(scores: ScoreVector, strategy: str = "positive_first", degrees=None) -> Ranking:
    """Order nodes by score under one of the three strategies.

    ``positive_first`` sorts scores descending (hubs first), ``negative_first``
    ascending (bridges first), ``absolute`` by magnitude descending. Equal keys
    fall back to higher degree (when ``degrees`` is given), then smaller id.
    Undefined (nan) scores always come last.
    """
    strategy = normalize_strategy(strategy)
    values = np.asarray(scores.values if isinstance(scores, ScoreVector) else scores, dtype=np.float64)
    if values.size == 0:
        raise ParameterError("cannot rank an empty score vector")
    measure = scores.measure if isinstance(scores, ScoreVector) else "unknown"
    n = values.size
    deg = np.zeros(n) if degrees is None else np.asarray(degrees, dtype=np.float64)
    if deg.shape != (n,):
        raise ParameterError(f"degrees must have length {n}")

    undefined = np.isnan(values)
    if strategy == "positive_first":
        key = -values
    elif strategy == "negative_first":
        key = values.copy()
    else:
        key = -np.abs(values)
    key[undefined] = 0.0
    # lexsort: last key is primary
    order = np.lexsort((np.arange(n), -deg, key, undefined))
    return Ranking(strategy, order.astype(np.int64), measure)


def seed_count(f: float, n: int) -> int:
    """``ceil(f * n)``, robust to binary representation noise in ``f``."""
    f = check_fraction(f, "f")
    return max(1, min(n, math.ceil(round(f * n, 9))))


def top_fraction(r: Ranking, f: float, n: int | None = None) -> np.ndarray:
    n = len(r) if n is None else int(n)
    return r.order[: seed_count(f, n)]


def dumps_ranking(r: Ranking, scores: ScoreVector | None = None, labels=None) -> str:
    labels = labels if labels is not None else (scores.labels if scores is not None else None)
    lines = [f"# {RANKING_FORMAT} strategy={r.strategy} measure={r.source_measure}"]
    for pos, v in enumerate(r.order, start=1):
        lab = labels[v] if labels else v
        score = format_score(scores.values[v]) if scores is not None else ""
        lines.append(f"{pos}\t{lab}\t{score}")
    return "\n".join(lines) + "\n"


def loads_ranking(text: str, graph) -> Ranking:
    from .scores import parse_header

    header: dict = {}
    order = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if RANKING_FORMAT in line:
                header = parse_header(line.replace(RANKING_FORMAT, ""))
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError("expected 'rank<TAB>label<TAB>score'", line=lineno)
        order.append(graph.node_id(parts[1]))
    return Ranking(
        normalize_strategy(header.get("strategy", "positive_first")),
        np.array(order, dtype=np.int64),
        header.get("measure", "unknown"),
    )
