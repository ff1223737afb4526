"""Input validation helpers shared by the estimators and functions."""
from __future__ import annotations

import math

from sklearn.utils.validation import check_is_fitted as _sk_check_is_fitted

from .exceptions import ConsistencyError, EmptyGraphError, ParameterError


def check_graph(G, allow_empty: bool = False):
    """Coerce ``G`` to a :class:`~omvit.graph.Graph`.

    Accepts a Graph, a networkx graph, or an iterable of label pairs.
    """
    from .graph import Graph

    if isinstance(G, Graph):
        g = G
    elif hasattr(G, "edges") and hasattr(G, "nodes"):
        if G.is_directed() or G.is_multigraph():
            raise ParameterError("only simple undirected graphs are supported")
        g = Graph.from_networkx(G)
    else:
        try:
            g = Graph.from_edges(G)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"cannot interpret {type(G).__name__} as a graph") from exc
    if not allow_empty and g.node_count == 0:
        raise EmptyGraphError("graph has no nodes")
    return g


def check_cover(cover, g):
    """Return ``cover`` as a Cover sized to ``g``."""
    from .community import Cover, belonging_coefficients

    if not isinstance(cover, Cover):
        cover = belonging_coefficients(cover)
    if cover.node_count != g.node_count:
        raise ConsistencyError(f"cover has {cover.node_count} nodes, graph has {g.node_count}")
    return cover


def check_partition(p, g):
    from .community import as_partition

    return as_partition(p, g.node_count)


def check_probability(x, name: str, low_open: bool = False):
    x = float(x)
    if math.isnan(x) or x > 1.0 or x < 0.0 or (low_open and x == 0.0):
        bounds = "(0, 1]" if low_open else "[0, 1]"
        raise ParameterError(f"{name} must lie in {bounds}, got {x!r}")
    return x


def check_fraction(f, name: str = "f"):
    """Fractions of the node set are in ``(0, 1]``."""
    return check_probability(f, name, low_open=True)


def check_positive_int(x, name: str):
    if isinstance(x, bool) or int(x) != x or int(x) < 1:
        raise ParameterError(f"{name} must be a positive integer, got {x!r}")
    return int(x)


def check_is_fitted(estimator, attributes=None):
    _sk_check_is_fitted(estimator, attributes)
