"""Command-line interface: ``omvit {stats,detect,score,sweep}``.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric/undefined error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile

from . import __version__
from .community import (
    collapse_to_partition,
    cover_stats,
    dumps_cover,
    load_cover,
    load_partition,
    slpa_detect,
)
from .exceptions import DataError, NumericError, OmvitError, ParameterError
from .graph import degree_scores, largest_connected_component, load_edge_list, topology_stats
from .modularity import fuzzy_tallies, newman_modularity, overlapping_modularity
from .ranking import STRATEGIES, normalize_strategy
from .scores import dumps_scores, loads_scores
from .sir import DEFAULT_FGRID, SirParams, default_infection_prob, parse_fgrid, sweep
from .vitality import modularity_vitality, overlapping_modularity_vitality, vitality_by_recompute

logger = logging.getLogger("omvit")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_SEED = 0
VERIFY_FRACTION = 0.01
VERIFY_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_outputs(out_dir, files: dict[str, str]) -> list[str]:
    """Write every file to a temp name first, then rename them all into place."""
    os.makedirs(out_dir, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, os.path.join(out_dir, name)))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]


def _manifest(args, command, params, inputs, graph, outputs) -> str:
    doc = {
        "tool": "omvit",
        "version": __version__,
        "command": command,
        "argv": list(args.argv),
        "params": params,
        "inputs": {p: _file_sha256(p) for p in inputs},
        "graph": {"fingerprint": graph.fingerprint, "nodes": graph.node_count, "edges": graph.edge_count},
        "outputs": sorted(outputs),
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _load_graph(args):
    diag: dict = {}
    g = load_edge_list(args.edges, diagnostics=diag)
    if diag.get("self_loops") or diag.get("duplicate_edges"):
        print(
            f"note: dropped {diag['self_loops']} self-loop(s), merged {diag['duplicate_edges']} duplicate edge(s)",
            file=sys.stderr,
        )
    if args.lcc:
        g = largest_connected_component(g)
    return g


def _load_communities(args, g):
    cover = partition = None
    if getattr(args, "cover", None):
        cover = load_cover(args.cover, g)
    if getattr(args, "partition", None):
        partition = load_partition(args.partition, g)
    return cover, partition


def cmd_stats(args) -> int:
    g = _load_graph(args)
    cover, partition = _load_communities(args, g)
    t = topology_stats(g)
    report = {"N": t.n, "E": t.m, "avg_degree": t.avg_degree, "transitivity": t.transitivity}
    tallies = None
    if partition is None and cover is not None:
        partition = collapse_to_partition(cover)
    if partition is not None:
        report["Q"] = newman_modularity(g, partition)
    if cover is not None:
        cs = cover_stats(cover)
        report["Q_o"] = overlapping_modularity(g, cover)
        report["communities"] = cs.community_count
        report["overlap_fraction"] = cs.overlap_fraction
        report["avg_memberships"] = cs.avg_memberships
        tallies = fuzzy_tallies(g, cover).records()
    for key, val in report.items():
        print(f"{key}\t{val:.6f}" if isinstance(val, float) else f"{key}\t{val}")
    if args.out:
        doc = dict(report)
        if tallies is not None:
            doc["tallies"] = tallies
        files = {"stats.json": json.dumps(doc, indent=1, sort_keys=True) + "\n"}
        inputs = [args.edges] + [p for p in (args.cover, args.partition) if p]
        files["manifest.json"] = _manifest(args, "stats", {"lcc": args.lcc}, inputs, g, list(files))
        _write_outputs(args.out, files)
    return EXIT_OK


def cmd_detect(args) -> int:
    g = _load_graph(args)
    cover = slpa_detect(g, n_iter=args.slpa_T, threshold=args.slpa_r, seed=args.seed)
    cs = cover_stats(cover)
    print(
        f"communities\t{cs.community_count}\noverlap_fraction\t{cs.overlap_fraction:.6f}\n"
        f"avg_memberships\t{cs.avg_memberships:.6f}"
    )
    files = {"cover.tsv": dumps_cover(cover, g)}
    params = {"slpa_T": args.slpa_T, "slpa_r": args.slpa_r, "seed": args.seed, "lcc": args.lcc}
    files["manifest.json"] = _manifest(args, "detect", params, [args.edges], g, list(files))
    _write_outputs(args.out, files)
    return EXIT_OK


def cmd_score(args) -> int:
    g = _load_graph(args)
    cover, partition = _load_communities(args, g)
    measure = args.measure
    communities = None
    if measure == "degree":
        scores = degree_scores(g)
        comm_hash = "-"
    elif measure == "mv":
        if partition is None:
            if cover is None:
                raise UsageError("--measure mv needs --partition or --cover")
            if not cover.is_crisp:
                print("note: collapsing overlapping cover to its maximum-belonging partition", file=sys.stderr)
            partition = collapse_to_partition(cover)
        communities = partition
        scores = modularity_vitality(g, partition)
        comm_hash = partition.fingerprint
    else:
        communities = cover if cover is not None else partition
        if communities is None:
            raise UsageError("--measure omv needs --cover or --partition")
        scores = overlapping_modularity_vitality(g, communities)
        comm_hash = communities.fingerprint

    if args.verify and communities is not None:
        n_check = max(1, int(round(VERIFY_FRACTION * g.node_count)))
        step = max(1, g.node_count // n_check)
        nodes = list(range(0, g.node_count, step))[:n_check]
        ref = vitality_by_recompute(g, communities, overlapping=(measure == "omv"), nodes=nodes)
        for v in nodes:
            a, b = scores.values[v], ref.values[v]
            if not (abs(a - b) <= VERIFY_TOL or (a != a and b != b)):
                raise NumericError(f"incremental and recomputed vitality disagree at node {g.labels[v]!r}: {a!r} vs {b!r}")
        print(f"verified {len(nodes)} node(s) against full recomputation", file=sys.stderr)

    name = f"scores_{measure}.tsv"
    files = {name: dumps_scores(scores, g.fingerprint, comm_hash)}
    inputs = [args.edges] + [p for p in (args.cover, args.partition) if p]
    params = {"measure": measure, "lcc": args.lcc, "verify": bool(args.verify)}
    files["manifest.json"] = _manifest(args, "score", params, inputs, g, list(files))
    _write_outputs(args.out, files)
    return EXIT_OK


def cmd_sweep(args) -> int:
    g = _load_graph(args)
    strategies = [normalize_strategy(s) for s in (args.strategy or ["pos", "neg", "abs"])]
    measures = []
    for path in args.scores:
        with open(path, "rb") as fh:
            scores, _ = loads_scores(fh.read().decode("utf-8"), g, path=path)
        for s in strategies:
            measures.append((scores, s))
    lam = args.infection if args.infection is not None else default_infection_prob(g)
    params = SirParams(lam, args.gamma, args.runs, args.seed)
    grid = parse_fgrid(args.fgrid)
    result = sweep(g, measures, degree_scores(g), grid, params, workers=args.workers)
    files = {"sweep.csv": result.to_csv(), "sweep.json": result.to_json()}
    effective = {
        "lambda": lam,
        "gamma": args.gamma,
        "runs": args.runs,
        "seed": args.seed,
        "fgrid": args.fgrid,
        "f_values": grid,
        "strategies": strategies,
        "lcc": args.lcc,
        "workers": args.workers,
    }
    files["manifest.json"] = _manifest(args, "sweep", effective, [args.edges, *args.scores], g, list(files))
    _write_outputs(args.out, files)
    print(f"lambda\t{lam:.6f}\ngamma\t{args.gamma:.6f}\nrows\t{len(result.rows)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="omvit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"omvit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out_required=True):
        p.add_argument("--edges", required=True, metavar="PATH", help="edge list")
        p.add_argument("--lcc", action="store_true", help="restrict to the largest connected component")
        p.add_argument("--out", required=out_required, metavar="DIR", help="output directory")

    p = sub.add_parser("stats", help="topology and community statistics")
    common(p, out_required=False)
    p.add_argument("--cover", metavar="PATH")
    p.add_argument("--partition", metavar="PATH")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("detect", help="SLPA overlapping community detection")
    common(p)
    p.add_argument("--slpa-T", dest="slpa_T", type=int, default=100, metavar="N")
    p.add_argument("--slpa-r", dest="slpa_r", type=float, default=0.01, metavar="F")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("score", help="vitality or degree scores")
    common(p)
    p.add_argument("--cover", metavar="PATH")
    p.add_argument("--partition", metavar="PATH")
    p.add_argument("--measure", choices=("mv", "omv", "degree"), required=True)
    p.add_argument("--verify", action="store_true", help="re-check 1%% of nodes by full recomputation")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("sweep", help="SIR outbreak comparison against the degree baseline")
    common(p)
    p.add_argument("--scores", action="append", required=True, metavar="PATH")
    p.add_argument("--strategy", action="append", choices=("pos", "neg", "abs", *STRATEGIES))
    p.add_argument("--lambda", dest="infection", type=float, default=None, metavar="F",
                   help="infection probability (default: 1.5 x epidemic threshold)")
    p.add_argument("--gamma", type=float, default=1.0, metavar="F")
    p.add_argument("--runs", type=int, default=100, metavar="N")
    p.add_argument("--fgrid", default=DEFAULT_FGRID, metavar="START:STOP:STEP")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1, metavar="N")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"omvit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"omvit: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError) as exc:
        print(f"omvit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OmvitError as exc:
        print(f"omvit: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
