"""Discrete-time SIR spreading and outbreak-size comparisons.

Every run draws from its own generator, keyed by ``(seed, *stream, run)``
through :class:`numpy.random.SeedSequence`. Results therefore depend only on
the key, never on execution order or worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import ParameterError, ThresholdUndefinedError, UndefinedBaselineError
from .graph import Graph, degree_scores
from .ranking import Ranking, normalize_strategy, rank, seed_count
from .scores import ScoreVector
from .validation import check_fraction, check_graph, check_is_fitted, check_positive_int, check_probability

DEFAULT_FGRID = "0.01:0.30:0.01"
THRESHOLD_FACTOR = 1.5


@dataclass(frozen=True)
class SirParams:
    infection_prob: float
    recovery_prob: float = 1.0
    runs: int = 100
    seed: int = 0

    def __post_init__(self):
        check_probability(self.infection_prob, "infection_prob")
        check_probability(self.recovery_prob, "recovery_prob", low_open=True)
        check_positive_int(self.runs, "runs")
        if int(self.seed) != self.seed or self.seed < 0 or self.seed >= 2**64:
            raise ParameterError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")


@dataclass(frozen=True, eq=False)
class SirOutcome:
    outbreak_sizes: np.ndarray
    mean_outbreak: float

    def __eq__(self, other):
        if not isinstance(other, SirOutcome):
            return NotImplemented
        return (
            np.array_equal(self.outbreak_sizes, other.outbreak_sizes)
            and self.mean_outbreak == other.mean_outbreak
        )


def run_generator(seed: int, stream=(), run_index: int = 0) -> np.random.Generator:
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(s) for s in stream), int(run_index)]
    return np.random.default_rng(np.random.SeedSequence(key))


def _check_seeds(g: Graph, seeds) -> np.ndarray:
    seeds = np.unique(np.asarray(seeds, dtype=np.int64).ravel())
    if seeds.size == 0:
        raise ParameterError("seed set is empty")
    if seeds[0] < 0 or seeds[-1] >= g.node_count:
        raise ParameterError(f"seed ids must lie in [0, {g.node_count})")
    return seeds


def _gather_neighbors(indptr, indices, nodes):
    starts = indptr[nodes]
    lens = indptr[nodes + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(starts - np.cumsum(lens) + lens, lens)
    return indices[offsets + np.arange(total)]


def _simulate(g: Graph, seeds: np.ndarray, lam: float, gam: float, rng: np.random.Generator) -> int:
    indptr, indices = g.csr
    # 0 susceptible, 1 infected, 2 recovered
    state = np.zeros(g.node_count, dtype=np.int8)
    state[seeds] = 1
    infected = seeds
    recovered = 0
    while infected.size:
        targets = _gather_neighbors(indptr, indices, infected)
        targets = targets[state[targets] == 0]
        if targets.size and lam > 0.0:
            hit = rng.random(targets.size) < lam
            new = np.unique(targets[hit])
        else:
            new = np.empty(0, dtype=np.int64)
        # recovery follows the infection round of the same step
        rec = rng.random(infected.size) < gam
        state[infected[rec]] = 2
        recovered += int(rec.sum())
        state[new] = 1
        infected = np.union1d(infected[~rec], new)
    return recovered


def sir_run(g, seeds, params: SirParams, run_index: int = 0, stream=()) -> int:
    """One synchronous SIR realisation; returns the final recovered count.

    Each step every infected node tries each susceptible neighbor with
    probability ``infection_prob`` (new infections act from the next step),
    then every node infected at the start of the step recovers with
    probability ``recovery_prob``.
    """
    g = check_graph(g)
    seeds = _check_seeds(g, seeds)
    rng = run_generator(params.seed, stream, run_index)
    return _simulate(g, seeds, params.infection_prob, params.recovery_prob, rng)


def sir_mean(g, seeds, params: SirParams, stream=()) -> SirOutcome:
    g = check_graph(g)
    seeds = _check_seeds(g, seeds)
    sizes = np.array(
        [
            _simulate(g, seeds, params.infection_prob, params.recovery_prob, run_generator(params.seed, stream, r))
            for r in range(params.runs)
        ],
        dtype=np.int64,
    )
    return SirOutcome(sizes, float(sizes.mean()))


def epidemic_threshold(g) -> float:
    """Heterogeneous mean-field threshold ``<k> / (<k^2> - <k>)``."""
    g = check_graph(g)
    k = g.degrees.astype(np.float64)
    k1 = k.mean()
    k2 = (k * k).mean()
    if not k2 > k1:
        raise ThresholdUndefinedError("epidemic threshold needs <k^2> > <k>")
    return float(k1 / (k2 - k1))


def default_infection_prob(g, factor: float = THRESHOLD_FACTOR) -> float:
    return min(1.0, factor * epidemic_threshold(g))


def relative_outbreak_difference(r_c: float, r_b: float) -> float:
    if not r_b > 0:
        raise UndefinedBaselineError(f"baseline outbreak must be positive, got {r_b!r}")
    return (r_c - r_b) / r_b


def parse_fgrid(spec: str) -> list[float]:
    """Parse ``START:STOP:STEP`` (inclusive) or a comma list into fractions."""
    spec = spec.strip()
    if ":" in spec:
        try:
            start, stop, step = (float(t) for t in spec.split(":"))
        except ValueError:
            raise ParameterError(f"bad f-grid {spec!r}; expected START:STOP:STEP") from None
        if step <= 0 or stop < start:
            raise ParameterError(f"bad f-grid {spec!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [round(start + i * step, 12) for i in range(count)]
    else:
        try:
            grid = [float(t) for t in spec.split(",") if t.strip()]
        except ValueError:
            raise ParameterError(f"bad f-grid {spec!r}") from None
    if not grid:
        raise ParameterError("f-grid is empty")
    for f in grid:
        check_fraction(f, "f0")
    return grid


@dataclass
class SweepRow:
    measure: str
    strategy: str
    f0: float
    R_mean: float
    R_baseline: float
    delta_R: float
    outbreak_sizes: list = field(default_factory=list, repr=False)


@dataclass
class SweepResult:
    f_grid: list
    params: dict
    rows: list
    baseline_outbreaks: list

    CSV_COLUMNS = ("measure", "strategy", "f0", "R_mean", "R_baseline", "delta_R")

    def curve(self, measure: str, strategy: str) -> np.ndarray:
        strategy = normalize_strategy(strategy)
        return np.array([r.delta_R for r in self.rows if r.measure == measure and r.strategy == strategy])

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.measure, r.strategy, repr(r.f0), repr(r.R_mean), repr(r.R_baseline), repr(r.delta_R)])
        return out.getvalue()

    def to_json(self) -> str:
        doc = {
            "params": self.params,
            "f_grid": self.f_grid,
            "baseline": [
                {"f0": f, "outbreak_sizes": sizes} for f, sizes in zip(self.f_grid, self.baseline_outbreaks)
            ],
            "rows": [asdict(r) for r in self.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _sweep_task(args):
    g, seeds, params, stream = args
    return sir_mean(g, seeds, params, stream)


def sweep(
    g,
    measures,
    baseline: ScoreVector | None,
    f_grid,
    params: SirParams,
    workers: int = 1,
) -> SweepResult:
    """Outbreak sizes and relative differences over a grid of seed fractions.

    ``measures`` is a list of ``(ScoreVector, strategy)`` pairs (a
    :class:`Ranking` may stand in for the pair). Seeds are the top
    ``ceil(f0 * N)`` nodes. Every seed set evaluated at the same ``f0`` shares
    the generator streams ``(seed, f0 index, run)``, so a measure identical to
    the baseline reproduces it exactly.
    """
    g = check_graph(g)
    f_grid = [check_fraction(f, "f0") for f in f_grid]
    if not f_grid:
        raise ParameterError("f-grid is empty")
    degrees = g.degrees
    baseline = degree_scores(g) if baseline is None else baseline
    base_rank = rank(baseline, "positive_first", degrees=degrees)

    rankings: list[Ranking] = []
    for item in measures:
        if isinstance(item, Ranking):
            rankings.append(item)
        else:
            scores, strategy = item
            rankings.append(rank(scores, strategy, degrees=degrees))

    n = g.node_count
    tasks: dict[tuple, tuple] = {}
    for fi, f in enumerate(f_grid):
        k = seed_count(f, n)
        for r in [base_rank, *rankings]:
            seeds = tuple(sorted(int(v) for v in r.order[:k]))
            tasks.setdefault((fi, seeds), (g, np.array(seeds, dtype=np.int64), params, (fi,)))

    keys = list(tasks)
    if workers > 1 and len(keys) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_task, [tasks[k] for k in keys], chunksize=1))
    else:
        outcomes = [_sweep_task(tasks[k]) for k in keys]
    results = dict(zip(keys, outcomes))

    def lookup(r, fi):
        k = seed_count(f_grid[fi], n)
        return results[(fi, tuple(sorted(int(v) for v in r.order[:k])))]

    rows = []
    baseline_outbreaks = []
    for fi, f in enumerate(f_grid):
        b = lookup(base_rank, fi)
        baseline_outbreaks.append(b.outbreak_sizes.tolist())
        for r in rankings:
            c = lookup(r, fi)
            rows.append(
                SweepRow(
                    measure=r.source_measure,
                    strategy=r.strategy,
                    f0=f,
                    R_mean=c.mean_outbreak,
                    R_baseline=b.mean_outbreak,
                    delta_R=relative_outbreak_difference(c.mean_outbreak, b.mean_outbreak),
                    outbreak_sizes=c.outbreak_sizes.tolist(),
                )
            )
    info = asdict(params)
    info["baseline"] = baseline.measure
    return SweepResult(list(f_grid), info, rows, baseline_outbreaks)


class SIREvaluator(BaseEstimator):
    """Compare seed rankings by SIR outbreak size against the degree baseline.

    ``infection_prob=None`` resolves to ``min(1, 1.5 * threshold)`` of the
    fitted graph.
    """

    def __init__(self, infection_prob=None, recovery_prob=1.0, runs=100, random_state=0,
                 f_grid=DEFAULT_FGRID, n_jobs=1):
        self.infection_prob = infection_prob
        self.recovery_prob = recovery_prob
        self.runs = runs
        self.random_state = random_state
        self.f_grid = f_grid
        self.n_jobs = n_jobs

    def fit(self, G, y=None):
        g = check_graph(G)
        self.graph_ = g
        if self.infection_prob is None:
            self.infection_prob_ = default_infection_prob(g)
        else:
            self.infection_prob_ = float(self.infection_prob)
        self.params_ = SirParams(self.infection_prob_, self.recovery_prob, self.runs, self.random_state)
        grid = self.f_grid
        self.f_grid_ = parse_fgrid(grid) if isinstance(grid, str) else [float(f) for f in grid]
        self.baseline_ = degree_scores(g)
        return self

    def outbreak(self, seeds) -> SirOutcome:
        check_is_fitted(self, "params_")
        return sir_mean(self.graph_, seeds, self.params_)

    def sweep(self, measures) -> SweepResult:
        check_is_fitted(self, "params_")
        return sweep(self.graph_, measures, self.baseline_, self.f_grid_, self.params_, workers=self.n_jobs)

    def score(self, scores, strategy="positive_first"):
        """Mean relative outbreak difference of one ranking over the grid."""
        res = self.sweep([(scores, strategy)])
        return float(np.mean([r.delta_R for r in res.rows]))
