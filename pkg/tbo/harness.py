"""Seeded, repeated experiments and the comparison tables built from them.

An experiment runs one method (a TBO configuration, or a sub-algorithm on
the whole domain) on one benchmark, ``repetitions`` times, repetition ``i``
drawing from stream ``repetition/i`` of the master seed. The report holds
every repetition's best cost and error and the mean convergence trace.

Errors are range-normalised: ``100 * (found - optimum) / (worst - optimum)``
with the grid optimum from :mod:`tbo.benchmarks` and the worst cost
estimated once per objective by a seeded scan. That puts every benchmark on
the same 0-100 scale.

In a comparison, a bare method with no evaluation budget of its own is
given the mean evaluation count of the TBO experiment it sits next to, so
both sides spend the same number of evaluations.
"""

import logging
import threading
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np
import pandas as pd
from pathos.threading import ThreadPool

from . import config
from .benchmarks import BenchmarkId, benchmark_id, evaluate_many, make_benchmark
from .core import ConfigError, NumericError, RngStream, draw_uniform
from .subalgorithms import (
    SubAlgorithmConfig,
    SubAlgorithmKind,
    iterations_for_budget,
    run_subalgorithm,
)
from .tree import Adaptive, Binary, MultiBranch, TboConfig, run_tbo, staged_schedule

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["iteration", "mean_best_cost", "mean_error_pct"]
REGION_COLUMNS = [
    "repetition",
    "restart",
    "iteration",
    "dim",
    "lower",
    "upper",
    "chosen",
    "alpha",
    "global_best_cost",
]
COMPARISON_COLUMNS = ["benchmark", "method", "particles", "mean_error_pct"]


# --- methods and specs -----------------------------------------------------


@dataclass(frozen=True)
class TboMethod:
    config: TboConfig

    @property
    def label(self):
        return "{}-tbo+{}".format(self.config.variant.name, self.config.sub.kind.value)

    @property
    def particles(self):
        return self.config.sub.n_particles

    def as_dict(self):
        return {"name": "tbo", "label": self.label, "config": self.config.as_dict()}


@dataclass(frozen=True)
class BareMethod:
    sub: SubAlgorithmConfig
    # Evaluation budget. None inside a comparison means: match the TBO run.
    evaluations: int | None = None

    @property
    def label(self):
        return self.sub.kind.value

    @property
    def particles(self):
        return self.sub.n_particles

    def budgeted(self):
        """The sub-algorithm config with the budget turned into generations."""
        if self.evaluations is None:
            return self.sub
        budget = int(self.evaluations)
        return replace(
            self.sub,
            max_evaluations=budget,
            n_iterations=iterations_for_budget(self.sub, budget),
        )

    def as_dict(self):
        return {
            "name": "bare",
            "label": self.label,
            "evaluations": self.evaluations,
            "sub": self.budgeted().as_dict(),
        }


@dataclass(frozen=True)
class ExperimentSpec:
    benchmark: BenchmarkId
    dim: int
    method: object
    repetitions: int = config.DefaultRepetitions
    seed: int = config.DefaultSeed
    # Overrides of the benchmark's range and grid step.
    bound: float | None = None
    step: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "benchmark", benchmark_id(self.benchmark))
        if not isinstance(self.method, (TboMethod, BareMethod)):
            raise ConfigError("Unknown method {!r}".format(self.method))
        if int(self.repetitions) < 1:
            raise ConfigError("Repetitions must be at least 1, got {}".format(self.repetitions))
        RngStream(self.seed)

    def objective(self):
        return make_benchmark(self.benchmark, self.dim, bound=self.bound, step=self.step)

    @property
    def landscape(self):
        return (self.benchmark, int(self.dim), self.bound, self.step)

    def as_dict(self):
        return {
            "benchmark": self.benchmark.value,
            "dim": int(self.dim),
            "bound": self.bound,
            "step": self.step,
            "repetitions": int(self.repetitions),
            "seed": int(self.seed),
            "method": self.method.as_dict(),
        }


# --- error normalisation ---------------------------------------------------

_worst = {}
_worst_lock = threading.Lock()


def _scan_worst(objective):
    worst = -np.inf
    generator = RngStream(config.WorstCostSeed, "worst/{}".format(objective.id)).generator()
    remaining = config.WorstCostSamples
    while remaining > 0:
        n = min(config.WorstCostChunk, remaining)
        _, costs = evaluate_many(objective, draw_uniform(objective.domain, generator, n))
        worst = max(worst, float(costs.max()))
        remaining -= n
    if objective.dimension <= config.WorstCostMaxCornerDim:
        corners = np.array(list(product(*objective.domain.bounds)))
        _, costs = evaluate_many(objective, corners)
        worst = max(worst, float(costs.max()))
    logger.debug("worst cost of %s: %s", objective.key, worst)
    return worst


def worst_cost(objective):
    """Largest cost of ``objective`` seen by a fixed, seeded scan of its domain."""
    with _worst_lock:
        found = _worst.get(objective.key)
    if found is None:
        found = _scan_worst(objective)
        with _worst_lock:
            _worst.setdefault(objective.key, found)
    return found


def error_percent(found_cost, objective):
    """How far ``found_cost`` is from the optimum, as a percentage of the range."""
    if objective.known_optimum is None:
        raise ConfigError("{} has no known optimum to measure errors against".format(objective.id))
    if not np.isfinite(found_cost):
        raise NumericError("Cannot score a non-finite cost {}".format(found_cost))
    best = objective.known_optimum.cost
    span = worst_cost(objective) - best
    if span <= 0:
        return 0.0
    return float(np.clip(100.0 * (float(found_cost) - best) / span, 0.0, 100.0))


# --- experiments -----------------------------------------------------------


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    costs: tuple
    errors: tuple
    evaluations: tuple
    trace: tuple
    error_trace: tuple
    # TboResult or SearchResult per repetition.
    outcomes: tuple = field(repr=False, compare=False)

    @property
    def mean_error(self):
        return float(np.mean(self.errors))

    @property
    def std_error(self):
        return float(np.std(self.errors))

    @property
    def min_error(self):
        return float(np.min(self.errors))

    @property
    def max_error(self):
        return float(np.max(self.errors))

    @property
    def mean_cost(self):
        return float(np.mean(self.costs))

    @property
    def mean_evaluations(self):
        return float(np.mean(self.evaluations))

    def trace_frame(self):
        # A TBO trace starts after the first iteration; a bare one with the
        # initial population.
        start = 1 if isinstance(self.spec.method, TboMethod) else 0
        return pd.DataFrame(
            {
                "iteration": np.arange(start, start + len(self.trace)),
                "mean_best_cost": list(self.trace),
                "mean_error_pct": list(self.error_trace),
            },
            columns=TRACE_COLUMNS,
        )

    def regions_frame(self):
        """Surviving-region bounds, one row per repetition, iteration and dimension."""
        rows = []
        if isinstance(self.spec.method, TboMethod):
            for repetition, result in enumerate(self.outcomes):
                for run in result.runs:
                    for record in run.iterations:
                        for dim, (lo, hi) in enumerate(record.survivor.bounds):
                            rows.append(
                                (
                                    repetition,
                                    run.restart,
                                    record.iteration,
                                    dim,
                                    lo,
                                    hi,
                                    record.chosen,
                                    record.plan.alpha,
                                    float(record.global_best.cost),
                                )
                            )
        return pd.DataFrame(rows, columns=REGION_COLUMNS)

    def summary(self):
        return {
            "mean_error_pct": self.mean_error,
            "std_error_pct": self.std_error,
            "min_error_pct": self.min_error,
            "max_error_pct": self.max_error,
            "mean_best_cost": self.mean_cost,
            "mean_evaluations": self.mean_evaluations,
        }

    def as_dict(self):
        return {
            "spec": self.spec.as_dict(),
            "summary": self.summary(),
            "costs": [float(c) for c in self.costs],
            "errors_pct": [float(e) for e in self.errors],
            "evaluations": [int(e) for e in self.evaluations],
            "best_points": [
                np.asarray(_best_point(o)).tolist() for o in self.outcomes
            ],
        }


def _best_point(outcome):
    if hasattr(outcome, "global_best"):
        return outcome.global_best.point
    return outcome.best_point


def _run_repetition(spec, objective, repetition):
    stream = RngStream(spec.seed).child("repetition/{}".format(repetition))
    method = spec.method
    if isinstance(method, TboMethod):
        result = run_tbo(method.config, objective, stream)
        cost, evaluations, trace = result.global_best.cost, result.evaluations, result.trace
    else:
        result = run_subalgorithm(method.budgeted(), objective, objective.domain, stream)
        cost, evaluations, trace = result.best_cost, result.evaluations, result.trace
    logger.debug(
        "%s %s d=%d repetition %d: best %.6g in %d evaluations",
        method.label,
        spec.benchmark.value,
        spec.dim,
        repetition,
        cost,
        evaluations,
    )
    return result, float(cost), int(evaluations), trace


def mean_trace(traces):
    """Per-iteration mean of uneven traces; a short trace holds its last value."""
    frame = pd.DataFrame({i: pd.Series(t, dtype=float) for i, t in enumerate(traces)})
    return tuple(frame.ffill().mean(axis=1).tolist())


def run_experiment(spec, workers=config.MaxWorkers):
    """Run every repetition of ``spec`` and aggregate.

    Repetitions can run on a thread pool; each has its own stream, so the
    report does not depend on ``workers``.
    """
    objective = spec.objective()

    def run(repetition):
        return _run_repetition(spec, objective, repetition)

    repetitions = list(range(int(spec.repetitions)))
    if workers is None or workers <= 1:
        outcomes = [run(r) for r in repetitions]
    else:
        with ThreadPool(nodes=workers) as pool:
            outcomes = pool.map(run, repetitions)

    results, costs, evaluations, traces = zip(*outcomes)
    errors = tuple(error_percent(c, objective) for c in costs)
    trace = mean_trace(traces)
    error_trace = mean_trace([[error_percent(c, objective) for c in t] for t in traces])
    return ExperimentReport(
        spec=spec,
        costs=tuple(costs),
        errors=errors,
        evaluations=tuple(evaluations),
        trace=trace,
        error_trace=error_trace,
        outcomes=tuple(results),
    )


# --- comparisons -----------------------------------------------------------


@dataclass(frozen=True)
class ComparisonTable:
    reports: tuple

    @property
    def benchmarks(self):
        return list(dict.fromkeys(r.spec.benchmark.value for r in self.reports))

    @property
    def columns(self):
        return list(dict.fromkeys((r.spec.method.label, r.spec.method.particles) for r in self.reports))

    def cells(self):
        return [
            {
                "benchmark": r.spec.benchmark.value,
                "method": r.spec.method.label,
                "particles": int(r.spec.method.particles),
                "mean_error_pct": r.mean_error,
            }
            for r in self.reports
        ]

    def totals(self):
        """Average over benchmarks per column, when there is more than one."""
        if len(self.benchmarks) < 2:
            return []
        cells = pd.DataFrame(self.cells(), columns=COMPARISON_COLUMNS)
        grouped = cells.groupby(["method", "particles"], sort=False)["mean_error_pct"].mean()
        return [
            {"benchmark": "total", "method": method, "particles": int(particles), "mean_error_pct": float(value)}
            for (method, particles), value in grouped.items()
        ]

    def to_frame(self):
        return pd.DataFrame(self.cells() + self.totals(), columns=COMPARISON_COLUMNS)

    def pivot(self):
        """Benchmarks down, (method, particles) across."""
        frame = self.to_frame()
        table = frame.pivot(index="benchmark", columns=["method", "particles"], values="mean_error_pct")
        order = self.benchmarks + (["total"] if len(self.benchmarks) > 1 else [])
        return table.reindex(index=order, columns=pd.MultiIndex.from_tuples(self.columns))

    def as_dict(self):
        return {
            "cells": self.cells(),
            "totals": self.totals(),
            "experiments": [
                {"spec": r.spec.as_dict(), "summary": r.summary()} for r in self.reports
            ],
        }


def _check_grid(specs):
    if not specs:
        raise ConfigError("Nothing to compare: the experiment grid is empty")
    dims = sorted({int(s.dim) for s in specs})
    if len(dims) > 1:
        raise ConfigError("Compared experiments must share one dimension, got {}".format(dims))
    columns = {}
    for s in specs:
        columns.setdefault(s.landscape, set()).add((s.method.label, s.method.particles))
    shapes = {frozenset(c) for c in columns.values()}
    if len(shapes) > 1:
        raise ConfigError(
            "Every benchmark must be run with the same methods; got {}".format(
                {k[0].value: sorted(v) for k, v in columns.items()}
            )
        )


def compare(specs, workers=config.MaxWorkers):
    """Run a grid of experiments side by side.

    TBO cells run first; each bare cell without a budget then gets the mean
    evaluation count of the TBO cells on the same landscape with the same
    particle count and sub-algorithm (or, failing that, any TBO cell on that
    landscape with that particle count). Where several variants qualify, the
    largest count wins.
    """
    specs = list(specs)
    _check_grid(specs)

    reports = {}
    for i, spec in enumerate(specs):
        if isinstance(spec.method, TboMethod):
            reports[i] = run_experiment(spec, workers)

    for i, spec in enumerate(specs):
        if i in reports:
            continue
        method = spec.method
        if method.evaluations is None:
            budget = _matching_budget(spec, specs, reports)
            if budget is not None:
                spec = replace(spec, method=replace(method, evaluations=budget))
        reports[i] = run_experiment(spec, workers)

    return ComparisonTable(tuple(reports[i] for i in range(len(specs))))


def _matching_budget(bare, specs, reports):
    """The largest mean evaluation count among the TBO cells ``bare`` sits beside."""
    same_kind = []
    same_size = []
    for i, spec in enumerate(specs):
        if not isinstance(spec.method, TboMethod) or spec.landscape != bare.landscape:
            continue
        if spec.method.particles != bare.method.particles:
            continue
        same_size.append(i)
        if spec.method.config.sub.kind is bare.method.sub.kind:
            same_kind.append(i)
    matches = same_kind or same_size
    if not matches:
        return None
    return max(int(round(reports[i].mean_evaluations)) for i in matches)


# --- presets ---------------------------------------------------------------

PRESETS = ("planar", "spatial")


def preset_specs(
    name,
    repetitions=config.DefaultRepetitions,
    seed=config.DefaultSeed,
    depth=config.DefaultDepth,
    sub_iterations=config.DefaultSubIterations,
    restarts=config.DefaultRestarts,
):
    """The 2-D and 3-D comparison grids.

    ``planar``: every benchmark in 2-D on its own range, binary, multi-branch
    and adaptive TBO against the bare engine, for local search, PSO and GA.
    ``spatial``: every benchmark on [-100, 100]^3 with step 1, multi-branch
    TBO with GA against bare GA.
    Both at 5 and 10 particles.
    """
    if name == "planar":
        dim, bound, step = 2, None, None
        variants = [Binary(), MultiBranch(), Adaptive(staged_schedule())]
        kinds = [SubAlgorithmKind.LOCAL_SEARCH, SubAlgorithmKind.PSO, SubAlgorithmKind.GA]
    elif name == "spatial":
        dim, bound, step = 3, 100.0, 1.0
        variants = [MultiBranch()]
        kinds = [SubAlgorithmKind.GA]
    else:
        raise ConfigError("Unknown preset {!r}. Choose from: {}".format(name, ", ".join(PRESETS)))

    specs = []
    for bench in BenchmarkId:
        for particles in (5, 10):
            for kind in kinds:
                sub = SubAlgorithmConfig(kind=kind, n_particles=particles, n_iterations=sub_iterations)
                for variant in variants:
                    tbo = TboConfig(variant=variant, depth=depth, sub=sub, restarts=restarts)
                    specs.append(
                        ExperimentSpec(bench, dim, TboMethod(tbo), repetitions, seed, bound, step)
                    )
                specs.append(ExperimentSpec(bench, dim, BareMethod(sub), repetitions, seed, bound, step))
    return specs
