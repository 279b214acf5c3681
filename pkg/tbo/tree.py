"""Tree-based optimization: search the children, descend into one, repeat.

One iteration of a descent:

1. **Plan** how to cut the surviving region (:func:`plan_split`). Binary trees
   cut one dimension, alternating or at random; multi-branch trees cut every
   dimension; adaptive trees take the branching factor from a schedule.
2. **Cut** it into children (:func:`apply_split`).
3. **Search** every child with a sub-algorithm (:mod:`tbo.subalgorithms`).
   Particle and generation counts can shrink per iteration, and the particles
   can be shared out in proportion to child volume.
4. **Score** the children by their best cost (:func:`entry_probabilities`)
   and **enter** one at random, better children more likely
   (:func:`select_region`). The rest are discarded for good.

After ``depth`` iterations the descent ends; the global best is the cheapest
point any child search turned up. A descent that enters a child without the
optimum cannot recover, so whole descents can be repeated (``restarts``).

Children are numbered in Cartesian-product order over the cuts, lower
segment first: child 0 is below every cut, the last child above every cut.

Every random choice draws from its own named stream under the run's stream
(``restart/r/split/i``, ``restart/r/iter/i/region/j``,
``restart/r/enter/i``), so child searches can run on several threads without
changing a single bit of the result.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Callable, NamedTuple

import numpy as np

from . import config
from .core import (
    ConfigError,
    DomainError,
    GeometryError,
    Incumbent,
    NumericError,
    Region,
    RngStream,
    as_generator,
    region_volume,
)
from .subalgorithms import SubAlgorithmConfig, run_subalgorithm

logger = logging.getLogger(__name__)


# --- variants --------------------------------------------------------------


class Orientation(str, Enum):
    ALTERNATE = "alternate"
    RANDOM = "random"


class OddBranching(str, Enum):
    """What an adaptive tree does with a branching factor that is not 2^c."""

    SINGLE_DIMENSION = "single_dimension"
    REJECT = "reject"


@dataclass(frozen=True)
class Binary:
    orientation: Orientation = Orientation.ALTERNATE
    p: float = config.BinaryRandomP

    def __post_init__(self):
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        if not 0 < self.p < 1:
            raise ConfigError("Orientation probability must be in (0, 1), got {}".format(self.p))

    @property
    def name(self):
        return "binary"


@dataclass(frozen=True)
class MultiBranch:
    @property
    def name(self):
        return "multibranch"


class ScheduleContext(NamedTuple):
    """What an adaptive schedule can base the branching factor on."""

    iteration: int
    region: Region
    volume: float
    incumbent_cost: float | None


@dataclass(frozen=True)
class Adaptive:
    """Branching factor per iteration.

    ``schedule`` is either a sequence or a callable. Entry ``i`` of a
    sequence is the factor of iteration ``i``, and the last entry repeats. A
    callable takes a :class:`ScheduleContext` and returns the factor; that is
    how a factor driven by region size or by the incumbent is plugged in.
    """

    schedule: object = (2,)
    odd: OddBranching = OddBranching.SINGLE_DIMENSION

    def __post_init__(self):
        object.__setattr__(self, "odd", OddBranching(self.odd))
        if not callable(self.schedule):
            stages = tuple(int(a) for a in self.schedule)
            if not stages:
                raise ConfigError("An adaptive schedule needs at least one branching factor")
            for alpha in stages:
                _check_alpha(alpha)
            object.__setattr__(self, "schedule", stages)

    @property
    def name(self):
        return "adaptive"

    def alpha(self, context):
        if callable(self.schedule):
            alpha = self.schedule(context)
        else:
            alpha = self.schedule[min(context.iteration, len(self.schedule) - 1)]
        return _check_alpha(alpha)


def _check_alpha(alpha):
    if isinstance(alpha, bool) or int(alpha) != alpha or int(alpha) < 2:
        raise ConfigError("Branching factor must be an integer of at least 2, got {!r}".format(alpha))
    return int(alpha)


def staged_schedule(stages=(4, 3), then=2):
    """The schedule that starts wide and settles to binary: 4, 3, 2, 2, ..."""
    return tuple(stages) + (then,)


# --- configuration ---------------------------------------------------------


class EntryRule(str, Enum):
    PROBABILISTIC = "probabilistic"
    # Controlled experiments: always the lowest best cost, or always the child
    # holding the objective's known optimum.
    GREEDY = "greedy"
    ORACLE = "oracle"


class SplitRule(str, Enum):
    UNIFORM = "uniform"
    MIDPOINT = "midpoint"


class PolicyContext(NamedTuple):
    """What a sub-algorithm policy can base its choice on."""

    iteration: int
    region_index: int
    volume: float
    incumbent_cost: float | None


@dataclass(frozen=True)
class TboConfig:
    """Everything one TBO run needs besides the objective and the seed.

    ``particle_schedule`` and ``subiter_schedule`` are ``(delta, lower)``:
    from the second iteration on, the count drops by ``delta`` per iteration
    and never below ``lower``. ``subalgorithm_policy``, when set, picks the
    engine per child from a :class:`PolicyContext`; the counts still come
    from the schedules.
    """

    variant: object = field(default_factory=Binary)
    depth: int = config.DefaultDepth
    window: tuple = config.SplitWindow
    particle_schedule: tuple = (0, 1)
    subiter_schedule: tuple = (0, 1)
    size_proportional: bool = False
    sub: SubAlgorithmConfig = field(default_factory=SubAlgorithmConfig)
    restarts: int = config.DefaultRestarts
    entry: EntryRule = EntryRule.PROBABILISTIC
    split_rule: SplitRule = SplitRule.UNIFORM
    subalgorithm_policy: Callable | None = field(default=None, compare=False)
    region_workers: int = field(default=config.RegionWorkers, compare=False)

    def __post_init__(self):
        if not isinstance(self.variant, (Binary, MultiBranch, Adaptive)):
            raise ConfigError("Unknown TBO variant {!r}".format(self.variant))
        if int(self.depth) < 1:
            raise ConfigError("Tree depth must be at least 1, got {}".format(self.depth))
        if int(self.restarts) < 1:
            raise ConfigError("Restarts must be at least 1, got {}".format(self.restarts))
        object.__setattr__(self, "window", check_window(self.window))
        for name in ("particle_schedule", "subiter_schedule"):
            delta, lower = getattr(self, name)
            if int(delta) < 0 or int(lower) < 1:
                raise ConfigError(
                    "{} needs delta >= 0 and lower >= 1, got ({}, {})".format(name, delta, lower)
                )
            object.__setattr__(self, name, (int(delta), int(lower)))
        object.__setattr__(self, "entry", EntryRule(self.entry))
        object.__setattr__(self, "split_rule", SplitRule(self.split_rule))
        if int(self.region_workers) < 1:
            raise ConfigError("region_workers must be at least 1, got {}".format(self.region_workers))

    def as_dict(self):
        variant = {"name": self.variant.name}
        if isinstance(self.variant, Binary):
            variant.update(orientation=self.variant.orientation.value, p=self.variant.p)
        elif isinstance(self.variant, Adaptive):
            schedule = self.variant.schedule
            variant.update(
                schedule="callable" if callable(schedule) else list(schedule),
                odd=self.variant.odd.value,
            )
        return {
            "variant": variant,
            "depth": int(self.depth),
            "window": list(self.window),
            "particle_schedule": list(self.particle_schedule),
            "subiter_schedule": list(self.subiter_schedule),
            "size_proportional": bool(self.size_proportional),
            "sub": self.sub.as_dict(),
            "restarts": int(self.restarts),
            "entry": self.entry.value,
            "split_rule": self.split_rule.value,
            "subalgorithm_policy": self.subalgorithm_policy is not None,
        }


def check_window(window):
    lo, hi = (float(w) for w in window)
    if not 0 < lo < hi < 1:
        raise ConfigError("Split window must satisfy 0 < lo < hi < 1, got ({}, {})".format(lo, hi))
    return (lo, hi)


# --- splitting -------------------------------------------------------------


class Cut(NamedTuple):
    """Cut points along one dimension, ascending."""

    dim: int
    points: tuple


@dataclass(frozen=True)
class SplitPlan:
    cuts: tuple

    @property
    def dims(self):
        return tuple(c.dim for c in self.cuts)

    @property
    def points(self):
        return tuple(p for c in self.cuts for p in c.points)

    @property
    def shape(self):
        return tuple(len(c.points) + 1 for c in self.cuts)

    @property
    def alpha(self):
        return math.prod(self.shape)

    def as_dict(self):
        return {"cuts": [{"dim": c.dim, "points": list(c.points)} for c in self.cuts]}


def _cut_points(lo, hi, pieces, window, generator, split_rule):
    """``pieces - 1`` cut points in ``[lo, hi]``; one piece per nominal slot."""
    w = (hi - lo) / pieces
    points = []
    for j in range(1, pieces):
        if split_rule is SplitRule.MIDPOINT:
            points.append(lo + j * w)
            continue
        # Window over the two slots either side of nominal cut j. For two
        # pieces that is the whole interval.
        start = lo + (j - 1) * w
        points.append(generator.uniform(start + window[0] * 2 * w, start + window[1] * 2 * w))
    return tuple(sorted(points))


def plan_split(
    region,
    variant,
    iteration,
    window=config.SplitWindow,
    rng=None,
    incumbent_cost=None,
    split_rule=SplitRule.UNIFORM,
):
    """How to cut ``region`` at ``iteration``.

    Binary/alternate cycles through the dimensions; binary/random cuts
    dimension 0 with probability ``p`` and otherwise one of the rest.
    Multi-branch cuts every dimension. Adaptive with a factor of ``2^c`` cuts
    ``c`` dimensions, cycling the starting dimension with the iteration. Any
    other factor ``a``, or a ``2^c`` with ``c`` above the dimension, cuts one
    dimension into ``a`` pieces, unless the factor is odd and the
    variant is set to reject it.
    """
    window = check_window(window)
    split_rule = SplitRule(split_rule)
    generator = as_generator(rng) if rng is not None else None
    if generator is None and split_rule is SplitRule.UNIFORM:
        raise ConfigError("plan_split needs a random stream for uniform cut points")
    d = region.dim
    pieces = 2

    if isinstance(variant, Binary):
        if variant.orientation is Orientation.ALTERNATE or d == 1:
            dims = [iteration % d]
        else:
            if generator is None:
                raise ConfigError("A random orientation needs a random stream")
            r = generator.random()
            dims = [0] if r < variant.p else [1 + int(generator.integers(d - 1))]
    elif isinstance(variant, MultiBranch):
        dims = list(range(d))
    elif isinstance(variant, Adaptive):
        context = ScheduleContext(iteration, region, region_volume(region), incumbent_cost)
        alpha = variant.alpha(context)
        c = alpha.bit_length() - 1
        if alpha == 1 << c and c <= d:
            dims = [(iteration + j) % d for j in range(c)]
        elif alpha == 1 << c or variant.odd is not OddBranching.REJECT:
            # Also a power of 2 with more cuts than the region has dimensions.
            dims = [iteration % d]
            pieces = alpha
        else:
            raise ConfigError(
                "Branching factor {} is not a power of 2 and this tree rejects odd factors".format(
                    alpha
                )
            )
    else:
        raise ConfigError("Unknown TBO variant {!r}".format(variant))

    cuts = []
    for dim in dims:
        lo, hi = region.bounds[dim]
        cuts.append(Cut(dim, _cut_points(lo, hi, pieces, window, generator, split_rule)))
    return SplitPlan(tuple(cuts))


def _segments(region, cut):
    lo, hi = region.bounds[cut.dim]
    edges = (lo,) + tuple(cut.points) + (hi,)
    if any(not a < b for a, b in zip(edges, edges[1:])):
        raise GeometryError(
            "Cut points {} do not fall strictly inside [{}, {}] in ascending order".format(
                list(cut.points), lo, hi
            )
        )
    return list(zip(edges, edges[1:]))


def _check_plan(region, plan):
    dims = plan.dims
    if not dims:
        raise GeometryError("A split plan needs at least one cut")
    if len(set(dims)) != len(dims) or not all(0 <= k < region.dim for k in dims):
        raise GeometryError(
            "Cut dimensions {} are not distinct dimensions of a {}-dimensional region".format(
                list(dims), region.dim
            )
        )
    return [_segments(region, cut) for cut in plan.cuts]


def _child(region, plan, segments, index):
    bounds = list(region.bounds)
    for cut, segs, k in zip(plan.cuts, segments, index):
        bounds[cut.dim] = segs[k]
    return Region(tuple(bounds))


def apply_split(region, plan):
    """All children of ``region`` under ``plan``, in Cartesian-product order."""
    segments = _check_plan(region, plan)
    return [
        _child(region, plan, segments, index)
        for index in product(*(range(len(s)) for s in segments))
    ]


def shrink_bounds(parent, plan, chosen):
    """The ``chosen`` child of ``parent``; the others are dropped."""
    segments = _check_plan(parent, plan)
    if isinstance(chosen, bool) or not 0 <= int(chosen) < plan.alpha:
        raise GeometryError(
            "Child index {} out of range for a split into {} regions".format(chosen, plan.alpha)
        )
    index = np.unravel_index(int(chosen), plan.shape)
    return _child(parent, plan, segments, [int(k) for k in index])


# --- entry -----------------------------------------------------------------


def entry_probabilities(bests):
    """Probability of entering each child, from the children's best costs.

    All positive: ``1 - B_i / sum B``. All negative: ``B_i / sum B``.
    Otherwise the costs are shifted to ``B_i + |min B| + 1`` and treated as
    all positive. Two children always get probabilities summing to exactly 1.
    """
    b = np.asarray(bests, dtype=float)
    if b.ndim != 1 or len(b) < 2:
        raise NumericError("Entry probabilities need at least two costs, got {}".format(b.tolist()))
    if not np.all(np.isfinite(b)):
        raise NumericError("Cannot compare non-finite costs {}".format(b.tolist()))

    if np.all(b > 0):
        p = 1.0 - b / b.sum()
    elif np.all(b < 0):
        p = b / b.sum()
    else:
        shifted = b + abs(b.min()) + 1.0
        p = 1.0 - shifted / shifted.sum()
    if not np.all(np.isfinite(p)):
        raise NumericError("Costs {} overflow the probability formula".format(b.tolist()))
    p = np.clip(p, 0.0, 1.0)

    if len(p) == 2:
        # 1 - q is exact for q >= 0.5, so derive the smaller from the larger.
        big = int(np.argmax(p))
        p[1 - big] = 1.0 - p[big]
    return p


def select_region(probs, rng):
    """Index of the child to enter.

    Two children: one uniform ``r``, child 0 iff ``r < P_0``. More: walk the
    children by descending probability (ties by index), drawing a fresh
    uniform for each and entering the first whose draw falls below its
    probability; if every child refuses, walk again.
    """
    p = np.asarray(probs, dtype=float)
    generator = as_generator(rng)
    if len(p) == 2:
        return 0 if generator.random() < p[0] else 1
    if not np.any(p > 0):
        raise NumericError("No child has a positive entry probability: {}".format(p.tolist()))
    order = np.argsort(-p, kind="stable")
    while True:
        for i in order:
            if generator.random() < p[i]:
                return int(i)


# --- schedules -------------------------------------------------------------


def _reduce(prev, delta, lower):
    if int(delta) < 0 or int(lower) < 1:
        raise ConfigError("Schedules need delta >= 0 and lower >= 1, got ({}, {})".format(delta, lower))
    return max(int(prev) - int(delta), int(lower))


def schedule_particles(prev, delta, lower):
    """Particles for the next iteration: ``max(prev - delta, lower)``."""
    return _reduce(prev, delta, lower)


def schedule_subiters(prev, delta, lower):
    """Sub-algorithm generations for the next iteration: ``max(prev - delta, lower)``."""
    return _reduce(prev, delta, lower)


def allocate_particles_by_size(total, sizes):
    """Share ``total`` particles in proportion to ``sizes``.

    Every child gets at least one; the remainder goes by largest fractional
    share (ties to the lower index), and the entries always sum to ``total``.
    """
    sizes = np.asarray(sizes, dtype=float)
    total = int(total)
    if len(sizes) == 0 or not np.all(sizes > 0):
        raise GeometryError("Child sizes must be positive, got {}".format(sizes.tolist()))
    if total < len(sizes):
        raise ConfigError(
            "Cannot give {} children at least one particle each from {}".format(len(sizes), total)
        )
    share = total * sizes / sizes.sum()
    counts = np.maximum(np.floor(share), 1).astype(int)
    remainder = share - np.floor(share)

    by_largest = np.argsort(-remainder, kind="stable")
    i = 0
    while counts.sum() < total:
        counts[by_largest[i % len(counts)]] += 1
        i += 1
    by_smallest = np.argsort(remainder, kind="stable")
    i = 0
    while counts.sum() > total:
        k = by_smallest[i % len(counts)]
        if counts[k] > 1:
            counts[k] -= 1
        i += 1
    return [int(c) for c in counts]


def update_global_best(gb, iteration_best):
    """The cheaper of the two; a tie keeps the incumbent."""
    if gb is None or iteration_best.cost < gb.cost:
        return iteration_best
    return gb


# --- theory ----------------------------------------------------------------


class DepthRequirement(NamedTuple):
    k: float
    depth: int


class ComplexityClass(NamedTuple):
    notation: str
    iterations: int


def required_depth(variant, d, epsilon):
    """Depth at which the surviving region is small enough, by tree shape.

    Multi-branch: ``k = -(1 + log2(epsilon))``. Binary: ``d`` times that,
    one dimension being cut per iteration instead of all of them.
    """
    name = variant if isinstance(variant, str) else getattr(variant, "name", None)
    if name not in ("binary", "multibranch"):
        raise ConfigError("Required depth is defined for binary and multibranch trees, got {!r}".format(variant))
    if isinstance(d, bool) or int(d) != d or int(d) < 1:
        raise ConfigError("Dimension must be a positive integer, got {!r}".format(d))
    if not 0 < epsilon < 0.5:
        raise DomainError("epsilon must be in (0, 0.5), got {}".format(epsilon))
    k = -(1.0 + math.log2(epsilon))
    if name == "binary":
        k = int(d) * k
    return DepthRequirement(k, math.ceil(k - 1e-9))


def time_complexity_class(depth, restarts=1):
    """Outer iterations a run executes: linear in the depth."""
    if int(depth) < 1 or int(restarts) < 1:
        raise ConfigError("Depth and restarts must be at least 1, got {} and {}".format(depth, restarts))
    return ComplexityClass("O(k)", int(depth) * int(restarts))


# --- runs ------------------------------------------------------------------


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    region: Region
    plan: SplitPlan
    results: tuple
    probabilities: tuple
    chosen: int
    survivor: Region
    global_best: Incumbent
    particles: tuple
    sub_iterations: int
    engines: tuple

    @property
    def bests(self):
        return tuple(r.best_cost for r in self.results)

    def as_dict(self):
        return {
            "iteration": self.iteration,
            "region": self.region.as_dict(),
            "plan": self.plan.as_dict(),
            "bests": [float(b) for b in self.bests],
            "probabilities": [float(p) for p in self.probabilities],
            "chosen": self.chosen,
            "survivor": self.survivor.as_dict(),
            "global_best": self.global_best.as_dict(),
            "evaluations": [r.evaluations for r in self.results],
            "particles": list(self.particles),
            "sub_iterations": self.sub_iterations,
            "engines": list(self.engines),
        }


@dataclass(frozen=True)
class RunRecord:
    restart: int
    iterations: tuple
    global_best: Incumbent
    final_region: Region
    evaluations: int

    @property
    def trace(self):
        return tuple(r.global_best.cost for r in self.iterations)

    def as_dict(self):
        return {
            "restart": self.restart,
            "global_best": self.global_best.as_dict(),
            "final_region": self.final_region.as_dict(),
            "evaluations": self.evaluations,
            "iterations": [r.as_dict() for r in self.iterations],
        }


@dataclass(frozen=True)
class TboResult:
    global_best: Incumbent
    runs: tuple
    evaluations: int
    final_region: Region

    @property
    def iterations(self):
        return sum(len(run.iterations) for run in self.runs)

    @property
    def trace(self):
        """Best cost after every iteration of every restart, best-so-far."""
        costs = [c for run in self.runs for c in run.trace]
        return tuple(np.minimum.accumulate(costs).tolist())

    def as_dict(self):
        return {
            "global_best": self.global_best.as_dict(),
            "evaluations": self.evaluations,
            "final_region": self.final_region.as_dict(),
            "iterations": self.iterations,
            "runs": [run.as_dict() for run in self.runs],
        }


def _region_config(cfg, iteration, index, child, n_particles, n_iterations, gb):
    sub = cfg.sub
    if cfg.subalgorithm_policy is not None:
        context = PolicyContext(
            iteration, index, region_volume(child), None if gb is None else gb.cost
        )
        sub = cfg.subalgorithm_policy(context)
        if not isinstance(sub, SubAlgorithmConfig):
            raise ConfigError(
                "Sub-algorithm policy returned {!r}, not a SubAlgorithmConfig".format(sub)
            )
    return sub.sized(n_particles, n_iterations)


def _enter(cfg, objective, children, probabilities, bests, stream):
    if cfg.entry is EntryRule.PROBABILISTIC:
        return select_region(probabilities, stream)
    if cfg.entry is EntryRule.GREEDY:
        return int(np.argmin(bests))
    if objective.known_optimum is None:
        raise ConfigError("Oracle entry needs an objective with a known optimum")
    for index, child in enumerate(children):
        if child.contains(objective.known_optimum.point):
            return index
    raise DomainError(
        "No child contains the known optimum {}".format(
            np.asarray(objective.known_optimum.point).tolist()
        )
    )


def _search_children(cfg, objective, children, configs, stream, iteration):
    def search(j):
        return run_subalgorithm(
            configs[j], objective, children[j], stream.child("iter/{}/region/{}".format(iteration, j))
        )

    if cfg.region_workers <= 1 or len(children) == 1:
        return [search(j) for j in range(len(children))]
    with ThreadPoolExecutor(max_workers=cfg.region_workers) as pool:
        return list(pool.map(search, range(len(children))))


def descend(cfg, objective, stream, restart=0):
    """One descent from the whole domain down ``cfg.depth`` levels."""
    region = objective.domain
    gb = None
    n_particles = cfg.sub.n_particles
    n_iterations = cfg.sub.n_iterations
    evaluations = 0
    records = []

    for iteration in range(cfg.depth):
        if iteration:
            n_particles = schedule_particles(n_particles, *cfg.particle_schedule)
            n_iterations = schedule_subiters(n_iterations, *cfg.subiter_schedule)

        plan = plan_split(
            region,
            cfg.variant,
            iteration,
            cfg.window,
            stream.child("split/{}".format(iteration)),
            incumbent_cost=None if gb is None else gb.cost,
            split_rule=cfg.split_rule,
        )
        children = apply_split(region, plan)
        if cfg.size_proportional:
            counts = allocate_particles_by_size(
                n_particles * len(children), [region_volume(c) for c in children]
            )
        else:
            counts = [n_particles] * len(children)
        configs = [
            _region_config(cfg, iteration, j, child, counts[j], n_iterations, gb)
            for j, child in enumerate(children)
        ]
        results = _search_children(cfg, objective, children, configs, stream, iteration)
        evaluations += sum(r.evaluations for r in results)

        bests = [r.best_cost for r in results]
        best = int(np.argmin(bests))
        gb = update_global_best(gb, Incumbent(results[best].best_point, results[best].best_cost))
        probabilities = entry_probabilities(bests)
        chosen = _enter(
            cfg, objective, children, probabilities, bests, stream.child("enter/{}".format(iteration))
        )

        records.append(
            IterationRecord(
                iteration=iteration,
                region=region,
                plan=plan,
                results=tuple(results),
                probabilities=tuple(float(p) for p in probabilities),
                chosen=chosen,
                survivor=children[chosen],
                global_best=gb,
                particles=tuple(counts),
                sub_iterations=n_iterations,
                engines=tuple(c.kind.value for c in configs),
            )
        )
        logger.debug(
            "restart %d iteration %d: %d children, bests %s, entered %d, global best %.6g",
            restart,
            iteration,
            len(children),
            ["{:.6g}".format(b) for b in bests],
            chosen,
            gb.cost,
        )
        region = children[chosen]

    return RunRecord(restart, tuple(records), gb, region, evaluations)


def run_tbo(cfg, objective, rng):
    """Run ``cfg.restarts`` independent descents and keep the best answer.

    ``rng`` is the run's :class:`~tbo.core.RngStream`; restart ``r`` draws
    from its child ``restart/r``.
    """
    if not isinstance(rng, RngStream):
        raise ConfigError("run_tbo needs an RngStream, got {!r}".format(type(rng).__name__))
    runs = []
    gb = None
    best_run = None
    for restart in range(cfg.restarts):
        run = descend(cfg, objective, rng.child("restart/{}".format(restart)), restart)
        runs.append(run)
        if update_global_best(gb, run.global_best) is not gb:
            gb = run.global_best
            best_run = run
    return TboResult(
        global_best=gb,
        runs=tuple(runs),
        evaluations=sum(run.evaluations for run in runs),
        final_region=best_run.final_region,
    )
