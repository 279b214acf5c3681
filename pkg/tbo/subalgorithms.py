"""Region-local search engines: local search, global-best PSO, roulette GA.

Each engine searches one region of one objective and reports a
:class:`SearchResult`. They share a population state (:class:`Swarm`) and a
driver (:func:`run_subalgorithm`); the engines differ only in the step that
turns one generation into the next, so a new metaheuristic is a new step
function and an entry in ``STEPS``.

Rules every step follows:

- Moves that leave the region are clamped to its faces, never rejected, so the
  population size is fixed.
- Positions move continuously. What gets evaluated is the position snapped to
  the objective's grid, restricted to the region; that snapped point is what
  ``best_point`` reports.
- The best-so-far only changes on strict improvement, so the trace is
  non-increasing and a longer run is the shorter one plus more generations.

``GRID`` is not a metaheuristic: it costs every grid node inside the region.
It exists to have an engine whose answer is known exactly.
"""

import logging
from dataclasses import asdict, dataclass, replace
from enum import Enum

import numpy as np

from . import config
from .benchmarks import evaluate_many
from .core import (
    ConfigError,
    DomainError,
    GeometryError,
    NumericError,
    as_generator,
    draw_uniform,
    grid_axes,
)

logger = logging.getLogger(__name__)


class SubAlgorithmKind(str, Enum):
    LOCAL_SEARCH = "local_search"
    PSO = "pso"
    GA = "ga"
    GRID = "grid"


def subalgorithm_kind(value):
    try:
        return SubAlgorithmKind(value)
    except ValueError:
        raise ConfigError(
            "Unknown sub-algorithm {!r}. Choose from: {}".format(
                value, ", ".join(k.value for k in SubAlgorithmKind)
            )
        )


@dataclass(frozen=True)
class SubAlgorithmConfig:
    kind: SubAlgorithmKind = SubAlgorithmKind.GA
    n_particles: int = config.DefaultParticles
    n_iterations: int = config.DefaultSubIterations

    ls_radius: float = config.LocalSearchRadius
    ls_patience: int = config.LocalSearchPatience

    pso_inertia: float = config.PsoInertia
    pso_cognitive: float = config.PsoCognitive
    pso_social: float = config.PsoSocial
    pso_velocity_clamp: float = config.PsoVelocityClamp

    ga_crossover_rate: float = config.GaCrossoverRate
    ga_mutation_rate: float = config.GaMutationRate
    ga_mutation_scale: float = config.GaMutationScale
    ga_elites: int = config.GaElites
    ga_fitness_epsilon: float = config.GaFitnessEpsilon

    # Hard cap on evaluations, initial population included. None is no cap.
    max_evaluations: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", subalgorithm_kind(self.kind))
        for name in ("n_particles", "n_iterations", "ls_patience"):
            if int(getattr(self, name)) < 1:
                raise ConfigError("{} must be at least 1, got {}".format(name, getattr(self, name)))
        if self.ga_elites < 0:
            raise ConfigError("ga_elites must be non-negative, got {}".format(self.ga_elites))
        for name in (
            "ls_radius",
            "pso_inertia",
            "pso_cognitive",
            "pso_social",
            "pso_velocity_clamp",
            "ga_mutation_scale",
        ):
            if not getattr(self, name) >= 0:
                raise ConfigError("{} must be non-negative, got {}".format(name, getattr(self, name)))
        for name in ("ga_crossover_rate", "ga_mutation_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError("{} must be within [0, 1], got {}".format(name, getattr(self, name)))
        if not self.ga_fitness_epsilon > 0:
            raise ConfigError(
                "ga_fitness_epsilon must be positive, got {}".format(self.ga_fitness_epsilon)
            )
        if self.max_evaluations is not None and int(self.max_evaluations) < 1:
            raise ConfigError(
                "max_evaluations must be at least 1, got {}".format(self.max_evaluations)
            )

    def sized(self, n_particles, n_iterations):
        return replace(self, n_particles=int(n_particles), n_iterations=int(n_iterations))

    def as_dict(self):
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


@dataclass(frozen=True)
class SearchResult:
    best_point: np.ndarray
    best_cost: float
    evaluations: int
    trace: tuple

    def as_dict(self):
        return {
            "best_point": np.asarray(self.best_point).tolist(),
            "best_cost": float(self.best_cost),
            "evaluations": int(self.evaluations),
            "trace": [float(c) for c in self.trace],
        }


class Swarm:
    """Population state shared by the step functions. Mutated in place."""

    def __init__(self, objective, region, generator, n, budget=None):
        self.objective = objective
        self.region = region
        self.generator = generator
        self.budget = budget
        self.evaluations = 0
        self.best_point = None
        self.best_cost = np.inf

        self.positions = draw_uniform(region, generator, n)
        self.costs = self.evaluate(self.positions)
        self.velocities = np.zeros_like(self.positions)
        self.personal_best = self.positions.copy()
        self.personal_cost = self.costs.copy()
        self.stale = np.zeros(n, dtype=int)

    @property
    def size(self):
        return len(self.positions)

    @property
    def remaining(self):
        if self.budget is None:
            return np.inf
        return self.budget - self.evaluations

    def evaluate(self, points):
        snapped, costs = evaluate_many(self.objective, points, within=self.region)
        self.evaluations += len(points)
        i = int(np.argmin(costs))
        if costs[i] < self.best_cost:
            self.best_cost = float(costs[i])
            self.best_point = snapped[i].copy()
        return costs

    def clamp(self, points):
        return np.clip(points, self.region.lower, self.region.upper)


def run_local_search_step(swarm, cfg):
    """Every climber tries one uniform step and keeps it only if it improves.

    A climber that has failed ``ls_patience`` times in a row restarts at a
    random point in the region. A zero radius freezes the climbers.
    """
    radius = cfg.ls_radius * swarm.region.sizes
    steps = swarm.generator.uniform(-1.0, 1.0, swarm.positions.shape) * radius
    candidates = swarm.clamp(swarm.positions + steps)
    costs = swarm.evaluate(candidates)

    improved = costs < swarm.costs
    swarm.positions[improved] = candidates[improved]
    swarm.costs[improved] = costs[improved]
    swarm.stale[improved] = 0
    swarm.stale[~improved] += 1

    if cfg.ls_radius <= 0:
        return
    restart = np.flatnonzero(swarm.stale >= cfg.ls_patience)
    if np.isfinite(swarm.remaining):
        restart = restart[: int(swarm.remaining)]
    if restart.size:
        fresh = draw_uniform(swarm.region, swarm.generator, restart.size)
        swarm.positions[restart] = fresh
        swarm.costs[restart] = swarm.evaluate(fresh)
        swarm.stale[restart] = 0


def run_pso_step(swarm, cfg):
    """One global-best PSO generation, velocities starting from rest."""
    x = swarm.positions
    leader = swarm.personal_best[int(np.argmin(swarm.personal_cost))]
    r1 = swarm.generator.random(x.shape)
    r2 = swarm.generator.random(x.shape)
    v = (
        cfg.pso_inertia * swarm.velocities
        + cfg.pso_cognitive * r1 * (swarm.personal_best - x)
        + cfg.pso_social * r2 * (leader - x)
    )
    limit = cfg.pso_velocity_clamp * swarm.region.sizes
    swarm.velocities = np.clip(v, -limit, limit)
    swarm.positions = swarm.clamp(x + swarm.velocities)
    swarm.costs = swarm.evaluate(swarm.positions)

    better = swarm.costs < swarm.personal_cost
    swarm.personal_best[better] = swarm.positions[better]
    swarm.personal_cost[better] = swarm.costs[better]


def roulette(generator, costs, epsilon, n):
    """``n`` indices drawn with probability proportional to ``max - cost + eps``."""
    fitness = costs.max() - costs + epsilon
    total = fitness.sum()
    if not np.isfinite(total) or total <= 0:
        raise NumericError("Cannot build a selection wheel from costs {}".format(costs.tolist()))
    wheel = np.cumsum(fitness / total)
    picks = np.searchsorted(wheel, generator.random(n), side="right")
    return np.minimum(picks, len(costs) - 1)


def _ga_elites(cfg, n):
    # A population of one still has to breed.
    return min(cfg.ga_elites, n - 1)


def run_ga_step(swarm, cfg):
    """One generation: elites survive, the rest are bred from roulette parents.

    Crossover is arithmetic, ``a + lam * (b - a)``, so identical parents give
    back exactly the parent. Mutation adds Gaussian noise per gene.
    """
    n = swarm.size
    elites = _ga_elites(cfg, n)
    n_children = n - elites
    order = np.argsort(swarm.costs, kind="stable")

    mothers = roulette(swarm.generator, swarm.costs, cfg.ga_fitness_epsilon, n_children)
    fathers = roulette(swarm.generator, swarm.costs, cfg.ga_fitness_epsilon, n_children)
    a = swarm.positions[mothers]
    b = swarm.positions[fathers]
    cross = swarm.generator.random(n_children) < cfg.ga_crossover_rate
    lam = swarm.generator.random((n_children, 1))
    children = np.where(cross[:, np.newaxis], a + lam * (b - a), a)

    mutate = swarm.generator.random(children.shape) < cfg.ga_mutation_rate
    noise = swarm.generator.normal(size=children.shape) * (
        cfg.ga_mutation_scale * swarm.region.sizes
    )
    children = swarm.clamp(np.where(mutate, children + noise, children))
    child_costs = swarm.evaluate(children)

    keep = order[:elites]
    swarm.positions = np.concatenate([swarm.positions[keep], children])
    swarm.costs = np.concatenate([swarm.costs[keep], child_costs])


STEPS = {
    SubAlgorithmKind.LOCAL_SEARCH: run_local_search_step,
    SubAlgorithmKind.PSO: run_pso_step,
    SubAlgorithmKind.GA: run_ga_step,
}


def evaluations_per_iteration(cfg, n_particles=None):
    """Evaluations one generation costs, not counting local-search restarts."""
    n = cfg.n_particles if n_particles is None else n_particles
    if cfg.kind is SubAlgorithmKind.GA:
        return n - _ga_elites(cfg, n)
    return n


def iterations_for_budget(cfg, budget):
    """Generations that fit in ``budget`` evaluations after the initial population."""
    per_iteration = evaluations_per_iteration(cfg)
    if budget <= cfg.n_particles or per_iteration == 0:
        return 1
    return max(1, int((budget - cfg.n_particles) // per_iteration))


def _grid_search(cfg, objective, region):
    axes = grid_axes(objective, region)
    n_nodes = int(np.prod([len(a) for a in axes]))
    if n_nodes > config.GridMaxNodes:
        raise ConfigError(
            "Region holds {:,} grid nodes; the grid engine enumerates at most {:,}".format(
                n_nodes, config.GridMaxNodes
            )
        )
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, region.dim)
    if cfg.max_evaluations is not None:
        nodes = nodes[: int(cfg.max_evaluations)]

    best_point, best_cost = None, np.inf
    trace = []
    for batch in np.array_split(nodes, cfg.n_iterations + 1):
        if len(batch):
            snapped, costs = evaluate_many(objective, batch, within=region)
            i = int(np.argmin(costs))
            if costs[i] < best_cost:
                best_point, best_cost = snapped[i].copy(), float(costs[i])
        trace.append(best_cost)
    return SearchResult(best_point, best_cost, len(nodes), tuple(trace))


def run_subalgorithm(cfg, objective, region, rng):
    """Search ``region`` of ``objective`` with the engine ``cfg`` names.

    ``rng`` is an :class:`~tbo.core.RngStream` (or a numpy Generator).
    The trace holds the best cost after the initial population and after
    each generation. A run stops early, with a shorter trace, when the next
    generation would not fit in ``max_evaluations``.
    """
    if np.any(region.sizes <= 0):
        raise GeometryError("Cannot search a degenerate region {}".format(region.bounds))
    if region.dim != objective.dimension:
        raise GeometryError(
            "Region is {}-dimensional but {} is {}-dimensional".format(
                region.dim, objective.id, objective.dimension
            )
        )
    if not (objective.domain.contains(region.lower) and objective.domain.contains(region.upper)):
        raise DomainError(
            "Region {} is not inside the domain of {}".format(region.bounds, objective.id)
        )

    if cfg.kind is SubAlgorithmKind.GRID:
        return _grid_search(cfg, objective, region)

    budget = None if cfg.max_evaluations is None else int(cfg.max_evaluations)
    n = cfg.n_particles if budget is None else min(cfg.n_particles, budget)
    swarm = Swarm(objective, region, as_generator(rng), n, budget)
    step = STEPS[cfg.kind]
    per_iteration = evaluations_per_iteration(cfg, n)

    trace = [swarm.best_cost]
    for _ in range(cfg.n_iterations):
        if swarm.remaining < per_iteration:
            break
        step(swarm, cfg)
        trace.append(swarm.best_cost)

    logger.debug(
        "%s in %s: best %.6g after %d evaluations",
        cfg.kind.value,
        region.bounds,
        swarm.best_cost,
        swarm.evaluations,
    )
    return SearchResult(swarm.best_point, swarm.best_cost, swarm.evaluations, tuple(trace))
