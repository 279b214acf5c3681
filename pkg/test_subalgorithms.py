"""Tests for the region-local search engines."""

import threading

import numpy as np
import pytest

from tbo.benchmarks import make_benchmark
from tbo.core import ConfigError, Objective, Region, RngStream
from tbo.subalgorithms import (
    SubAlgorithmConfig,
    SubAlgorithmKind,
    Swarm,
    iterations_for_budget,
    roulette,
    run_ga_step,
    run_pso_step,
    run_subalgorithm,
)

ENGINES = [SubAlgorithmKind.LOCAL_SEARCH, SubAlgorithmKind.PSO, SubAlgorithmKind.GA]


class Recorder:
    """A vectorised objective that remembers every point it was asked about."""

    def __init__(self, func):
        self.func = func
        self.seen = []
        self.lock = threading.Lock()

    def __call__(self, x):
        with self.lock:
            self.seen.append(np.array(x, copy=True))
        return self.func(x)


def constant(value, region):
    return Objective(
        "constant", region.dim, region, func=lambda x: np.full(len(x), float(value))
    )


@pytest.mark.parametrize("kind", ENGINES)
def test_constant_landscape(kind):
    region = Region(((-3, 3), (0, 1)))
    result = run_subalgorithm(
        SubAlgorithmConfig(kind=kind, n_particles=4, n_iterations=5),
        constant(7, region),
        region,
        RngStream(0),
    )
    assert result.best_cost == 7
    assert result.trace == (7.0,) * 6


@pytest.mark.parametrize("kind", ENGINES)
def test_a_region_away_from_the_basin(kind):
    sphere = make_benchmark("sphere", 1)
    region = Region(((2, 3),))
    result = run_subalgorithm(
        SubAlgorithmConfig(kind=kind, n_particles=5, n_iterations=10), sphere, region, RngStream(1)
    )
    assert region.contains(result.best_point)
    assert result.best_cost >= 4 - 1e-9


def test_pso_finds_the_bottom_of_a_small_bowl():
    sphere = make_benchmark("sphere", 1)
    region = Region(((-1, 1),))
    result = run_subalgorithm(
        SubAlgorithmConfig(kind="pso", n_particles=10, n_iterations=50), sphere, region, RngStream(3)
    )
    # The step-0.1 grid of [-1, 1] bottoms out at 0.
    assert result.best_cost <= 0.01


@pytest.mark.parametrize("kind", ENGINES)
@pytest.mark.parametrize("seed", range(5))
def test_traces_never_get_worse(kind, seed):
    griewank = make_benchmark("griewank", 2)
    region = Region(((-40, 10), (5, 60)))
    result = run_subalgorithm(
        SubAlgorithmConfig(kind=kind, n_particles=6, n_iterations=15), griewank, region, RngStream(seed)
    )
    assert len(result.trace) == 16
    assert all(b <= a for a, b in zip(result.trace, result.trace[1:]))
    assert result.best_cost == result.trace[-1]
    assert region.contains(result.best_point)


@pytest.mark.parametrize("kind", ENGINES + [SubAlgorithmKind.GRID])
def test_every_evaluated_point_is_in_the_region(kind):
    sphere = make_benchmark("sphere", 2)
    recorder = Recorder(sphere.func)
    objective = Objective("recorded", 2, sphere.domain, func=recorder, grid_step=0.1)
    region = Region(((98.03, 100.0), (-0.04, 0.37)))
    cfg = SubAlgorithmConfig(kind=kind, n_particles=8, n_iterations=20, ls_radius=0.9)
    result = run_subalgorithm(cfg, objective, region, RngStream(4))
    seen = np.concatenate(recorder.seen)
    assert len(seen) == result.evaluations
    assert region.contains(seen)


@pytest.mark.parametrize("kind", ENGINES)
def test_same_seed_same_result(kind):
    schwefel = make_benchmark("schwefel", 2)
    cfg = SubAlgorithmConfig(kind=kind, n_particles=5, n_iterations=12)
    a = run_subalgorithm(cfg, schwefel, schwefel.domain, RngStream(9, "x"))
    b = run_subalgorithm(cfg, schwefel, schwefel.domain, RngStream(9, "x"))
    assert a.as_dict() == b.as_dict()


@pytest.mark.parametrize("kind", ENGINES)
def test_more_generations_extend_the_same_trace(kind):
    schaffer = make_benchmark("schaffer", 2)
    short = run_subalgorithm(
        SubAlgorithmConfig(kind=kind, n_particles=5, n_iterations=10), schaffer, schaffer.domain, RngStream(2)
    )
    long = run_subalgorithm(
        SubAlgorithmConfig(kind=kind, n_particles=5, n_iterations=20), schaffer, schaffer.domain, RngStream(2)
    )
    assert long.trace[: len(short.trace)] == short.trace
    assert long.best_cost <= short.best_cost


def test_frozen_pso_does_not_move():
    sphere = make_benchmark("sphere", 2)
    cfg = SubAlgorithmConfig(
        kind="pso", n_particles=6, n_iterations=10, pso_inertia=0, pso_cognitive=0, pso_social=0
    )
    swarm = Swarm(sphere, sphere.domain, RngStream(0).generator(), 6)
    start, best = swarm.positions.copy(), swarm.best_cost
    for _ in range(10):
        run_pso_step(swarm, cfg)
    np.testing.assert_array_equal(swarm.positions, start)
    assert swarm.best_cost == best


def test_a_uniform_ga_population_is_a_fixed_point():
    sphere = make_benchmark("sphere", 2)
    cfg = SubAlgorithmConfig(kind="ga", n_particles=6, ga_mutation_rate=0)
    swarm = Swarm(sphere, sphere.domain, RngStream(0).generator(), 6)
    swarm.positions[:] = swarm.positions[0]
    swarm.costs[:] = swarm.costs[0]
    start = swarm.positions.copy()
    for _ in range(5):
        run_ga_step(swarm, cfg)
    np.testing.assert_array_equal(swarm.positions, start)


def test_local_search_with_zero_radius_stands_still():
    schwefel = make_benchmark("schwefel", 2)
    result = run_subalgorithm(
        SubAlgorithmConfig(kind="local_search", n_particles=4, n_iterations=10, ls_radius=0),
        schwefel,
        schwefel.domain,
        RngStream(5),
    )
    assert len(set(result.trace[1:])) == 1


def test_roulette_favours_cheap_individuals():
    generator = np.random.default_rng(0)
    picks = roulette(generator, np.array([0.0, 10.0]), 1e-12, 1000)
    # Fitness is max - cost: 10 for the first, ~0 for the second.
    assert np.all(picks == 0)


def test_roulette_on_a_flat_population_is_uniform():
    generator = np.random.default_rng(0)
    picks = roulette(generator, np.full(4, 3.0), 1e-12, 40_000)
    counts = np.bincount(picks, minlength=4)
    assert np.all(np.abs(counts - 10_000) < 500)


@pytest.mark.parametrize("kind", ENGINES)
def test_the_evaluation_budget_is_a_hard_cap(kind):
    sphere = make_benchmark("sphere", 2)
    cfg = SubAlgorithmConfig(kind=kind, n_particles=10, n_iterations=1000, max_evaluations=137)
    result = run_subalgorithm(cfg, sphere, sphere.domain, RngStream(0))
    assert result.evaluations <= 137
    assert len(result.trace) < 1001


def test_budgets_become_generations():
    cfg = SubAlgorithmConfig(kind="pso", n_particles=10)
    assert iterations_for_budget(cfg, 210) == 20
    ga = SubAlgorithmConfig(kind="ga", n_particles=10, ga_elites=1)
    assert iterations_for_budget(ga, 190) == 20


def test_grid_engine_finds_the_grid_optimum():
    sphere = make_benchmark("sphere", 1)
    cfg = SubAlgorithmConfig(kind="grid", n_iterations=3)
    result = run_subalgorithm(cfg, sphere, sphere.domain, RngStream(0))
    assert result.evaluations == 2001
    assert result.best_cost == 0.0
    assert len(result.trace) == 4
    assert all(b <= a for a, b in zip(result.trace, result.trace[1:]))


@pytest.mark.parametrize(
    "fields",
    [
        {"n_particles": 0},
        {"n_iterations": 0},
        {"ga_mutation_rate": 1.5},
        {"ga_fitness_epsilon": 0},
        {"max_evaluations": 0},
        {"kind": "annealing"},
    ],
)
def test_invalid_configs_are_rejected(fields):
    with pytest.raises(ConfigError):
        SubAlgorithmConfig(**fields)
