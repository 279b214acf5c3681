"""Tests for seeded experiments, error normalisation and comparison tables."""

import numpy as np
import pytest

from tbo.benchmarks import make_benchmark
from tbo.core import ConfigError, NumericError, Objective, Region
from tbo.harness import (
    COMPARISON_COLUMNS,
    REGION_COLUMNS,
    TRACE_COLUMNS,
    BareMethod,
    ExperimentSpec,
    TboMethod,
    compare,
    error_percent,
    mean_trace,
    preset_specs,
    run_experiment,
    worst_cost,
)
from tbo.subalgorithms import SubAlgorithmConfig
from tbo.tree import Binary, MultiBranch, TboConfig

SMALL_GA = SubAlgorithmConfig(kind="ga", n_particles=5, n_iterations=5)


def tbo_spec(bench="griewank", repetitions=3, seed=0, depth=3, **fields):
    cfg = TboConfig(variant=MultiBranch(), depth=depth, sub=SMALL_GA)
    return ExperimentSpec(bench, 2, TboMethod(cfg), repetitions, seed, **fields)


def test_sphere_errors_are_a_share_of_its_range():
    sphere = make_benchmark("sphere", 2)
    assert worst_cost(sphere) == 20000
    assert error_percent(0.0, sphere) == 0.0
    assert error_percent(200.0, sphere) == pytest.approx(1.0)
    assert error_percent(20000.0, sphere) == 100.0


def test_errors_are_clipped_to_the_scale():
    sphere = make_benchmark("sphere", 2)
    assert error_percent(-5.0, sphere) == 0.0
    assert error_percent(1e9, sphere) == 100.0


def test_the_reference_optimum_scores_zero_everywhere():
    for bench in ("sphere", "griewank", "schaffer", "schwefel"):
        objective = make_benchmark(bench, 2)
        assert error_percent(objective.known_optimum.cost, objective) == 0.0
        assert error_percent(worst_cost(objective), objective) == 100.0


def test_errors_need_a_known_optimum():
    objective = Objective("free", 1, Region(((0, 1),)), func=lambda x: x[:, 0])
    with pytest.raises(ConfigError):
        error_percent(0.5, objective)


def test_errors_need_a_finite_cost():
    with pytest.raises(NumericError):
        error_percent(np.nan, make_benchmark("sphere", 2))


def test_mean_trace_holds_short_traces_at_their_last_value():
    assert mean_trace([[3, 2, 1], [5, 4]]) == (4.0, 3.0, 2.5)


def test_a_single_repetition():
    report = run_experiment(tbo_spec(repetitions=1))
    assert report.mean_error == report.min_error == report.max_error
    assert report.std_error == 0.0
    assert len(report.costs) == len(report.outcomes) == 1


def test_reports_are_consistent():
    report = run_experiment(tbo_spec("schwefel", repetitions=4, depth=4))
    assert report.min_error <= report.mean_error <= report.max_error
    assert all(0 <= e <= 100 for e in report.errors)
    assert len(report.trace) == len(report.error_trace) == 4
    assert all(b <= a for a, b in zip(report.trace, report.trace[1:]))
    assert report.trace[-1] == pytest.approx(report.mean_cost)
    assert report.mean_evaluations == np.mean([o.evaluations for o in report.outcomes])


def test_same_seed_same_report():
    a = run_experiment(tbo_spec("schaffer", seed=123))
    b = run_experiment(tbo_spec("schaffer", seed=123))
    assert a.as_dict() == b.as_dict()
    assert a == b


def test_different_seeds_differ():
    a = run_experiment(tbo_spec("schaffer", seed=1))
    b = run_experiment(tbo_spec("schaffer", seed=2))
    assert a.costs != b.costs


def test_workers_do_not_change_the_report():
    spec = tbo_spec("griewank", repetitions=4)
    serial = run_experiment(spec, workers=1)
    threaded = run_experiment(spec, workers=3)
    assert serial.as_dict() == threaded.as_dict()


def test_trace_frame():
    frame = run_experiment(tbo_spec(depth=3, repetitions=2)).trace_frame()
    assert list(frame.columns) == TRACE_COLUMNS
    assert frame["iteration"].tolist() == [1, 2, 3]

    bare = ExperimentSpec("griewank", 2, BareMethod(SMALL_GA), repetitions=2)
    frame = run_experiment(bare).trace_frame()
    assert frame["iteration"].tolist() == list(range(6))


def test_regions_frame_has_one_row_per_dimension_and_iteration():
    report = run_experiment(tbo_spec(depth=3, repetitions=2))
    frame = report.regions_frame()
    assert list(frame.columns) == REGION_COLUMNS
    assert len(frame) == 2 * 3 * 2
    assert (frame["lower"] < frame["upper"]).all()
    assert (frame["alpha"] == 4).all()


def test_bare_methods_respect_their_budget():
    sub = SubAlgorithmConfig(kind="pso", n_particles=10)
    method = BareMethod(sub, evaluations=210)
    assert method.budgeted().n_iterations == 20
    assert method.budgeted().max_evaluations == 210
    report = run_experiment(ExperimentSpec("sphere", 2, method, repetitions=2))
    assert all(e <= 210 for e in report.evaluations)
    assert method.label == "pso"


def test_method_labels():
    assert TboMethod(TboConfig(variant=MultiBranch(), sub=SMALL_GA)).label == "multibranch-tbo+ga"
    assert TboMethod(TboConfig(sub=SMALL_GA)).particles == 5


def test_repetitions_must_be_positive():
    with pytest.raises(ConfigError):
        tbo_spec(repetitions=0)


# --- comparisons -----------------------------------------------------------


def test_comparing_a_method_with_itself():
    spec = tbo_spec("griewank")
    table = compare([spec, spec])
    first, second = table.cells()
    assert first == second


@pytest.fixture(scope="module")
def spatial():
    return compare(preset_specs("spatial", repetitions=2, depth=2, sub_iterations=3))


def test_spatial_grid_shape(spatial):
    frame = spatial.to_frame()
    assert list(frame.columns) == COMPARISON_COLUMNS
    assert len(frame) == 16 + 4
    assert spatial.benchmarks == ["sphere", "griewank", "schaffer", "schwefel"]
    assert spatial.columns == [
        ("multibranch-tbo+ga", 5),
        ("ga", 5),
        ("multibranch-tbo+ga", 10),
        ("ga", 10),
    ]
    assert spatial.pivot().shape == (5, 4)


def test_totals_average_over_benchmarks(spatial):
    frame = spatial.to_frame()
    cells = frame[frame["benchmark"] != "total"]
    for total in spatial.totals():
        column = cells[(cells["method"] == total["method"]) & (cells["particles"] == total["particles"])]
        assert len(column) == 4
        assert total["mean_error_pct"] == pytest.approx(column["mean_error_pct"].mean())


def test_bare_cells_get_the_tbo_budget(spatial):
    for tbo, bare in zip(spatial.reports[::2], spatial.reports[1::2]):
        assert isinstance(tbo.spec.method, TboMethod)
        assert bare.spec.method.evaluations == int(round(tbo.mean_evaluations))
        assert max(bare.evaluations) <= bare.spec.method.evaluations


def test_bare_cells_get_the_largest_tbo_budget_beside_them():
    specs = [
        ExperimentSpec("sphere", 2, TboMethod(TboConfig(variant=Binary(), depth=2, sub=SMALL_GA)), 2, 0),
        ExperimentSpec("sphere", 2, TboMethod(TboConfig(variant=MultiBranch(), depth=2, sub=SMALL_GA)), 2, 0),
        ExperimentSpec("sphere", 2, BareMethod(SMALL_GA), 2, 0),
    ]
    binary, multibranch, bare = compare(specs).reports
    assert multibranch.mean_evaluations > binary.mean_evaluations
    assert bare.spec.method.evaluations == int(round(multibranch.mean_evaluations))


def test_a_single_benchmark_has_no_totals():
    table = compare([tbo_spec("sphere", repetitions=1)])
    assert table.totals() == []
    assert list(table.pivot().index) == ["sphere"]


def test_an_empty_grid_is_an_error():
    with pytest.raises(ConfigError):
        compare([])


def test_mixed_dimensions_are_an_error():
    three = ExperimentSpec("sphere", 3, BareMethod(SMALL_GA), repetitions=1)
    with pytest.raises(ConfigError):
        compare([tbo_spec("sphere", repetitions=1), three])


def test_every_benchmark_needs_the_same_methods():
    bare = ExperimentSpec("griewank", 2, BareMethod(SMALL_GA), repetitions=1)
    with pytest.raises(ConfigError):
        compare([tbo_spec("sphere", repetitions=1), tbo_spec("griewank", repetitions=1), bare])


def test_planar_preset_covers_every_variant_and_engine():
    specs = preset_specs("planar", repetitions=1)
    assert len(specs) == 4 * 2 * 3 * 4
    labels = {s.method.label for s in specs}
    assert labels == {
        "{}-tbo+{}".format(v, k) for v in ("binary", "multibranch", "adaptive") for k in ("local_search", "pso", "ga")
    } | {"local_search", "pso", "ga"}
    assert {s.dim for s in specs} == {2}


def test_unknown_presets_are_rejected():
    with pytest.raises(ConfigError):
        preset_specs("cubic")
