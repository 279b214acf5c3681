"""Tests for the tbo command line and its config files."""

import orjson
import pandas as pd
import pytest

from tbo import config, runconfig
from tbo.cli import main
from tbo.core import ConfigError

SMALL_RUN = [
    "--dim", "2",
    "--depth", "3",
    "--particles", "4",
    "--iterations", "3",
    "--repetitions", "2",
]


def run(tmp_path, name, *flags):
    out = tmp_path / name
    assert main(["run", *SMALL_RUN, *flags, "--out", str(out)]) == 0
    return out


def write(path, text):
    path.write_text(text)
    return str(path)


def test_run_writes_its_report(tmp_path):
    out = run(tmp_path, "a", "--benchmark", "griewank", "--variant", "multibranch", "--seed", "5")
    report = orjson.loads((out / "report.json").read_bytes())
    assert report["spec"]["seed"] == 5
    assert report["spec"]["benchmark"] == "griewank"
    assert report["spec"]["method"]["label"] == "multibranch-tbo+ga"
    assert len(report["costs"]) == 2

    trace = pd.read_csv(out / "trace.csv")
    assert trace["iteration"].tolist() == [1, 2, 3]
    regions = pd.read_csv(out / "regions.csv")
    assert len(regions) == 2 * 3 * 2
    assert (regions["alpha"] == 4).all()


def test_reruns_are_byte_identical(tmp_path):
    flags = ("--benchmark", "schwefel", "--sub", "pso", "--seed", "42")
    first = run(tmp_path, "first", *flags)
    second = run(tmp_path, "second", *flags)
    for name in ("report.json", "trace.csv", "regions.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_bare_runs_stay_within_their_budget(tmp_path):
    out = run(
        tmp_path, "bare", "--method", "bare", "--sub", "pso", "--particles", "10", "--budget", "210"
    )
    report = orjson.loads((out / "report.json").read_bytes())
    assert report["spec"]["method"]["label"] == "pso"
    assert all(e <= 210 for e in report["evaluations"])
    assert len(pd.read_csv(out / "regions.csv")) == 0


def test_output_goes_to_the_default_directory(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "OUTPUT_DIR", str(tmp_path / "default"))
    assert main(["run", *SMALL_RUN]) == 0
    assert (tmp_path / "default" / "report.json").exists()


@pytest.mark.parametrize(
    "flags, depth",
    [
        (["--variant", "binary", "--dim", "2", "--epsilon", "0.25"], 2),
        (["--variant", "multibranch", "--dim", "3", "--epsilon", str(2**-9)], 8),
        (["--variant", "binary", "--dim", "3", "--epsilon", str(2**-9)], 24),
    ],
)
def test_depth(flags, depth, capsys):
    assert main(["depth", *flags]) == 0
    assert "depth = {}".format(depth) in capsys.readouterr().out


def test_depth_rejects_a_large_epsilon(capsys):
    assert main(["depth", "--epsilon", "0.7"]) == 3
    assert "epsilon" in capsys.readouterr().err


def test_bad_flag_values_are_config_errors(tmp_path, capsys):
    assert main(["run", "--sub", "annealing", "--out", str(tmp_path)]) == 2
    assert "sub.kind" in capsys.readouterr().err


def test_broken_json_is_located(tmp_path, capsys):
    path = write(tmp_path / "run.json", '{\n  "dim": 2,\n  "seed": ,\n}\n')
    assert main(["run", "--config", path]) == 2
    assert capsys.readouterr().err.startswith("{}:3:".format(path))


def test_unknown_keys_are_rejected(tmp_path, capsys):
    path = write(tmp_path / "run.json", '{\n  "dim": 2,\n  "tree": {\n    "depht": 4\n  }\n}\n')
    assert main(["run", "--config", path]) == 2
    err = capsys.readouterr().err
    assert err.startswith("{}:4:".format(path))
    assert "tree.depht" in err


def test_flags_win_over_the_file_and_the_file_over_defaults(tmp_path):
    path = write(tmp_path / "run.json", '{"seed": 3, "tree": {"depth": 2, "variant": "adaptive"}}')
    settings = runconfig.load("run", path, {"seed": 9, "tree.depth": None})
    assert settings.seed == 9
    assert settings.tree.depth == 2
    assert settings.tree.variant == "adaptive"
    assert settings.repetitions == config.DefaultRepetitions


def test_flags_alone_are_validated():
    with pytest.raises(ConfigError, match="dim"):
        runconfig.load("run", None, {"dim": 0})


def test_missing_config_files_are_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        runconfig.load("run", str(tmp_path / "nope.json"))


def test_run_file_builds_the_experiment(tmp_path):
    path = write(
        tmp_path / "run.json",
        orjson.dumps(
            {
                "benchmark": "schaffer",
                "method": "tbo",
                "tree": {"variant": "binary", "orientation": "random", "p": 0.3, "depth": 4},
                "sub": {"kind": "local_search", "particles": 3, "max_evaluations": 500},
                "repetitions": 7,
            }
        ).decode(),
    )
    spec = runconfig.load("run", path).to_spec()
    cfg = spec.method.config
    assert spec.benchmark.value == "schaffer" and spec.repetitions == 7
    assert cfg.variant.p == 0.3 and cfg.depth == 4
    assert cfg.sub.n_particles == 3 and cfg.sub.max_evaluations == 500


@pytest.mark.parametrize("kind", ["run", "compare"])
def test_schema(capsys, kind):
    assert main(["schema", kind]) == 0
    document = orjson.loads(capsys.readouterr().out)
    assert document["properties"]["seed"]["maximum"] == 2**64 - 1
    if kind == "compare":
        assert "preset" in document["properties"]


def test_unexpected_failures_exit_3(monkeypatch, capsys):
    def broken(*args):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr("tbo.cli.required_depth", broken)
    assert main(["depth", "--variant", "binary", "--dim", "2", "--epsilon", "0.25"]) == 3
    assert "RuntimeError: disk on fire" in capsys.readouterr().err


def test_compare_writes_the_table(tmp_path, capsys):
    path = write(
        tmp_path / "grid.json",
        orjson.dumps(
            {
                "benchmarks": ["sphere", "griewank"],
                "particles": [4],
                "tree": {"depth": 2},
                "sub": {"iterations": 2},
                "repetitions": 1,
            }
        ).decode(),
    )
    out = tmp_path / "grid"
    assert main(["compare", "--config", path, "--out", str(out)]) == 0
    table = pd.read_csv(out / "comparison.csv")
    assert len(table) == 2 * 2 + 2
    assert table["benchmark"].tolist()[-2:] == ["total", "total"]
    document = orjson.loads((out / "comparison.json").read_bytes())
    assert len(document["cells"]) == 4
    assert "multibranch-tbo+ga" in capsys.readouterr().out


def test_an_empty_comparison_is_a_config_error(tmp_path, capsys):
    path = write(tmp_path / "grid.json", '{"benchmarks": []}')
    assert main(["compare", "--config", path, "--out", str(tmp_path)]) == 2
    assert "empty" in capsys.readouterr().err
