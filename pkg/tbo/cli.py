"""Run tree-based optimization experiments from the command line.

Every run is seeded, and the files it writes hold no timings, so running the
same command twice gives byte-identical output.

    # one experiment: report.json, trace.csv and regions.csv in --out
    tbo run --benchmark schwefel --dim 2 --method tbo --variant multibranch \\
        --depth 5 --sub pso --particles 5 --seed 42

    # the bare sub-algorithm, for comparison
    tbo run --benchmark sphere --dim 2 --method bare --sub ga --particles 10 --seed 7

    # a grid of experiments: comparison.csv and comparison.json
    tbo compare --preset spatial --repetitions 25
    tbo compare --config grid.json

    # how deep a tree needs to be
    tbo depth --variant binary --dim 2 --epsilon 0.25

    # the config file schema
    tbo schema run

Flags override values from --config, which override the defaults. Exit codes:
0 on success, 2 for a bad configuration, 3 when a run fails.
"""

import argparse
import logging
import os
import sys

import orjson

from . import config
from . import runconfig
from .core import TboError
from .harness import compare, run_experiment
from .tree import required_depth

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def log(message):
    print(message, flush=True)


def fail(message):
    print(message, file=sys.stderr, flush=True)


def write_json(path, document):
    with open(path, "wb") as handle:
        handle.write(orjson.dumps(document, option=JSON_OPTIONS))
        handle.write(b"\n")


def write_csv(path, frame):
    frame.to_csv(path, index=False)


def output_dir(args):
    out = args.out or config.OUTPUT_DIR
    os.makedirs(out, exist_ok=True)
    return out


def run_overrides(args):
    return {
        "benchmark": args.benchmark,
        "dim": args.dim,
        "bound": args.bound,
        "step": args.step,
        "method": args.method,
        "tree.variant": args.variant,
        "tree.depth": args.depth,
        "tree.restarts": args.restarts,
        "sub.kind": args.sub,
        "sub.particles": args.particles,
        "sub.iterations": args.iterations,
        "sub.max_evaluations": args.budget,
        "repetitions": args.repetitions,
        "seed": args.seed,
        "workers": args.workers,
    }


def cmd_run(args):
    settings = runconfig.load("run", args.config, run_overrides(args))
    spec = settings.to_spec()
    log(
        "{} on {} d={}, {} repetitions, seed {}".format(
            spec.method.label, spec.benchmark.value, spec.dim, spec.repetitions, spec.seed
        )
    )
    report = run_experiment(spec, workers=settings.workers)

    out = output_dir(args)
    write_json(os.path.join(out, "report.json"), report.as_dict())
    write_csv(os.path.join(out, "trace.csv"), report.trace_frame())
    write_csv(os.path.join(out, "regions.csv"), report.regions_frame())

    log(
        "error  mean {:.4f}%  std {:.4f}%  min {:.4f}%  max {:.4f}%".format(
            report.mean_error, report.std_error, report.min_error, report.max_error
        )
    )
    log("mean evaluations {:,.0f}".format(report.mean_evaluations))
    log("wrote {}".format(out))
    return 0


def compare_overrides(args):
    return {
        "preset": args.preset,
        "benchmarks": args.benchmarks,
        "dim": args.dim,
        "tree.depth": args.depth,
        "tree.restarts": args.restarts,
        "sub.iterations": args.iterations,
        "repetitions": args.repetitions,
        "seed": args.seed,
        "workers": args.workers,
    }


def cmd_compare(args):
    settings = runconfig.load("compare", args.config, compare_overrides(args))
    specs = settings.to_specs()
    log("{} experiments".format(len(specs)))
    table = compare(specs, workers=settings.workers)

    out = output_dir(args)
    write_csv(os.path.join(out, "comparison.csv"), table.to_frame())
    write_json(os.path.join(out, "comparison.json"), table.as_dict())

    log(table.pivot().to_string(float_format="{:.2f}".format))
    log("wrote {}".format(out))
    return 0


def cmd_depth(args):
    found = required_depth(args.variant, args.dim, args.epsilon)
    log("k = {:.6g}".format(found.k))
    log("depth = {}".format(found.depth))
    return 0


def cmd_schema(args):
    log(orjson.dumps(runconfig.schema(args.kind), option=JSON_OPTIONS).decode())
    return 0


def _common(parser):
    parser.add_argument("--config", help="JSON config file (see `tbo schema`)")
    parser.add_argument("--dim", type=int, help="problem dimension")
    parser.add_argument("--depth", type=int, help="tree depth, i.e. split iterations per run")
    parser.add_argument("--restarts", type=int, help="independent descents per repetition")
    parser.add_argument("--iterations", type=int, help="sub-algorithm generations per region")
    parser.add_argument("--repetitions", type=int, help="seeded repetitions per experiment")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument(
        "--workers", type=int, help="repetitions in flight at once; never changes results"
    )
    parser.add_argument(
        "--out", help="output directory (default: $TBO_OUTPUT_DIR or ./tbo_output)"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tbo",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging from the library")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one experiment")
    _common(run)
    run.add_argument("--benchmark", help="sphere, griewank, schaffer or schwefel")
    run.add_argument("--bound", type=float, help="override the range to [-BOUND, BOUND]")
    run.add_argument("--step", type=float, help="override the grid step")
    run.add_argument("--method", help="tbo or bare")
    run.add_argument("--variant", help="binary, multibranch or adaptive")
    run.add_argument("--sub", help="local_search, pso, ga or grid")
    run.add_argument("--particles", type=int, help="particles per region")
    run.add_argument(
        "--budget",
        type=int,
        help="evaluation budget of a bare run; under tbo, a cap per region search",
    )
    run.set_defaults(handler=cmd_run)

    grid = commands.add_parser("compare", help="run a grid of experiments side by side")
    _common(grid)
    grid.add_argument("--preset", help="planar (2-D grid) or spatial (3-D grid)")
    grid.add_argument("--benchmarks", nargs="+", help="benchmarks of the grid")
    grid.set_defaults(handler=cmd_compare)

    depth = commands.add_parser("depth", help="tree depth needed for a target region size")
    depth.add_argument("--variant", default="binary", help="binary or multibranch")
    depth.add_argument("--dim", type=int, default=2, help="problem dimension")
    depth.add_argument("--epsilon", type=float, required=True, help="target size, in (0, 0.5)")
    depth.set_defaults(handler=cmd_depth)

    schema = commands.add_parser("schema", help="print the JSON schema of a config file")
    schema.add_argument("kind", nargs="?", default="run", choices=sorted(runconfig.SCHEMAS))
    schema.set_defaults(handler=cmd_schema)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
        logging.getLogger("tbo").setLevel(logging.DEBUG)
    try:
        return args.handler(args)
    except TboError as exc:
        fail(exc.detail)
        return exc.exit_code
    except Exception as exc:
        logging.getLogger(__name__).debug("unexpected failure", exc_info=True)
        fail("{}: {}".format(type(exc).__name__, exc))
        return TboError.exit_code


if __name__ == "__main__":
    sys.exit(main())
