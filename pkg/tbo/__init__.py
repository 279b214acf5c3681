from .benchmarks import BenchmarkId, evaluate, make_benchmark, reference_optimum
from .core import (
    ConfigError,
    DomainError,
    GeometryError,
    Incumbent,
    NumericError,
    Objective,
    Region,
    RngStream,
    TboError,
    quantize,
    region_size,
    region_volume,
    uniform_in,
)
from .harness import (
    BareMethod,
    ExperimentSpec,
    TboMethod,
    compare,
    error_percent,
    run_experiment,
)
from .subalgorithms import SubAlgorithmConfig, SubAlgorithmKind, run_subalgorithm
from .tree import (
    Adaptive,
    Binary,
    MultiBranch,
    TboConfig,
    required_depth,
    run_tbo,
    staged_schedule,
    time_complexity_class,
)
