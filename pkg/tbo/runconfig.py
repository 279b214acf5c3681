"""JSON configuration files for ``tbo run`` and ``tbo compare``.

A file holds any subset of the fields below; everything left out takes the
default from :mod:`tbo.config`. Unknown keys are an error, so a typo cannot
silently fall back to a default. ``tbo schema`` prints the JSON schema.

Example run file::

    {
      "benchmark": "schwefel",
      "dim": 2,
      "method": "tbo",
      "tree": {"variant": "multibranch", "depth": 5},
      "sub": {"kind": "pso", "particles": 5},
      "seed": 42
    }

Command-line flags win over the file, which wins over the defaults.
"""

from typing import List, Literal, Optional, Tuple

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import config
from .benchmarks import BenchmarkId
from .core import ConfigError
from .harness import BareMethod, ExperimentSpec, TboMethod, preset_specs
from .subalgorithms import SubAlgorithmConfig, SubAlgorithmKind
from .tree import (
    Adaptive,
    Binary,
    EntryRule,
    MultiBranch,
    OddBranching,
    Orientation,
    SplitRule,
    TboConfig,
)

VariantName = Literal["binary", "multibranch", "adaptive"]
MethodName = Literal["tbo", "bare"]


class ConfigFileError(ConfigError):
    """A config file that does not parse or validate, located by line."""

    def __init__(self, path, line, message):
        super().__init__("{}:{}: {}".format(path, line, message))
        self.path = path
        self.line = line


class TreeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variant: VariantName = "binary"
    orientation: Orientation = Orientation.ALTERNATE
    p: float = Field(config.BinaryRandomP, gt=0, lt=1)
    # Adaptive only: branching factor per iteration, the last one repeating.
    schedule: List[int] = [4, 3, 2]
    odd: OddBranching = OddBranching.SINGLE_DIMENSION
    depth: int = Field(config.DefaultDepth, ge=1)
    window: Tuple[float, float] = config.SplitWindow
    particle_delta: int = Field(0, ge=0)
    particle_lower: int = Field(1, ge=1)
    subiter_delta: int = Field(0, ge=0)
    subiter_lower: int = Field(1, ge=1)
    size_proportional: bool = False
    restarts: int = Field(config.DefaultRestarts, ge=1)
    entry: EntryRule = EntryRule.PROBABILISTIC
    split_rule: SplitRule = SplitRule.UNIFORM
    region_workers: int = Field(config.RegionWorkers, ge=1)

    def variant_object(self, name=None):
        name = name or self.variant
        if name == "binary":
            return Binary(orientation=self.orientation, p=self.p)
        if name == "multibranch":
            return MultiBranch()
        return Adaptive(schedule=tuple(self.schedule), odd=self.odd)

    def to_config(self, sub, variant=None):
        return TboConfig(
            variant=self.variant_object(variant),
            depth=self.depth,
            window=tuple(self.window),
            particle_schedule=(self.particle_delta, self.particle_lower),
            subiter_schedule=(self.subiter_delta, self.subiter_lower),
            size_proportional=self.size_proportional,
            sub=sub,
            restarts=self.restarts,
            entry=self.entry,
            split_rule=self.split_rule,
            region_workers=self.region_workers,
        )


class SubAlgorithmSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: SubAlgorithmKind = SubAlgorithmKind.GA
    particles: int = Field(config.DefaultParticles, ge=1)
    iterations: int = Field(config.DefaultSubIterations, ge=1)
    ls_radius: float = Field(config.LocalSearchRadius, ge=0)
    ls_patience: int = Field(config.LocalSearchPatience, ge=1)
    pso_inertia: float = Field(config.PsoInertia, ge=0)
    pso_cognitive: float = Field(config.PsoCognitive, ge=0)
    pso_social: float = Field(config.PsoSocial, ge=0)
    pso_velocity_clamp: float = Field(config.PsoVelocityClamp, ge=0)
    ga_crossover_rate: float = Field(config.GaCrossoverRate, ge=0, le=1)
    ga_mutation_rate: float = Field(config.GaMutationRate, ge=0, le=1)
    ga_mutation_scale: float = Field(config.GaMutationScale, ge=0)
    ga_elites: int = Field(config.GaElites, ge=0)
    ga_fitness_epsilon: float = Field(config.GaFitnessEpsilon, gt=0)
    # Under TBO a cap per region search; for a bare run the whole budget.
    max_evaluations: Optional[int] = Field(None, ge=1)

    def to_config(self, kind=None, particles=None, budget=True):
        return SubAlgorithmConfig(
            kind=kind or self.kind,
            n_particles=particles or self.particles,
            n_iterations=self.iterations,
            ls_radius=self.ls_radius,
            ls_patience=self.ls_patience,
            pso_inertia=self.pso_inertia,
            pso_cognitive=self.pso_cognitive,
            pso_social=self.pso_social,
            pso_velocity_clamp=self.pso_velocity_clamp,
            ga_crossover_rate=self.ga_crossover_rate,
            ga_mutation_rate=self.ga_mutation_rate,
            ga_mutation_scale=self.ga_mutation_scale,
            ga_elites=self.ga_elites,
            ga_fitness_epsilon=self.ga_fitness_epsilon,
            max_evaluations=self.max_evaluations if budget else None,
        )


class RunConfigFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    benchmark: BenchmarkId = BenchmarkId.SPHERE
    dim: int = Field(2, ge=1)
    # Symmetric range and grid step, overriding the benchmark's own.
    bound: Optional[float] = Field(None, gt=0)
    step: Optional[float] = Field(None, gt=0)
    method: MethodName = "tbo"
    tree: TreeSection = TreeSection()
    sub: SubAlgorithmSection = SubAlgorithmSection()
    repetitions: int = Field(config.DefaultRepetitions, ge=1)
    seed: int = Field(config.DefaultSeed, ge=0, le=2**64 - 1)
    workers: int = Field(config.MaxWorkers, ge=1)

    def to_spec(self):
        if self.method == "tbo":
            method = TboMethod(self.tree.to_config(self.sub.to_config()))
        else:
            method = BareMethod(self.sub.to_config(budget=False), evaluations=self.sub.max_evaluations)
        return ExperimentSpec(
            benchmark=self.benchmark,
            dim=self.dim,
            method=method,
            repetitions=self.repetitions,
            seed=self.seed,
            bound=self.bound,
            step=self.step,
        )


class CompareConfigFile(BaseModel):
    """A grid: benchmarks x methods x variants x sub-algorithms x particles.

    With ``preset`` set, the grid is the named preset instead, and only
    ``repetitions``, ``seed``, ``workers``, ``tree.depth``, ``tree.restarts``
    and ``sub.iterations`` still apply.
    """

    model_config = ConfigDict(extra="forbid")

    preset: Optional[Literal["planar", "spatial"]] = None
    benchmarks: List[BenchmarkId] = []
    dim: int = Field(2, ge=1)
    bound: Optional[float] = Field(None, gt=0)
    step: Optional[float] = Field(None, gt=0)
    methods: List[MethodName] = ["tbo", "bare"]
    variants: List[VariantName] = ["multibranch"]
    subs: List[SubAlgorithmKind] = [SubAlgorithmKind.GA]
    particles: List[int] = [5, 10]
    tree: TreeSection = TreeSection()
    sub: SubAlgorithmSection = SubAlgorithmSection()
    repetitions: int = Field(config.DefaultRepetitions, ge=1)
    seed: int = Field(config.DefaultSeed, ge=0, le=2**64 - 1)
    workers: int = Field(config.MaxWorkers, ge=1)

    def to_specs(self):
        if self.preset is not None:
            return preset_specs(
                self.preset,
                repetitions=self.repetitions,
                seed=self.seed,
                depth=self.tree.depth,
                sub_iterations=self.sub.iterations,
                restarts=self.tree.restarts,
            )
        specs = []
        for bench in self.benchmarks:
            for particles in self.particles:
                for kind in self.subs:
                    if particles < 1:
                        raise ConfigError("Particle counts must be positive, got {}".format(particles))
                    sub = self.sub.to_config(kind=kind, particles=particles)
                    if "tbo" in self.methods:
                        for variant in self.variants:
                            specs.append(self._spec(bench, TboMethod(self.tree.to_config(sub, variant))))
                    if "bare" in self.methods:
                        bare = self.sub.to_config(kind=kind, particles=particles, budget=False)
                        specs.append(self._spec(bench, BareMethod(bare, self.sub.max_evaluations)))
        return specs

    def _spec(self, bench, method):
        return ExperimentSpec(
            benchmark=bench,
            dim=self.dim,
            method=method,
            repetitions=self.repetitions,
            seed=self.seed,
            bound=self.bound,
            step=self.step,
        )


SCHEMAS = {"run": RunConfigFile, "compare": CompareConfigFile}


def _line_of(text, loc):
    """First line mentioning the innermost key of ``loc``, else line 1."""
    keys = [k for k in loc if isinstance(k, str)]
    if not keys:
        return 1
    needle = '"{}"'.format(keys[-1])
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return 1


def read_document(path):
    """The file's JSON object, or a ConfigFileError pointing at the bad line."""
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as exc:
        raise ConfigError("Cannot read config file {}: {}".format(path, exc.strerror))
    try:
        document = orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise ConfigFileError(path, exc.lineno, exc.msg)
    if not isinstance(document, dict):
        raise ConfigFileError(path, 1, "expected a JSON object at the top level")
    return document, raw.decode("utf-8", errors="replace")


def merge(document, overrides):
    """``document`` with every non-None dotted-key override applied."""
    merged = {k: (dict(v) if isinstance(v, dict) else v) for k, v in document.items()}
    for dotted, value in overrides.items():
        if value is None:
            continue
        *parents, key = dotted.split(".")
        target = merged
        for parent in parents:
            section = target.get(parent)
            if not isinstance(section, dict):
                section = {}
                target[parent] = section
            target = section
        target[key] = value
    return merged


def load(kind, path=None, overrides=None):
    """Validate a config file (or none) with flag overrides on top."""
    model = SCHEMAS[kind]
    document, text = ({}, "") if path is None else read_document(path)
    merged = merge(document, overrides or {})
    try:
        return model.model_validate(merged)
    except ValidationError as exc:
        error = exc.errors()[0]
        where = ".".join(str(k) for k in error["loc"]) or "(top level)"
        message = "{}: {}".format(where, error["msg"])
        if path is None:
            raise ConfigError(message)
        raise ConfigFileError(path, _line_of(text, error["loc"]), message)


def schema(kind="run"):
    return SCHEMAS[kind].model_json_schema()
