"""Search-space geometry, the objective type, and the randomness contract.

Everything the other modules pass around is defined here and is immutable:
regions, objectives and random streams are values, so any of them can be
handed to a worker thread without a lock.

**Regions.** An axis-aligned box, one closed interval per dimension. A
collapsed interval is an error; nothing downstream can search a region of
zero width.

**Random streams.** A stream is a ``(seed, label)`` pair, not a generator.
Asking for a child appends to the label. The label decides the numbers, never
the order in which streams were created or drawn from, so
region searches and repetitions can run in any order, on any number of
threads, and still produce the result a sequential run would. Under the hood
the label is hashed into the ``spawn_key`` of a ``SeedSequence`` feeding a
counter-based Philox generator.

**Grid step.** Benchmarks come with a resolution (0.1 or 1). Candidates are
snapped to that grid when they are evaluated; the search itself moves
continuously. See :func:`quantize`.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "TboError",
    "GeometryError",
    "DomainError",
    "NumericError",
    "ConfigError",
    "Region",
    "Objective",
    "RngStream",
    "Incumbent",
    "region_size",
    "region_volume",
    "uniform_in",
    "quantize",
]


# --- errors ----------------------------------------------------------------


class TboError(Exception):
    """Base for every error this package raises on purpose.

    Carries ``detail`` for the user and the exit code the CLI should return.
    """

    exit_code = 3

    def __init__(self, detail):
        super().__init__(detail)
        self.detail = detail


class GeometryError(TboError):
    """A degenerate region, or an index that does not name a dimension or child."""


class DomainError(TboError):
    """A value outside the domain an operation is defined on."""


class NumericError(TboError):
    """Costs or probabilities that cannot be compared (NaN, inf, all zero)."""


class ConfigError(TboError):
    """A configuration that can never run. The CLI exits 2 on these."""

    exit_code = 2


# --- geometry --------------------------------------------------------------


# Containment is tested against closed bounds with this much slack, relative
# to the side length. Split points are computed in floating point, so a child's
# edge and its parent's can differ in the last bit.
CONTAINS_RTOL = 1e-9


@dataclass(frozen=True)
class Region:
    """An axis-aligned hyperrectangle, ``((lower_0, upper_0), ...)``."""

    bounds: tuple

    def __post_init__(self):
        try:
            bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        except (TypeError, ValueError):
            raise GeometryError(
                "Region bounds must be (lower, upper) pairs, got {!r}".format(self.bounds)
            )
        if not bounds:
            raise GeometryError("A region needs at least one dimension")
        for dim, (lo, hi) in enumerate(bounds):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise GeometryError(
                    "Region dimension {} is not finite: [{}, {}]".format(dim, lo, hi)
                )
            if not lo < hi:
                raise GeometryError(
                    "Region has a collapsed dimension {}: [{}, {}]".format(dim, lo, hi)
                )
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def cube(cls, lower, upper, d):
        """The same interval in each of ``d`` dimensions."""
        if int(d) < 1:
            raise GeometryError("A region needs at least one dimension, got {}".format(d))
        return cls(((lower, upper),) * int(d))

    @classmethod
    def from_arrays(cls, lower, upper):
        return cls(tuple(zip(np.asarray(lower).tolist(), np.asarray(upper).tolist())))

    @property
    def dim(self):
        return len(self.bounds)

    @property
    def lower(self):
        return np.array([lo for lo, _ in self.bounds])

    @property
    def upper(self):
        return np.array([hi for _, hi in self.bounds])

    @property
    def sizes(self):
        return self.upper - self.lower

    def contains(self, point):
        """Whether ``point`` (or every row of an ``(n, d)`` array) is inside."""
        x = np.asarray(point, dtype=float)
        if x.shape[-1] != self.dim:
            return False
        slack = CONTAINS_RTOL * self.sizes
        return bool(np.all((x >= self.lower - slack) & (x <= self.upper + slack)))

    def as_dict(self):
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}


def region_size(region, dim):
    """Side length of ``region`` along ``dim``."""
    if not 0 <= int(dim) < region.dim:
        raise GeometryError(
            "Dimension {} out of range for a {}-dimensional region".format(dim, region.dim)
        )
    lo, hi = region.bounds[int(dim)]
    return hi - lo


def region_volume(region):
    """Product of the side lengths."""
    return float(np.prod(region.sizes))


# --- objectives ------------------------------------------------------------


class Incumbent(NamedTuple):
    """A point and what it costs. Minimisation throughout."""

    point: np.ndarray
    cost: float

    def as_dict(self):
        return {"point": np.asarray(self.point).tolist(), "cost": float(self.cost)}


@dataclass(frozen=True)
class Objective:
    """A cost function over a box, with the resolution it is searched at.

    ``func`` is vectorised: it takes an ``(n, d)`` array and returns ``n``
    costs. It must be pure: the same point always costs the same.

    Evaluation goes through :func:`tbo.benchmarks.evaluate`, which snaps to
    ``grid_step`` first; ``func`` itself never sees an off-grid point that way.
    """

    id: str
    dimension: int
    domain: Region
    func: Callable = field(repr=False, compare=False)
    grid_step: float | None = None
    known_optimum: Incumbent | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ConfigError(
                "Objective {} needs a positive dimension, got {}".format(self.id, self.dimension)
            )
        if self.domain.dim != int(self.dimension):
            raise ConfigError(
                "Objective {} is {}-dimensional but its domain has {} dimensions".format(
                    self.id, self.dimension, self.domain.dim
                )
            )
        if self.grid_step is not None and not float(self.grid_step) > 0:
            raise ConfigError(
                "Grid step must be positive or None, got {}".format(self.grid_step)
            )
        if self.known_optimum is not None and not self.domain.contains(
            self.known_optimum.point
        ):
            raise ConfigError(
                "Known optimum {} of {} lies outside its domain".format(
                    np.asarray(self.known_optimum.point).tolist(), self.id
                )
            )

    @property
    def key(self):
        """What identifies the landscape, for caching derived facts about it."""
        return (self.id, int(self.dimension), self.domain.bounds, self.grid_step)


# --- randomness ------------------------------------------------------------

_SEED_MASK = 2**64 - 1


@dataclass(frozen=True)
class RngStream:
    """A labelled, reproducible source of random numbers.

    ``generator()`` always starts the stream from the beginning, so a stream
    is a value: two holders of equal streams see equal numbers, and neither
    can disturb the other.
    """

    seed: int
    label: str = ""

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise ConfigError("Seed must be an integer, got {!r}".format(self.seed))
        if not 0 <= int(self.seed) <= _SEED_MASK:
            raise ConfigError("Seed must fit in an unsigned 64-bit int, got {}".format(self.seed))
        object.__setattr__(self, "seed", int(self.seed))

    def child(self, label):
        """An independent stream, derived by name."""
        label = str(label)
        return RngStream(self.seed, "{}/{}".format(self.label, label) if self.label else label)

    def spawn_key(self):
        # blake2b rather than hash(): str hashing is salted per process, and
        # a stream has to mean the same numbers in every process.
        digest = hashlib.blake2b(self.label.encode("utf-8"), digest_size=16).digest()
        return tuple(int(w) for w in np.frombuffer(digest, dtype="<u4"))

    def generator(self):
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key())
        return np.random.Generator(np.random.Philox(sequence))


def as_generator(rng):
    """Accept either a stream or a generator already being drawn from."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def draw_uniform(region, generator, n=None):
    """Uniform points strictly inside ``region``, drawn from ``generator``."""
    lower, upper = region.lower, region.upper
    shape = (region.dim,) if n is None else (int(n), region.dim)
    points = lower + generator.random(shape) * (upper - lower)
    # random() is [0, 1), and the product can still round onto either face.
    return np.clip(points, np.nextafter(lower, upper), np.nextafter(upper, lower))


def uniform_in(region, rng, n=None):
    """A uniform point strictly inside ``region`` (``n`` of them as an array)."""
    return draw_uniform(region, as_generator(rng), n)


# --- grid ------------------------------------------------------------------

# Slack, in grid steps, when deciding ties and grid membership. Without it
# 3.15 on a 0.1 grid lands at 1031.4999... steps and rounds down.
_GRID_TOL = 1e-9


def quantize(point, objective, within=None):
    """Snap ``point`` to the objective's grid.

    Nodes sit at ``lower + k * step`` from the domain's lower bound, and ties
    round toward +inf. The result never leaves the domain. With no grid step
    this is the identity.

    ``within`` restricts the nodes to those inside a region. Along a
    dimension where that region is narrower than the step and holds no node,
    the coordinate is left continuous, clamped to the region, so a search deep
    in the tree still has to evaluate something inside the region it was
    given.
    """
    x = np.asarray(point, dtype=float)
    step = objective.grid_step
    if step is None:
        if within is None:
            return x.copy()
        return np.clip(x, within.lower, within.upper)

    step = float(step)
    origin = objective.domain.lower
    top = np.floor((objective.domain.upper - origin) / step + _GRID_TOL)
    first = np.zeros_like(top)
    last = top
    if within is not None:
        first = np.maximum(np.ceil((within.lower - origin) / step - _GRID_TOL), 0)
        last = np.minimum(np.floor((within.upper - origin) / step + _GRID_TOL), top)

    index = np.floor((x - origin) / step + 0.5 + _GRID_TOL)
    snapped = origin + np.clip(index, first, last) * step
    if within is None:
        return snapped

    nodeless = first > last
    if np.any(nodeless):
        snapped = np.where(nodeless, np.clip(x, within.lower, within.upper), snapped)
    return snapped


def grid_axes(objective, region):
    """Per dimension, the grid nodes of ``objective`` that lie inside ``region``.

    A dimension holding no node gets the region's midpoint, as the one value
    :func:`quantize` could produce there from the middle of the interval.
    """
    if objective.grid_step is None:
        raise ConfigError("{} has no grid to enumerate".format(objective.id))
    step = float(objective.grid_step)
    origin = objective.domain.lower
    top = np.floor((objective.domain.upper - origin) / step + _GRID_TOL)
    first = np.maximum(np.ceil((region.lower - origin) / step - _GRID_TOL), 0)
    last = np.minimum(np.floor((region.upper - origin) / step + _GRID_TOL), top)
    axes = []
    for dim in range(region.dim):
        if first[dim] > last[dim]:
            lo, hi = region.bounds[dim]
            axes.append(np.array([(lo + hi) / 2]))
        else:
            k = np.arange(int(first[dim]), int(last[dim]) + 1)
            axes.append(origin[dim] + k * step)
    return axes
