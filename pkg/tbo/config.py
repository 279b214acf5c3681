import os

# --- tree ------------------------------------------------------------------

# Where a cut may fall, as fractions of the extent being cut. Drawing from the
# middle of the interval rather than all of it avoids splitting a region into
# one very wide and one very thin slice. Both ends are hyper-parameters; the
# CLI and config files can override them.
SplitWindow = (0.30, 0.70)

# Number of split iterations per run, i.e. the depth of the tree.
DefaultDepth = 10

# Probability of cutting the first candidate dimension when a binary tree
# chooses its orientation at random rather than alternating.
BinaryRandomP = 0.5

# Independent runs of the whole descent. A run that descends into a region
# without the optimum cannot recover, so reruns are the remedy; 1 means the
# caller has decided a single descent is enough.
DefaultRestarts = 1

# --- sub-algorithms --------------------------------------------------------

# Population size (particles, chromosomes, climbers) per region, and the number
# of generations each region is searched for. The comparison presets use 5
# and 10 particles.
DefaultParticles = 10
DefaultSubIterations = 20

# Local search: each climber proposes a uniform step within this fraction of
# every region side and keeps it only if it improves. After this many rejected
# steps in a row it restarts somewhere random in the region.
LocalSearchRadius = 0.10
LocalSearchPatience = 5

# Global-best PSO. Canonical constriction-free values; velocity is clamped per
# dimension to this fraction of the region side.
PsoInertia = 0.7
PsoCognitive = 1.5
PsoSocial = 1.5
PsoVelocityClamp = 0.20

# GA with roulette (fitness-proportional) parent selection. Mutation is a
# per-gene Gaussian whose sigma is this fraction of the region side. The
# epsilon keeps the worst individual selectable, so a flat population still
# has a well-defined wheel.
GaCrossoverRate = 0.9
GaMutationRate = 0.1
GaMutationScale = 0.05
GaElites = 1
GaFitnessEpsilon = 1e-12

# The exhaustive grid engine refuses regions holding more nodes than this.
# It is meant for small or late-iteration regions, not whole domains in 3-D.
GridMaxNodes = 5_000_000

# --- harness ---------------------------------------------------------------

DefaultRepetitions = 25
DefaultSeed = 0

# Error percentages are normalised by the objective's range over its domain.
# The maximum is not known in closed form for most benchmarks, so it is
# estimated once per objective by scanning this many seeded samples (plus the
# domain corners), in chunks to keep memory flat. Deterministic: the seed is
# fixed here, not taken from the experiment.
WorstCostSamples = 1_000_000
WorstCostChunk = 100_000
WorstCostSeed = 0

# Corners are only added up to this dimension; beyond it 2^d corners stop
# being a cheap addition to the scan.
WorstCostMaxCornerDim = 16

# Repetitions in flight at once, and region searches in flight within one
# iteration. Each unit of work has its own random stream, so neither setting
# can change a result, only how long it takes.
MaxWorkers = 1
RegionWorkers = 1

# --- output ----------------------------------------------------------------

# Where the CLI writes reports when no --out is given. Set TBO_OUTPUT_DIR on a
# machine where the working directory is not where results should land.
OUTPUT_DIR = os.environ.get("TBO_OUTPUT_DIR", os.path.abspath("tbo_output"))
