"""Bound-constrained real-coded genetic algorithm.

The population is a low-discrepancy (Sobol) sample of the bounds box,
optionally skewed with injected genes from an earlier run. Each
generation the population is sorted by fitness, split into a winner
half and a loser half, and the winners are split again into two parent
pools by alternating rank. Losers are replaced by children of
tournament-selected parents, blended with weights drawn so the children
respect the bounds by construction, then mutated. Winners survive
unchanged, which keeps the best-so-far monotone; the top elite genes
are never mutated by construction.

Every run is deterministic given the RNG seed: all randomness flows
from one numpy Generator and fitness evaluation is a pure batch call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import ConfigError

FitnessFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Bounds:
    """Closed per-dimension search intervals."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ConfigError("bounds need matching 1-d lower/upper arrays")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise ConfigError("bounds must be finite")
        if not np.all(lower < upper):
            raise ConfigError("every lower bound must be strictly below its upper bound")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "Bounds":
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ConfigError("expected a sequence of (lower, upper) pairs")
        return cls(lower=arr[:, 0], upper=arr[:, 1])

    @property
    def dim(self) -> int:
        return int(self.lower.size)

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, values: np.ndarray) -> bool:
        v = np.atleast_2d(np.asarray(values, dtype=float))
        return bool(np.all(v >= self.lower) and np.all(v <= self.upper))


@dataclass
class Gene:
    """One candidate parameter vector with its cached fitness."""

    values: np.ndarray
    fitness: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class GaConfig:
    """All engine settings.

    population_size must be a multiple of 4 so the population splits
    into winner/loser halves and two parent genders. Mutation adapts
    between the min and max rate depending on how long the best fitness
    has been stagnant (see adapt_mutation_rate). blend_alpha extends the
    blending weight interval beyond the parents; line_blend_fraction is
    the share of children whose per-dimension weights are coupled, so
    they lie on the line through the two parents.
    """

    population_size: int = 512
    max_generations: int = 1000
    elite_count: int = 3
    tournament_size: int = 3
    mutation_rate_min: float = 0.2
    mutation_rate_max: float = 0.5
    returning_genes: int = 64
    rng_seed: int = 0
    stagnation_window: int = 50
    blend_alpha: float = 1.2
    line_blend_fraction: float = 0.7
    improvement_rtol: float = 1e-3

    def __post_init__(self):
        if self.population_size <= 0 or self.population_size % 4 != 0:
            raise ConfigError(f"population_size must be a positive multiple of 4, got {self.population_size}")
        if self.max_generations < 0:
            raise ConfigError("max_generations must be >= 0")
        if not 0 < self.elite_count < self.population_size // 2:
            raise ConfigError("elite_count must be positive and below half the population")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")
        if not 0 < self.mutation_rate_min <= self.mutation_rate_max < 1:
            raise ConfigError("need 0 < mutation_rate_min <= mutation_rate_max < 1")
        if not 0 <= self.returning_genes <= self.population_size // 2:
            raise ConfigError("returning_genes must lie in [0, population_size / 2]")
        if self.stagnation_window < 1:
            raise ConfigError("stagnation_window must be >= 1")
        if self.blend_alpha <= 0:
            raise ConfigError("blend_alpha must be > 0")
        if not 0 <= self.line_blend_fraction <= 1:
            raise ConfigError("line_blend_fraction must lie in [0, 1]")
        if self.improvement_rtol < 0:
            raise ConfigError("improvement_rtol must be >= 0")


@dataclass
class GaResult:
    """Outcome of one evolve run."""

    best: Gene
    winners: list[Gene]
    generations_run: int
    best_fitness_history: np.ndarray


def _as_value_rows(genes) -> np.ndarray:
    rows = [g.values if isinstance(g, Gene) else np.asarray(g, dtype=float) for g in genes]
    return np.array(rows, dtype=float).reshape(len(rows), -1)


def init_population(config: GaConfig, bounds: Bounds, injected: Sequence = ()) -> np.ndarray:
    """Initial population: injected genes first, Sobol points after.

    The Sobol sequence is unscrambled and the all-zeros first point is
    skipped, so with no injection the first gene sits at the midpoint of
    the bounds box. Injected genes are placed verbatim in the leading
    slots and must respect the bounds.
    """
    if len(injected) > config.returning_genes:
        raise ConfigError(f"{len(injected)} injected genes exceed returning_genes={config.returning_genes}")
    n_sobol = config.population_size - len(injected)
    m = max(1, int(np.ceil(np.log2(n_sobol + 1))))
    points = qmc.Sobol(d=bounds.dim, scramble=False).random_base2(m)[1 : n_sobol + 1]
    population = bounds.lower + points * bounds.span
    if len(injected):
        rows = _as_value_rows(injected)
        if rows.shape[1] != bounds.dim:
            raise ConfigError(f"injected genes have {rows.shape[1]} dimensions, bounds have {bounds.dim}")
        if not bounds.contains(rows):
            raise ConfigError("injected genes must lie within bounds")
        population = np.vstack([rows, population])
    return population


def partition(population: Sequence[Gene], config: GaConfig):
    """Split a fitness-sorted population for breeding.

    Returns (elite, winners_female, winners_male, losers). The elite are
    the leading genes of the winner half and survive unmodified; genders
    alternate by rank so both parent pools have comparable quality.
    """
    n = len(population)
    if n % 4 != 0:
        raise ConfigError(f"population size must be a multiple of 4, got {n}")
    fitnesses = [g.fitness for g in population]
    if any(f is None for f in fitnesses):
        raise ValueError("partition requires evaluated genes")
    if any(fitnesses[i] < fitnesses[i + 1] for i in range(n - 1)):
        raise ValueError("population must be sorted by fitness, descending")
    winners = list(population[: n // 2])
    elite = winners[: config.elite_count]
    return elite, winners[0::2], winners[1::2], list(population[n // 2 :])


def tournament_select(pool: Sequence[Gene], k: int, rng: np.random.Generator) -> Gene:
    """Fittest of k pool members drawn uniformly without replacement."""
    if not 1 <= k <= len(pool):
        raise ConfigError(f"tournament size {k} exceeds pool of {len(pool)}")
    idx = rng.choice(len(pool), size=k, replace=False)
    best = min(idx, key=lambda i: (-pool[i].fitness, i))
    return pool[best]


def blend_weight_interval(ma, pa, lower, upper, alpha: float):
    """Per-dimension sampling interval for blending weights.

    The weight mu produces the child mu*ma + (1-mu)*pa. The interval is
    [-alpha, 1+alpha] shrunk so that any weight inside it keeps the
    child within [lower, upper]; with in-bounds parents it always
    contains [0, 1]. Dimensions where ma == pa return the unshrunk
    interval (the child equals the parent value regardless of weight).
    """
    ma = np.asarray(ma, dtype=float)
    pa = np.asarray(pa, dtype=float)
    d = ma - pa
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = (lower - pa) / d
        r2 = (upper - pa) / d
    lo = np.where(d == 0.0, -alpha, np.minimum(r1, r2))
    hi = np.where(d == 0.0, 1.0 + alpha, np.maximum(r1, r2))
    return np.maximum(lo, -alpha), np.minimum(hi, 1.0 + alpha)


def _blend_rows(ma: np.ndarray, pa: np.ndarray, bounds: Bounds, rng: np.random.Generator,
                alpha: float, line_fraction: float):
    """Two children per parent row, in bounds by construction."""
    n, dim = ma.shape
    w_lo, w_hi = blend_weight_interval(ma, pa, bounds.lower, bounds.upper, alpha)
    d = ma - pa
    same = d == 0.0
    children = []
    for _ in range(2):
        xi = rng.random((n, dim))
        coupled = rng.random(n) < line_fraction
        xi_line = rng.random(n)
        xi[coupled] = xi_line[coupled, None]
        child = pa + (w_lo + xi * (w_hi - w_lo)) * d
        if same.any():
            child[same] = pa[same]
        children.append(child)
    return children[0], children[1]


def blend(ma: Gene, pa: Gene, bounds: Bounds, rng: np.random.Generator,
          alpha: float = 1.2, line_fraction: float = 0.7) -> tuple[Gene, Gene]:
    """Blend two parents into two children (Gene in, Gene out)."""
    c1, c2 = _blend_rows(ma.values[None, :], pa.values[None, :], bounds, rng, alpha, line_fraction)
    return Gene(c1[0]), Gene(c2[0])


def mutate(gene: Gene, rate: float, bounds: Bounds, rng: np.random.Generator) -> Gene:
    """Resample each component uniformly in bounds with probability rate."""
    if not 0 <= rate <= 1:
        raise ConfigError(f"mutation rate must lie in [0, 1], got {rate}")
    values = gene.values.copy()
    mask = rng.random(values.shape) < rate
    draws = bounds.lower + rng.random(values.shape) * bounds.span
    values[mask] = draws[mask]
    return Gene(values)


def adapt_mutation_rate(history, config: GaConfig) -> float:
    """Mutation rate from the best-fitness history.

    While the best fitness keeps making significant gains (relative
    improvement above improvement_rtol) within the last
    stagnation_window generations, the rate stays at the minimum. Once
    the streak without such gains exceeds the window, the rate ramps
    linearly and reaches the maximum at twice the window.
    """
    history = np.asarray(history, dtype=float)
    if history.size == 0:
        raise ValueError("history must be nonempty")
    anchor = history[0]
    last_significant = 0
    for t in range(1, history.size):
        if history[t] > anchor + config.improvement_rtol * abs(anchor):
            anchor = history[t]
            last_significant = t
    streak = (history.size - 1) - last_significant
    return _rate_from_streak(streak, config)


def _rate_from_streak(streak: int, config: GaConfig) -> float:
    if streak < config.stagnation_window:
        return config.mutation_rate_min
    ramp = min(1.0, (streak - config.stagnation_window) / config.stagnation_window)
    return config.mutation_rate_min + (config.mutation_rate_max - config.mutation_rate_min) * ramp


def evolve(config: GaConfig, bounds: Bounds, fitness_fn: FitnessFn, injected: Sequence = ()) -> GaResult:
    """Run the GA for exactly max_generations generations.

    fitness_fn maps an (n, dim) array of genes to an (n,) array of
    fitness values and must be finite over the bounds box. The returned
    history holds the best fitness after the initial evaluation and
    after each generation; it is nondecreasing because winners survive
    unmodified. Identical inputs and seed reproduce the result bitwise.
    """
    rng = np.random.default_rng(config.rng_seed)
    n = config.population_size
    n_winners = n // 2
    n_pairs = n // 4
    if config.tournament_size > n // 4:
        raise ConfigError(f"tournament_size {config.tournament_size} exceeds gender pools of {n // 4}")

    population = init_population(config, bounds, injected)
    fit = _evaluated(fitness_fn, population)
    order = np.argsort(-fit, kind="stable")
    population, fit = population[order], fit[order]

    best_values = population[0].copy()
    best_fitness = float(fit[0])
    history = [best_fitness]
    anchor = best_fitness
    last_significant = 0

    for gen in range(1, config.max_generations + 1):
        streak = (gen - 1) - last_significant
        rate = _rate_from_streak(streak, config)

        winners = population[:n_winners]
        mothers_pool = winners[0::2]
        fathers_pool = winners[1::2]
        mi = _tournament_rows(rng, n_pairs, n_pairs, config.tournament_size)
        fi = _tournament_rows(rng, n_pairs, n_pairs, config.tournament_size)
        ma, pa = mothers_pool[mi], fathers_pool[fi]

        c1, c2 = _blend_rows(ma, pa, bounds, rng, config.blend_alpha, config.line_blend_fraction)
        children = np.empty((n_winners, bounds.dim))
        children[0::2] = c1
        children[1::2] = c2
        # mutation touches offspring only; winners (elite included) survive as-is
        mask = rng.random(children.shape) < rate
        draws = bounds.lower + rng.random(children.shape) * bounds.span
        children[mask] = draws[mask]

        population = np.vstack([winners, children])
        fit = _evaluated(fitness_fn, population)
        order = np.argsort(-fit, kind="stable")
        population, fit = population[order], fit[order]

        if fit[0] > best_fitness:
            best_fitness = float(fit[0])
            best_values = population[0].copy()
            if best_fitness > anchor + config.improvement_rtol * abs(anchor):
                anchor = best_fitness
                last_significant = gen
        history.append(best_fitness)

    winners = [Gene(population[i].copy(), float(fit[i])) for i in range(n_winners)]
    return GaResult(
        best=Gene(best_values, best_fitness),
        winners=winners,
        generations_run=config.max_generations,
        best_fitness_history=np.asarray(history),
    )


def _evaluated(fitness_fn: FitnessFn, population: np.ndarray) -> np.ndarray:
    fit = np.asarray(fitness_fn(population), dtype=float)
    if fit.shape != (population.shape[0],):
        raise ValueError(f"fitness_fn returned shape {fit.shape}, expected ({population.shape[0]},)")
    if not np.all(np.isfinite(fit)):
        bad = int(np.flatnonzero(~np.isfinite(fit))[0])
        raise RuntimeError(f"fitness_fn returned {fit[bad]} for gene {population[bad].tolist()}")
    return fit


def _tournament_rows(rng: np.random.Generator, pool: int, rows: int, k: int) -> np.ndarray:
    """Row-wise winner indices for sorted pools: min of k distinct draws."""
    if k >= pool:
        return np.zeros(rows, dtype=np.int64)
    idx = rng.integers(0, pool, size=(rows, k))
    while True:
        srt = np.sort(idx, axis=1)
        bad = (np.diff(srt, axis=1) == 0).any(axis=1)
        if not bad.any():
            return idx.min(axis=1)
        idx[bad] = rng.integers(0, pool, size=(int(bad.sum()), k))
