"""Differential evolution over puncturing genotypes.

Candidate vectors are real-valued; only the relative order of their entries
matters, since a candidate is projected onto a puncturing pattern by taking
the columns of its n_p largest entries.  Every projected pattern gets its
information set re-selected with the Gaussian approximation and is scored by
the Monte Carlo sum of information-bit error rates.  rand/1/bin mutation and
crossover with greedy selection drive the population.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import CodeSpec
from .montecarlo import ChannelModel, DecoderConfig, objective, simulate
from .puncturing import PuncturingPattern, reduced_dimension, vector_to_pattern


@dataclass(frozen=True)
class DeConfig:
    """Search parameters.

    ``scale`` is the mutation factor F, ``crossover`` the rate C_r.  The run
    stops after ``max_iters`` generations or once the relative improvement of
    the best objective stays below ``stall_tolerance`` for
    ``stall_generations`` consecutive generations.  When ``fresh_incumbents``
    is set, incumbents are re-evaluated under each generation's evaluation
    seed instead of reusing cached values; ``in_place`` switches from
    synchronous generation updates to row-by-row replacement.

    ``seed_policy`` controls common random numbers: 'per-generation' derives a
    fresh evaluation seed for every generation, while 'fixed' evaluates every
    pattern in the whole run under the generation-0 seed, which freezes the
    noisy objective into a deterministic function of the pattern (useful for
    comparisons against an exhaustive search at matched seed and trials).
    """

    pop_size: int
    scale: float = 0.6
    crossover: float = 0.8
    max_iters: int = 50
    stall_tolerance: float = 1e-3
    stall_generations: int = 3
    reduced_space: bool = True
    ebn0_db: float = 6.0
    trials: int = 20000
    master_seed: int = 0
    in_place: bool = False
    fresh_incumbents: bool = False
    confirm_trials: int | None = 1_000_000
    workers: int = 1
    seed_policy: str = "per-generation"

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError("pop_size must be >= 4 (mutation draws 3 distinct rows)")
        if not 0.0 <= self.crossover <= 1.0:
            raise ValueError(f"crossover must lie in [0, 1], got {self.crossover}")
        if self.scale <= 0.0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if self.max_iters < 1 or self.trials < 1:
            raise ValueError("max_iters and trials must be >= 1")
        if self.seed_policy not in ("per-generation", "fixed"):
            raise ValueError("seed_policy must be 'per-generation' or 'fixed'")


@dataclass
class Population:
    """Current genotypes with their cached evaluations, row-aligned."""

    genes: np.ndarray
    objectives: np.ndarray
    patterns: list[PuncturingPattern]
    info_sets: list[tuple[int, ...]]


@dataclass
class DeResult:
    pattern: PuncturingPattern
    info_set: tuple[int, ...]
    history: list[float]
    generations: int
    evaluations: int
    best_objective: float
    confirmed_objective: float | None = None
    config: DeConfig | None = None


def search_dimension(spec: CodeSpec, config: DeConfig) -> int:
    return reduced_dimension(spec) if config.reduced_space else spec.n_mother


def make_trial(genes: np.ndarray, i: int, config: DeConfig,
               rng: np.random.Generator) -> np.ndarray:
    """rand/1/bin trial vector for row i.

    Three distinct rows r0, r1, r2 (all different from i) are drawn; gene j
    becomes z[j, r0] + F (z[j, r1] - z[j, r2]) when rand <= C_r or j is the
    forced coordinate j_rand, otherwise it is copied from row i.  Mutant genes
    are deliberately not clamped to [0, 1]: projection only uses rank order.
    """
    pop_size, dim = genes.shape
    if pop_size < 4:
        raise ValueError("population must have at least 4 rows")
    others = np.delete(np.arange(pop_size), i)
    r0, r1, r2 = rng.choice(others, size=3, replace=False)
    j_rand = int(rng.integers(dim))
    mutate = rng.random(dim) <= config.crossover
    mutate[j_rand] = True
    mutant = genes[r0] + config.scale * (genes[r1] - genes[r2])
    return np.where(mutate, mutant, genes[i])


class _Evaluator:
    """Objective evaluation with caching keyed by (pattern, seed).

    Distinct genotypes projecting onto the same pattern share one Monte Carlo
    run per evaluation seed.
    """

    def __init__(self, spec: CodeSpec, config: DeConfig):
        self.spec = spec
        self.config = config
        self.model = ChannelModel.awgn(config.ebn0_db)
        self.cache: dict = {}
        self.evaluations = 0

    def __call__(self, pattern: PuncturingPattern, seed: int):
        key = (pattern.indices, seed)
        if key not in self.cache:
            self.cache[key] = objective(
                self.spec, pattern, self.model, decoder=DecoderConfig("sc"),
                trials=self.config.trials, seed=seed, workers=self.config.workers)
            self.evaluations += 1
        return self.cache[key]


def evaluation_seed(master_seed: int, generation: int) -> int:
    """Seed used for objective evaluations in the given generation."""
    ss = np.random.SeedSequence((master_seed, 1, generation))
    return int(ss.generate_state(1, np.uint64)[0])


def _generation_seed(config: DeConfig, generation: int) -> int:
    if config.seed_policy == "fixed":
        generation = 0
    return evaluation_seed(config.master_seed, generation)


def init_population(spec: CodeSpec, n_p: int, config: DeConfig,
                    rng: np.random.Generator | None = None,
                    evaluator: _Evaluator | None = None) -> Population:
    """Population of pop_size x D genes i.i.d. uniform on [0, 1], with the
    objective of every row already evaluated (generation-0 seed)."""
    dim = search_dimension(spec, config)
    if n_p > dim:
        raise ValueError(f"n_p={n_p} exceeds search dimension D={dim}")
    if rng is None:
        rng = np.random.Generator(np.random.Philox(key=[config.master_seed, 0]))
    evaluator = evaluator or _Evaluator(spec, config)
    genes = rng.random((config.pop_size, dim))
    seed0 = _generation_seed(config, 0)
    patterns, infos, values = [], [], []
    for row in genes:
        pattern = vector_to_pattern(row, n_p, spec, reduced=config.reduced_space)
        info, value = evaluator(pattern, seed0)
        patterns.append(pattern)
        infos.append(info)
        values.append(value)
    return Population(genes=genes, objectives=np.array(values),
                      patterns=patterns, info_sets=infos)


def de_optimize(spec: CodeSpec, n_p: int, config: DeConfig,
                log_path=None) -> DeResult:
    """Search for the puncturing pattern (and matched information set)
    minimizing the summed information-bit BER at the configured Eb/N0.

    Returns the best pattern, its information set, and the best-objective
    history (one entry for the initial population plus one per generation).
    With default settings the history is non-increasing and the whole run is
    reproducible from ``config.master_seed`` alone, independent of
    ``config.workers``.
    """
    rng = np.random.Generator(np.random.Philox(key=[config.master_seed, 0]))
    evaluator = _Evaluator(spec, config)
    pop = init_population(spec, n_p, config, rng=rng, evaluator=evaluator)

    log_file = open(log_path, "w") if log_path else None

    def log_record(generation: int, best_idx: int) -> None:
        if log_file is None:
            return
        record = {
            "generation": generation,
            "best_objective": float(pop.objectives[best_idx]),
            "best_pattern": list(pop.patterns[best_idx].indices),
        }
        log_file.write(json.dumps(record) + "\n")

    try:
        best_idx = int(np.argmin(pop.objectives))
        history = [float(pop.objectives[best_idx])]
        log_record(0, best_idx)

        stall = 0
        generation = 0
        for generation in range(1, config.max_iters + 1):
            seed = _generation_seed(config, generation)
            staged: list[tuple[int, np.ndarray, PuncturingPattern, tuple, float]] = []
            for i in range(config.pop_size):
                trial = make_trial(pop.genes, i, config, rng)
                t_pattern = vector_to_pattern(trial, n_p, spec,
                                              reduced=config.reduced_space)
                t_info, t_value = evaluator(t_pattern, seed)
                if config.fresh_incumbents:
                    inc_info, inc_value = evaluator(pop.patterns[i], seed)
                    pop.info_sets[i] = inc_info
                    pop.objectives[i] = inc_value
                else:
                    inc_value = pop.objectives[i]
                if t_value < inc_value:
                    if config.in_place:
                        _replace(pop, i, trial, t_pattern, t_info, t_value)
                    else:
                        staged.append((i, trial, t_pattern, t_info, t_value))
            for i, trial, t_pattern, t_info, t_value in staged:
                _replace(pop, i, trial, t_pattern, t_info, t_value)

            best_idx = int(np.argmin(pop.objectives))
            best = float(pop.objectives[best_idx])
            prev = history[-1]
            history.append(best)
            log_record(generation, best_idx)

            improvement = (prev - best) / prev if prev > 0 else 0.0
            stall = stall + 1 if improvement < config.stall_tolerance else 0
            if stall >= config.stall_generations:
                break
    finally:
        if log_file is not None:
            log_file.close()

    best_idx = int(np.argmin(pop.objectives))
    result = DeResult(
        pattern=pop.patterns[best_idx],
        info_set=pop.info_sets[best_idx],
        history=history,
        generations=generation,
        evaluations=evaluator.evaluations,
        best_objective=float(pop.objectives[best_idx]),
        config=config,
    )
    if config.confirm_trials:
        confirm_seed = int(np.random.SeedSequence(
            (config.master_seed, 2)).generate_state(1, np.uint64)[0])
        report = simulate(spec, result.pattern, result.info_set,
                          ChannelModel.awgn(config.ebn0_db),
                          decoder=DecoderConfig("sc"),
                          trials=config.confirm_trials, seed=confirm_seed,
                          workers=config.workers)
        result.confirmed_objective = report.objective
    return result


def _replace(pop: Population, i: int, genes_row: np.ndarray,
             pattern: PuncturingPattern, info: tuple, value: float) -> None:
    pop.genes[i] = genes_row
    pop.patterns[i] = pattern
    pop.info_sets[i] = info
    pop.objectives[i] = value
