"""Steady-state evolutionary engine with 3-tournament worst elimination (SST),
variation operators for array genotypes, and the LS1/LS2/LS3 local searches.

The engine is encoding-agnostic: it talks to a problem object (see
``boolforge.problems``) providing ``initial_population``, ``evaluate``,
``crossover``, ``mutate``, ``phenotype`` and ``serialize``; bit-flip local
search additionally needs ``genome_length`` and ``flip``.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import TruthTable
from .fitness import FitnessValue

logger = logging.getLogger(__name__)

LS_MODES = ("none", "ls1", "ls2", "ls3")


def _randint(rng, k: int) -> int:
    return int(rng.random() * k)


# --- bitstring operators ----------------------------------------------------

def bit_mutation(g: np.ndarray, rng, index: int | None = None) -> np.ndarray:
    """Flip one uniformly chosen bit."""
    out = g.copy()
    i = _randint(rng, len(g)) if index is None else index
    out[i] ^= 1
    return out


def shuffle_mutation(g: np.ndarray, rng, start: int | None = None, stop: int | None = None
                     ) -> np.ndarray:
    """Shuffle the bits of a random contiguous range ``[start, stop)``."""
    if start is None:
        a, b = _randint(rng, len(g)), _randint(rng, len(g))
        start, stop = min(a, b), max(a, b) + 1
    out = g.copy()
    out[start:stop] = rng.permutation(out[start:stop])
    return out


def one_point_crossover(p1: np.ndarray, p2: np.ndarray, rng, point: int | None = None):
    if len(p1) != len(p2):
        raise ValueError("parents differ in length")
    k = (1 + _randint(rng, len(p1) - 1) if len(p1) > 1 else 0) if point is None else point
    return (np.concatenate((p1[:k], p2[k:])), np.concatenate((p2[:k], p1[k:])))


def uniform_crossover(p1: np.ndarray, p2: np.ndarray, rng) -> np.ndarray:
    if len(p1) != len(p2):
        raise ValueError("parents differ in length")
    return np.where(rng.random(len(p1)) < 0.5, p1, p2)


# --- float-vector operators -------------------------------------------------

GAUSS_SIGMA = 0.1


def blend_crossover(p1: np.ndarray, p2: np.ndarray, rng) -> np.ndarray:
    """Whole-vector arithmetic crossover with one uniform weight."""
    w = rng.random()
    return np.clip(w * p1 + (1.0 - w) * p2, 0.0, 1.0)


def reset_mutation(g: np.ndarray, rng) -> np.ndarray:
    out = g.copy()
    out[_randint(rng, len(g))] = rng.random()
    return out


def gaussian_mutation(g: np.ndarray, rng, sigma: float = GAUSS_SIGMA) -> np.ndarray:
    out = g.copy()
    i = _randint(rng, len(g))
    out[i] = min(1.0, max(0.0, out[i] + sigma * rng.standard_normal()))
    return out


# --- engine -------------------------------------------------------------------

@dataclass
class Individual:
    genotype: Any
    fitness: FitnessValue


@dataclass
class SstConfig:
    pop_size: int = 100
    p_mut: float = 0.5
    budget: int = 1_000_000
    ls: str = "none"
    seed: int = 0
    ls_trials: int = 25
    ls_fraction: float = 0.05
    time_limit: float | None = None

    def __post_init__(self):
        if self.pop_size < 3:
            raise ValueError("population size must be at least 3")
        if not 0.0 <= self.p_mut <= 1.0:
            raise ValueError("p_mut must lie in [0, 1]")
        if self.budget < self.pop_size:
            raise ValueError("budget must cover the initial population")
        if self.ls not in LS_MODES:
            raise ValueError(f"ls must be one of {LS_MODES}")
        if self.ls_trials < 1:
            raise ValueError("ls_trials must be >= 1")


@dataclass
class RunRecord:
    """Outcome of one run. ``best_fitness`` is kept at CSV precision (6
    decimals); the exact value is in ``best``."""

    seed: int
    best_fitness: float
    best_nl: int
    evals_used: int
    wall_time_s: float
    best_solution: str
    run_id: int = 0
    n: int = 0
    encoding: str = ""
    algo: str = "sst"
    ls: str = "none"
    pop_size: int = 0
    budget: int = 0
    best: FitnessValue | None = field(default=None, compare=False, repr=False)
    best_phenotype: TruthTable | None = field(default=None, compare=False, repr=False)
    trace: list = field(default_factory=list, compare=False, repr=False)


class Evaluator:
    """Counts fitness evaluations against an optional budget and remembers
    the best genotype seen."""

    def __init__(self, problem, budget: int | None = None):
        self.problem = problem
        self.budget = budget
        self.count = 0
        self.best: Individual | None = None

    @property
    def exhausted(self) -> bool:
        return self.budget is not None and self.count >= self.budget

    def __call__(self, genotype) -> FitnessValue:
        f = self.problem.evaluate(genotype)
        self.count += 1
        if self.best is None or f > self.best.fitness:
            self.best = Individual(genotype, f)
        return f


def _sample3(size: int, rng) -> tuple:
    a = _randint(rng, size)
    b = _randint(rng, size - 1)
    b += b >= a
    lo, hi = min(a, b), max(a, b)
    c = _randint(rng, size - 2)
    c += c >= lo
    c += c >= hi
    return a, b, c


def sst_step(pop: list, problem, evaluate, rng, p_mut: float = 0.5) -> int:
    """One steady-state iteration; returns the replaced population index."""
    if len(pop) < 3:
        raise ValueError("population too small for a 3-tournament")
    picks = _sample3(len(pop), rng)
    worst_fit = min(pop[i].fitness for i in picks)
    worst = [i for i in picks if pop[i].fitness == worst_fit]
    loser = worst[_randint(rng, len(worst))] if len(worst) > 1 else worst[0]
    pa, pb = (pop[i].genotype for i in picks if i != loser)
    child = problem.crossover(pa, pb, rng)
    if rng.random() < p_mut:
        child = problem.mutate(child, rng)
    pop[loser] = Individual(child, evaluate(child))
    return loser


def ls_mutation(ind: Individual, problem, evaluate: Evaluator, rng, trials: int = 25
                ) -> Individual:
    """LS1: random mutations until ``trials`` consecutive ones fail to improve."""
    current = ind
    fails = 0
    while fails < trials and not evaluate.exhausted:
        g = problem.mutate(current.genotype, rng)
        f = evaluate(g)
        if f > current.fitness:
            current = Individual(g, f)
            fails = 0
        else:
            fails += 1
    return current


def ls_bitflip(ind: Individual, problem, evaluate: Evaluator) -> Individual:
    """LS2: first-improvement single bit flips until no flip improves."""
    if not getattr(problem, "supports_bitflip", False):
        raise TypeError(f"{problem.encoding} genotypes do not support bit-flip local search")
    current = ind
    improved = True
    while improved:
        improved = False
        for i in range(problem.genome_length(current.genotype)):
            if evaluate.exhausted:
                return current
            g = problem.flip(current.genotype, i)
            f = evaluate(g)
            if f > current.fitness:
                current = Individual(g, f)
                improved = True
                break
    return current


def ls_combined(ind: Individual, problem, evaluate: Evaluator, rng, trials: int = 25
                ) -> Individual:
    """LS3: LS1 followed by LS2."""
    return ls_bitflip(ls_mutation(ind, problem, evaluate, rng, trials), problem, evaluate)


def _local_search(pop: list, problem, evaluate: Evaluator, rng, cfg: SstConfig) -> None:
    best = max(range(len(pop)), key=lambda i: pop[i].fitness)
    others = [i for i in range(len(pop)) if i != best]
    k = min(len(others), math.ceil(cfg.ls_fraction * len(pop)))
    chosen = rng.choice(others, size=k, replace=False).tolist() if k else []
    for i in [best] + chosen:
        if evaluate.exhausted:
            return
        ind = pop[i]
        if cfg.ls == "ls1":
            ind = ls_mutation(ind, problem, evaluate, rng, cfg.ls_trials)
        elif cfg.ls == "ls2":
            ind = ls_bitflip(ind, problem, evaluate)
        else:
            ind = ls_combined(ind, problem, evaluate, rng, cfg.ls_trials)
        pop[i] = ind


def run_sst(cfg: SstConfig, problem, on_generation=None) -> RunRecord:
    """Run SST until the evaluation budget (or time limit) is used up.

    With local search enabled, after every ``pop_size`` steps the chosen LS
    operator is applied to the current best and to ceil(ls_fraction * pop_size)
    other random individuals; its evaluations count against the budget.
    """
    if cfg.ls in ("ls2", "ls3") and not getattr(problem, "supports_bitflip", False):
        raise ValueError(f"{cfg.ls} needs a bitstring genotype, not {problem.encoding}")
    rng = np.random.default_rng(cfg.seed)
    start = time.perf_counter()
    deadline = None if cfg.time_limit is None else start + cfg.time_limit
    evaluate = Evaluator(problem, cfg.budget)
    pop = [Individual(g, evaluate(g)) for g in problem.initial_population(cfg.pop_size, rng)]
    trace = [(evaluate.count, evaluate.best.fitness)]
    steps = 0
    while not evaluate.exhausted:
        sst_step(pop, problem, evaluate, rng, cfg.p_mut)
        steps += 1
        if steps % cfg.pop_size == 0:
            if cfg.ls != "none":
                _local_search(pop, problem, evaluate, rng, cfg)
            trace.append((evaluate.count, evaluate.best.fitness))
            if on_generation is not None:
                on_generation(steps // cfg.pop_size, evaluate)
            if deadline is not None and time.perf_counter() >= deadline:
                break
    trace.append((evaluate.count, evaluate.best.fitness))
    best = evaluate.best
    wall = time.perf_counter() - start
    logger.debug("run seed=%d best=%s evals=%d", cfg.seed, best.fitness, evaluate.count)
    return RunRecord(
        seed=cfg.seed,
        best_fitness=round(best.fitness.value, 6),
        best_nl=best.fitness.nl,
        evals_used=evaluate.count,
        wall_time_s=round(wall, 3),
        best_solution=problem.serialize(best.genotype),
        n=problem.n,
        encoding=problem.encoding,
        ls=cfg.ls,
        pop_size=cfg.pop_size,
        budget=cfg.budget,
        best=best.fitness,
        best_phenotype=problem.phenotype(best.genotype),
        trace=trace,
    )


def run_fp_sst(cfg: SstConfig, problem) -> RunRecord:
    """SST over float-vector genotypes (the continuous GA)."""
    if problem.encoding != "fp":
        raise ValueError("run_fp_sst needs a float-vector problem")
    rec = run_sst(cfg, problem)
    rec.algo = "fp-sst"
    return rec
