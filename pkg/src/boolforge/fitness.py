"""Spectrum-aware nonlinearity fitness.

fitness = nl + (2^n - #max) / 2^n where #max counts the spectrum positions
attaining max |W_f(a)|. Values are exact rationals ``num / den``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .core import TruthTable
from .gp import ConstructionContext, SyntaxTree, apply_construction

DEFAULT_GROUPS = 10


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class FitnessValue:
    num: int
    den: int

    @classmethod
    def from_counts(cls, n: int, nl: int, max_count: int) -> "FitnessValue":
        size = 1 << n
        return cls(nl * size + size - max_count, size)

    @property
    def value(self) -> float:
        return self.num / self.den

    @property
    def nl(self) -> int:
        return self.num // self.den

    @property
    def frac(self) -> Fraction:
        return Fraction(self.num % self.den, self.den)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        return self.value

    def __eq__(self, other) -> bool:
        if not isinstance(other, FitnessValue):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __lt__(self, other) -> bool:
        if not isinstance(other, FitnessValue):
            return NotImplemented
        return self.num * other.den < other.num * self.den

    def __hash__(self) -> int:
        return hash(self.as_fraction())

    def __repr__(self) -> str:
        return f"FitnessValue({self.value:.6f})"


def fitness_from_bits(bits: np.ndarray, n: int) -> FitnessValue:
    nl, count = _kernels.nl_count_bits(bits)
    return FitnessValue.from_counts(n, int(nl), int(count))


def fitness_nl(tt: TruthTable) -> FitnessValue:
    return fitness_from_bits(tt.bits, tt.n)


def mean_fitness(values) -> FitnessValue:
    """Exact arithmetic mean of fitness values sharing one denominator."""
    values = list(values)
    if not values:
        raise ValueError("no fitness values to average")
    den = values[0].den
    if any(v.den != den for v in values):
        raise ValueError("averaged fitness values must share n")
    return FitnessValue(sum(v.num for v in values), den * len(values))


def fitness_construction(tree: SyntaxTree, seed_groups, expected_groups: int | None = DEFAULT_GROUPS
                         ) -> FitnessValue:
    """Mean fitness of the (n+2)-variable functions a construction tree builds
    from each group of four seeds."""
    groups = list(seed_groups)
    if expected_groups is not None and len(groups) != expected_groups:
        raise ValueError(f"expected {expected_groups} seed groups, got {len(groups)}")
    if not groups:
        raise ValueError("no seed groups")
    if len({g.n for g in groups}) != 1:
        raise ValueError("all seed groups must share n")
    return mean_fitness(fitness_nl(apply_construction(tree, g)) for g in groups)


def random_balanced(n: int, rng) -> TruthTable:
    bits = np.zeros(1 << n, np.uint8)
    bits[: 1 << (n - 1)] = 1
    return TruthTable.from_bits(rng.permutation(bits), n)


def make_seed_groups(n: int, rng_seed: int = 0, groups: int = DEFAULT_GROUPS) -> list:
    """Deterministic groups of four random balanced n-variable seed functions."""
    rng = np.random.default_rng(rng_seed)
    return [
        ConstructionContext(n, tuple(random_balanced(n, rng) for _ in range(4)))
        for _ in range(groups)
    ]
