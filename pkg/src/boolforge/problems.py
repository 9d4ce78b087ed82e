"""Problem definitions binding an encoding to its decoder and variation
operators, as consumed by :func:`boolforge.evolution.run_sst`."""
from __future__ import annotations

import numpy as np

from . import _kernels, gp
from .core import TruthTable, enumerate_orbits
from .encodings import DEFAULT_DEC, float_dim, float_to_bits, format_bits
from .evolution import (
    bit_mutation,
    blend_crossover,
    gaussian_mutation,
    one_point_crossover,
    reset_mutation,
    shuffle_mutation,
    uniform_crossover,
)
from .fitness import FitnessValue, make_seed_groups, mean_fitness


def _randint(rng, k: int) -> int:
    return int(rng.random() * k)


class Problem:
    encoding = ""
    supports_bitflip = False

    def initial_population(self, size: int, rng) -> list:
        return [self.random_genotype(rng) for _ in range(size)]


class BitstringProblem(Problem):
    """Truth-table genotypes, or one bit per rotation orbit when
    ``rotation_symmetric`` is set."""

    supports_bitflip = True

    def __init__(self, n: int, rotation_symmetric: bool = False):
        self.n = n
        self.rotation_symmetric = rotation_symmetric
        self.encoding = "tt-ri" if rotation_symmetric else "tt"
        if rotation_symmetric:
            self.index_map = enumerate_orbits(n).orbit_of.astype(np.int64)
            self.length = int(self.index_map.max()) + 1
        else:
            self.index_map = np.arange(1 << n, dtype=np.int64)
            self.length = 1 << n

    def random_genotype(self, rng) -> np.ndarray:
        return (rng.random(self.length) < 0.5).astype(np.uint8)

    def evaluate(self, g) -> FitnessValue:
        nl, count = _kernels.nl_count_mapped(g, self.index_map)
        return FitnessValue.from_counts(self.n, int(nl), int(count))

    def crossover(self, p1, p2, rng):
        if rng.random() < 0.5:
            return one_point_crossover(p1, p2, rng)[_randint(rng, 2)]
        return uniform_crossover(p1, p2, rng)

    def mutate(self, g, rng):
        if rng.random() < 0.5:
            return bit_mutation(g, rng)
        return shuffle_mutation(g, rng)

    def genome_length(self, g) -> int:
        return len(g)

    def flip(self, g, i: int):
        return bit_mutation(g, None, index=i)

    def phenotype(self, g) -> TruthTable:
        return TruthTable.from_bits(g[self.index_map], self.n)

    def serialize(self, g) -> str:
        tt = self.phenotype(g)
        return tt.to_hex() if self.n >= 2 else tt.to_binary()


class FloatProblem(Problem):
    """Real vectors in [0, 1]^dim, each coordinate decoding to ``dec`` bits."""

    encoding = "fp"

    def __init__(self, n: int, dec: int = DEFAULT_DEC):
        self.n = n
        self.dec = dec
        self.gsize = 1 << n
        self.dim = float_dim(self.gsize, dec)

    def random_genotype(self, rng) -> np.ndarray:
        return rng.random(self.dim)

    def bits(self, g) -> np.ndarray:
        return float_to_bits(g, self.dec, self.gsize)

    def evaluate(self, g) -> FitnessValue:
        nl, count = _kernels.nl_count_bits(self.bits(g))
        return FitnessValue.from_counts(self.n, int(nl), int(count))

    def crossover(self, p1, p2, rng):
        if rng.random() < 0.5:
            return blend_crossover(p1, p2, rng)
        return uniform_crossover(p1, p2, rng)

    def mutate(self, g, rng):
        if rng.random() < 0.5:
            return reset_mutation(g, rng)
        return gaussian_mutation(g, rng)

    def phenotype(self, g) -> TruthTable:
        return TruthTable.from_bits(self.bits(g), self.n)

    def serialize(self, g) -> str:
        tt = self.phenotype(g)
        return tt.to_hex() if self.n >= 2 else format_bits(tt.bits)


class TreeProblem(Problem):
    """GP syntax trees. ``mode``: ``direct`` evaluates over all 2^n inputs,
    ``part`` evaluates a ceil(log2 g_n)-input tree whose first g_n outputs are
    orbit bits, ``full`` evaluates an n-input tree at orbit representatives."""

    def __init__(self, n: int, mode: str = "direct", max_depth: int = gp.DEFAULT_MAX_DEPTH):
        self.n = n
        self.mode = mode
        self.max_depth = max_depth
        if mode == "direct":
            self.encoding = "gp"
            self.terminals = gp.direct_terminals(n)
            self.leaves = gp.projection_leaves(n)
            self.index_map = gp.identity_map(n)
        elif mode == "part":
            self.encoding = "gp-part"
            m = gp.part_input_count(n)
            self.terminals = gp.direct_terminals(m)
            self.leaves = gp.projection_leaves(m)
            self.index_map = enumerate_orbits(n).orbit_of.astype(np.int64)
        elif mode == "full":
            self.encoding = "gp-full"
            self.terminals = gp.direct_terminals(n)
            self.leaves = gp.representative_leaves(n)
            self.index_map = enumerate_orbits(n).orbit_of.astype(np.int64)
        else:
            raise ValueError(f"unknown tree mode {mode!r}")

    def initial_population(self, size: int, rng) -> list:
        return gp.ramped_half_and_half(size, self.terminals, rng)

    def random_genotype(self, rng):
        return self.initial_population(1, rng)[0]

    def evaluate(self, tree) -> FitnessValue:
        nl, count = _kernels.tree_nl_count(tree.code, self.leaves, self.index_map)
        return FitnessValue.from_counts(self.n, int(nl), int(count))

    def crossover(self, p1, p2, rng):
        return gp.tree_crossover(p1, p2, rng, max_depth=self.max_depth)

    def mutate(self, tree, rng):
        return gp.subtree_mutation(tree, rng, self.terminals, self.max_depth)

    def phenotype(self, tree) -> TruthTable:
        if self.mode == "direct":
            return gp.tree_to_truth_table(tree, self.n)
        if self.mode == "part":
            return gp.tree_to_rs_part(tree, self.n)
        return gp.tree_to_rs_full(tree, self.n)

    def serialize(self, tree) -> str:
        return str(tree)


class ConstructionProblem(Problem):
    """Secondary constructions building n-variable functions from four
    (n-2)-variable seeds; fitness averages over the seed groups."""

    encoding = "gp-scnd"

    def __init__(self, n: int, groups=None, groups_seed: int = 0,
                 max_depth: int = gp.DEFAULT_MAX_DEPTH):
        if n < 3:
            raise ValueError("constructions need a target of at least 3 variables")
        self.n = n
        self.seed_n = n - 2
        self.groups = list(groups) if groups is not None else make_seed_groups(
            self.seed_n, groups_seed)
        if any(g.n != self.seed_n for g in self.groups):
            raise ValueError(f"seed groups must have {self.seed_n} variables")
        self.max_depth = max_depth
        self.terminals = gp.construction_terminals(self.seed_n)
        self.index_map = gp.identity_map(n)

    def initial_population(self, size: int, rng) -> list:
        return gp.ramped_half_and_half(size, self.terminals, rng)

    def random_genotype(self, rng):
        return self.initial_population(1, rng)[0]

    def evaluate(self, tree) -> FitnessValue:
        values = []
        for g in self.groups:
            nl, count = _kernels.tree_nl_count(tree.code, g.leaves, self.index_map)
            values.append(FitnessValue.from_counts(self.n, int(nl), int(count)))
        return mean_fitness(values)

    def crossover(self, p1, p2, rng):
        return gp.tree_crossover(p1, p2, rng, max_depth=self.max_depth)

    def mutate(self, tree, rng):
        return gp.subtree_mutation(tree, rng, self.terminals, self.max_depth)

    def phenotype(self, tree) -> TruthTable:
        """The construction applied to the first seed group."""
        return gp.apply_construction(tree, self.groups[0])

    def serialize(self, tree) -> str:
        return str(tree)


def make_problem(encoding: str, n: int, **kw) -> Problem:
    if encoding == "tt":
        return BitstringProblem(n)
    if encoding == "tt-ri":
        return BitstringProblem(n, rotation_symmetric=True)
    if encoding == "fp":
        return FloatProblem(n, dec=kw.get("dec", DEFAULT_DEC))
    if encoding in ("gp", "gp-part", "gp-full"):
        mode = {"gp": "direct", "gp-part": "part", "gp-full": "full"}[encoding]
        return TreeProblem(n, mode, max_depth=kw.get("max_depth", gp.DEFAULT_MAX_DEPTH))
    if encoding == "gp-scnd":
        return ConstructionProblem(n, groups_seed=kw.get("groups_seed", 0),
                                   max_depth=kw.get("max_depth", gp.DEFAULT_MAX_DEPTH))
    raise ValueError(f"unknown encoding {encoding!r}")
