"""Syntax-tree genotypes over the Boolean operator set
{OR, XOR, AND, AND2, XNOR, IF, NOT}.

Trees are stored as prefix (Polish) code arrays. Terminals are input variables
``x1, x2, ...`` or, for secondary constructions, the seed tags ``f1..f4``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import _kernels
from ._kernels import AND, AND2, IF, NOT, OR, TERMINAL_BASE, XNOR, XOR
from .core import OrbitTable, TruthTable, _pack, enumerate_orbits, orbit_count

OP_NAMES = ("OR", "XOR", "AND", "AND2", "XNOR", "IF", "NOT")
OPERATORS = tuple(range(len(OP_NAMES)))
SEED_BASE = TERMINAL_BASE  # f1..f4 -> 8..11
VAR_BASE = 16  # x_k -> 15 + k
MAX_CODE = 256

ARITY = np.zeros(MAX_CODE, np.int64)
ARITY[[OR, XOR, AND, AND2, XNOR]] = 2
ARITY[IF] = 3
ARITY[NOT] = 1

LEGAL = np.zeros(MAX_CODE, np.bool_)
LEGAL[list(OPERATORS)] = True
LEGAL[SEED_BASE:SEED_BASE + 4] = True
LEGAL[VAR_BASE:] = True

CROSSOVER_KINDS = ("subtree", "uniform", "size_fair", "one_point", "context_preserving")

DEFAULT_MAX_DEPTH = 8
INIT_MIN_DEPTH, INIT_MAX_DEPTH = 2, 6
MUTATION_MAX_DEPTH = 4


def var(k: int) -> int:
    """Terminal code of input variable x_k (1-based)."""
    return VAR_BASE + k - 1


def seed(k: int) -> int:
    """Terminal code of seed function f_k (1-based, k <= 4)."""
    if not 1 <= k <= 4:
        raise ValueError("seed index must be in 1..4")
    return SEED_BASE + k - 1


def code_name(c: int) -> str:
    if c < len(OP_NAMES):
        return OP_NAMES[c]
    if c >= VAR_BASE:
        return f"x{c - VAR_BASE + 1}"
    if SEED_BASE <= c < SEED_BASE + 4:
        return f"f{c - SEED_BASE + 1}"
    raise ValueError(f"unknown node code {c}")


def direct_terminals(n: int) -> tuple:
    return tuple(var(k) for k in range(1, n + 1))


def construction_terminals(n: int) -> tuple:
    """Leaves of an n -> n+2 construction: four seeds and x_{n+1}, x_{n+2}."""
    return tuple(seed(k) for k in range(1, 5)) + (var(n + 1), var(n + 2))


@dataclass(frozen=True, eq=False)
class SyntaxTree:
    code: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.code, dtype=np.int16)
        object.__setattr__(self, "code", c)
        if c.ndim != 1 or not _kernels.prefix_ok(c, ARITY, LEGAL):
            raise ValueError(f"malformed prefix tree {c.tolist()}")

    @classmethod
    def parse(cls, text: str) -> "SyntaxTree":
        return parse_tree(text)

    @cached_property
    def _shape(self):
        return _kernels.tree_shape(self.code, ARITY)

    @property
    def ends(self) -> np.ndarray:
        return self._shape[0]

    @property
    def depths(self) -> np.ndarray:
        return self._shape[1]

    @property
    def heights(self) -> np.ndarray:
        return self._shape[2]

    @property
    def depth(self) -> int:
        return int(self.heights[0])

    @property
    def size(self) -> int:
        return len(self.code)

    def __len__(self) -> int:
        return len(self.code)

    def terminals(self) -> set:
        return {int(c) for c in self.code if c >= TERMINAL_BASE}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SyntaxTree):
            return NotImplemented
        return np.array_equal(self.code, other.code)

    def __hash__(self) -> int:
        return hash(self.code.tobytes())

    def __str__(self) -> str:
        out = []
        pending = []
        for c in self.code.tolist():
            a = int(ARITY[c])
            out.append(code_name(c))
            if a:
                out.append("(")
                pending.append(a)
                continue
            while pending:
                pending[-1] -= 1
                if pending[-1]:
                    out.append(",")
                    break
                pending.pop()
                out.append(")")
        return "".join(out)

    def __repr__(self) -> str:
        return f"SyntaxTree({self})"


_TOKEN = re.compile(r"\s*([A-Za-z][A-Za-z0-9]*|\(|\)|,)")


def parse_tree(text: str) -> SyntaxTree:
    """Parse prefix notation such as ``AND(XOR(x1,x2),NOT(x3))``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected character at {pos} in {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    codes = []
    i = 0

    def node():
        nonlocal i
        if i >= len(tokens):
            raise ValueError("unexpected end of tree text")
        tok = tokens[i]
        i += 1
        up = tok.upper()
        if up in OP_NAMES:
            c = OP_NAMES.index(up)
            codes.append(c)
            _expect("(")
            for k in range(ARITY[c]):
                if k:
                    _expect(",")
                node()
            _expect(")")
        elif re.fullmatch(r"[xX]\d+", tok) and int(tok[1:]) >= 1:
            codes.append(var(int(tok[1:])))
        elif re.fullmatch(r"[fF][1-4]", tok):
            codes.append(seed(int(tok[1:])))
        else:
            raise ValueError(f"unknown symbol {tok!r}")

    def _expect(sym):
        nonlocal i
        if i >= len(tokens) or tokens[i] != sym:
            raise ValueError(f"expected {sym!r} in {text!r}")
        i += 1

    node()
    if i != len(tokens):
        raise ValueError(f"trailing tokens in {text!r}")
    return SyntaxTree(np.array(codes, dtype=np.int16))


# --- evaluation ------------------------------------------------------------

def _apply(op: int, args) -> int:
    if op == OR:
        return args[0] | args[1]
    if op == XOR:
        return args[0] ^ args[1]
    if op == AND:
        return args[0] & args[1]
    if op == AND2:
        return args[0] & (1 - args[1])
    if op == XNOR:
        return 1 - (args[0] ^ args[1])
    if op == IF:
        return args[1] if args[0] else args[2]
    if op == NOT:
        return 1 - args[0]
    raise ValueError(f"unknown operator {op}")


def eval_tree(tree: SyntaxTree, assignment, seed_values=None) -> int:
    """Evaluate at one point. ``assignment[k-1]`` is x_k; ``seed_values[k-1]`` is f_k."""
    code = tree.code.tolist()
    pos = 0

    def rec():
        nonlocal pos
        c = code[pos]
        pos += 1
        if c >= VAR_BASE:
            k = c - VAR_BASE
            if k >= len(assignment):
                raise ValueError(f"variable x{k + 1} is unbound")
            return int(assignment[k]) & 1
        if c >= SEED_BASE:
            if seed_values is None:
                raise ValueError(f"seed {code_name(c)} is unbound")
            return int(seed_values[c - SEED_BASE]) & 1
        args = [rec() for _ in range(ARITY[c])]
        return _apply(c, args)

    return rec()


def _empty_leaves(nwords: int) -> np.ndarray:
    return np.zeros((MAX_CODE, nwords), np.uint64)


@lru_cache(maxsize=None)
def projection_leaves(n: int) -> np.ndarray:
    """Packed tables of x1..xn over all 2^n inputs (x1 most significant)."""
    idx = np.arange(1 << n)
    leaves = _empty_leaves(max(1, (1 << n) // 64))
    for k in range(1, n + 1):
        leaves[var(k)] = _pack(((idx >> (n - k)) & 1).astype(np.uint8))
    leaves.flags.writeable = False
    return leaves


@lru_cache(maxsize=None)
def representative_leaves(n: int) -> np.ndarray:
    """Packed tables of x1..xn evaluated only at the orbit representatives."""
    reps = enumerate_orbits(n).representatives
    leaves = _empty_leaves(math.ceil(len(reps) / 64))
    for k in range(1, n + 1):
        leaves[var(k)] = _pack(((reps >> (n - k)) & 1).astype(np.uint8))
    leaves.flags.writeable = False
    return leaves


@lru_cache(maxsize=None)
def identity_map(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _check_vars(tree: SyntaxTree, n: int) -> None:
    for c in tree.terminals():
        if c < VAR_BASE:
            raise ValueError(f"terminal {code_name(c)} not allowed in a direct tree")
        if c - VAR_BASE >= n:
            raise ValueError(f"variable {code_name(c)} out of range for n={n}")


def tree_to_truth_table(tree: SyntaxTree, n: int) -> TruthTable:
    _check_vars(tree, n)
    words = _kernels.eval_prefix(tree.code, projection_leaves(n))
    return TruthTable.from_bits(_kernels.unpack_mapped(words, identity_map(n)), n)


def part_input_count(target_n: int) -> int:
    """Smallest m with 2^m >= g_n: tree arity for the GP/PART decoding."""
    return max(1, math.ceil(math.log2(orbit_count(target_n))))


def tree_to_rs_part(tree: SyntaxTree, target_n: int) -> TruthTable:
    """Evaluate a tree over m = ceil(log2 g_n) inputs, keep the first g_n
    outputs as the orbit bits and expand them."""
    m = part_input_count(target_n)
    _check_vars(tree, m)
    orbits = enumerate_orbits(target_n)
    words = _kernels.eval_prefix(tree.code, projection_leaves(m))
    return TruthTable.from_bits(_kernels.unpack_mapped(words, orbits.orbit_of), target_n)


def tree_to_rs_full(tree: SyntaxTree, target_n: int) -> TruthTable:
    """Evaluate a target_n-input tree at orbit representatives only and copy
    each value to the whole orbit."""
    _check_vars(tree, target_n)
    orbits = enumerate_orbits(target_n)
    words = _kernels.eval_prefix(tree.code, representative_leaves(target_n))
    return TruthTable.from_bits(_kernels.unpack_mapped(words, orbits.orbit_of), target_n)


# --- secondary construction -----------------------------------------------

@dataclass(frozen=True, eq=False)
class ConstructionContext:
    """Four seed functions of n variables feeding an n -> n+2 construction.

    In the (n+2)-variable output, index ``i`` reads the seeds at ``i >> 2``;
    x_{n+1} is index bit 0 and x_{n+2} is index bit 1.
    """

    n: int
    seeds: tuple

    def __post_init__(self):
        if len(self.seeds) != 4:
            raise ValueError("a construction context needs exactly 4 seed functions")
        if any(s.n != self.n for s in self.seeds):
            raise ValueError("all seeds must have n variables")

    @cached_property
    def leaves(self) -> np.ndarray:
        size = 1 << (self.n + 2)
        idx = np.arange(size)
        leaves = _empty_leaves(max(1, size // 64))
        for k, s in enumerate(self.seeds, start=1):
            leaves[seed(k)] = _pack(s.bits[idx >> 2])
        leaves[var(self.n + 1)] = _pack((idx & 1).astype(np.uint8))
        leaves[var(self.n + 2)] = _pack(((idx >> 1) & 1).astype(np.uint8))
        leaves.flags.writeable = False
        return leaves


def _check_construction(tree: SyntaxTree, n: int) -> None:
    allowed = set(construction_terminals(n))
    for c in tree.terminals():
        if c not in allowed:
            raise ValueError(f"terminal {code_name(c)} not allowed in an n={n} construction")


def apply_construction(tree: SyntaxTree, ctx: ConstructionContext) -> TruthTable:
    _check_construction(tree, ctx.n)
    words = _kernels.eval_prefix(tree.code, ctx.leaves)
    return TruthTable.from_bits(_kernels.unpack_mapped(words, identity_map(ctx.n + 2)))


# --- random generation and variation ----------------------------------------

def _randint(rng, k: int) -> int:
    return int(rng.random() * k)


def _grow(out: list, depth: int, max_depth: int, terminals, rng, full: bool) -> None:
    nf, nt = len(OPERATORS), len(terminals)
    if depth >= max_depth:
        out.append(terminals[_randint(rng, nt)])
        return
    if full or depth == 0:
        pick_op = True
    else:
        pick_op = rng.random() < nf / (nf + nt)
    if not pick_op:
        out.append(terminals[_randint(rng, nt)])
        return
    op = OPERATORS[_randint(rng, nf)]
    out.append(op)
    for _ in range(ARITY[op]):
        _grow(out, depth + 1, max_depth, terminals, rng, full)


def random_tree(max_depth: int, terminals, rng, method: str = "grow") -> SyntaxTree:
    """Grow or full tree with depth <= max_depth (a single leaf has depth 0)."""
    if method not in ("grow", "full"):
        raise ValueError(f"unknown method {method!r}")
    out: list = []
    if max_depth <= 0:
        out.append(terminals[_randint(rng, len(terminals))])
    else:
        _grow(out, 0, max_depth, terminals, rng, method == "full")
    return SyntaxTree(np.array(out, dtype=np.int16))


def ramped_half_and_half(size: int, terminals, rng,
                         min_depth: int = INIT_MIN_DEPTH,
                         max_depth: int = INIT_MAX_DEPTH) -> list:
    depths = range(min_depth, max_depth + 1)
    trees = []
    for i in range(size):
        d = depths[i % len(depths)]
        method = "full" if (i // len(depths)) % 2 else "grow"
        trees.append(random_tree(d, terminals, rng, method))
    return trees


def _splice(target: SyntaxTree, i: int, donor: np.ndarray) -> SyntaxTree:
    c = target.code
    return SyntaxTree(np.concatenate((c[:i], donor, c[target.ends[i]:])))


def _subtree(tree: SyntaxTree, i: int) -> np.ndarray:
    return tree.code[i:tree.ends[i]]


def _height(tree: SyntaxTree, i: int) -> int:
    return int(tree.heights[i])


def subtree_mutation(tree: SyntaxTree, rng, terminals,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> SyntaxTree:
    """Replace a uniformly chosen node's subtree with a fresh grown subtree."""
    i = _randint(rng, len(tree))
    room = max_depth - int(tree.depths[i])
    donor = random_tree(min(room, MUTATION_MAX_DEPTH), terminals, rng, "grow")
    return _splice(tree, i, donor.code)


def common_region(t1: SyntaxTree, t2: SyntaxTree) -> np.ndarray:
    """Node pairs reached from the roots through ancestors of equal arity."""
    return _kernels.matched_pairs(t1.code, t1.ends, t2.code, t2.ends, ARITY, True)


def shared_positions(t1: SyntaxTree, t2: SyntaxTree) -> np.ndarray:
    """Node pairs with identical coordinates (path of child indices) in both trees."""
    return _kernels.matched_pairs(t1.code, t1.ends, t2.code, t2.ends, ARITY, False)


def _swap_at(p1: SyntaxTree, p2: SyntaxTree, pairs: np.ndarray, rng) -> SyntaxTree:
    i, j = pairs[_randint(rng, len(pairs))]
    return _splice(p1, int(i), _subtree(p2, int(j)))


def _uniform(p1: SyntaxTree, p2: SyntaxTree, rng) -> SyntaxTree:
    return SyntaxTree(
        _kernels.uniform_tree_crossover(p1.code, p1.ends, p2.code, p2.ends, ARITY, rng))


def _size_fair(p1: SyntaxTree, p2: SyntaxTree, rng, max_depth: int):
    """Donor subtree drawn with no expected size change (sizes <= 2*s1 + 1)."""
    i = _randint(rng, len(p1))
    s1 = int(p1.ends[i]) - i
    sizes = p2.ends - np.arange(len(p2))
    room = max_depth - int(p1.depths[i])
    ok = (sizes <= 2 * s1 + 1) & (p2.heights <= room)
    smaller = np.flatnonzero(ok & (sizes < s1))
    equal = np.flatnonzero(ok & (sizes == s1))
    larger = np.flatnonzero(ok & (sizes > s1))
    if not (len(smaller) or len(equal) or len(larger)):
        return None
    if len(equal):
        p_eq = 1.0 / s1 if len(smaller) or len(larger) else 1.0
    else:
        p_eq = 0.0
    if len(smaller) and len(larger):
        mu_minus = sizes[smaller].mean()
        mu_plus = sizes[larger].mean()
        p_plus = (1 - p_eq) * (s1 - mu_minus) / (mu_plus - mu_minus)
        p_minus = 1 - p_eq - p_plus
    elif len(smaller):
        p_plus, p_minus = 0.0, 1 - p_eq
    else:
        p_plus, p_minus = 1 - p_eq, 0.0
    u = rng.random()
    if u < p_eq:
        group = equal
    elif u < p_eq + p_minus:
        group = smaller
    else:
        group = larger
    j = int(group[_randint(rng, len(group))])
    return _splice(p1, i, _subtree(p2, j))


def _subtree_swap(p1: SyntaxTree, p2: SyntaxTree, rng, max_depth: int, tries: int = 10):
    for _ in range(tries):
        i = _randint(rng, len(p1))
        j = _randint(rng, len(p2))
        if int(p1.depths[i]) + _height(p2, j) <= max_depth:
            return _splice(p1, i, _subtree(p2, j))
    return None


def tree_crossover(p1: SyntaxTree, p2: SyntaxTree, rng, kind: str | None = None,
                   max_depth: int = DEFAULT_MAX_DEPTH) -> SyntaxTree:
    """One offspring from two parents; ``kind=None`` draws one of the five
    crossover kinds uniformly. Falls back to a copy of ``p1`` when no
    depth-feasible exchange exists."""
    if kind is None:
        kind = CROSSOVER_KINDS[_randint(rng, len(CROSSOVER_KINDS))]
    if kind == "subtree":
        child = _subtree_swap(p1, p2, rng, max_depth)
    elif kind == "uniform":
        child = _uniform(p1, p2, rng)
    elif kind == "size_fair":
        child = _size_fair(p1, p2, rng, max_depth)
    elif kind == "one_point":
        child = _swap_at(p1, p2, common_region(p1, p2), rng)
    elif kind == "context_preserving":
        child = _swap_at(p1, p2, shared_positions(p1, p2), rng)
    else:
        raise ValueError(f"unknown crossover kind {kind!r}")
    return p1 if child is None else child


def check_tree(tree: SyntaxTree, terminals, max_depth: int) -> None:
    """Raise if the tree breaks arity, depth or terminal-set constraints."""
    need = 1
    for c in tree.code.tolist():
        need += ARITY[c] - 1
        if c >= TERMINAL_BASE and c not in terminals:
            raise ValueError(f"illegal terminal {code_name(c)}")
    if need != 0:
        raise ValueError("arity violation")
    if tree.depth > max_depth:
        raise ValueError(f"depth {tree.depth} exceeds cap {max_depth}")
