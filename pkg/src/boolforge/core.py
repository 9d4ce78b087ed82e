"""Boolean functions as truth tables: Walsh spectrum, nonlinearity, bounds and
rotation-symmetric orbits.

Input ordering is fixed everywhere: table position ``i`` holds ``f(x)`` where
``x = (x1, ..., xn)`` is the big-endian binary expansion of ``i`` (x1 is the
most significant bit).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels

MAX_ORBIT_N = 24


def _pack(bits: np.ndarray) -> np.ndarray:
    pad = (-len(bits)) % 64
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, np.uint8)])
    return np.packbits(bits, bitorder="little").view("<u8").astype(np.uint64)


def _unpack(words: np.ndarray, size: int) -> np.ndarray:
    raw = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")
    return raw[:size]


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Output column of an n-variable Boolean function, stored bit-packed."""

    n: int
    words: np.ndarray

    @classmethod
    def from_bits(cls, bits, n: int | None = None) -> "TruthTable":
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise ValueError("truth table must be one-dimensional")
        size = arr.shape[0]
        if n is None:
            if size < 2 or size & (size - 1):
                raise ValueError(f"truth table length {size} is not a power of two >= 2")
            n = size.bit_length() - 1
        elif size != 1 << n:
            raise ValueError(f"expected {1 << n} entries for n={n}, got {size}")
        if n < 1:
            raise ValueError("n must be positive")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("truth table entries must be 0 or 1")
        words = _pack(arr.astype(np.uint8))
        words.flags.writeable = False
        return cls(n, words)

    @classmethod
    def from_string(cls, text: str, fmt: str = "auto") -> "TruthTable":
        return parse_truth_table(text, fmt)

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def bits(self) -> np.ndarray:
        return _unpack(self.words, self.size)

    def weight(self) -> int:
        return int(self.bits.sum())

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.n, self.words.tobytes()))

    def __repr__(self) -> str:
        body = self.to_binary() if self.n <= 6 else self.to_hex()
        return f"TruthTable(n={self.n}, {body})"

    def to_binary(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def to_hex(self) -> str:
        if self.n < 2:
            raise ValueError("hex format needs at least 4 table entries")
        nibbles = self.bits.reshape(-1, 4) @ np.array([8, 4, 2, 1])
        return "".join("0123456789abcdef"[v] for v in nibbles)


def parse_truth_table(text: str, fmt: str = "auto") -> TruthTable:
    """Parse a '0'/'1' string or a hex string (most significant digit first).

    ``fmt="auto"`` reads binary when the text is only 0/1 characters of
    power-of-two length, hex otherwise; a ``0x`` prefix forces hex.
    """
    s = "".join(text.split()).lower()
    if s.startswith("0x"):
        s, fmt = s[2:], "hex"
    if not s:
        raise ValueError("empty truth table")
    if fmt == "auto":
        size = len(s)
        is_pow2 = size >= 2 and not size & (size - 1)
        fmt = "bin" if set(s) <= {"0", "1"} and is_pow2 else "hex"
    if fmt == "bin":
        if not set(s) <= {"0", "1"}:
            raise ValueError("binary truth table may contain only 0 and 1")
        return TruthTable.from_bits(np.frombuffer(s.encode(), np.uint8) - ord("0"))
    if fmt == "hex":
        try:
            values = [int(ch, 16) for ch in s]
        except ValueError:
            raise ValueError(f"invalid hex truth table {text!r}") from None
        bits = ((np.array(values)[:, None] >> np.array([3, 2, 1, 0])) & 1).ravel()
        return TruthTable.from_bits(bits)
    raise ValueError(f"unknown truth table format {fmt!r}")


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    n: int
    values: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, WalshSpectrum):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    __hash__ = None


def walsh_transform(tt: TruthTable) -> WalshSpectrum:
    """W_f(a) = sum_x (-1)^(f(x) xor a.x), by the n*2^n butterfly."""
    values = _kernels.spectrum_from_bits(tt.bits)
    values.flags.writeable = False
    return WalshSpectrum(tt.n, values)


def nonlinearity(spec: WalshSpectrum | TruthTable) -> int:
    if isinstance(spec, TruthTable):
        spec = walsh_transform(spec)
    return (1 << (spec.n - 1)) - int(np.abs(spec.values).max()) // 2


def is_balanced(tt: TruthTable) -> bool:
    return 2 * tt.weight() == tt.size


def covering_radius_bound(n: int) -> Fraction | float:
    """2^(n-1) - 2^(n/2-1).

    Exact ``Fraction`` for even n. For odd n the value is irrational and a
    float is returned; use :func:`covering_radius_floor` for exact comparisons.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2 == 0:
        return Fraction(2) ** (n - 1) - Fraction(2) ** (n // 2 - 1)
    return 2.0 ** (n - 1) - 2.0 ** (n / 2 - 1)


def _ceil_sqrt_pow2(e: int) -> int:
    """ceil(sqrt(2^e)) for any integer e (negative allowed)."""
    if e <= 0:
        return 1
    r = math.isqrt(1 << e)
    return r if r * r == 1 << e else r + 1


def covering_radius_floor(n: int) -> int:
    """floor of the covering radius bound, computed in integers."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2 == 0:
        return int(covering_radius_bound(n))
    # 2^(n/2-1) = sqrt(2^(n-2)), irrational for odd n
    return (1 << (n - 1)) - _ceil_sqrt_pow2(n - 2)


def _check_odd(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")


def quadratic_bound(n: int) -> int:
    _check_odd(n)
    return (1 << (n - 1)) - (1 << ((n - 1) // 2))


def odd_upper_bound(n: int) -> int:
    """2 * floor(2^(n-2) - 2^(n/2-2)) for odd n."""
    _check_odd(n)
    # 2^(n/2-2) = sqrt(2^(n-4)) is irrational, so floor(a - s) = a - ceil(s)
    return 2 * ((1 << (n - 2)) - _ceil_sqrt_pow2(n - 4))


def _totient(t: int) -> int:
    return sum(1 for k in range(1, t + 1) if math.gcd(k, t) == 1)


def orbit_count(n: int) -> int:
    """Number of cyclic-shift orbits on F_2^n (Burnside count)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = sum(_totient(t) << (n // t) for t in range(1, n + 1) if n % t == 0)
    return total // n


def rotate(idx, n: int):
    """Apply (x0, ..., x_{n-1}) -> (x_{n-1}, x0, ..., x_{n-2}) to input indices.

    x0 is the most significant bit, so this is a right rotation of the index.
    """
    return (idx >> 1) | ((idx & 1) << (n - 1))


@dataclass(frozen=True, eq=False)
class OrbitTable:
    """Partition of {0, ..., 2^n - 1} into rotation classes.

    ``orbit_of[i]`` is the orbit index of input ``i``; orbits are sorted by
    their representative (the smallest member).
    """

    n: int
    representatives: np.ndarray
    orbit_of: np.ndarray
    members: tuple

    @property
    def count(self) -> int:
        return len(self.representatives)

    @property
    def orbits(self) -> list:
        return [(int(r), list(m)) for r, m in zip(self.representatives, self.members)]


def enumerate_orbits(n: int, max_n: int = MAX_ORBIT_N) -> OrbitTable:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the orbit enumeration cap {max_n}")
    idx = np.arange(1 << n, dtype=np.int64)
    rep = idx.copy()
    r = idx
    for _ in range(n - 1):
        r = rotate(r, n)
        np.minimum(rep, r, out=rep)
    reps, orbit_of = np.unique(rep, return_inverse=True)
    members = []
    for x in reps.tolist():
        cycle = [x]
        y = rotate(x, n)
        while y != x:
            cycle.append(y)
            y = rotate(y, n)
        members.append(tuple(cycle))
    reps.flags.writeable = False
    orbit_of.flags.writeable = False
    return OrbitTable(n, reps, orbit_of, tuple(members))


def expand_rs(genotype_bits, orbits: OrbitTable) -> TruthTable:
    """Truth table whose value on every orbit member is that orbit's genotype bit."""
    g = np.asarray(genotype_bits, dtype=np.uint8)
    if g.shape != (orbits.count,):
        raise ValueError(f"expected {orbits.count} genotype bits, got {g.shape}")
    return TruthTable.from_bits(g[orbits.orbit_of], orbits.n)


def is_rotation_symmetric(tt: TruthTable) -> bool:
    bits = tt.bits
    idx = np.arange(tt.size)
    return bool(np.array_equal(bits, bits[rotate(idx, tt.n)]))


def representative_bits(tt: TruthTable, orbits: OrbitTable) -> np.ndarray:
    """The genotype read back from a table: its value at each representative."""
    return tt.bits[orbits.representatives]
