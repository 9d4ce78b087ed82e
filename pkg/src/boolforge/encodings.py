"""Genotype -> truth table decoders for the bitstring, rotation-symmetric
bitstring and floating-point encodings."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import OrbitTable, TruthTable, expand_rs, orbit_count

DEFAULT_DEC = 3


@dataclass(frozen=True, eq=False)
class BitstringGenotype:
    bits: np.ndarray
    target_n: int

    def __post_init__(self):
        if len(self.bits) != 1 << self.target_n:
            raise ValueError(
                f"bitstring of length {len(self.bits)} does not encode n={self.target_n}"
            )


@dataclass(frozen=True, eq=False)
class RsBitstringGenotype:
    bits: np.ndarray
    target_n: int

    def __post_init__(self):
        if len(self.bits) != orbit_count(self.target_n):
            raise ValueError(
                f"RS genotype needs {orbit_count(self.target_n)} bits for "
                f"n={self.target_n}, got {len(self.bits)}"
            )


def float_dim(gsize: int, dec: int) -> int:
    return math.ceil(gsize / dec)


@dataclass(frozen=True, eq=False)
class FloatVectorGenotype:
    """Real vector in [0, 1]^dim, each coordinate standing for ``dec`` bits.

    When ``dec`` does not divide ``gsize`` the last coordinate carries
    surplus bits that are dropped on decoding.
    """

    values: np.ndarray
    dec: int
    gsize: int

    def __post_init__(self):
        if self.dec < 1:
            raise ValueError("dec must be >= 1")
        if len(self.values) != float_dim(self.gsize, self.dec):
            raise ValueError(
                f"dim {len(self.values)} incompatible with gsize={self.gsize}, dec={self.dec}"
            )
        v = np.asarray(self.values)
        if not ((v >= 0.0) & (v <= 1.0)).all():
            raise ValueError("float genotype values must lie in [0, 1]")

    @property
    def dim(self) -> int:
        return len(self.values)


def decode_bitstring(g: BitstringGenotype) -> TruthTable:
    return TruthTable.from_bits(g.bits, g.target_n)


def decode_rs(g: RsBitstringGenotype, orbits: OrbitTable) -> TruthTable:
    if orbits.n != g.target_n:
        raise ValueError(f"orbit table is for n={orbits.n}, genotype for n={g.target_n}")
    return expand_rs(g.bits, orbits)


def float_coord_to_int(d: float, dec: int) -> int:
    """floor(d / 2^-dec), with d = 1.0 clamped to the top value 2^dec - 1."""
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"coordinate {d} outside [0, 1]")
    if dec < 1:
        raise ValueError("dec must be >= 1")
    return min(int(d * (1 << dec)), (1 << dec) - 1)


def float_to_bits(values, dec: int, gsize: int) -> np.ndarray:
    """Vectorized decode: each coordinate to ``dec`` big-endian bits, truncated to gsize."""
    v = np.asarray(values, dtype=np.float64)
    ints = np.minimum((v * (1 << dec)).astype(np.int64), (1 << dec) - 1)
    shifts = np.arange(dec - 1, -1, -1)
    bits = ((ints[:, None] >> shifts) & 1).astype(np.uint8).ravel()
    return bits[:gsize]


def decode_float(g: FloatVectorGenotype, orbits: OrbitTable | None = None) -> TruthTable:
    """Decode to a truth table; with ``orbits`` the bits form an RS genotype."""
    bits = float_to_bits(g.values, g.dec, g.gsize)
    if orbits is not None:
        return expand_rs(bits, orbits)
    return TruthTable.from_bits(bits)


def format_bits(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def parse_bits(text: str) -> np.ndarray:
    s = text.strip()
    if not set(s) <= {"0", "1"}:
        raise ValueError("bitstring may contain only 0 and 1")
    return np.frombuffer(s.encode(), np.uint8) - ord("0")


def format_floats(values) -> str:
    return ",".join(f"{v:.17g}" for v in values)


def parse_floats(text: str) -> np.ndarray:
    return np.array([float(t) for t in text.split(",")], dtype=np.float64)
