from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolforge.core import (
    TruthTable, WalshSpectrum, covering_radius_bound, covering_radius_floor, enumerate_orbits,
    expand_rs, is_balanced, is_rotation_symmetric, nonlinearity, odd_upper_bound, orbit_count,
    parse_truth_table, quadratic_bound, representative_bits, rotate, walsh_transform,
)
from oracles import (
    brute_nonlinearity, index_to_tuple, naive_walsh, orbits_by_closure, rotl_tuple, tuple_to_index,
)


def tt(bits):
    return TruthTable.from_bits(bits)


def random_tables(n, count, seed):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=(count, 1 << n), dtype=np.uint8)


# --- truth tables -------------------------------------------------------------

class TestTruthTable:
    def test_roundtrip_bits(self):
        bits = [0, 1, 1, 0, 1, 0, 0, 1]
        t = tt(bits)
        assert t.n == 3 and t.size == 8
        assert t.bits.tolist() == bits
        assert t.weight() == 4

    @pytest.mark.parametrize("bad", [[0, 1, 1], [0], [0, 2, 1, 0], []])
    def test_rejects_bad(self, bad):
        with pytest.raises(ValueError):
            tt(bad)

    def test_n_mismatch(self):
        with pytest.raises(ValueError):
            TruthTable.from_bits([0, 1, 1, 0], n=3)

    def test_large_packing(self):
        bits = random_tables(13, 1, 3)[0]
        t = tt(bits)
        assert np.array_equal(t.bits, bits)
        assert t.words.shape == (128,)

    def test_equality_and_hash(self):
        a, b = tt([0, 1, 1, 0]), tt([0, 1, 1, 0])
        assert a == b and hash(a) == hash(b)
        assert a != tt([0, 1, 1, 1])

    def test_text_formats(self):
        t = parse_truth_table("0110")
        assert t.bits.tolist() == [0, 1, 1, 0]
        assert t.to_hex() == "6"
        assert parse_truth_table("0x6") == t
        assert parse_truth_table("6996").to_binary() == "0110100110010110"
        assert parse_truth_table("1001", "hex").n == 4
        assert parse_truth_table(" 01\n10 ") == t

    @given(st.integers(2, 9), st.integers(0, 2**32))
    @settings(max_examples=40, deadline=None)
    def test_hex_binary_roundtrip(self, n, seed):
        t = tt(random_tables(n, 1, seed)[0])
        assert parse_truth_table(t.to_hex(), "hex") == t
        assert parse_truth_table(t.to_binary(), "bin") == t

    @pytest.mark.parametrize("text", ["", "0x", "012", "zz", "0x1g"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_truth_table(text)


# --- Walsh spectrum -----------------------------------------------------------

@pytest.mark.parametrize("bits, expected", [
    ([0, 0, 0, 0], [4, 0, 0, 0]),
    ([0, 1, 1, 0], [0, 0, 0, 4]),
    ([0, 0, 0, 1], [2, 2, 2, -2]),
])
def test_walsh_examples(bits, expected):
    assert walsh_transform(tt(bits)).values.tolist() == expected


def test_walsh_example_matches_oracle():
    assert naive_walsh([0, 0, 0, 1]) == [2, 2, 2, -2]


def test_linear_function_spectrum():
    # f = x1 xor x3 at n=3 is the mask 101 = 5
    bits = [(x >> 2 ^ x) & 1 for x in range(8)]
    w = walsh_transform(tt(bits)).values
    assert w[5] == 8 and np.count_nonzero(w) == 1


@pytest.mark.parametrize("n", range(1, 9))
def test_fast_equals_naive(n):
    count = 200 if n <= 6 else 40
    for bits in random_tables(n, count, n):
        assert walsh_transform(tt(bits)).values.tolist() == naive_walsh(bits.tolist())


@pytest.mark.parametrize("n", range(1, 5))
def test_parseval_exhaustive(n):
    size = 1 << n
    for k in range(1 << size):
        bits = [(k >> i) & 1 for i in range(size)]
        w = walsh_transform(tt(bits)).values
        assert int((w * w).sum()) == size * size


@pytest.mark.parametrize("n", range(5, 14))
def test_parseval_random(n):
    for bits in random_tables(n, 20, 100 + n):
        w = walsh_transform(tt(bits)).values
        assert int((w * w).sum()) == 1 << (2 * n)


# --- nonlinearity -----------------------------------------------------------

def test_nonlinearity_examples():
    assert nonlinearity(WalshSpectrum(2, np.array([4, 0, 0, 0]))) == 0
    assert nonlinearity(WalshSpectrum(2, np.array([2, 2, 2, -2]))) == 1
    assert brute_nonlinearity([0, 0, 0, 1]) == 1


def test_nonlinearity_exhaustive_n3():
    for k in range(256):
        bits = [(k >> i) & 1 for i in range(8)]
        assert nonlinearity(tt(bits)) == brute_nonlinearity(bits)


@pytest.mark.parametrize("n", range(4, 7))
def test_nonlinearity_random(n):
    for bits in random_tables(n, 100, 7 * n):
        assert nonlinearity(tt(bits)) == brute_nonlinearity(bits.tolist())


def test_bent_n4():
    bits = [((x >> 3) & (x >> 2) ^ (x >> 1) & x) & 1 for x in range(16)]
    assert nonlinearity(tt(bits)) == 6 == covering_radius_bound(4)


@pytest.mark.parametrize("n", range(2, 12))
def test_nonlinearity_below_bounds(n):
    for bits in random_tables(n, 30, n):
        nl = nonlinearity(tt(bits))
        assert nl <= covering_radius_floor(n)
        if n % 2 and n >= 3:
            assert nl <= odd_upper_bound(n)


def test_balanced():
    assert is_balanced(tt([0, 1, 1, 0]))
    assert not is_balanced(tt([0, 0, 0, 1]))
    assert is_balanced(tt([0, 1, 1, 0, 1, 0, 0, 1]))


# --- bounds -------------------------------------------------------------------

def test_covering_radius_bound():
    assert covering_radius_bound(4) == 6
    assert covering_radius_bound(2) == 1
    assert isinstance(covering_radius_bound(6), Fraction)
    assert covering_radius_bound(7) == pytest.approx(64 - 2 ** 2.5)
    assert covering_radius_floor(7) == 58
    for n in range(1, 30):
        assert covering_radius_floor(n) == math.floor(2 ** (n - 1) - 2 ** (n / 2 - 1))


def test_quadratic_bound():
    assert [quadratic_bound(n) for n in (7, 9, 11, 13)] == [56, 240, 992, 4032]
    assert quadratic_bound(3) == 2
    assert quadratic_bound(9) < 242


def test_odd_upper_bound():
    assert [odd_upper_bound(n) for n in (7, 9, 11, 13)] == [58, 244, 1000, 4050]
    assert odd_upper_bound(3) == 2
    assert odd_upper_bound(5) == 12
    for n in range(3, 40, 2):
        ref = 2 * math.floor(2 ** (n - 2) - 2 ** ((n - 4) / 2)) if n < 30 else None
        if ref is not None:
            assert odd_upper_bound(n) == ref


@pytest.mark.parametrize("fn", [quadratic_bound, odd_upper_bound])
@pytest.mark.parametrize("n", [2, 4, 1, 0])
def test_odd_only(fn, n):
    with pytest.raises(ValueError):
        fn(n)


# --- orbits -------------------------------------------------------------------

def test_orbit_counts():
    assert [orbit_count(n) for n in (7, 9, 11, 13)] == [20, 60, 188, 632]
    assert orbit_count(3) == 4
    assert orbit_count(4) == 6
    assert orbit_count(1) == 2


@pytest.mark.parametrize("n", range(1, 14))
def test_orbit_partition(n):
    orb = enumerate_orbits(n)
    assert orb.count == orbit_count(n)
    members = np.concatenate(orb.members)
    assert sorted(members.tolist()) == list(range(1 << n))
    for rep, mem in zip(orb.representatives, orb.members):
        assert rep == min(mem)
        assert set(rotate(np.asarray(mem), n).tolist()) == set(mem)
    assert np.array_equal(orb.orbit_of[orb.representatives], np.arange(orb.count))


@pytest.mark.parametrize("n", range(1, 9))
def test_orbits_match_closure_oracle(n):
    ref = sorted(sorted(tuple_to_index(t) for t in o) for o in orbits_by_closure(n))
    got = sorted(sorted(m) for m in enumerate_orbits(n).members)
    assert got == ref


def test_rotate_is_cyclic_shift():
    n = 5
    for i in range(1 << n):
        assert rotate(i, n) == tuple_to_index(rotl_tuple(index_to_tuple(i, n)))


def test_orbits_n3():
    orb = enumerate_orbits(3)
    assert orb.representatives.tolist() == [0b000, 0b001, 0b011, 0b111]
    assert sorted(orb.members[1]) == [0b001, 0b010, 0b100]
    one = enumerate_orbits(1)
    assert [list(m) for m in one.members] == [[0], [1]]


def test_expand_rs_examples():
    orb = enumerate_orbits(3)
    rs_tt = expand_rs([0, 1, 0, 1], orb)
    assert rs_tt.bits.tolist() == [0, 1, 1, 0, 1, 0, 0, 1]
    assert is_rotation_symmetric(rs_tt)
    assert expand_rs([0, 0, 0, 0], orb).weight() == 0
    assert expand_rs([1, 0], enumerate_orbits(1)).bits.tolist() == [1, 0]
    with pytest.raises(ValueError):
        expand_rs([0, 1, 0], orb)


def test_is_rotation_symmetric():
    assert not is_rotation_symmetric(tt([0, 1, 0, 0]))
    assert is_rotation_symmetric(tt([0] * 8))
    assert is_rotation_symmetric(tt([1] * 16))


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13])
def test_expand_read_identity(n):
    orb = enumerate_orbits(n)
    rng = np.random.default_rng(n)
    for _ in range(10):
        g = rng.integers(0, 2, orb.count, dtype=np.uint8)
        t = expand_rs(g, orb)
        assert is_rotation_symmetric(t)
        assert np.array_equal(representative_bits(t, orb), g)
        assert expand_rs(representative_bits(t, orb), orb) == t


def test_rs_by_brute_force_n4():
    # every table that is RS by tuple-shift definition is exactly an expand_rs image
    orb = enumerate_orbits(4)
    images = {expand_rs([(k >> i) & 1 for i in range(6)], orb) for k in range(64)}
    count = 0
    for k in range(1 << 16):
        bits = [(k >> i) & 1 for i in range(16)]
        sym = all(bits[x] == bits[tuple_to_index(rotl_tuple(index_to_tuple(x, 4)))]
                  for x in range(16))
        if sym:
            count += 1
            assert tt(bits) in images
    assert count == 64


def test_enumerate_orbits_limit():
    with pytest.raises(ValueError):
        enumerate_orbits(30)
    with pytest.raises(ValueError):
        enumerate_orbits(0)
