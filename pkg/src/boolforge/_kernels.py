"""Compiled inner loops: Walsh-Hadamard butterfly, spectrum statistics and
prefix-tree evaluation over bit-packed truth tables.

Packed layout: table position ``i`` lives in ``words[i >> 6]`` at bit ``i & 63``.
"""
import numba as nb
import numpy as np

# opcodes shared with gp.py
OR, XOR, AND, AND2, XNOR, IF, NOT = range(7)
TERMINAL_BASE = 8


@nb.njit(cache=True)
def fwht_inplace(buf):
    size = buf.shape[0]
    h = 1
    while h < size:
        for i in range(0, size, 2 * h):
            for j in range(i, i + h):
                a = buf[j]
                b = buf[j + h]
                buf[j] = a + b
                buf[j + h] = a - b
        h *= 2


@nb.njit(cache=True)
def spectrum_from_bits(bits):
    buf = np.empty(bits.shape[0], np.int64)
    for i in range(bits.shape[0]):
        buf[i] = 1 - 2 * np.int64(bits[i])
    fwht_inplace(buf)
    return buf


@nb.njit(cache=True)
def _max_abs_count(buf):
    m = 0
    count = 0
    for i in range(buf.shape[0]):
        v = abs(buf[i])
        if v > m:
            m = v
            count = 1
        elif v == m:
            count += 1
    return m, count


@nb.njit(cache=True)
def nl_count_bits(bits):
    """(nonlinearity, #positions attaining max |W|) of a byte-per-bit table."""
    buf = spectrum_from_bits(bits)
    m, count = _max_abs_count(buf)
    return bits.shape[0] // 2 - m // 2, count


@nb.njit(cache=True)
def nl_count_mapped(src, index_map):
    """Same as nl_count_bits for the table ``src[index_map]``."""
    size = index_map.shape[0]
    buf = np.empty(size, np.int64)
    for i in range(size):
        buf[i] = 1 - 2 * np.int64(src[index_map[i]])
    fwht_inplace(buf)
    m, count = _max_abs_count(buf)
    return size // 2 - m // 2, count


@nb.njit(cache=True)
def eval_prefix(code, leaves):
    """Evaluate a prefix-coded tree bitwise over packed leaf tables.

    ``leaves[c]`` holds the packed table of terminal code ``c``. Unused high
    bits of the last word are left undefined.
    """
    nwords = leaves.shape[1]
    length = code.shape[0]
    stack = np.empty((length, nwords), np.uint64)
    sp = 0
    for i in range(length - 1, -1, -1):
        c = code[i]
        if c >= TERMINAL_BASE:
            for w in range(nwords):
                stack[sp, w] = leaves[c, w]
            sp += 1
        elif c == NOT:
            for w in range(nwords):
                stack[sp - 1, w] = ~stack[sp - 1, w]
        elif c == IF:
            for w in range(nwords):
                a = stack[sp - 1, w]
                b = stack[sp - 2, w]
                e = stack[sp - 3, w]
                stack[sp - 3, w] = (a & b) | (~a & e)
            sp -= 2
        else:
            for w in range(nwords):
                a = stack[sp - 1, w]
                b = stack[sp - 2, w]
                if c == OR:
                    r = a | b
                elif c == XOR:
                    r = a ^ b
                elif c == AND:
                    r = a & b
                elif c == AND2:
                    r = a & ~b
                else:
                    r = ~(a ^ b)
                stack[sp - 2, w] = r
            sp -= 1
    return stack[0].copy()


@nb.njit(cache=True)
def unpack_mapped(words, index_map):
    out = np.empty(index_map.shape[0], np.uint8)
    for i in range(index_map.shape[0]):
        k = index_map[i]
        out[i] = (words[k >> 6] >> np.uint64(k & 63)) & np.uint64(1)
    return out


@nb.njit(cache=True)
def tree_nl_count(code, leaves, index_map):
    """Fitness statistics of the table ``tree_output[index_map]``."""
    words = eval_prefix(code, leaves)
    size = index_map.shape[0]
    buf = np.empty(size, np.int64)
    for i in range(size):
        k = index_map[i]
        bit = (words[k >> 6] >> np.uint64(k & 63)) & np.uint64(1)
        buf[i] = 1 - 2 * np.int64(bit)
    fwht_inplace(buf)
    m, count = _max_abs_count(buf)
    return size // 2 - m // 2, count


@nb.njit(cache=True)
def prefix_ok(code, arity, legal):
    """True iff every code is legal and the arities form exactly one tree."""
    need = 1
    for i in range(code.shape[0]):
        c = code[i]
        if need == 0 or c < 0 or c >= legal.shape[0] or not legal[c]:
            return False
        need += arity[c] - 1
    return need == 0


@nb.njit(cache=True)
def tree_shape(code, arity):
    """Per-node subtree end index, depth (root 0) and height (leaf 0)."""
    length = code.shape[0]
    ends = np.empty(length, np.int64)
    heights = np.zeros(length, np.int64)
    for i in range(length - 1, -1, -1):
        j = i + 1
        h = -1
        for _ in range(arity[code[i]]):
            if heights[j] > h:
                h = heights[j]
            j = ends[j]
        ends[i] = j
        heights[i] = h + 1
    depths = np.zeros(length, np.int64)
    for i in range(length):
        j = i + 1
        for _ in range(arity[code[i]]):
            depths[j] = depths[i] + 1
            j = ends[j]
    return ends, depths, heights


@nb.njit(cache=True)
def matched_pairs(c1, e1, c2, e2, arity, same_arity):
    """Node pairs reachable from both roots along equal child indices.

    With ``same_arity`` descent stops below pairs whose arities differ (the
    common region); otherwise it follows every child index both nodes have.
    """
    cap = min(c1.shape[0], c2.shape[0])
    out = np.empty((cap, 2), np.int64)
    stack = np.empty((cap, 2), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    sp = 1
    k = 0
    while sp > 0:
        sp -= 1
        i = stack[sp, 0]
        j = stack[sp, 1]
        out[k, 0] = i
        out[k, 1] = j
        k += 1
        a1 = arity[c1[i]]
        a2 = arity[c2[j]]
        if same_arity and a1 != a2:
            continue
        ci = i + 1
        cj = j + 1
        for _ in range(min(a1, a2)):
            stack[sp, 0] = ci
            stack[sp, 1] = cj
            sp += 1
            ci = e1[ci]
            cj = e2[cj]
    return out[:k]


@nb.njit(cache=True)
def uniform_tree_crossover(c1, e1, c2, e2, arity, rng):
    """Uniform crossover over the common region, built in prefix order."""
    out = np.empty(c1.shape[0] + c2.shape[0], c1.dtype)
    cap = min(c1.shape[0], c2.shape[0])
    stack = np.empty((cap, 2), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    sp = 1
    k = 0
    while sp > 0:
        sp -= 1
        i = stack[sp, 0]
        j = stack[sp, 1]
        a = arity[c1[i]]
        if a > 0 and a == arity[c2[j]]:
            out[k] = c1[i] if rng.random() < 0.5 else c2[j]
            k += 1
            ci = i + 1
            cj = j + 1
            base = sp
            for _ in range(a):
                stack[sp, 0] = ci
                stack[sp, 1] = cj
                sp += 1
                ci = e1[ci]
                cj = e2[cj]
            # children must pop first-to-last
            lo = base
            hi = sp - 1
            while lo < hi:
                t0 = stack[lo, 0]
                t1 = stack[lo, 1]
                stack[lo, 0] = stack[hi, 0]
                stack[lo, 1] = stack[hi, 1]
                stack[hi, 0] = t0
                stack[hi, 1] = t1
                lo += 1
                hi -= 1
        elif rng.random() < 0.5:
            for t in range(i, e1[i]):
                out[k] = c1[t]
                k += 1
        else:
            for t in range(j, e2[j]):
                out[k] = c2[t]
                k += 1
    return out[:k].copy()
