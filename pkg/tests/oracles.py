"""Slow, loop-based reference computations used as independent oracles."""
import itertools
import math
from collections import defaultdict

import numpy as np


def bits_of(x, m):
    return tuple((x >> k) & 1 for k in range(m))


def brute_subset_info(table, m, users):
    """I(X_J; Y, X_{J^c}) by explicit summation over dictionaries."""
    table = np.asarray(table)
    q = 1 << m
    users = set(users)
    if not users:
        return 0.0
    # p(x, y) with uniform x
    p_xy = {(x, y): table[x, y] / q for x in range(q) for y in range(table.shape[1])
            if table[x, y] > 0}
    p_rest = defaultdict(float)         # p(x_{J^c}, y)
    for (x, y), p in p_xy.items():
        rest = tuple(b for k, b in enumerate(bits_of(x, m)) if k not in users)
        p_rest[rest, y] += p
    h_cond = 0.0
    for (x, y), p in p_xy.items():
        rest = tuple(b for k, b in enumerate(bits_of(x, m)) if k not in users)
        h_cond -= p * math.log2(p / p_rest[rest, y])
    return len(users) - h_cond


def brute_form_info(table, m, S):
    """I(<S, X>; Y) with X uniform."""
    table = np.asarray(table)
    q = 1 << m
    joint = defaultdict(float)
    for x in range(q):
        s = bin(x & S).count("1") % 2
        for y in range(table.shape[1]):
            joint[s, y] += table[x, y] / q
    py = defaultdict(float)
    for (s, y), p in joint.items():
        py[y] += p
    return sum(p * math.log2(p / (0.5 * py[y])) for (s, y), p in joint.items() if p > 0)


def bec_info_recursion(eps, depth):
    """I of the 2**depth synthesized BECs in minus-first index order."""
    vals = [1 - eps]
    for _ in range(depth):
        vals = [w for v in vals for w in (v * v, 2 * v - v * v)]
    return vals


def bec_z_recursion(eps, depth):
    vals = [eps]
    for _ in range(depth):
        vals = [w for v in vals for w in (2 * v - v * v, v * v)]
    return vals


def kron_generator(n):
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    G = np.array([[1]], dtype=np.int64)
    while G.shape[0] < n:
        G = np.kron(G, F)
    return G


def gf2_rank(rows):
    a = np.array(rows, dtype=np.int64) % 2
    if a.size == 0:
        return 0
    a = a.copy()
    r = 0
    for c in range(a.shape[1]):
        piv = [i for i in range(r, a.shape[0]) if a[i, c]]
        if not piv:
            continue
        a[[r, piv[0]]] = a[[piv[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


def row_space(rows, m):
    """Set of all vectors spanned by ``rows`` (as tuples)."""
    rows = [tuple(int(v) % 2 for v in r) for r in rows]
    span = {tuple([0] * m)}
    for r in rows:
        span |= {tuple(a ^ b for a, b in zip(s, r)) for s in span}
    return span


def binomial_entropy(m):
    ps = [math.comb(m, k) / 2 ** m for k in range(m + 1)]
    return -sum(p * math.log2(p) for p in ps)


def bpsk_awgn_capacity(snr_linear):
    """Uniform-input binary AWGN capacity by quadrature (amplitude 1, noise var 1/snr)."""
    from scipy.integrate import quad
    sigma = math.sqrt(1 / snr_linear)

    def integrand(y):
        p1 = math.exp(-(y - 1) ** 2 / (2 * sigma ** 2))
        p0 = math.exp(-(y + 1) ** 2 / (2 * sigma ** 2))
        norm = 1 / math.sqrt(2 * math.pi * sigma ** 2)
        out = 0.0
        for a, b in ((p1, p0), (p0, p1)):
            if a > 0:
                out += 0.5 * norm * a * math.log2(2 * a / (a + b))
        return out

    return quad(integrand, -1 - 12 * sigma, 1 + 12 * sigma, limit=200)[0]


def all_subsets(m):
    for size in range(m + 1):
        yield from itertools.combinations(range(m), size)
