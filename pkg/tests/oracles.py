"""Slow, independent reference computations.

Nothing here imports the package: truth tables are plain lists indexed by
the little-endian vector index, matrices are tuples of row indices.
"""

import itertools


def rank(rows, n):
    rows = list(rows)
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i] >> c & 1), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> c & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def gl(n):
    """All invertible matrices by brute force over every n-tuple of rows."""
    return [rows for rows in itertools.product(range(1, 1 << n), repeat=n) if rank(rows, n) == n]


def apply(a, rows):
    out = 0
    for i, r in enumerate(rows):
        if a >> i & 1:
            out ^= r
    return out


def coeff(f, q, rows):
    n = len(rows)
    return sum((-1) ** (f[a] ^ q[apply(a, rows)]) for a in range(1 << n))


def walsh(f, v):
    return sum((-1) ** (f[a] ^ (bin(a & v).count("1") & 1)) for a in range(len(f)))


def anf_eval(monomials, n):
    """Truth table of an XOR of monomials, each a tuple of 1-based variable indices."""
    out = []
    for a in range(1 << n):
        out.append(sum(all(a >> (i - 1) & 1 for i in m) for m in monomials) & 1)
    return out


def degree(f, n):
    best = 0
    for mask in range(1 << n):
        c = 0
        for a in range(1 << n):
            if a & mask == a:
                c ^= f[a]
        if c:
            best = max(best, bin(mask).count("1"))
    return best
