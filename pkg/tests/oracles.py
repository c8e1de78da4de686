"""Independent brute-force reference implementations used as test oracles.

Nothing here calls the library's kernels; every function works from the raw
Cayley table (``g.table``) or from first-principles arithmetic.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np


def op(g, x, y):
    return int(g.table[x, y])


def neg(g, x):
    return next(y for y in range(g.order) if g.table[x, y] == 0)


def sums(g, a, b, exclude=lambda x, y: False):
    return {op(g, x, y) for x in a for y in b if not exclude(x, y)}


def plain(g, a, b):
    return sums(g, a, b)


def restricted(g, a, b):
    return sums(g, a, b, lambda x, y: x == y)


def twisted(g, a, b, perm):
    return sums(g, a, b, lambda x, y: x == perm[y])


def theorem_form(g, a, perm):
    return twisted(g, [perm[x] for x in a], a, perm)


def least_prime(n):
    return next(d for d in range(2, n + 1) if n % d == 0)


def element_order(g, x):
    k, y = 1, x
    while y != 0:
        y = op(g, y, x)
        k += 1
    return k


def all_subsets(n, max_size=None):
    top = n if max_size is None else max_size
    for k in range(1, top + 1):
        yield from itertools.combinations(range(n), k)


def is_hom(g, perm):
    n = g.order
    return all(perm[op(g, x, y)] == op(g, perm[x], perm[y]) for x in range(n) for y in range(n))


def brute_automorphisms(g):
    """Every bijection fixing 0 that respects the table (for n <= 8)."""
    n = g.order
    out = []
    for rest in itertools.permutations(range(1, n)):
        perm = (0, *rest)
        if is_hom(g, perm):
            out.append(perm)
    return out


def heis_matrix(p, index):
    a, rem = divmod(index, p * p)
    b, c = divmod(rem, p)
    return np.array([[1, a, c], [0, 1, b], [0, 0, 1]], dtype=np.int64)


def poly_coefficient(p, gamma_mul, gamma, m, n):
    """[x^{m-1} y^{n-1}] (x - γy)(x + y)^{m+n-3} over F_p by the binomial theorem term by term.

    (x + y)^k = Σ_i C(k, i) x^i y^{k-i}; multiplying by x picks i = m-2,
    multiplying by -γy picks i = m-1.  ``gamma_mul`` multiplies field elements.
    """
    k = m + n - 3
    from_x = comb(k, m - 2) % p if 0 <= m - 2 <= k else 0
    from_y = comb(k, m - 1) % p if 0 <= m - 1 <= k else 0
    return from_x, gamma_mul(gamma, from_y)
