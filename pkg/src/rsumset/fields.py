"""Small finite fields F_{p^α} realised as F_p[x]/(f).

Element ``k`` has base-p digits equal to its polynomial coordinates, constant
term first: in F_9 = F_3[x]/(x²+2x+2) the index 5 = 2 + 1·3 is ``2 + x``.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError
from .groups import is_prime


def _load_modulus_table() -> dict[tuple[int, int], tuple[int, ...]]:
    table = {}
    text = resources.files("rsumset").joinpath("data/conway.txt").read_text()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        p, a, *coeffs = map(int, line.split())
        table[(p, a)] = tuple(coeffs)
    return table


MODULI = _load_modulus_table()


def _poly_rem(num: list[int], den: Sequence[int], p: int) -> list[int]:
    num = num[:]
    d = len(den) - 1
    lead_inv = pow(den[-1], p - 2, p)
    for k in range(len(num) - 1, d - 1, -1):
        c = num[k] * lead_inv % p
        if c:
            for i in range(d + 1):
                num[k - d + i] = (num[k - d + i] - c * den[i]) % p
    return num[:d]


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility of f over F_p.

    Degrees up to 3 only need a root check; above that every monic factor of
    degree <= deg/2 is tried.
    """
    f = list(f)
    d = len(f) - 1
    if d < 1 or f[-1] % p == 0:
        return False
    if d == 1:
        return True
    if d <= 3:
        return all(sum(c * pow(x, i, p) for i, c in enumerate(f)) % p for x in range(p))
    for deg in range(1, d // 2 + 1):
        for low in np.ndindex(*([p] * deg)):
            g = [*low, 1]
            if not any(_poly_rem(f, g, p)):
                return False
    return True


class FiniteField:
    """F_{p^α} with precomputed addition and multiplication tables."""

    def __init__(self, p: int, alpha: int = 1, modulus: Sequence[int] | None = None) -> None:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if alpha < 1:
            raise ValueError("alpha must be positive")
        if modulus is None:
            if (p, alpha) not in MODULI:
                raise ValueError(f"no modulus on file for F_{p}^{alpha}")
            modulus = MODULI[(p, alpha)]
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != alpha + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree alpha")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.alpha = alpha
        self.modulus = modulus
        self.order = q = p**alpha
        digits = np.array([[(k // p**i) % p for i in range(alpha)] for k in range(q)], dtype=np.int64)
        weights = p ** np.arange(alpha)
        self._digits = digits
        self.add_table = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg_table = ((-digits) % p) @ weights
        self.mul_table = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                c = self._mul_coeffs(digits[a], digits[b])
                self.mul_table[a, b] = self.mul_table[b, a] = c
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.flatnonzero(self.mul_table[a] == 1)[0])
        self.inv_table = inv
        for t in (self.add_table, self.neg_table, self.mul_table, self.inv_table):
            t.setflags(write=False)

    def _mul_coeffs(self, a: np.ndarray, b: np.ndarray) -> int:
        prod = [0] * (2 * self.alpha - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += int(x) * int(y)
        rem = _poly_rem([c % self.p for c in prod] + [0], self.modulus, self.p)
        return self.from_coeffs(rem)

    def __repr__(self) -> str:
        return f"FiniteField({self.p}, {self.alpha})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.alpha, self.modulus) == (
            other.p,
            other.alpha,
            other.modulus,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.alpha, self.modulus))

    # element coordinates

    def coeffs(self, x: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self._digits[x])

    def from_coeffs(self, coeffs: Iterable[int]) -> int:
        k = 0
        for i, c in enumerate(coeffs):
            k += (int(c) % self.p) * self.p**i
        return k

    def from_int(self, k: int) -> int:
        """Image of the integer k in the prime subfield."""
        return k % self.p

    # arithmetic

    def add(self, x: int, y: int) -> int:
        return int(self.add_table[x, y])

    def sub(self, x: int, y: int) -> int:
        return int(self.add_table[x, self.neg_table[y]])

    def neg(self, x: int) -> int:
        return int(self.neg_table[x])

    def mul(self, x: int, y: int) -> int:
        return int(self.mul_table[x, y])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.inv_table[x])

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        acc = 1
        while e:
            if e & 1:
                acc = self.mul(acc, x)
            x = self.mul(x, x)
            e >>= 1
        return acc

    def scale(self, k: int, x: int) -> int:
        """k·x for an integer k."""
        return self.mul(self.from_int(k), x)

    def multiplicative_order(self, x: int) -> int:
        if x == 0:
            raise ValueError("0 has no multiplicative order")
        k, acc = 1, x
        while acc != 1:
            acc = self.mul(acc, x)
            k += 1
        return k

    def elements(self) -> range:
        return range(self.order)

    def minimal_polynomial(self, x: int) -> tuple[int, ...]:
        """Monic minimal polynomial of x over F_p, low degree first."""
        conj = [x]
        while True:
            y = self.pow(conj[-1], self.p)
            if y == x:
                break
            conj.append(y)
        poly = [1]  # product of (t - c) over conjugates, coefficients in the field
        for c in conj:
            nxt = [0] * (len(poly) + 1)
            for i, a in enumerate(poly):
                nxt[i + 1] = self.add(nxt[i + 1], a)
                nxt[i] = self.sub(nxt[i], self.mul(a, c))
            poly = nxt
        if any(c >= self.p for c in poly):
            raise AssertionError("minimal polynomial escaped the prime field")
        return tuple(poly)


@lru_cache(maxsize=None)
def field(p: int, alpha: int = 1) -> FiniteField:
    return FiniteField(p, alpha)


def binomial_mod(n: int, k: int, p: int) -> int:
    """C(n, k) mod p via Pascal's rule; 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    row = [1]
    for _ in range(n):
        row = [1] + [(row[i] + row[i + 1]) % p for i in range(len(row) - 1)] + [1]
    return row[k] % p


def binomial_lucas(n: int, k: int, p: int) -> int:
    """C(n, k) mod p via Lucas' theorem (cross-check for binomial_mod)."""
    from math import comb

    if k < 0 or n < 0 or k > n:
        return 0
    acc = 1
    while n or k:
        n, ni = divmod(n, p)
        k, ki = divmod(k, p)
        if ki > ni:
            return 0
        acc = acc * comb(ni, ki) % p
    return acc


def require_nonzero_gamma(f: FiniteField, gamma: int) -> None:
    if not 0 < gamma < f.order:
        raise PreconditionError(f"gamma must be a nonzero element of {f}, got {gamma}")
