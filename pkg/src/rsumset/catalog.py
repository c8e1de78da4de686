"""Named groups addressable from the command line.

Accepted names: ``Z<n>`` (n <= 128), products such as ``Z2xZ4`` or
``Z2xZ2xZ2``, powers such as ``Z2^3``, and the fixed entries ``Heis3``,
``Heis5``, ``F21`` (Z7 ⋊ Z3, r = 2), ``Q8``, ``D4`` and ``S3``.
"""

from __future__ import annotations

import re
from functools import lru_cache, reduce

import numpy as np

from .groups import (
    FiniteGroup,
    build_cyclic,
    build_direct_product,
    build_heisenberg,
    build_semidirect_cyclic,
)

MAX_CYCLIC = 128


class UnknownGroupError(KeyError):
    def __str__(self) -> str:
        fixed = ", ".join(_FIXED)
        return (
            f"unknown group {self.args[0]!r}; known: Z<n> (n <= {MAX_CYCLIC}), "
            f"Z<a>xZ<b>[xZ<c>...], Z<a>^<k>, {fixed}"
        )


def _quaternion() -> FiniteGroup:
    # units ±1, ±i, ±j, ±k as (sign, unit) with unit 0..3 = 1, i, j, k
    unit_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    elems = [(s, u) for u in range(4) for s in (1, -1)]
    index = {e: i for i, e in enumerate(elems)}
    tab = np.zeros((8, 8), dtype=np.int64)
    for i, (s1, u1) in enumerate(elems):
        for j, (s2, u2) in enumerate(elems):
            s, u = unit_mul[(u1, u2)]
            tab[i, j] = index[(s1 * s2 * s, u)]
    names = ["1", "i", "j", "k"]
    labels = [("" if s > 0 else "-") + names[u] for s, u in elems]
    return FiniteGroup(tab, labels, name="Q8")


_FIXED = {
    "Heis3": lambda: build_heisenberg(3),
    "Heis5": lambda: build_heisenberg(5),
    "F21": lambda: _renamed(build_semidirect_cyclic(7, 3, 2), "F21"),
    "Q8": _quaternion,
    "D4": lambda: _renamed(build_semidirect_cyclic(4, 2, 3), "D4"),
    "S3": lambda: _renamed(build_semidirect_cyclic(3, 2, 2), "S3"),
}


def _renamed(g: FiniteGroup, name: str) -> FiniteGroup:
    g.name = name
    return g


@lru_cache(maxsize=None)
def get_group(name: str) -> FiniteGroup:
    if name in _FIXED:
        return _FIXED[name]()
    m = re.fullmatch(r"Z(\d+)\^(\d+)", name)
    if m:
        factors = [int(m.group(1))] * int(m.group(2))
    elif re.fullmatch(r"Z\d+(xZ\d+)*", name):
        factors = [int(f) for f in name[1:].split("xZ")]
    else:
        raise UnknownGroupError(name)
    if any(f < 1 or f > MAX_CYCLIC for f in factors):
        raise UnknownGroupError(name)
    g = reduce(build_direct_product, (build_cyclic(f) for f in factors))
    return _renamed(g, name)


def listing(max_order: int | None = None) -> list[str]:
    """Concrete catalog entries (cyclic, two-factor products, Z2^3 and the fixed groups)."""
    names = [f"Z{n}" for n in range(1, MAX_CYCLIC + 1)]
    names += [f"Z{a}xZ{b}" for a in range(2, 12) for b in range(a, MAX_CYCLIC // a + 1)]
    names += ["Z2^3", *_FIXED]
    sizes = {"Heis3": 27, "Heis5": 125, "F21": 21, "Q8": 8, "D4": 8, "S3": 6, "Z2^3": 8}

    def order(nm: str) -> int:
        if nm in sizes:
            return sizes[nm]
        return int(np.prod([int(f) for f in nm[1:].split("xZ")]))

    if max_order is not None:
        names = [nm for nm in names if order(nm) <= max_order]
    return names
