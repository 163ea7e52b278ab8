"""Named matroids used throughout the package."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from ._validation import mask_of, popcounts
from .almost_affine import induced_matroid, rank_two_triples, simonis_ashikhmin_code
from .exceptions import PreconditionError
from .matroid import RankTable, from_circuits, require_matroid, uniform
from .representability import FpMatrix, Representation

FANO_MATRIX = FpMatrix(2, [
    [1, 1, 0, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
    [1, 0, 0, 1, 1, 1, 0],
])

FANO_DUAL_MATRIX = FpMatrix(2, [
    [1, 1, 1, 1, 1, 1, 1],
    [1, 1, 0, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
    [1, 0, 0, 1, 1, 1, 0],
])

# dependent 4-sets are unions of two pairs; {4,5,6,7} is the missing plane
VAMOS_PAIRS = ((0, 1), (2, 3), (4, 5), (6, 7))
VAMOS_PLANES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3))

CANONICAL_NAMES = (
    "U2,3", "U2,4", "U2,5", "U2,6", "U2,7", "U3,5",
    "F7", "F7*", "nonpappus", "vamos",
)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    matroid: RankTable
    provenance: str
    matrix: Optional[FpMatrix] = None


def column_matroid(A: FpMatrix) -> RankTable:
    R = Representation.from_matrix(A)
    return RankTable(R.m, [R.subset_rank(S) for S in range(1 << R.m)])


def vamos_circuits() -> list[int]:
    planes = [mask_of(VAMOS_PAIRS[a] + VAMOS_PAIRS[b]) for a, b in VAMOS_PLANES]
    fives = [
        mask_of(c) for c in itertools.combinations(range(8), 5)
        if not any(mask_of(c) & P == P for P in planes)
    ]
    return planes + fives


_UNIFORM = re.compile(r"^u_?\{?(\d+),(\d+)\}?$|^u(\d)(\d)$", re.IGNORECASE)
_ALIASES = {
    "f7": "F7", "fano": "F7",
    "f7*": "F7*", "f7dual": "F7*", "f7_dual": "F7*", "fano_dual": "F7*", "fanodual": "F7*",
    "nonpappus": "nonpappus", "non-pappus": "nonpappus", "non_pappus": "nonpappus",
    "vamos": "vamos",
}


def canonical_name(name: str) -> str:
    key = name.strip()
    hit = _UNIFORM.match(key)
    if hit:
        k, n = (hit.group(1), hit.group(2)) if hit.group(1) else (hit.group(3), hit.group(4))
        return f"U{int(k)},{int(n)}"
    try:
        return _ALIASES[key.lower()]
    except KeyError:
        raise PreconditionError(f"unknown catalog matroid {name!r}") from None


@lru_cache(maxsize=None)
def catalog(name: str) -> CatalogEntry:
    """Look up a named matroid; accepts aliases such as ``fano`` or ``U_{2,4}``."""
    name = canonical_name(name)
    if name.startswith("U"):
        k, n = map(int, name[1:].split(","))
        entry = CatalogEntry(name, uniform(k, n), f"uniform matroid, rank min(|S|, {k}) on {n} elements")
    elif name == "F7":
        entry = CatalogEntry(name, column_matroid(FANO_MATRIX), "column matroid of the 3x7 binary Fano matrix", FANO_MATRIX)
    elif name == "F7*":
        entry = CatalogEntry(
            name, column_matroid(FANO_DUAL_MATRIX), "column matroid of the 4x7 binary matrix of the Fano dual",
            FANO_DUAL_MATRIX,
        )
    elif name == "nonpappus":
        M = induced_matroid(simonis_ashikhmin_code())
        pc = popcounts(M.m)
        lines = rank_two_triples(M)
        expected = np.minimum(pc, 3)
        expected[lines] = 2
        if len(lines) != 8 or not np.array_equal(M.rank, expected):  # pragma: no cover
            raise AssertionError("Simonis-Ashikhmin code does not induce the non-Pappus matroid")
        entry = CatalogEntry(name, M, "matroid induced by the Simonis-Ashikhmin code over F_3^2 (9 symbols)")
    else:
        entry = CatalogEntry(name, from_circuits(8, vamos_circuits()), "Vamos matroid from its circuit list")
    require_matroid(entry.matroid)
    return entry


def catalog_entries() -> list[CatalogEntry]:
    return [catalog(n) for n in CANONICAL_NAMES]
