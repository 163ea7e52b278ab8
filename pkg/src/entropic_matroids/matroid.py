"""Matroids on small ground sets stored as dense rank tables.

Subsets of the ground set ``{0, ..., m-1}`` are integer bitmasks: bit ``i`` is
set iff element ``i`` belongs to the subset. A matroid is the table of its rank
function over all ``2**m`` masks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ._validation import (
    check_ground_size,
    check_mask,
    elements_of,
    mask_of,
    popcount,
    popcounts,
)
from .exceptions import CapabilityError, FormatError, PreconditionError

MAX_MINOR_SEARCH = 9


class RankTable:
    """Integer-valued set function on all subsets of ``{0, ..., m-1}``.

    Construction only checks the table's shape and entry types; use
    :func:`check_axioms` to decide whether it is a matroid.
    """

    __slots__ = ("m", "rank")

    def __init__(self, m: int, rank):
        m = check_ground_size(m)
        arr = np.asarray(rank)
        if arr.ndim != 1 or arr.shape[0] != 1 << m:
            raise FormatError(f"rank table for m={m} must have length {1 << m}, got shape {arr.shape}")
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise FormatError("rank table entries must be integers")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise FormatError("rank table entries must lie in [0, 255]")
        table = arr.astype(np.uint8)
        table.setflags(write=False)
        self.m = m
        self.rank = table

    def __call__(self, mask: int) -> int:
        return int(self.rank[mask])

    @property
    def full_rank(self) -> int:
        return int(self.rank[-1])

    @property
    def ground(self) -> int:
        return (1 << self.m) - 1

    def __eq__(self, other):
        if not isinstance(other, RankTable):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.rank, other.rank)

    def __hash__(self):
        return hash((self.m, self.rank.tobytes()))

    def __repr__(self):
        return f"RankTable(m={self.m}, rank(E)={self.full_rank})"

    def to_json(self) -> dict:
        return {"m": self.m, "rank": [int(x) for x in self.rank]}

    @classmethod
    def from_json(cls, data: dict) -> "RankTable":
        if not isinstance(data, dict) or "m" not in data:
            raise FormatError("matroid JSON must be an object with an 'm' field")
        m = data["m"]
        if "rank" in data:
            return cls(m, data["rank"])
        if "circuits" in data:
            return from_circuits(m, data["circuits"])
        raise FormatError("matroid JSON needs either 'rank' or 'circuits'")


def load_matroid(path) -> RankTable:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return RankTable.from_json(data)


# ---------------------------------------------------------------- constructors


def from_bases(m: int, bases: Iterable) -> RankTable:
    """Rank function ``r(S) = max |S & B|`` over the given bases (masks or element lists)."""
    m = check_ground_size(m)
    idx = np.arange(1 << m, dtype=np.int64)
    pc = popcounts(m)
    rank = np.zeros(1 << m, dtype=np.int64)
    for b in bases:
        b = b if isinstance(b, (int, np.integer)) else mask_of(b)
        rank = np.maximum(rank, pc[idx & int(b)])
    return RankTable(m, rank)


def from_circuits(m: int, circuits: Iterable) -> RankTable:
    """Rank function of the matroid whose independent sets avoid every circuit."""
    m = check_ground_size(m)
    idx = np.arange(1 << m, dtype=np.int64)
    pc = popcounts(m)
    dependent = np.zeros(1 << m, dtype=bool)
    for c in circuits:
        c = c if isinstance(c, (int, np.integer)) else mask_of(c)
        c = int(c)
        if c >> m:
            raise FormatError(f"circuit {elements_of(c)} is outside the ground set")
        dependent |= (idx & c) == c
    rank = np.where(dependent, -1, pc)
    for k in range(1, m + 1):
        layer = idx[(pc == k) & dependent]
        if layer.size == 0:
            continue
        best = np.zeros(layer.size, dtype=np.int64)
        for e in range(m):
            has = (layer >> e) & 1 == 1
            sub = rank[layer[has] ^ (1 << e)]
            best[has] = np.maximum(best[has], sub)
        rank[layer] = best
    return RankTable(m, rank)


def uniform(k: int, n: int) -> RankTable:
    """Uniform matroid U_{k,n}: rank min(|S|, k)."""
    if not 0 <= k <= n:
        raise PreconditionError(f"uniform matroid needs 0 <= k <= n, got k={k}, n={n}")
    return RankTable(n, np.minimum(popcounts(n), k))


def free(m: int) -> RankTable:
    return uniform(m, m)


# ---------------------------------------------------------------- axioms


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of :func:`check_axioms`.

    ``witness`` holds the offending subsets: ``(S,)`` for normalization,
    ``(S, T)`` with ``S`` a subset of ``T`` for monotonicity and ``(A, B)`` for
    submodularity.
    """

    valid: bool
    axiom: Optional[str] = None
    witness: tuple = ()

    def __bool__(self):
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "valid matroid"
        sets = ", ".join("{" + ",".join(map(str, elements_of(w))) + "}" for w in self.witness)
        return f"{self.axiom} violated at {sets}"


def check_axioms(M: RankTable) -> AxiomReport:
    """Check normalization, monotonicity and submodularity of a rank table.

    Monotonicity and submodularity are tested in their local forms
    (single-element steps), which are equivalent to the global statements.
    """
    m = M.m
    r = M.rank.astype(np.int64)
    pc = popcounts(m)
    idx = np.arange(1 << m, dtype=np.int64)

    bad = np.flatnonzero(r > pc)
    if bad.size:
        return AxiomReport(False, "normalization", (int(bad[0]),))

    for e in range(m):
        base = idx[(idx >> e) & 1 == 0]
        up = base | (1 << e)
        bad = np.flatnonzero(r[base] > r[up])
        if bad.size:
            return AxiomReport(False, "monotonicity", (int(base[bad[0]]), int(up[bad[0]])))

    for a, b in itertools.combinations(range(m), 2):
        base = idx[((idx >> a) & 1 == 0) & ((idx >> b) & 1 == 0)]
        sa, sb = base | (1 << a), base | (1 << b)
        lhs = r[sa | sb] + r[base]
        bad = np.flatnonzero(lhs > r[sa] + r[sb])
        if bad.size:
            i = bad[0]
            return AxiomReport(False, "submodularity", (int(sa[i]), int(sb[i])))

    return AxiomReport(True)


def require_matroid(M: RankTable) -> RankTable:
    report = check_axioms(M)
    if not report:
        raise FormatError(f"not a matroid: {report.describe()}")
    return M


# ---------------------------------------------------------------- set systems


def _sorted_masks(masks: np.ndarray, pc: np.ndarray) -> list[int]:
    masks = np.asarray(masks, dtype=np.int64)
    order = np.lexsort((masks, pc[masks]))
    return [int(x) for x in masks[order]]


def _independent_flags(M: RankTable) -> np.ndarray:
    return M.rank.astype(np.int64) == popcounts(M.m)


def independent_sets(M: RankTable) -> list[int]:
    """Independent sets sorted by (size, mask value)."""
    pc = popcounts(M.m)
    return _sorted_masks(np.flatnonzero(_independent_flags(M)), pc)


def bases(M: RankTable) -> list[int]:
    pc = popcounts(M.m)
    flags = _independent_flags(M) & (pc == M.full_rank)
    return _sorted_masks(np.flatnonzero(flags), pc)


def circuits(M: RankTable) -> list[int]:
    """Minimal dependent sets sorted by (size, mask value)."""
    m = M.m
    pc = popcounts(m)
    idx = np.arange(1 << m, dtype=np.int64)
    indep = _independent_flags(M)
    minimal = ~indep
    for e in range(m):
        has = (idx >> e) & 1 == 1
        minimal[has] &= indep[idx[has] ^ (1 << e)]
    return _sorted_masks(np.flatnonzero(minimal), pc)


def closure_table(M: RankTable) -> np.ndarray:
    """``cl[S]`` for every mask: elements whose addition does not raise the rank."""
    m = M.m
    r = M.rank.astype(np.int64)
    idx = np.arange(1 << m, dtype=np.int64)
    cl = idx.copy()
    for e in range(m):
        cl |= np.where(r[idx | (1 << e)] == r, 1 << e, 0)
    return cl


def flats(M: RankTable) -> list[int]:
    cl = closure_table(M)
    return _sorted_masks(np.flatnonzero(cl == np.arange(1 << M.m)), popcounts(M.m))


# ---------------------------------------------------------------- minors & duality


def _reindex(m: int, keep: Sequence[int]) -> np.ndarray:
    """Map every mask over ``len(keep)`` new elements to the original mask."""
    k = len(keep)
    idx = np.arange(1 << k, dtype=np.int64)
    orig = np.zeros(1 << k, dtype=np.int64)
    for new, old in enumerate(keep):
        orig |= ((idx >> new) & 1) << old
    return orig


def restrict(M: RankTable, A: int) -> RankTable:
    """M|A, with the elements of A renumbered in increasing order."""
    A = check_mask(A, M.m)
    orig = _reindex(M.m, elements_of(A))
    return RankTable(popcount(A), M.rank[orig])


def delete(M: RankTable, D: int) -> RankTable:
    D = check_mask(D, M.m)
    return restrict(M, M.ground & ~D)


def contract(M: RankTable, A: int) -> RankTable:
    """M/A for an independent set A; remaining elements keep their relative order."""
    A = check_mask(A, M.m)
    if M(A) != popcount(A):
        raise PreconditionError(f"contraction set {elements_of(A)} is dependent")
    orig = _reindex(M.m, elements_of(M.ground & ~A))
    return RankTable(M.m - popcount(A), M.rank[orig | A].astype(np.int64) - M(A))


def dual(M: RankTable) -> RankTable:
    """r*(S) = r(E minus S) + |S| - r(E)."""
    idx = np.arange(1 << M.m, dtype=np.int64)
    r = M.rank.astype(np.int64)
    return RankTable(M.m, r[M.ground ^ idx] + popcounts(M.m) - M.full_rank)


def _element_signatures(M: RankTable) -> list[tuple]:
    m = M.m
    idx = np.arange(1 << m, dtype=np.int64)
    key = popcounts(m) * (m + 1) + M.rank.astype(np.int64)
    size = (m + 1) * (m + 1)
    return [
        tuple(np.bincount(key[(idx >> e) & 1 == 1], minlength=size).tolist()) for e in range(m)
    ]


def find_isomorphism(M: RankTable, N: RankTable) -> Optional[tuple[int, ...]]:
    """Permutation ``pi`` with ``r_N(pi(S)) = r_M(S)`` for all S, or None.

    Brute-force backtracking; candidate images are pruned by per-element
    (size, rank) histograms.
    """
    if M.m != N.m:
        return None
    m = M.m
    pc = popcounts(m)
    if not np.array_equal(
        np.bincount(pc * (m + 1) + M.rank, minlength=(m + 1) ** 2),
        np.bincount(pc * (m + 1) + N.rank, minlength=(m + 1) ** 2),
    ):
        return None
    sig_m, sig_n = _element_signatures(M), _element_signatures(N)
    if sorted(sig_m) != sorted(sig_n):
        return None
    candidates = [[f for f in range(m) if sig_n[f] == sig_m[e]] for e in range(m)]
    image = [0] * m
    used = [False] * m

    def consistent(t: int) -> bool:
        # subsets of {0..t} containing t
        for low in range(1 << t):
            s = low | (1 << t)
            img = 0
            for e in elements_of(s):
                img |= 1 << image[e]
            if M.rank[s] != N.rank[img]:
                return False
        return True

    def extend(t: int) -> bool:
        if t == m:
            return True
        for f in candidates[t]:
            if used[f]:
                continue
            image[t] = f
            used[f] = True
            if consistent(t) and extend(t + 1):
                return True
            used[f] = False
        return False

    return tuple(image) if extend(0) else None


def is_isomorphic(M: RankTable, N: RankTable) -> bool:
    return find_isomorphism(M, N) is not None


@dataclass(frozen=True)
class MinorWitness:
    """N is isomorphic to (M / contract_set) | restrict_set.

    ``mapping[j]`` is the element of M playing the role of element ``j`` of N.
    """

    restrict_set: int
    contract_set: int
    mapping: tuple[int, ...]


def minor(M: RankTable, contract_set: int, delete_set: int) -> RankTable:
    """M / C minus D, elements renumbered in increasing order."""
    if contract_set & delete_set:
        raise PreconditionError("contraction and deletion sets overlap")
    C = contract(M, contract_set)
    kept = [e for e in range(M.m) if not (contract_set >> e) & 1]
    d_new = mask_of(i for i, e in enumerate(kept) if (delete_set >> e) & 1)
    return delete(C, d_new)


def has_minor(M: RankTable, N: RankTable) -> Optional[MinorWitness]:
    """Search all minors M/C minus D of the size of N for a copy of N.

    Every minor arises with C independent and D coindependent, so only those
    pairs are enumerated.
    """
    if M.m > MAX_MINOR_SEARCH:
        raise CapabilityError(f"minor search is capped at {MAX_MINOR_SEARCH} elements, got {M.m}")
    if N.m > M.m:
        return None
    k = M.full_rank - N.full_rank
    n_del = M.m - N.m - k
    if k < 0 or n_del < 0:
        return None
    full = M.full_rank
    for C in itertools.combinations(range(M.m), k):
        cmask = mask_of(C)
        if M(cmask) != k:
            continue
        rest = [e for e in range(M.m) if e not in C]
        for D in itertools.combinations(rest, n_del):
            dmask = mask_of(D)
            if M(M.ground & ~dmask) != full:
                continue
            keep = [e for e in rest if e not in D]
            sub = minor(M, cmask, dmask)
            iso = find_isomorphism(N, sub)
            if iso is not None:
                mapping = tuple(keep[iso[j]] for j in range(N.m))
                return MinorWitness(mask_of(keep), cmask, mapping)
    return None


def enumerate_matroids(m: int) -> list[RankTable]:
    """Every labeled matroid on m elements, from all families of equal-size bases.

    Exponential in C(m, m // 2); intended for m <= 5.
    """
    if m > 5:
        raise CapabilityError(f"matroid enumeration is capped at 5 elements, got {m}")
    out = []
    for k in range(m + 1):
        ksets = [mask_of(c) for c in itertools.combinations(range(m), k)]
        for r in range(1, len(ksets) + 1):
            for family in itertools.combinations(ksets, r):
                M = from_bases(m, family)
                # basis exchange holds iff the family is exactly the set of bases of its rank function
                if check_axioms(M) and bases(M) == sorted(family, key=lambda b: (popcount(b), b)):
                    out.append(M)
    return out
