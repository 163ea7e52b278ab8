"""Linear algebra over prime fields and search for F_p-representations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._validation import check_prime, elements_of, popcount
from .entropy import FiniteDistribution
from .exceptions import CapabilityError, FormatError, PreconditionError
from .matroid import RankTable, bases, circuits

SEARCH_PRIMES = (2, 3, 5, 7)
MAX_SEARCH_ELEMENTS = 9


class FpMatrix:
    """Matrix with entries in the prime field F_p."""

    __slots__ = ("p", "entries")

    def __init__(self, p: int, entries):
        self.p = check_prime(p)
        arr = np.asarray(entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise FormatError(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
        arr = arr % self.p
        arr.setflags(write=False)
        self.entries = arr

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"FpMatrix(p={self.p}, shape={self.shape})"

    def format(self) -> str:
        """Bracketed rows, one per line."""
        return "\n".join("[" + " ".join(str(int(x)) for x in row) + "]" for row in self.entries)


def _rank_rows(rows: list[list[int]], p: int) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def fp_rank(A: FpMatrix) -> int:
    """Rank over F_p by Gauss-Jordan elimination."""
    return _rank_rows(A.entries.tolist(), A.p)


@dataclass(frozen=True)
class Representation:
    """One column vector in F_p^d per matroid element."""

    p: int
    d: int
    columns: tuple

    def __post_init__(self):
        cols = tuple(tuple(int(x) % self.p for x in c) for c in self.columns)
        if any(len(c) != self.d for c in cols):
            raise FormatError(f"every column must have length d={self.d}")
        object.__setattr__(self, "columns", cols)

    @property
    def m(self) -> int:
        return len(self.columns)

    @classmethod
    def from_matrix(cls, A: FpMatrix) -> "Representation":
        return cls(A.p, A.shape[0], tuple(map(tuple, A.entries.T.tolist())))

    def matrix(self) -> FpMatrix:
        return FpMatrix(self.p, np.array(self.columns, dtype=np.int64).reshape(self.m, self.d).T)

    def subset_rank(self, S: int) -> int:
        return _rank_rows([self.columns[e] for e in elements_of(S)], self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "d": self.d, "columns": [list(c) for c in self.columns]}

    @classmethod
    def from_json(cls, data: dict) -> "Representation":
        try:
            return cls(check_prime(data["p"]), int(data["d"]), tuple(map(tuple, data["columns"])))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed representation JSON: {exc!r}") from exc


@dataclass(frozen=True)
class RepresentationCheck:
    valid: bool
    witness: Optional[int] = None

    def __bool__(self):
        return self.valid


def verify_representation(M: RankTable, R: Representation) -> RepresentationCheck:
    """Compare rank(columns of S) with r_M(S) for every subset S."""
    if R.m != M.m:
        raise PreconditionError(f"representation has {R.m} columns but the matroid has {M.m} elements")
    for S in range(1 << M.m):
        if R.subset_rank(S) != M(S):
            return RepresentationCheck(False, S)
    return RepresentationCheck(True)


def with_parallel_copy(R: Representation, source: int, position: int) -> Representation:
    """Insert a copy of column ``source`` at index ``position``."""
    cols = list(R.columns)
    cols.insert(position, R.columns[source])
    return Representation(R.p, R.d, tuple(cols))


def representation_to_distribution(R: Representation) -> FiniteDistribution:
    """Law of (<v_e, y>)_e for y uniform on F_p^d."""
    counts: dict[tuple[int, ...], int] = {}
    if R.d == 0:
        counts[(0,) * R.m] = 1
    else:
        A = np.array(R.columns, dtype=np.int64).reshape(R.m, R.d)
        ys = np.array(list(itertools.product(range(R.p), repeat=R.d)), dtype=np.int64)
        for word in map(tuple, ((ys @ A.T) % R.p).tolist()):
            counts[word] = counts.get(word, 0) + 1
    total = sum(counts.values())
    return FiniteDistribution(R.p, R.m, {w: Fraction(c, total) for w, c in counts.items()})


# ---------------------------------------------------------------- search


@dataclass(frozen=True)
class RepresentationSearch:
    """Outcome of :func:`find_representation`; truthy iff a representation was found.

    A falsy result is an exhaustion proof over ``nodes`` candidate placements.
    """

    representation: Optional[Representation]
    nodes: int
    order: tuple[int, ...]

    def __bool__(self):
        return self.representation is not None


def projective_points(p: int, d: int) -> list[tuple[int, ...]]:
    """Nonzero vectors of F_p^d whose first nonzero coordinate is 1, in lex order."""
    pts = []
    for v in itertools.product(range(p), repeat=d):
        nz = next((x for x in v if x), 0)
        if nz == 1:
            pts.append(v)
    return pts


class _Span:
    """Reduced row echelon basis of a subspace, as (pivot, row) pairs."""

    __slots__ = ("rows",)

    def __init__(self, rows=()):
        self.rows = rows

    def reduce(self, v: tuple, p: int) -> list[int]:
        v = list(v)
        for piv, row in self.rows:
            f = v[piv]
            if f:
                v = [(a - f * b) % p for a, b in zip(v, row)]
        return v

    def extended(self, rem: list[int], p: int) -> "_Span":
        piv = next(i for i, x in enumerate(rem) if x)
        inv = pow(rem[piv], -1, p)
        new = [(x * inv) % p for x in rem]
        rows = []
        for q, row in self.rows:
            f = row[piv]
            if f:
                row = tuple((a - f * b) % p for a, b in zip(row, new))
            rows.append((q, row))
        rows.append((piv, tuple(new)))
        return _Span(tuple(rows))


def _search_order(M: RankTable, basis: int) -> list[int]:
    """Basis first, then greedily the element closing the most circuits with placed ones."""
    placed = elements_of(basis)
    placed_mask = basis
    circ = circuits(M)
    loops = [e for e in range(M.m) if M(1 << e) == 0]
    rest = [e for e in range(M.m) if not (basis >> e) & 1 and e not in loops]
    while rest:
        def score(e):
            full = placed_mask | (1 << e)
            return sum(1 for c in circ if (c >> e) & 1 and c & ~full == 0)

        best = max(rest, key=lambda e: (score(e), -e))
        rest.remove(best)
        placed.append(best)
        placed_mask |= 1 << best
    return placed + loops


def find_representation(M: RankTable, p: int, max_nodes: Optional[int] = None) -> RepresentationSearch:
    """Backtracking search for an F_p-representation in dimension r(E).

    The lexicographically first basis is pinned to the standard unit vectors;
    every other non-loop element ranges over projective representatives and a
    placement is kept only if every subset of placed elements has the right
    rank. Loops get the zero vector.
    """
    p = check_prime(p)
    if p not in SEARCH_PRIMES:
        raise CapabilityError(f"representation search supports p in {SEARCH_PRIMES}, got {p}")
    if M.m > MAX_SEARCH_ELEMENTS:
        raise CapabilityError(f"representation search is capped at {MAX_SEARCH_ELEMENTS} elements")
    d = M.full_rank
    if d == 0:
        return RepresentationSearch(Representation(p, 0, ((),) * M.m), 0, tuple(range(M.m)))

    basis = bases(M)[0]
    order = _search_order(M, basis)
    n_basis = popcount(basis)
    points = projective_points(p, d)
    zero = (0,) * d

    columns: dict[int, tuple] = {}
    # spans[k] maps each subset (mask) of the first k placed elements to (rank, span)
    spans: list[dict[int, tuple[int, _Span]]] = [{0: (0, _Span())}]
    nodes = 0

    def place(e: int, v: tuple, level: dict) -> Optional[dict]:
        new = dict(level)
        bit = 1 << e
        for S, (rk, span) in level.items():
            rem = span.reduce(v, p)
            grows = any(rem)
            if rk + grows != M(S | bit):
                return None
            new[S | bit] = (rk + 1, span.extended(rem, p)) if grows else (rk, span)
        return new

    for k, e in enumerate(order[:n_basis]):
        v = tuple(int(i == k) for i in range(d))
        nodes += 1
        level = place(e, v, spans[-1])
        if level is None:  # pragma: no cover - a basis always fits the unit vectors
            return RepresentationSearch(None, nodes, tuple(order))
        columns[e] = v
        spans.append(level)

    free = order[n_basis:]
    choice = [0] * len(free)
    t = 0
    while 0 <= t < len(free):
        e = free[t]
        cands = [zero] if M(1 << e) == 0 else points
        placed = False
        while choice[t] < len(cands):
            v = cands[choice[t]]
            choice[t] += 1
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                raise CapabilityError(f"representation search exceeded {max_nodes} nodes")
            level = place(e, v, spans[-1])
            if level is not None:
                columns[e] = v
                spans.append(level)
                placed = True
                break
        if placed:
            t += 1
        else:
            choice[t] = 0
            t -= 1
            if t >= 0:
                spans.pop()
                columns.pop(free[t], None)

    if t < 0:
        return RepresentationSearch(None, nodes, tuple(order))
    R = Representation(p, d, tuple(columns[e] for e in range(M.m)))
    if not verify_representation(M, R):  # pragma: no cover - search invariant
        raise AssertionError("search produced an invalid representation")
    return RepresentationSearch(R, nodes, tuple(order))
