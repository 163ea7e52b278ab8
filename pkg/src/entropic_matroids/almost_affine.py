"""Almost affine codes, secret-sharing matrices and their induced matroids."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from ._validation import check_mask, check_words, elements_of, popcounts
from .entropy import FiniteDistribution, as_entropic_matroid
from .exceptions import FormatError, PreconditionError
from .matroid import RankTable, check_axioms


class AffineCode:
    """Duplicate-free set of words in ``[s]**m``, stored sorted."""

    __slots__ = ("s", "m", "words", "_array")

    def __init__(self, s: int, m: int, words: Iterable[Sequence[int]]):
        s, m = int(s), int(m)
        if s < 2:
            raise FormatError(f"alphabet size must be at least 2, got {s}")
        clean = sorted(set(check_words(list(words), s, m)))
        if not clean:
            raise FormatError("a code must contain at least one word")
        self.s = s
        self.m = m
        self.words = tuple(clean)
        self._array = None

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __contains__(self, word):
        return tuple(word) in set(self.words)

    def __eq__(self, other):
        if not isinstance(other, AffineCode):
            return NotImplemented
        return (self.s, self.m, self.words) == (other.s, other.m, other.words)

    def __hash__(self):
        return hash((self.s, self.m, self.words))

    def __repr__(self):
        return f"AffineCode(s={self.s}, m={self.m}, |C|={len(self.words)})"

    def as_array(self) -> np.ndarray:
        if self._array is None:
            arr = np.array(self.words, dtype=np.int64).reshape(len(self.words), self.m)
            arr.setflags(write=False)
            self._array = arr
        return self._array

    def to_json(self) -> dict:
        return {"s": self.s, "m": self.m, "words": [list(w) for w in self.words]}

    @classmethod
    def from_json(cls, data: dict) -> "AffineCode":
        try:
            return cls(data["s"], data["m"], data["words"])
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed code JSON: {exc!r}") from exc

    def dumps(self) -> str:
        """Canonical text form: one word per line, lexicographic order."""
        sep = "" if self.s <= 10 else " "
        return "\n".join(sep.join(map(str, w)) for w in self.words) + "\n"


def load_code(path) -> AffineCode:
    with open(path) as fh:
        try:
            return AffineCode.from_json(json.load(fh))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc


@dataclass(frozen=True)
class SecretSharingMatrix:
    """Rows of symbols in ``[s]``; repeated rows are allowed."""

    s: int
    rows: tuple

    def __post_init__(self):
        if not self.rows:
            raise FormatError("secret-sharing matrix needs at least one row")
        width = len(self.rows[0])
        rows = tuple(check_words(self.rows, self.s, width))
        object.__setattr__(self, "rows", rows)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    def to_code(self) -> AffineCode:
        return AffineCode(self.s, self.m, self.rows)


def _projection_keys(arr: np.ndarray, cols: list[int], s: int) -> np.ndarray:
    if not cols:
        return np.zeros(arr.shape[0], dtype=np.int64)
    radix = s ** np.arange(len(cols), dtype=np.int64)
    return arr[:, cols] @ radix


def projection_count(C: AffineCode, Y: int) -> int:
    """|C_Y|: number of distinct restrictions of codewords to Y."""
    Y = check_mask(Y, C.m)
    return int(np.unique(_projection_keys(C.as_array(), elements_of(Y), C.s)).size)


def projection_fibers(C: AffineCode, Y: int) -> dict[tuple[int, ...], int]:
    """Multiplicity of every projected word of C_Y."""
    cols = elements_of(check_mask(Y, C.m))
    fibers: dict[tuple[int, ...], int] = {}
    for w in C.words:
        key = tuple(w[c] for c in cols)
        fibers[key] = fibers.get(key, 0) + 1
    return fibers


def _log_exact(n: int, s: int) -> Optional[int]:
    k = 0
    while n % s == 0:
        n //= s
        k += 1
    return k if n == 1 else None


@dataclass(frozen=True)
class AlmostAffineCheck:
    """Truthy iff every projection size is a power of ``s`` and the ranks form a matroid."""

    matroid: Optional[RankTable]
    witness: Optional[int] = None
    count: Optional[int] = None

    def __bool__(self):
        return self.matroid is not None


def is_almost_affine(C: AffineCode) -> AlmostAffineCheck:
    arr = C.as_array()
    ranks = []
    for Y in range(1 << C.m):
        count = int(np.unique(_projection_keys(arr, elements_of(Y), C.s)).size)
        k = _log_exact(count, C.s)
        if k is None:
            return AlmostAffineCheck(None, Y, count)
        ranks.append(k)
    table = RankTable(C.m, ranks)
    if not check_axioms(table):
        # cannot happen for a genuine code; kept as a guard for the contract
        return AlmostAffineCheck(None, check_axioms(table).witness[0])
    return AlmostAffineCheck(table)


def induced_matroid(C: AffineCode) -> RankTable:
    check = is_almost_affine(C)
    if not check:
        raise PreconditionError(
            f"code is not almost affine: |C_Y| = {check.count} at Y = {elements_of(check.witness)}"
        )
    return check.matroid


@dataclass(frozen=True)
class SecretSharingCheck:
    """Truthy iff the n(i, e, Y) dichotomy holds everywhere.

    On failure, ``witness = (e, Y, i, j)``: row ``i`` has a consistency set of
    size other than one, row ``j`` has one that is not the full alphabet.
    """

    valid: bool
    witness: Optional[tuple[int, int, int, int]] = None

    def __bool__(self):
        return self.valid


def is_secret_sharing(A: SecretSharingMatrix) -> SecretSharingCheck:
    """Exhaustive check over all e, Y not containing e, and rows i."""
    arr = np.array(A.rows, dtype=np.int64)
    s, m = A.s, A.m
    for e in range(m):
        others = [x for x in range(m) if x != e]
        for r in range(len(others) + 1):
            for Ycols in itertools.combinations(others, r):
                keys = _projection_keys(arr, list(Ycols), s)
                pairs = keys * s + arr[:, e]
                uniq_pairs = np.unique(pairs)
                uk, sizes = np.unique(uniq_pairs // s, return_counts=True)
                per_row = sizes[np.searchsorted(uk, keys)]
                if np.all(per_row == s) or np.all(per_row == 1):
                    continue
                i = int(np.flatnonzero(per_row != 1)[0])
                j = int(np.flatnonzero(per_row != s)[0])
                Y = sum(1 << c for c in Ycols)
                return SecretSharingCheck(False, (e, Y, i, j))
    return SecretSharingCheck(True)


def secret_sharing_matroid(A: SecretSharingMatrix) -> RankTable:
    """Rank of Y = log_s of the number of distinct rows of A[Y]."""
    if not is_secret_sharing(A):
        raise PreconditionError("matrix is not a secret-sharing matrix")
    return induced_matroid(A.to_code())


# ---------------------------------------------------------------- conversions


def code_to_distribution(C: AffineCode) -> FiniteDistribution:
    """Uniform distribution on the codewords."""
    if _log_exact(len(C), C.s) is None:
        raise PreconditionError(f"|C| = {len(C)} is not a power of {C.s}")
    w = Fraction(1, len(C))
    return FiniteDistribution(C.s, C.m, {word: w for word in C.words})


def distribution_to_code(mu: FiniteDistribution) -> AffineCode:
    """Support of a distribution whose entropic rank is integral."""
    check = as_entropic_matroid(mu)
    if not check:
        raise PreconditionError(f"entropic rank is not a matroid: {check.reason}")
    return AffineCode(mu.q, mu.m, mu.atoms.keys())


# ---------------------------------------------------------------- non-Pappus witness

_SA_GENERATOR = """
10 10 00 10 00 10 10 10 00
01 01 00 01 00 01 01 01 00
00 00 00 10 10 21 01 10 10
00 00 00 02 01 20 12 02 01
00 10 10 01 00 01 00 11 10
00 01 01 21 00 21 00 10 01
"""


def simonis_ashikhmin_generator() -> np.ndarray:
    """The 6 x 9 generator with entries in F_3^2, shape (6, 9, 2)."""
    rows = [line.split() for line in _SA_GENERATOR.strip().splitlines()]
    return np.array([[[int(e[0]), int(e[1])] for e in row] for row in rows], dtype=np.int64)


def simonis_ashikhmin_code() -> AffineCode:
    """Row space over F_3 of the generator; pair (a, b) is packed as symbol 3a + b."""
    gen = simonis_ashikhmin_generator()
    coeffs = np.array(list(itertools.product(range(3), repeat=gen.shape[0])), dtype=np.int64)
    pairs = np.einsum("ki,ijt->kjt", coeffs, gen) % 3
    words = pairs[:, :, 0] * 3 + pairs[:, :, 1]
    return AffineCode(9, gen.shape[1], words.tolist())


def rank_two_triples(M: RankTable) -> list[int]:
    """Three-element subsets of rank 2 (the dependent lines of a rank-3 matroid)."""
    pc = popcounts(M.m)
    return [int(S) for S in np.flatnonzero((pc == 3) & (M.rank == 2))]
