"""Finite distributions with exact rational weights and their base-q entropies."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ._validation import check_mask, elements_of
from .exceptions import FormatError, PreconditionError
from .matroid import RankTable, check_axioms

DEFAULT_TOL = 1e-9


class FiniteDistribution:
    """Probability measure on ``[q]**m`` with exact rational atom weights.

    Only atoms of positive probability are stored.
    """

    __slots__ = ("q", "m", "atoms", "_arrays")

    def __init__(self, q: int, m: int, atoms: Mapping[Sequence[int], Fraction]):
        if int(q) < 2:
            raise FormatError(f"alphabet size must be at least 2, got {q}")
        if int(m) < 0:
            raise FormatError(f"variable count must be non-negative, got {m}")
        q, m = int(q), int(m)
        clean: dict[tuple[int, ...], Fraction] = {}
        for word, prob in atoms.items():
            word = tuple(int(x) for x in word)
            if len(word) != m or any(x < 0 or x >= q for x in word):
                raise FormatError(f"atom {word} is not a word of [{q}]^{m}")
            prob = Fraction(prob)
            if prob < 0:
                raise FormatError(f"atom {word} has negative probability {prob}")
            if prob == 0:
                continue
            clean[word] = clean.get(word, Fraction(0)) + prob
        if sum(clean.values(), Fraction(0)) != 1:
            raise FormatError("atom probabilities must sum to exactly 1")
        self.q = q
        self.m = m
        self.atoms = MappingProxyType(dict(sorted(clean.items())))
        self._arrays = None

    def __reduce__(self):
        return (FiniteDistribution, (self.q, self.m, dict(self.atoms)))

    def __eq__(self, other):
        if not isinstance(other, FiniteDistribution):
            return NotImplemented
        return (self.q, self.m, dict(self.atoms)) == (other.q, other.m, dict(other.atoms))

    def __hash__(self):
        return hash((self.q, self.m, tuple(self.atoms.items())))

    def __repr__(self):
        return f"FiniteDistribution(q={self.q}, m={self.m}, atoms={len(self.atoms)})"

    @property
    def support(self) -> list[tuple[int, ...]]:
        return list(self.atoms)

    def is_uniform(self) -> bool:
        values = iter(self.atoms.values())
        first = next(values)
        return all(v == first for v in values)

    def _as_arrays(self):
        # cached numpy view: (words, float probabilities)
        if self._arrays is None:
            words = np.array(list(self.atoms), dtype=np.int64).reshape(len(self.atoms), self.m)
            probs = np.array([float(v) for v in self.atoms.values()])
            self._arrays = (words, probs)
        return self._arrays

    # -- constructors

    @classmethod
    def uniform_on(cls, words: Iterable[Sequence[int]], q: int, m: Optional[int] = None):
        words = {tuple(int(x) for x in w) for w in words}
        if not words:
            raise PreconditionError("cannot build a uniform distribution on an empty set")
        if m is None:
            m = len(next(iter(words)))
        w = Fraction(1, len(words))
        return cls(q, m, {word: w for word in words})

    @classmethod
    def point_mass(cls, word: Sequence[int], q: int):
        return cls(q, len(word), {tuple(word): Fraction(1)})

    # -- JSON

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "m": self.m,
            "atoms": [
                {"word": list(w), "num": p.numerator, "den": p.denominator}
                for w, p in self.atoms.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteDistribution":
        try:
            atoms = {}
            for atom in data["atoms"]:
                word = tuple(atom["word"])
                atoms[word] = atoms.get(word, Fraction(0)) + Fraction(int(atom["num"]), int(atom["den"]))
            return cls(data["q"], data["m"], atoms)
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise FormatError(f"malformed distribution JSON: {exc!r}") from exc


def load_distribution(path) -> FiniteDistribution:
    with open(path) as fh:
        try:
            return FiniteDistribution.from_json(json.load(fh))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def bernoulli(p, q: int = 2) -> FiniteDistribution:
    """Single binary variable with P(X = 1) = p."""
    p = Fraction(p)
    return FiniteDistribution(q, 1, {(0,): 1 - p, (1,): p})


def product(*dists: FiniteDistribution) -> FiniteDistribution:
    """Joint law of independent variables, concatenated in argument order."""
    q = dists[0].q
    if any(d.q != q for d in dists):
        raise PreconditionError("product needs a common alphabet size")
    atoms: dict[tuple[int, ...], Fraction] = {(): Fraction(1)}
    for d in dists:
        atoms = {w + v: pw * pv for w, pw in atoms.items() for v, pv in d.atoms.items()}
    return FiniteDistribution(q, sum(d.m for d in dists), atoms)


# ---------------------------------------------------------------- marginals & entropy


def marginal(mu: FiniteDistribution, S: int) -> FiniteDistribution:
    """Law of the coordinates in S, kept in increasing order."""
    S = check_mask(S, mu.m)
    cols = elements_of(S)
    atoms: dict[tuple[int, ...], Fraction] = {}
    for word, p in mu.atoms.items():
        key = tuple(word[c] for c in cols)
        atoms[key] = atoms.get(key, Fraction(0)) + p
    return FiniteDistribution(mu.q, len(cols), atoms)


@dataclass(frozen=True)
class EntropyValue:
    """A base-q entropy plus whether it is an integer (within tolerance)."""

    value: float
    integral: bool

    def __float__(self):
        return self.value


def _is_power(n: int, q: int) -> Optional[int]:
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k if n == 1 else None


def _entropy_of_weights(probs: np.ndarray, q: int) -> float:
    probs = probs[probs > 0]
    return float(-np.sum(probs * np.log(probs)) / math.log(q))


def _integral(value: float, tol: float) -> bool:
    return abs(value - round(value)) < tol


def entropy(mu: FiniteDistribution, tol: float = DEFAULT_TOL) -> EntropyValue:
    """Shannon entropy of ``mu`` in base ``q``."""
    n = len(mu.atoms)
    if mu.is_uniform():
        k = _is_power(n, mu.q)
        if k is not None:
            return EntropyValue(float(k), True)
        return EntropyValue(math.log(n) / math.log(mu.q), False)
    value = _entropy_of_weights(mu._as_arrays()[1], mu.q)
    return EntropyValue(value, _integral(value, tol))


def _subset_entropies(mu: FiniteDistribution, masks: Iterable[int], tol: float):
    """(value, integral flag) for the marginal entropy of each mask."""
    words, probs = mu._as_arrays()
    uniform = mu.is_uniform()
    wide = mu.m * math.log2(mu.q) > 62
    radix = None if wide else mu.q ** np.arange(mu.m, dtype=np.int64)
    out = []
    for S in masks:
        if S == 0:
            out.append((0.0, True))
            continue
        cols = elements_of(S)
        if wide:
            _, inverse, counts = np.unique(words[:, cols], axis=0, return_inverse=True, return_counts=True)
            inverse = inverse.reshape(-1)
        else:
            keys = words[:, cols] @ radix[: len(cols)]
            _, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
        if uniform and np.all(counts == counts[0]):
            k = _is_power(len(counts), mu.q)
            if k is not None:
                out.append((float(k), True))
                continue
        weights = np.bincount(inverse, weights=probs)
        value = _entropy_of_weights(weights, mu.q)
        out.append((value, _integral(value, tol)))
    return out


def subset_entropy(mu: FiniteDistribution, S: int, tol: float = DEFAULT_TOL) -> EntropyValue:
    """H(X[S]) without materializing the marginal as exact fractions."""
    S = check_mask(S, mu.m)
    value, integral = _subset_entropies(mu, [S], tol)[0]
    return EntropyValue(value, integral)


def conditional_entropy(mu: FiniteDistribution, S: int, T: int, tol: float = DEFAULT_TOL) -> EntropyValue:
    """H(X[S] | X[T]) = H(X[S u T]) - H(X[T]) for disjoint S, T."""
    S = check_mask(S, mu.m)
    T = check_mask(T, mu.m)
    if S & T:
        raise PreconditionError("conditional entropy needs disjoint subsets")
    (joint, _), (cond, _) = _subset_entropies(mu, [S | T, T], tol)
    value = joint - cond
    return EntropyValue(value, _integral(value, tol))


def entropic_rank(mu: FiniteDistribution) -> np.ndarray:
    """Table of H(mu_S) over all masks S (float64, length 2**m)."""
    vals = _subset_entropies(mu, range(1 << mu.m), DEFAULT_TOL)
    return np.array([v for v, _ in vals])


@dataclass(frozen=True)
class EntropicMatroidCheck:
    """Result of :func:`as_entropic_matroid`; truthy iff a matroid was found."""

    matroid: Optional[RankTable]
    witness: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.matroid is not None


def as_entropic_matroid(mu: FiniteDistribution, tol: float = DEFAULT_TOL) -> EntropicMatroidCheck:
    """Round the entropic rank to a matroid if every subset entropy is integral."""
    vals = _subset_entropies(mu, range(1 << mu.m), tol)
    for S, (value, integral) in enumerate(vals):
        if not integral:
            return EntropicMatroidCheck(None, S, f"H(X[S]) = {value:.12g} is not an integer")
    table = RankTable(mu.m, [round(v) for v, _ in vals])
    report = check_axioms(table)
    if not report:
        return EntropicMatroidCheck(None, report.witness[0], f"rounded table fails {report.axiom}")
    return EntropicMatroidCheck(table)


def condition_on_element(mu: FiniteDistribution, i: int, x: int) -> FiniteDistribution:
    """Law of the other m-1 coordinates given X_i = x."""
    if not 0 <= i < mu.m:
        raise PreconditionError(f"element {i} outside [0, {mu.m})")
    hits = {w: p for w, p in mu.atoms.items() if w[i] == x}
    total = sum(hits.values(), Fraction(0))
    if total == 0:
        raise PreconditionError(f"P(X_{i} = {x}) = 0, cannot condition")
    return FiniteDistribution(mu.q, mu.m - 1, {w[:i] + w[i + 1:]: p / total for w, p in hits.items()})


def probability(mu: FiniteDistribution, i: int, x: int) -> Fraction:
    return sum((p for w, p in mu.atoms.items() if w[i] == x), Fraction(0))


# ---------------------------------------------------------------- Hamming geometry


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise PreconditionError("Hamming distance needs equal-length words")
    return sum(a != b for a, b in zip(x, y))


def hamming_ball_size(q: int, n: int, radius: int) -> int:
    """Number of words of [q]^n within Hamming distance ``radius`` of a fixed word."""
    if not 0 <= radius <= n:
        raise PreconditionError(f"radius must lie in [0, {n}]")
    return sum(math.comb(n, k) * (q - 1) ** k for k in range(radius + 1))
