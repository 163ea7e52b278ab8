"""Exact small-block polarization of correlated binary sources.

An ``m x n`` bit matrix ``X`` has i.i.d. columns drawn from ``mu`` on
``F_2^m``; ``Y = X G_n`` with ``G_n`` the ``log2(n)``-fold Kronecker power of
``[[1, 0], [1, 1]]``. Everything here is computed from the exact joint law of
``Y``, enumerated over all ``2**(m*n)`` inputs.

Flat index layout: bit ``i*m + j`` of an index is row ``j`` of column ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .entropy import FiniteDistribution
from .exceptions import CapabilityError, FormatError, PreconditionError

MAX_BITS = 20
TIE_RTOL = 1e-12


def _check_power_of_two(n: int) -> int:
    n = int(n)
    if n < 1 or n & (n - 1):
        raise PreconditionError(f"block length must be a power of 2, got {n}")
    return n


def check_bits(X, m: Optional[int] = None, n: Optional[int] = None) -> np.ndarray:
    """Coerce to a ``(k, m, n)`` uint8 array of bits."""
    arr = np.asarray(X)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3:
        raise FormatError(f"expected an (m, n) or (k, m, n) bit array, got shape {np.shape(X)}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise FormatError("bit arrays may only contain 0 and 1")
    if m is not None and arr.shape[1] != m:
        raise FormatError(f"expected {m} rows, got {arr.shape[1]}")
    if n is not None and arr.shape[2] != n:
        raise FormatError(f"expected {n} columns, got {arr.shape[2]}")
    return arr.astype(np.uint8)


def kron_matrix(n: int) -> np.ndarray:
    """G_n over F_2; entry (i, j) is 1 iff the bits of j are a subset of the bits of i."""
    n = _check_power_of_two(n)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    return ((j & ~i) == 0).astype(np.uint8)


def _butterfly(cols: list) -> list:
    # in place on a list of per-column values (ints or arrays); XOR is the F_2 sum
    n = len(cols)
    step = 1
    while step < n:
        for i in range(n):
            if not i & step:
                cols[i] = cols[i] ^ cols[i | step]
        step <<= 1
    return cols


def kron_transform(X) -> np.ndarray:
    """Y = X G_n (mod 2), applied to every row. The transform is an involution."""
    arr = np.asarray(X)
    if arr.ndim < 1:
        raise FormatError("kron_transform needs at least one axis")
    _check_power_of_two(arr.shape[-1])
    bits = check_bits(arr.reshape(-1, 1, arr.shape[-1]))[:, 0, :]
    cols = _butterfly([bits[:, i].copy() for i in range(bits.shape[1])])
    return np.stack(cols, axis=1).reshape(arr.shape).astype(np.uint8)


# ---------------------------------------------------------------- source & joint law


@dataclass(frozen=True)
class SourceModel:
    """Column law ``mu`` on ``F_2^m``."""

    mu: FiniteDistribution

    def __post_init__(self):
        if self.mu.q != 2:
            raise FormatError(f"polar sources are binary, got alphabet size {self.mu.q}")

    @property
    def m(self) -> int:
        return self.mu.m

    def column_probabilities(self) -> np.ndarray:
        """P(column = c) with row j stored at bit j of c."""
        vec = np.zeros(1 << self.m)
        for word, p in self.mu.atoms.items():
            vec[sum(b << j for j, b in enumerate(word))] += float(p)
        return vec


def _check_size(m: int, n: int) -> None:
    if m * n > MAX_BITS:
        raise CapabilityError(f"exact enumeration needs m*n <= {MAX_BITS}, got {m * n}")


@lru_cache(maxsize=32)
def _joint_law_cached(mu: FiniteDistribution, n: int) -> np.ndarray:
    src = SourceModel(mu)
    m = src.m
    col = src.column_probabilities()
    px = col.copy()
    for _ in range(1, n):
        px = np.outer(col, px).ravel()
    idx = np.arange(1 << (m * n), dtype=np.int64)
    width = (1 << m) - 1
    cols = _butterfly([(idx >> (m * i)) & width for i in range(n)])
    image = np.zeros_like(idx)
    for i, c in enumerate(cols):
        image |= c << (m * i)
    # G_n is an involution, so P(Y = y) = P(X = y G_n)
    py = px[image]
    py.setflags(write=False)
    return py


def joint_law(src: SourceModel, n: int) -> np.ndarray:
    """Exact P(Y = y) over the flat index layout."""
    n = _check_power_of_two(n)
    _check_size(src.m, n)
    return _joint_law_cached(src.mu, n)


def _entropy_bits(py: np.ndarray, keep: int) -> float:
    if keep == 0:
        return 0.0
    idx = np.arange(py.size, dtype=np.int64)
    w = np.bincount(idx & keep, weights=py)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


# ---------------------------------------------------------------- profile


@dataclass(frozen=True)
class PolarProfile:
    """``table[i, S]`` = H(Y_i[S] | Y^{i-1}) in bits, for 0-based index i and mask S."""

    m: int
    n: int
    table: np.ndarray

    @property
    def distances(self) -> np.ndarray:
        return np.abs(self.table - np.round(self.table))

    @property
    def index_distance(self) -> np.ndarray:
        """Per index, the largest distance to an integer over all S."""
        return self.distances.max(axis=1)

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "table": self.table.tolist()}


def exact_profile(src: SourceModel, n: int) -> PolarProfile:
    py = joint_law(src, n)
    m = src.m
    table = np.zeros((n, 1 << m))
    for i in range(n):
        prefix = (1 << (m * i)) - 1
        h_prefix = _entropy_bits(py, prefix)
        for S in range(1, 1 << m):
            table[i, S] = _entropy_bits(py, prefix | (S << (m * i))) - h_prefix
    table.setflags(write=False)
    return PolarProfile(m, n, table)


@dataclass(frozen=True)
class PolarizationSummary:
    eps: float
    non_polarized: int
    n: int
    mean_distance: float

    @property
    def fraction(self) -> float:
        return self.non_polarized / self.n


def polarization_summary(profile: PolarProfile, eps: float) -> PolarizationSummary:
    """Count indices where some S has entropy farther than ``eps`` from every integer.

    ``mean_distance`` averages the distance to the nearest integer over all
    indices and all non-empty S.
    """
    dist = profile.distances
    non_polarized = int(np.sum(dist.max(axis=1) > eps))
    mean = float(dist[:, 1:].mean()) if profile.m else 0.0
    return PolarizationSummary(float(eps), non_polarized, profile.n, mean)


# ---------------------------------------------------------------- codec


@dataclass(frozen=True)
class CodecPlan:
    """Stored component masks B_i per index, the threshold used, and the rate."""

    m: int
    n: int
    stored: tuple
    delta: float

    @property
    def rate(self) -> float:
        return sum(bin(b).count("1") for b in self.stored) / (self.n * self.m)

    @property
    def n_stored(self) -> int:
        return sum(bin(b).count("1") for b in self.stored)

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "stored": [[j for j in range(self.m) if (b >> j) & 1] for b in self.stored],
            "rate": self.rate,
        }


def build_codec_plan(profile: PolarProfile, delta: float) -> CodecPlan:
    """Greedily store component j of index i when H(Y_i[j] | Y^{i-1}, Y_i[B_i]) > delta."""
    stored = []
    for i in range(profile.n):
        B = 0
        for j in range(profile.m):
            gain = profile.table[i, B | (1 << j)] - profile.table[i, B]
            if gain > delta:
                B |= 1 << j
        stored.append(B)
    return CodecPlan(profile.m, profile.n, tuple(stored), float(delta))


@lru_cache(maxsize=32)
def _decision_tables(mu: FiniteDistribution, n: int, stored: tuple) -> tuple:
    """For each index i, ``dec[s, a]``: MAP value of Y_i given prefix a and stored bits s.

    Ties (within a relative 1e-12) go to the smallest column value.
    """
    py = _joint_law_cached(mu, n)
    m = mu.m
    idx = np.arange(py.size, dtype=np.int64)
    tables = []
    ys = np.arange(1 << m)
    for i in range(n):
        q = np.bincount(idx & ((1 << (m * (i + 1))) - 1), weights=py, minlength=1 << (m * (i + 1)))
        q = q.reshape(1 << m, 1 << (m * i))  # rows: value of column i, cols: prefix
        B = stored[i]
        dec = np.zeros((1 << m, 1 << (m * i)), dtype=np.int64)
        for s in np.unique(ys & B):
            group = ys[(ys & B) == s]
            sub = q[group]
            best = sub.max(axis=0)
            ok = sub >= best * (1 - TIE_RTOL)
            dec[s] = group[np.argmax(ok, axis=0)]
        tables.append(dec)
    return tuple(tables)


def _check_plan(src: SourceModel, plan: CodecPlan) -> None:
    if plan.m != src.m or len(plan.stored) != plan.n:
        raise PreconditionError("codec plan does not match the source")
    _check_size(src.m, plan.n)


def encode(plan: CodecPlan, X) -> np.ndarray:
    """Stored bits: Y_i[B_i] for i = 0..n-1, rows within an index in increasing order."""
    X = check_bits(X, plan.m, plan.n)
    Y = kron_transform(X)
    out = [Y[:, j, i] for i in range(plan.n) for j in range(plan.m) if (plan.stored[i] >> j) & 1]
    if not out:
        return np.zeros((X.shape[0], 0), dtype=np.uint8)
    return np.stack(out, axis=1).astype(np.uint8)


def decode(src: SourceModel, plan: CodecPlan, stored) -> np.ndarray:
    """Successive MAP reconstruction of Y followed by the inverse transform."""
    _check_plan(src, plan)
    Z = np.asarray(stored, dtype=np.int64)
    if Z.ndim == 1:
        Z = Z[None]
    if Z.shape[1] != plan.n_stored:
        raise FormatError(f"expected {plan.n_stored} stored bits, got {Z.shape[1]}")
    tables = _decision_tables(src.mu, plan.n, plan.stored)
    m = plan.m
    k = Z.shape[0]
    prefix = np.zeros(k, dtype=np.int64)
    Y = np.zeros((k, m, plan.n), dtype=np.uint8)
    pos = 0
    for i in range(plan.n):
        s = np.zeros(k, dtype=np.int64)
        for j in range(m):
            if (plan.stored[i] >> j) & 1:
                s |= Z[:, pos] << j
                pos += 1
        col = tables[i][s, prefix]
        for j in range(m):
            Y[:, j, i] = (col >> j) & 1
        prefix |= col << (m * i)
    return kron_transform(Y)


def block_error_probability(src: SourceModel, plan: CodecPlan) -> tuple[float, float]:
    """Exact P(decode(encode(X)) != X) and the union bound over per-index MAP errors."""
    _check_plan(src, plan)
    py = joint_law(src, plan.n)
    tables = _decision_tables(src.mu, plan.n, plan.stored)
    m = plan.m
    idx = np.arange(py.size, dtype=np.int64)
    width = (1 << m) - 1
    correct = np.ones(py.size, dtype=bool)
    union = 0.0
    for i in range(plan.n):
        col = (idx >> (m * i)) & width
        prefix = idx & ((1 << (m * i)) - 1)
        hit = tables[i][col & plan.stored[i], prefix] == col
        union += float(py[~hit].sum())
        correct &= hit
    return float(py[~correct].sum()), union


# ---------------------------------------------------------------- estimator


def empirical_source(X) -> FiniteDistribution:
    """Exact empirical law of the columns of a ``(k, m, n)`` bit array."""
    X = check_bits(X)
    cols = X.transpose(0, 2, 1).reshape(-1, X.shape[1])
    counts: dict[tuple[int, ...], int] = {}
    for c in map(tuple, cols.tolist()):
        counts[c] = counts.get(c, 0) + 1
    total = cols.shape[0]
    return FiniteDistribution(2, X.shape[1], {w: Fraction(c, total) for w, c in counts.items()})


class PolarSourceCodec(TransformerMixin, BaseEstimator):
    """Store-a-basis compressor for i.i.d. columns after the Kronecker transform.

    ``fit`` computes the exact conditional-entropy profile of the transformed
    block and chooses the stored components; ``transform`` encodes bit
    matrices of shape ``(m, n)`` or ``(k, m, n)`` and ``inverse_transform``
    decodes them. With ``source=None`` the column law is estimated from the
    training matrices.

    Parameters
    ----------
    n : int
        Block length, a power of 2.
    delta : float
        A component is stored when its conditional entropy exceeds this.
    eps : float
        Integrality tolerance used for the polarization summary.
    source : FiniteDistribution, optional
        Known column law on ``F_2^m``.
    """

    def __init__(self, n=8, delta=0.1, eps=0.1, source=None):
        self.n = n
        self.delta = delta
        self.eps = eps
        self.source = source

    def fit(self, X=None, y=None):
        n = _check_power_of_two(self.n)
        if self.source is not None:
            mu = self.source
        elif X is not None:
            mu = empirical_source(check_bits(X, n=n))
        else:
            raise PreconditionError("fit needs either a source distribution or training data")
        self.source_ = SourceModel(mu)
        self.profile_ = exact_profile(self.source_, n)
        self.summary_ = polarization_summary(self.profile_, self.eps)
        self.plan_ = build_codec_plan(self.profile_, self.delta)
        self.rate_ = self.plan_.rate
        self.error_probability_, self.union_bound_ = block_error_probability(self.source_, self.plan_)
        self.n_features_in_ = mu.m * n
        return self

    def transform(self, X):
        check_is_fitted(self, "plan_")
        return encode(self.plan_, X)

    def inverse_transform(self, Z):
        check_is_fitted(self, "plan_")
        return decode(self.source_, self.plan_, Z)

    def report(self) -> dict:
        check_is_fitted(self, "plan_")
        s = self.summary_
        return {
            "m": self.source_.m,
            "n": self.plan_.n,
            "profile": self.profile_.table.tolist(),
            "summary": {
                "eps": s.eps,
                "non_polarized": s.non_polarized,
                "fraction": s.fraction,
                "mean_distance": s.mean_distance,
            },
            "plan": self.plan_.to_json(),
            "rate": self.rate_,
            "error_probability": self.error_probability_,
            "union_bound": self.union_bound_,
        }
