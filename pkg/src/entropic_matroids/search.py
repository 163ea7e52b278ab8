"""Decide whether a matroid is p-entropic by searching for an almost affine code.

A code C of size p**r(E) over ``[p]`` induces M exactly when every two distinct
codewords agree on a flat of M (and nowhere else). Projection onto any basis
is then a bijection, so codewords are indexed by their values on one fixed
basis and the search fills in the remaining coordinates codeword by codeword.

For a pair of codewords with known agreement set ``A`` and disagreement set
``D`` (restricted to the coordinates filled so far), a completion exists iff
``cl(A)`` misses ``D``. Adding a coordinate ``e`` inside ``cl(A)`` forces the
two codewords to agree on it; outside ``cl(A)`` agreement is allowed only if
``cl(A + e)`` still misses ``D``.

Symbols of every non-basis coordinate are canonicalized to first-appearance
order, so the first codeword is all zeros and coordinate ``e`` of codeword
``k`` never exceeds one plus the largest value used by earlier codewords.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from ._validation import elements_of
from .almost_affine import (
    AffineCode,
    code_to_distribution,
    distribution_to_code,
    is_almost_affine,
)
from .entropy import as_entropic_matroid, condition_on_element, marginal
from .exceptions import CapabilityError, PreconditionError
from .matroid import RankTable, closure_table, contract, delete, require_matroid

DEFAULT_BUDGET = 10**9
MAX_ELEMENTS = 12
MAX_CODEWORDS = 2**16

ENTROPIC = "entropic"
NOT_ENTROPIC = "not-entropic"
TIMEOUT = "timeout"


@dataclass(frozen=True)
class SearchReport:
    """Verdict of :func:`is_p_entropic`.

    ``nodes`` counts every tentative symbol placement; together with
    ``max_depth`` (deepest filled coordinate) it documents an exhaustion.
    """

    verdict: str
    p: int
    nodes: int
    max_depth: int
    total_depth: int
    code: Optional[AffineCode] = None
    trace: str = ""

    @property
    def entropic(self) -> bool:
        return self.verdict == ENTROPIC

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "p": self.p,
            "nodes": self.nodes,
            "max_depth": self.max_depth,
            "total_depth": self.total_depth,
            "trace": self.trace,
        }
        if self.code is not None:
            out["certificate"] = self.code.to_json()
        return out


def greedy_basis(M: RankTable) -> list[int]:
    """Elements kept by scanning 0..m-1 and adding each one that raises the rank."""
    chosen = 0
    for e in range(M.m):
        if M(chosen | (1 << e)) > M(chosen):
            chosen |= 1 << e
    return elements_of(chosen)


def is_p_entropic(M: RankTable, p: int, budget: int = DEFAULT_BUDGET) -> SearchReport:
    """Exhaustive search for a code over ``[p]`` whose projections realize M."""
    require_matroid(M)
    p = int(p)
    if p < 2:
        raise PreconditionError(f"alphabet size must be at least 2, got {p}")
    m, r = M.m, M.full_rank
    if m > MAX_ELEMENTS:
        raise CapabilityError(f"entropic search is capped at {MAX_ELEMENTS} elements, got {m}")
    n_words = p**r
    if n_words > MAX_CODEWORDS:
        raise CapabilityError(f"p**r(E) = {n_words} codewords exceeds the cap of {MAX_CODEWORDS}")

    cl = [int(x) for x in closure_table(M)]
    basis = greedy_basis(M)
    free = [e for e in range(m) if e not in basis]
    nf = len(free)
    total = n_words * nf
    trace = (
        f"basis {basis} indexes the {n_words} codewords in lexicographic order; "
        f"coordinates {free} use first-appearance symbol order (first codeword all zeros)"
    )

    words = []
    for x in itertools.product(range(p), repeat=r):
        w = [0] * m
        for b, v in zip(basis, x):
            w[b] = v
        words.append(w)

    basis_mask = sum(1 << b for b in basis)
    bits = [1 << e for e in range(m)]

    # per depth t: agreement / disagreement masks of the current codeword vs. each earlier one
    agree_stack: list[list[int]] = []
    dis_stack: list[list[int]] = []
    cand_stack: list[list[int]] = []
    pos_stack: list[int] = []
    maxval = [[-1] * nf]  # maxval[t][j]: largest symbol used in coordinate free[j] before depth t

    def start_codeword(k: int) -> tuple[list[int], list[int]]:
        wk = words[k]
        agree, dis = [], []
        for w in words[:k]:
            a = 0
            for b in basis:
                if w[b] == wk[b]:
                    a |= bits[b]
            agree.append(a)
            dis.append(basis_mask ^ a)
        return agree, dis

    def candidates(k: int, j: int, agree: list[int], dis: list[int], mx: list[int]) -> list[int]:
        e = free[j]
        bit = bits[e]
        forced = None
        forbidden = set()
        for kk in range(k):
            a = agree[kk]
            w = words[kk][e]
            if cl[a] & bit:
                if forced is None:
                    forced = w
                elif forced != w:
                    return []
            elif cl[a | bit] & dis[kk]:
                forbidden.add(w)
        limit = min(p, mx[j] + 2)
        if forced is not None:
            return [forced] if forced < limit and forced not in forbidden else []
        return [v for v in range(limit) if v not in forbidden]

    nodes = 0
    max_depth = 0
    t = 0
    if total:
        agree, dis = start_codeword(0)
        agree_stack.append(agree)
        dis_stack.append(dis)
        cand_stack.append(candidates(0, 0, agree, dis, maxval[0]))
        pos_stack.append(0)

    while 0 <= t < total:
        k, j = divmod(t, nf)
        cands = cand_stack[t]
        pos = pos_stack[t]
        if pos >= len(cands):
            # exhausted this coordinate: backtrack
            cand_stack.pop()
            pos_stack.pop()
            agree_stack.pop()
            dis_stack.pop()
            maxval.pop()
            t -= 1
            continue
        v = cands[pos]
        pos_stack[t] = pos + 1
        nodes += 1
        if nodes > budget:
            return SearchReport(TIMEOUT, p, nodes - 1, max_depth, total, None, trace)
        e = free[j]
        words[k][e] = v
        bit = bits[e]
        agree = list(agree_stack[t])
        dis = list(dis_stack[t])
        for kk in range(k):
            if words[kk][e] == v:
                agree[kk] |= bit
            else:
                dis[kk] |= bit
        mx = list(maxval[t])
        if v > mx[j]:
            mx[j] = v
        t += 1
        max_depth = max(max_depth, t)
        if t == total:
            break
        k2, j2 = divmod(t, nf)
        if j2 == 0:
            agree, dis = start_codeword(k2)
        agree_stack.append(agree)
        dis_stack.append(dis)
        maxval.append(mx)
        cand_stack.append(candidates(k2, j2, agree, dis, mx))
        pos_stack.append(0)

    if t < 0:
        return SearchReport(NOT_ENTROPIC, p, nodes, max_depth, total, None, trace)
    code = AffineCode(p, m, words)
    if not verify_entropic_certificate(M, code):  # pragma: no cover - search invariant
        raise AssertionError("search produced a code that does not induce the matroid")
    return SearchReport(ENTROPIC, p, nodes, max_depth, total, code, trace)


def verify_entropic_certificate(M: RankTable, C: AffineCode) -> bool:
    """True iff C is almost affine and its induced matroid is exactly M."""
    if C.m != M.m:
        return False
    check = is_almost_affine(C)
    return bool(check) and check.matroid == M


# ---------------------------------------------------------------- minor closure


@dataclass(frozen=True)
class MinorCertificate:
    kind: str  # "delete" or "contract"
    element: int
    code: Optional[AffineCode]
    ok: bool


@dataclass(frozen=True)
class MinorClosureReport:
    items: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    def __bool__(self):
        return self.ok

    def failures(self) -> list[MinorCertificate]:
        return [item for item in self.items if not item.ok]


def minor_closure_check(M: RankTable, p: int, C: AffineCode) -> MinorClosureReport:
    """Derive and verify certificates for every single-element deletion and
    every contraction of a rank-one element.

    Deletions use the marginal on the remaining coordinates; contractions
    condition on the element taking the value it has in the first codeword.
    """
    if C.s != p or not verify_entropic_certificate(M, C):
        raise PreconditionError(f"code does not certify the matroid as {p}-entropic")
    mu = code_to_distribution(C)
    items = []
    for e in range(M.m):
        rest = M.ground & ~(1 << e)
        marg = marginal(mu, rest)
        check = as_entropic_matroid(marg)
        ok = bool(check) and check.matroid == delete(M, 1 << e)
        code = distribution_to_code(marg) if check else None
        ok = ok and verify_entropic_certificate(delete(M, 1 << e), code)
        items.append(MinorCertificate("delete", e, code, ok))
    for e in range(M.m):
        if M(1 << e) != 1:
            continue
        cond = condition_on_element(mu, e, C.words[0][e])
        check = as_entropic_matroid(cond)
        target = contract(M, 1 << e)
        ok = bool(check) and check.matroid == target
        code = distribution_to_code(cond) if check else None
        ok = ok and verify_entropic_certificate(target, code)
        items.append(MinorCertificate("contract", e, code, ok))
    return MinorClosureReport(tuple(items))


# ---------------------------------------------------------------- reference enumerator


def brute_force_is_p_entropic(M: RankTable, p: int, max_codes: int = 10**6) -> Optional[AffineCode]:
    """Try every code of size p**r(E) in [p]**m that contains the zero word.

    Independent of :func:`is_p_entropic`: each candidate is judged only by its
    projection counts. Intended for tiny instances.
    """
    m, r = M.m, M.full_rank
    size = p**r
    space = list(itertools.product(range(p), repeat=m))
    zero, others = space[0], space[1:]
    if math.comb(len(others), size - 1) > max_codes:
        raise CapabilityError("brute-force code enumeration is too large")
    for rest in itertools.combinations(others, size - 1):
        C = AffineCode(p, m, (zero,) + rest)
        check = is_almost_affine(C)
        if check and check.matroid == M:
            return C
    return None

