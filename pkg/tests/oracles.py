"""Definition-level reference implementations, independent of the package internals."""

import itertools
import math
from fractions import Fraction


def subsets(m):
    return range(1 << m)


def size(S):
    return bin(S).count("1")


def axioms_hold(rank, m):
    """Global forms of the three rank axioms, checked over all pairs."""
    if rank[0] != 0:
        return False
    for S in subsets(m):
        if not 0 <= rank[S] <= size(S):
            return False
    for A in subsets(m):
        for B in subsets(m):
            if A & B == A and rank[A] > rank[B]:
                return False
            if rank[A | B] + rank[A & B] > rank[A] + rank[B]:
                return False
    return True


def independent(rank, m):
    return [S for S in subsets(m) if rank[S] == size(S)]


def bases(rank, m):
    ind = independent(rank, m)
    return [S for S in ind if not any(T != S and T & S == S for T in ind)]


def circuits(rank, m):
    dep = [S for S in subsets(m) if rank[S] < size(S)]
    return [S for S in dep if not any(T != S and T & S == T for T in dep)]


def span_rank(columns, p):
    """log_p of the number of vectors spanned by the columns."""
    if not columns:
        return 0
    d = len(columns[0])
    span = set()
    for coeffs in itertools.product(range(p), repeat=len(columns)):
        span.add(tuple(sum(c * v[i] for c, v in zip(coeffs, columns)) % p for i in range(d)))
    return round(math.log(len(span), p))


def entropy(atoms, q, coords=None):
    """Base-q entropy of the marginal on ``coords`` (all coordinates by default)."""
    marg = {}
    for w, p in atoms.items():
        key = w if coords is None else tuple(w[c] for c in coords)
        marg[key] = marg.get(key, Fraction(0)) + p
    return -sum(float(p) * math.log(float(p), q) for p in marg.values() if p)


def mutually_independent(atoms, coords):
    """Exact test that the listed coordinates are mutually independent."""
    singles = []
    for c in coords:
        marg = {}
        for w, p in atoms.items():
            marg[w[c]] = marg.get(w[c], Fraction(0)) + p
        singles.append(marg)
    joint = {}
    for w, p in atoms.items():
        key = tuple(w[c] for c in coords)
        joint[key] = joint.get(key, Fraction(0)) + p
    for values in itertools.product(*[list(s) for s in singles]):
        prod = Fraction(1)
        for s, v in zip(singles, values):
            prod *= s[v]
        if joint.get(values, Fraction(0)) != prod:
            return False
    return True
