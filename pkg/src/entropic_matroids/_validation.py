"""Input validation helpers shared across modules."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .exceptions import FormatError, PreconditionError

MAX_GROUND_SET = 20


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def popcounts(m: int) -> np.ndarray:
    """Popcount of every mask in ``range(2**m)``."""
    idx = np.arange(1 << m, dtype=np.int64)
    pc = np.zeros(1 << m, dtype=np.int64)
    for i in range(m):
        pc += (idx >> i) & 1
    return pc


def elements_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << int(e)
    return mask


def check_mask(mask: int, m: int, name: str = "subset") -> int:
    mask = int(mask)
    if mask < 0 or mask >> m:
        raise PreconditionError(f"{name} {mask:#x} is not a subset of a {m}-element ground set")
    return mask


def check_ground_size(m: int) -> int:
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise FormatError(f"ground set size must be a non-negative integer, got {m!r}")
    if m > MAX_GROUND_SET:
        raise FormatError(f"ground set size {m} exceeds the cap of {MAX_GROUND_SET}")
    return int(m)


def is_prime(p: int) -> bool:
    """Trial division; adequate for p <= 10**6."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    p = int(p)
    if p > 10**6:
        raise FormatError(f"primality of {p} is only checked up to 10**6")
    if not is_prime(p):
        raise FormatError(f"{p} is not prime")
    return p


def check_words(words: Sequence[Sequence[int]], s: int, m: int) -> list[tuple[int, ...]]:
    """Normalize a list of words to tuples and check length and alphabet."""
    out = []
    for w in words:
        w = tuple(int(x) for x in w)
        if len(w) != m:
            raise FormatError(f"word {w} has length {len(w)}, expected {m}")
        if any(x < 0 or x >= s for x in w):
            raise FormatError(f"word {w} has a symbol outside [0, {s})")
        out.append(w)
    return out
