"""Runs the reference checks end to end and collects a deterministic report."""

from __future__ import annotations

import hashlib
import itertools
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .almost_affine import (
    AffineCode,
    SecretSharingMatrix,
    code_to_distribution,
    distribution_to_code,
    induced_matroid,
    is_almost_affine,
    is_secret_sharing,
    rank_two_triples,
    simonis_ashikhmin_code,
)
from .catalog import CANONICAL_NAMES, catalog
from .entropy import FiniteDistribution, as_entropic_matroid, bernoulli, entropy
from .exceptions import CapabilityError
from .matroid import dual, enumerate_matroids, uniform
from .polar import PolarSourceCodec, SourceModel, exact_profile, polarization_summary
from .representability import (
    Representation,
    find_representation,
    representation_to_distribution,
    verify_representation,
)
from .search import (
    DEFAULT_BUDGET,
    TIMEOUT,
    brute_force_is_p_entropic,
    is_p_entropic,
    minor_closure_check,
    verify_entropic_certificate,
)

SCHEMA_VERSION = 1
CERTIFICATE_BUDGET = 10**5
PASS, FAIL = "pass", "fail"


@dataclass
class CriterionResult:
    key: str
    title: str
    status: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {"key": self.key, "title": self.title, "status": self.status, "details": self.details}


class _Ctx:
    """Shared settings plus timeout bookkeeping for one criterion."""

    def __init__(self, budget: int, seed: int):
        self.budget = budget
        self.seed = seed
        self.timed_out = False

    def search(self, M, p):
        rep = is_p_entropic(M, p, self.budget)
        if rep.verdict == TIMEOUT:
            self.timed_out = True
        return rep


def _status(ok: bool, ctx: _Ctx) -> str:
    if ctx.timed_out:
        return TIMEOUT
    return PASS if ok else FAIL


def _not_entropic(ctx, pairs, limit):
    details, ok = {}, True
    for name, p in pairs:
        t = time.perf_counter()
        rep = ctx.search(catalog(name).matroid, p)
        dt = time.perf_counter() - t
        details[f"{name}@{p}"] = {"verdict": rep.verdict, "nodes": rep.nodes, "max_depth": rep.max_depth}
        ok &= rep.verdict == "not-entropic" and dt < limit
    return ok, details


def check_u24(ctx):
    return _not_entropic(ctx, [("U2,4", 2)], 1.0)


def check_u25_u35(ctx):
    return _not_entropic(ctx, [("U2,5", 3), ("U3,5", 3)], 10.0)


def check_fano_ternary(ctx):
    t = time.perf_counter()
    ok, details = _not_entropic(ctx, [("F7", 3), ("F7*", 3)], 600.0)
    return ok and time.perf_counter() - t < 600.0, details


def check_fano_binary(ctx):
    details, ok = {}, True
    for name in ("F7", "F7*"):
        entry = catalog(name)
        rep = ctx.search(entry.matroid, 2)
        R = Representation.from_matrix(entry.matrix)
        rep_ok = bool(verify_representation(entry.matroid, R))
        law = as_entropic_matroid(representation_to_distribution(R))
        law_ok = bool(law) and law.matroid == entry.matroid
        details[name] = {"search": rep.verdict, "nodes": rep.nodes, "matrix": rep_ok, "distribution": law_ok}
        ok &= rep.entropic and rep_ok and law_ok
    return ok, details


def check_duality(ctx):
    f7 = bool(find_representation(catalog("F7").matroid, 2))
    f7d = bool(find_representation(catalog("F7*").matroid, 2))
    involution = {name: dual(dual(catalog(name).matroid)) == catalog(name).matroid for name in CANONICAL_NAMES}
    dual_match = dual(catalog("F7").matroid) == catalog("F7*").matroid
    details = {"F7 binary": f7, "F7* binary": f7d, "dual(F7) == F7*": dual_match, "involution": involution}
    return f7 == f7d and dual_match and all(involution.values()), details


def check_uniform_lines(ctx):
    details, ok = {}, True
    for p in (2, 3, 5):
        t = time.perf_counter()
        top = ctx.search(uniform(2, p + 1), p)
        t_top = time.perf_counter() - t
        rep = find_representation(uniform(2, p + 1), p)
        t = time.perf_counter()
        over = ctx.search(uniform(2, p + 2), p)
        t_over = time.perf_counter() - t
        details[str(p)] = {
            f"U2,{p + 1}": top.verdict,
            f"U2,{p + 1} representable": bool(rep),
            f"U2,{p + 2}": over.verdict,
            "nodes": [top.nodes, over.nodes],
        }
        ok &= top.entropic and bool(rep) and over.verdict == "not-entropic" and max(t_top, t_over) < 60.0
    return ok, details


def check_non_pappus(ctx):
    C = simonis_ashikhmin_code()
    ss = bool(is_secret_sharing(SecretSharingMatrix(C.s, C.words)))
    aa = is_almost_affine(C)
    M = aa.matroid if aa else None
    triples = rank_two_triples(M) if M is not None else []
    rep = find_representation(M, 3) if M is not None else None
    details = {
        "words": len(C),
        "secret_sharing": ss,
        "almost_affine": bool(aa),
        "rank": M.full_rank if M is not None else None,
        "lines": [[e for e in range(9) if (t >> e) & 1] for t in triples],
        "F3 representation": bool(rep) if rep is not None else None,
        "representation nodes": rep.nodes if rep is not None else None,
    }
    ok = len(C) == 729 and ss and bool(aa) and M.full_rank == 3 and len(triples) == 8 and rep is not None and not rep
    return ok, details


def _certificate(ctx, name):
    """A code certifying the catalog matroid as p-entropic, or None."""
    M = catalog(name).matroid
    if name == "nonpappus":
        return 9, simonis_ashikhmin_code(), "code"
    # attempts are capped: a failed attempt only means no certificate, not a verdict
    for p in (2, 3, 5):
        rep = is_p_entropic(M, p, min(ctx.budget, CERTIFICATE_BUDGET))
        if rep.entropic:
            return p, rep.code, "search"
    for p in (2, 3, 5, 7):
        try:
            found = find_representation(M, p, max_nodes=CERTIFICATE_BUDGET)
        except CapabilityError:
            continue
        if found:
            return p, distribution_to_code(representation_to_distribution(found.representation)), "representation"
    return None, None, None


def check_minor_closure(ctx):
    details, ok = {}, True
    for name in CANONICAL_NAMES:
        p, C, how = _certificate(ctx, name)
        if C is None:
            details[name] = "no certificate"
            continue
        M = catalog(name).matroid
        report = minor_closure_check(M, p, C) if verify_entropic_certificate(M, C) else None
        good = report is not None and report.ok
        details[name] = {"p": p, "source": how, "minors": len(report.items) if report else 0, "ok": good}
        ok &= good
    return ok, details


def random_linear_codes(rng: np.random.Generator, count: int) -> list[AffineCode]:
    """Row spaces over F_s, s in {2, 3}, with random symbol permutations per coordinate."""
    out = []
    for _ in range(count):
        s = int(rng.choice([2, 3]))
        m = int(rng.integers(1, 6))
        k = int(rng.integers(1, m + 1))
        G = rng.integers(0, s, size=(k, m))
        coeffs = np.array(list(itertools.product(range(s), repeat=k)), dtype=np.int64)
        words = (coeffs @ G) % s
        perms = np.array([rng.permutation(s) for _ in range(m)])
        words = perms[np.arange(m), words]
        out.append(AffineCode(s, m, words.tolist()))
    return out


def random_codes(rng: np.random.Generator, count: int) -> list[AffineCode]:
    """Uniformly random word sets, s in {2, 3}, m <= 5; mostly not almost affine."""
    out = []
    for _ in range(count):
        s = int(rng.choice([2, 3]))
        m = int(rng.integers(1, 6))
        space = s**m
        k = int(rng.integers(1, min(space, 40) + 1))
        picks = rng.choice(space, size=k, replace=False)
        words = [[(int(x) // s**j) % s for j in range(m)] for x in picks]
        out.append(AffineCode(s, m, words))
    return out


def check_round_trips(ctx):
    rng = np.random.default_rng(ctx.seed)
    corpus = random_linear_codes(rng, 200)
    round_trip = agree = matroids = 0
    for C in corpus:
        mu = code_to_distribution(C)
        round_trip += distribution_to_code(mu) == C
        ent = as_entropic_matroid(mu)
        ss = bool(is_secret_sharing(SecretSharingMatrix(C.s, C.words)))
        agree += bool(ent) == ss == bool(is_almost_affine(C))
        matroids += bool(ent) and ent.matroid == induced_matroid(C)
    negatives = random_codes(rng, 200)
    neg_agree = 0
    n_affine = 0
    for C in negatives:
        aa = bool(is_almost_affine(C))
        n_affine += aa
        ss = bool(is_secret_sharing(SecretSharingMatrix(C.s, C.words)))
        ent = bool(as_entropic_matroid(FiniteDistribution.uniform_on(C.words, C.s, C.m)))
        neg_agree += aa == ss == ent
    details = {
        "corpus": len(corpus),
        "round_trips": round_trip,
        "entropic_secret_sharing_agree": agree,
        "matroids_agree": matroids,
        "random_codes": len(negatives),
        "random_codes_almost_affine": n_affine,
        "random_codes_agree": neg_agree,
    }
    ok = round_trip == agree == matroids == len(corpus) and neg_agree == len(negatives)
    return ok, details


def random_sources(rng: np.random.Generator, count: int) -> list[tuple[FiniteDistribution, int]]:
    """Random rational column laws with m * n <= 16."""
    out = []
    for _ in range(count):
        m = int(rng.integers(1, 5))
        n = int(rng.choice([b for b in (1, 2, 4, 8, 16) if m * b <= 16]))
        size = int(rng.integers(1, (1 << m) + 1))
        support = rng.choice(1 << m, size=size, replace=False)
        weights = rng.integers(1, 10, size=size)
        total = int(weights.sum())
        atoms = {
            tuple((int(c) >> j) & 1 for j in range(m)): Fraction(int(w), total) for c, w in zip(support, weights)
        }
        out.append((FiniteDistribution(2, m, atoms), n))
    return out


def linear_sources(rng: np.random.Generator, count: int) -> list[FiniteDistribution]:
    """Uniform laws on binary row spaces; their entropic rank is a matroid."""
    out = [FiniteDistribution(2, 2, {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})]
    for _ in range(count - 1):
        m = int(rng.integers(2, 4))
        G = rng.integers(0, 2, size=(int(rng.integers(1, m + 1)), m))
        coeffs = np.array(list(itertools.product(range(2), repeat=G.shape[0])))
        out.append(FiniteDistribution.uniform_on(((coeffs @ G) % 2).tolist(), 2, m))
    return out


def check_polar(ctx):
    rng = np.random.default_rng(ctx.seed)
    worst = 0.0
    sources = random_sources(rng, 50)
    for mu, n in sources:
        prof = exact_profile(SourceModel(mu), n)
        worst = max(worst, abs(prof.table[:, -1].sum() - n * entropy(mu).value))
    conservation = worst <= 1e-9

    matroid_ok = True
    codecs = []
    for mu in linear_sources(rng, 6):
        n = 8 if mu.m == 2 else 4
        codec = PolarSourceCodec(n=n, delta=0.1, eps=0.49, source=mu).fit()
        tight = polarization_summary(codec.profile_, 1e-9)
        h = entropy(mu).value
        good = (
            codec.summary_.non_polarized == 0
            and tight.non_polarized == 0
            and codec.error_probability_ == 0.0
            and abs(codec.rate_ * mu.m - h) <= 1e-9
        )
        codecs.append({"m": mu.m, "n": n, "H": round(h, 12), "rate": codec.rate_, "ok": good})
        matroid_ok &= good

    ber = SourceModel(bernoulli(Fraction(1, 4)))
    means = [polarization_summary(exact_profile(ber, n), 0.1).mean_distance for n in (2, 4, 8)]
    trend = all(b <= a for a, b in zip(means, means[1:]))
    details = {
        "random_sources": len(sources),
        "max_conservation_error": float(f"{worst:.3e}"),
        "matroid_sources": codecs,
        "bernoulli_mean_distance": [round(x, 12) for x in means],
    }
    return conservation and matroid_ok and trend, details


def check_oracle(ctx):
    total = agree = 0
    for m in range(5):
        for M in enumerate_matroids(m):
            fast = ctx.search(M, 2)
            slow = brute_force_is_p_entropic(M, 2)
            total += 1
            agree += fast.entropic == (slow is not None)
    return agree == total, {"matroids": total, "agree": agree}


CRITERIA: list[tuple[str, str, Callable]] = [
    ("u24-binary", "U2,4 is not 2-entropic", check_u24),
    ("u25-u35-ternary", "U2,5 and U3,5 are not 3-entropic", check_u25_u35),
    ("fano-ternary", "F7 and F7* are not 3-entropic", check_fano_ternary),
    ("fano-binary", "F7 and F7* are 2-entropic and binary", check_fano_binary),
    ("duality", "binary representability agrees on F7 and F7*; dual is an involution", check_duality),
    ("uniform-lines", "U2,p+1 is p-entropic and U2,p+2 is not, p in {2,3,5}", check_uniform_lines),
    ("non-pappus", "Simonis-Ashikhmin code is secret-sharing with a non-Pappus matroid", check_non_pappus),
    ("minor-closure", "minor certificates of entropic catalog matroids verify", check_minor_closure),
    ("round-trips", "code/distribution round trips and entropic = secret-sharing", check_round_trips),
    ("polar", "polar conservation, integral sources and Bernoulli trend", check_polar),
    ("oracle", "pruned search matches brute force for m <= 4, p = 2", check_oracle),
]


def run_criterion(index: int, budget: int = DEFAULT_BUDGET, seed: int = 0) -> CriterionResult:
    """Run criterion ``index`` (1-based)."""
    key, title, fn = CRITERIA[index - 1]
    ctx = _Ctx(budget, seed)
    ok, details = fn(ctx)
    return CriterionResult(key, title, _status(ok, ctx), details)


@dataclass
class RunReport:
    command: list
    inputs: dict
    results: list
    wall_time: dict
    seed: int
    budget: int
    version: str = __version__
    schema_version: int = SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "budget": self.budget,
            "inputs": self.inputs,
            "results": [r.to_json() for r in self.results],
            "ok": self.ok,
            "wall_time": self.wall_time,
        }

    def table(self) -> str:
        width = max(len(r.title) for r in self.results)
        lines = [f"{i:>2}  {r.status.upper():<7}  {r.title:<{width}}" for i, r in enumerate(self.results, 1)]
        lines.append(f"{sum(r.passed for r in self.results)}/{len(self.results)} passed")
        return "\n".join(lines)


def digest(data) -> str:
    """sha256 of canonical JSON, or of raw bytes."""
    if not isinstance(data, bytes):
        data = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(data).hexdigest()


def reproduce(budget: int = DEFAULT_BUDGET, seed: int = 0, command=None, only=None, progress=None) -> RunReport:
    """Run the selected criteria (default: all, in order)."""
    inputs = {name: digest(catalog(name).matroid.to_json()) for name in CANONICAL_NAMES}
    results, times = [], {}
    for i in only or range(1, len(CRITERIA) + 1):
        t = time.perf_counter()
        res = run_criterion(i, budget, seed)
        times[res.key] = round(time.perf_counter() - t, 4)
        results.append(res)
        if progress is not None:
            progress(i, res)
    times["total"] = round(sum(times.values()), 4)
    return RunReport(list(command or []), inputs, results, times, seed, budget)
