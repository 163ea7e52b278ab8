import copy
import itertools
import json
import math
import pickle
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_matroids.catalog import FANO_MATRIX, catalog
from entropic_matroids.entropy import (
    FiniteDistribution,
    as_entropic_matroid,
    bernoulli,
    condition_on_element,
    conditional_entropy,
    entropic_rank,
    entropy,
    hamming_ball_size,
    hamming_distance,
    load_distribution,
    marginal,
    probability,
    product,
    subset_entropy,
)
from entropic_matroids.exceptions import FormatError, PreconditionError
from entropic_matroids.matroid import RankTable, check_axioms, contract, uniform
from entropic_matroids.representability import Representation, representation_to_distribution

from . import oracles

H_QUARTER = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
PAIR = FiniteDistribution(2, 2, {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})


@st.composite
def distributions(draw, max_q=3, max_m=4):
    q = draw(st.integers(2, max_q))
    m = draw(st.integers(1, max_m))
    words = list(itertools.product(range(q), repeat=m))
    support = draw(st.lists(st.sampled_from(words), min_size=1, max_size=min(len(words), 12), unique=True))
    weights = draw(st.lists(st.integers(1, 9), min_size=len(support), max_size=len(support)))
    total = sum(weights)
    return FiniteDistribution(q, m, {w: Fraction(x, total) for w, x in zip(support, weights)})


# ---------------------------------------------------------------- the type


def test_probabilities_must_sum_to_one():
    with pytest.raises(FormatError):
        FiniteDistribution(2, 1, {(0,): Fraction(1, 3)})


def test_negative_probability_rejected():
    with pytest.raises(FormatError):
        FiniteDistribution(2, 1, {(0,): Fraction(3, 2), (1,): Fraction(-1, 2)})


def test_zero_atoms_are_dropped():
    mu = FiniteDistribution(2, 1, {(0,): Fraction(1), (1,): Fraction(0)})
    assert list(mu.atoms) == [(0,)]


def test_symbols_must_fit_alphabet():
    with pytest.raises(FormatError):
        FiniteDistribution(2, 1, {(2,): Fraction(1)})


def test_json_round_trip(tmp_path):
    mu = bernoulli(Fraction(1, 4))
    path = tmp_path / "mu.json"
    path.write_text(json.dumps(mu.to_json()))
    assert load_distribution(path) == mu
    assert mu.to_json()["atoms"][0] == {"word": [0], "num": 3, "den": 4}


def test_json_malformed():
    with pytest.raises(FormatError):
        FiniteDistribution.from_json({"q": 2, "m": 1, "atoms": [{"word": [0]}]})


# ---------------------------------------------------------------- marginals


def test_marginal_of_product_is_uniform():
    mu = product(FiniteDistribution.uniform_on([(0,), (1,), (2,)], 3), FiniteDistribution.uniform_on([(0,), (1,), (2,)], 3))
    assert marginal(mu, 0b01) == FiniteDistribution.uniform_on([(0,), (1,), (2,)], 3)


def test_marginal_of_diagonal_pair():
    assert marginal(PAIR, 0b10) == FiniteDistribution.uniform_on([(0,), (1,)], 2)


def test_marginal_of_four_word_code():
    mu = FiniteDistribution.uniform_on([(0, 0, 0, 0), (0, 1, 1, 1), (1, 0, 1, 0), (1, 1, 0, 1)], 2)
    for S in (0b0011, 0b0101, 0b1010, 0b1100):
        got = marginal(mu, S)
        cols = [e for e in range(4) if (S >> e) & 1]
        expect = {}
        for w, p in mu.atoms.items():
            key = tuple(w[c] for c in cols)
            expect[key] = expect.get(key, 0) + p
        assert dict(got.atoms) == expect


@settings(max_examples=60, deadline=None)
@given(distributions())
def test_marginal_of_marginal(mu):
    T = (1 << mu.m) - 1 - (mu.m > 1)
    S = T & 0b0101
    inner = marginal(mu, T)
    # re-index S inside T
    kept = [e for e in range(mu.m) if (T >> e) & 1]
    S_in = sum(1 << i for i, e in enumerate(kept) if (S >> e) & 1)
    assert marginal(inner, S_in) == marginal(mu, S)


# ---------------------------------------------------------------- entropy values


def test_uniform_on_ternary_square():
    mu = FiniteDistribution.uniform_on(itertools.product(range(3), repeat=2), 3)
    h = entropy(mu)
    assert h.value == pytest.approx(2.0, abs=1e-12) and h.integral


def test_diagonal_pair_entropies():
    assert entropy(PAIR).value == pytest.approx(1.0)
    assert conditional_entropy(PAIR, 0b01, 0b10).value == pytest.approx(0.0, abs=1e-12)


def test_biased_bit():
    h = entropy(bernoulli(Fraction(1, 4)))
    assert h.value == pytest.approx(0.8112781244591328, abs=1e-12)
    assert not h.integral


def test_conditional_requires_disjoint_sets():
    with pytest.raises(PreconditionError):
        conditional_entropy(PAIR, 0b01, 0b11)


@settings(max_examples=80, deadline=None)
@given(distributions())
def test_entropy_matches_reference(mu):
    for S in range(1 << mu.m):
        cols = [e for e in range(mu.m) if (S >> e) & 1]
        assert subset_entropy(mu, S).value == pytest.approx(oracles.entropy(mu.atoms, mu.q, cols), abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(distributions())
def test_chain_rule(mu):
    full = (1 << mu.m) - 1
    for T in range(1 << mu.m):
        S = full ^ T
        lhs = subset_entropy(mu, full).value
        rhs = subset_entropy(mu, T).value + conditional_entropy(mu, S, T).value
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_entropic_rank_is_polymatroid_on_random_distributions():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        q = int(rng.integers(2, 4))
        m = int(rng.integers(1, 5))
        words = list(itertools.product(range(q), repeat=m))
        k = int(rng.integers(1, min(len(words), 10) + 1))
        idx = rng.choice(len(words), size=k, replace=False)
        weights = rng.integers(1, 20, size=k)
        mu = FiniteDistribution(q, m, {words[i]: Fraction(int(w), int(weights.sum())) for i, w in zip(idx, weights)})
        r = entropic_rank(mu)
        assert abs(r[0]) < 1e-12
        for A in range(1 << m):
            for e in range(m):
                assert r[A] <= r[A | (1 << e)] + 1e-9
            for B in range(1 << m):
                assert r[A | B] + r[A & B] <= r[A] + r[B] + 1e-9


def test_entropic_rank_of_product_of_uniforms():
    mu = FiniteDistribution.uniform_on(itertools.product(range(2), repeat=3), 2)
    assert np.allclose(entropic_rank(mu), [bin(S).count("1") for S in range(8)])


def test_row_space_gives_uniform_rank_two():
    G = np.array([[1, 0, 1], [0, 1, 1]])
    words = [tuple(int(x) for x in (np.array(c) @ G) % 2) for c in itertools.product(range(2), repeat=2)]
    mu = FiniteDistribution.uniform_on(words, 2)
    assert np.allclose(entropic_rank(mu), uniform(2, 3).rank)
    check = as_entropic_matroid(mu)
    assert check and check.matroid == uniform(2, 3)


def test_product_of_biased_bits_is_not_integral():
    b = bernoulli(Fraction(1, 4))
    r = entropic_rank(product(b, b))
    assert abs(r[1] - round(r[1])) > 0.1


def test_as_entropic_matroid_reports_first_fractional_subset():
    check = as_entropic_matroid(bernoulli(Fraction(1, 4)))
    assert not check and check.witness == 0b1


def test_empty_variable_distribution():
    mu = FiniteDistribution(2, 0, {(): Fraction(1)})
    check = as_entropic_matroid(mu)
    assert check and check.matroid == RankTable(0, [0])


def test_non_uniform_distribution_with_integral_entropies():
    # two equiprobable blocks of a non-uniform law still give integral base-2 entropy here
    mu = FiniteDistribution(4, 1, {(0,): Fraction(1, 2), (1,): Fraction(1, 4), (2,): Fraction(1, 4)})
    assert entropy(mu).value == pytest.approx(0.75)
    assert not as_entropic_matroid(mu)


# ---------------------------------------------------------------- mutual independence is not a matroid


def test_mutual_independence_rank_violates_submodularity():
    # X1, X2 fair bits, X3 = X1 + X2 over the integers (alphabet {0, 1, 2})
    atoms = {}
    for a, b in itertools.product(range(2), repeat=2):
        atoms[(a, b, a + b)] = Fraction(1, 4)
    rank = []
    for S in range(8):
        elems = [e for e in range(3) if (S >> e) & 1]
        best = 0
        for k in range(len(elems) + 1):
            for sub in itertools.combinations(elems, k):
                if oracles.mutually_independent(atoms, sub):
                    best = max(best, k)
        rank.append(best)
    A, B, x = 0b100, 0b101, 0b010
    assert rank[A | x] - rank[A] == 0
    assert rank[B | x] - rank[B] == 1
    report = check_axioms(RankTable(3, rank))
    assert not report and report.axiom == "submodularity"
    # the entropy-based rank of the same law is a polymatroid
    mu = FiniteDistribution(3, 3, atoms)
    r = entropic_rank(mu)
    for P in range(8):
        for Q in range(8):
            assert r[P | Q] + r[P & Q] <= r[P] + r[Q] + 1e-9


# ---------------------------------------------------------------- conditioning


def test_condition_diagonal_pair():
    assert condition_on_element(PAIR, 0, 0) == FiniteDistribution(2, 1, {(0,): Fraction(1)})


def test_condition_on_zero_probability_rejected():
    with pytest.raises(PreconditionError):
        condition_on_element(PAIR, 0, 2)


def test_condition_product_leaves_rest_unchanged():
    b = bernoulli(Fraction(1, 3))
    c = bernoulli(Fraction(2, 5))
    assert condition_on_element(product(b, c), 0, 1) == c


@pytest.mark.parametrize("i", range(7))
def test_conditioning_fano_law_contracts(i):
    mu = representation_to_distribution(Representation.from_matrix(FANO_MATRIX))
    cond = condition_on_element(mu, i, 0)
    check = as_entropic_matroid(cond)
    assert check and check.matroid == contract(catalog("F7").matroid, 1 << i)


@settings(max_examples=60, deadline=None)
@given(distributions(), st.data())
def test_conditioning_average(mu, data):
    if mu.m < 2:
        return
    i = data.draw(st.integers(0, mu.m - 1))
    others = [e for e in range(mu.m) if e != i]
    A = sum(1 << e for e in others)
    lhs = conditional_entropy(mu, A, 1 << i).value
    rhs = 0.0
    for x in range(mu.q):
        p = probability(mu, i, x)
        if p:
            rhs += float(p) * entropy(condition_on_element(mu, i, x)).value
    assert lhs == pytest.approx(rhs, abs=1e-9)


# ---------------------------------------------------------------- Hamming geometry


def test_hamming_ball_sizes():
    assert hamming_ball_size(3, 5, 1) == 11
    assert hamming_ball_size(3, 5, 0) == 1
    assert hamming_ball_size(2, 4, 4) == 16


def test_hamming_ball_by_enumeration():
    for q, n, r in [(2, 5, 2), (3, 4, 2), (5, 3, 1)]:
        count = sum(1 for w in itertools.product(range(q), repeat=n) if hamming_distance(w, (0,) * n) <= r)
        assert hamming_ball_size(q, n, r) == count


def test_hamming_radius_out_of_range():
    with pytest.raises(PreconditionError):
        hamming_ball_size(2, 3, 4)


def test_distribution_pickles():
    mu = bernoulli(Fraction(1, 4))
    assert pickle.loads(pickle.dumps(mu)) == mu
    assert copy.deepcopy(mu) == mu
