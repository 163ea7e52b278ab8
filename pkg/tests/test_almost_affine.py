import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from entropic_matroids.almost_affine import (
    AffineCode,
    SecretSharingMatrix,
    code_to_distribution,
    distribution_to_code,
    induced_matroid,
    is_almost_affine,
    is_secret_sharing,
    load_code,
    projection_count,
    projection_fibers,
    rank_two_triples,
    secret_sharing_matroid,
    simonis_ashikhmin_code,
    simonis_ashikhmin_generator,
)
from entropic_matroids.catalog import FANO_MATRIX, catalog
from entropic_matroids.entropy import FiniteDistribution, as_entropic_matroid, bernoulli, entropic_rank
from entropic_matroids.exceptions import FormatError, PreconditionError
from entropic_matroids.matroid import uniform
from entropic_matroids.representability import Representation, representation_to_distribution
from entropic_matroids.reproduce import random_codes, random_linear_codes

# lines of the induced matroid, as found by rank_two_triples
NON_PAPPUS_LINES = [
    [0, 1, 2], [3, 4, 5], [1, 3, 6], [0, 4, 6], [2, 3, 7], [0, 5, 7], [2, 4, 8], [1, 5, 8],
]

ROW_SPACE_101_011 = [(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 0)]


@pytest.fixture(scope="module")
def sa_code():
    return simonis_ashikhmin_code()


# ---------------------------------------------------------------- the code type


def test_code_is_sorted_and_deduplicated():
    C = AffineCode(2, 2, [(1, 1), (0, 0), (1, 1)])
    assert C.words == ((0, 0), (1, 1))


def test_code_rejects_bad_symbols():
    with pytest.raises(FormatError):
        AffineCode(2, 2, [(0, 2)])


def test_code_rejects_empty():
    with pytest.raises(FormatError):
        AffineCode(2, 2, [])


def test_code_json_and_text(tmp_path):
    C = AffineCode(3, 2, [(2, 1), (0, 0)])
    path = tmp_path / "c.json"
    path.write_text(json.dumps(C.to_json()))
    assert load_code(path) == C
    assert C.dumps() == "00\n21\n"


# ---------------------------------------------------------------- projections


def test_projection_counts():
    full = AffineCode(2, 3, itertools.product(range(2), repeat=3))
    assert projection_count(full, 0b011) == 4
    assert projection_count(AffineCode(2, 3, [(0, 0, 0), (1, 1, 1)]), 0b101) == 2


def test_simonis_ashikhmin_single_projections(sa_code):
    for e in range(9):
        assert projection_count(sa_code, 1 << e) == 9


def test_fibers_are_equal_for_almost_affine_codes():
    rng = np.random.default_rng(0)
    for C in random_linear_codes(rng, 30):
        for Y in range(1 << C.m):
            fibers = projection_fibers(C, Y)
            assert set(fibers.values()) == {len(C) // len(fibers)}


# ---------------------------------------------------------------- almost affine and secret sharing


def test_row_space_code_induces_u23():
    assert is_almost_affine(AffineCode(2, 3, ROW_SPACE_101_011)).matroid == uniform(2, 3)


def test_three_word_code_is_not_almost_affine():
    check = is_almost_affine(AffineCode(2, 2, [(0, 0), (0, 1), (1, 0)]))
    assert not check
    assert check.witness == 0b11 and check.count == 3
    with pytest.raises(PreconditionError):
        induced_matroid(AffineCode(2, 2, [(0, 0), (0, 1), (1, 0)]))


def test_full_square_is_secret_sharing():
    A = SecretSharingMatrix(2, tuple(itertools.product(range(2), repeat=2)))
    assert is_secret_sharing(A)
    assert secret_sharing_matroid(A) == uniform(2, 2)


def test_three_word_matrix_is_not_secret_sharing():
    rows = ((0, 0), (0, 1), (1, 0))
    check = is_secret_sharing(SecretSharingMatrix(2, rows))
    assert not check
    e, Y, i, j = check.witness
    # row i sees more than one consistent value of e, row j fewer than all of them
    def consistent(row):
        return {r[e] for r in rows if all(r[c] == rows[row][c] for c in range(2) if (Y >> c) & 1)}
    assert len(consistent(i)) != 1 and len(consistent(j)) != 2
    assert check.witness == (0, 0b10, 0, 1)


def test_repeated_rows_allowed():
    rows = ((0, 0), (1, 1), (0, 0))
    assert SecretSharingMatrix(2, rows).to_code() == AffineCode(2, 2, [(0, 0), (1, 1)])
    assert is_secret_sharing(SecretSharingMatrix(2, rows))


def test_almost_affine_iff_secret_sharing_on_random_codes():
    rng = np.random.default_rng(0)
    corpus = random_linear_codes(rng, 60) + random_codes(rng, 200)
    seen = set()
    for C in corpus:
        aa = bool(is_almost_affine(C))
        ss = bool(is_secret_sharing(SecretSharingMatrix(C.s, C.words)))
        assert aa == ss
        seen.add(aa)
    assert seen == {True, False}


def test_almost_affine_iff_secret_sharing_exhaustive_binary_length_three():
    words = list(itertools.product(range(2), repeat=3))
    for k in range(1, 9):
        for sub in itertools.combinations(words, k):
            C = AffineCode(2, 3, sub)
            assert bool(is_almost_affine(C)) == bool(is_secret_sharing(SecretSharingMatrix(2, C.words)))


# ---------------------------------------------------------------- conversions


def test_repetition_code_distribution():
    mu = code_to_distribution(AffineCode(2, 3, [(0, 0, 0), (1, 1, 1)]))
    r = entropic_rank(mu)
    assert np.allclose(r, [0] + [1] * 7)


def test_full_square_distribution_is_free():
    mu = code_to_distribution(AffineCode(2, 2, itertools.product(range(2), repeat=2)))
    assert as_entropic_matroid(mu).matroid == uniform(2, 2)


def test_code_size_must_be_power():
    with pytest.raises(PreconditionError):
        code_to_distribution(AffineCode(2, 2, [(0, 0), (0, 1), (1, 0)]))


def test_distribution_to_code_diagonal():
    mu = FiniteDistribution(2, 2, {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)})
    assert distribution_to_code(mu) == AffineCode(2, 2, [(0, 0), (1, 1)])


def test_fano_law_gives_column_space_code():
    mu = representation_to_distribution(Representation.from_matrix(FANO_MATRIX))
    C = distribution_to_code(mu)
    expected = {tuple(int(x) for x in (np.array(y) @ FANO_MATRIX.entries) % 2) for y in itertools.product(range(2), repeat=3)}
    assert len(C) == 8 and set(C.words) == expected
    assert induced_matroid(C) == catalog("F7").matroid


def test_distribution_to_code_rejects_fractional():
    with pytest.raises(PreconditionError):
        distribution_to_code(bernoulli(Fraction(1, 4)))


def test_round_trip_on_random_almost_affine_codes():
    rng = np.random.default_rng(1)
    for C in random_linear_codes(rng, 50):
        mu = code_to_distribution(C)
        assert distribution_to_code(mu) == C
        assert as_entropic_matroid(mu).matroid == induced_matroid(C)


# ---------------------------------------------------------------- the non-Pappus witness


def test_generator_shape():
    assert simonis_ashikhmin_generator().shape == (6, 9, 2)


def test_simonis_ashikhmin_code_basics(sa_code):
    assert len(sa_code) == 729
    assert sa_code.s == 9 and sa_code.m == 9
    assert (0,) * 9 in sa_code


def test_simonis_ashikhmin_is_secret_sharing(sa_code):
    assert is_secret_sharing(SecretSharingMatrix(9, sa_code.words))


def test_non_pappus_lines(sa_code):
    M = induced_matroid(sa_code)
    assert M.m == 9 and M.full_rank == 3
    lines = [[e for e in range(9) if (t >> e) & 1] for t in rank_two_triples(M)]
    assert sorted(lines) == sorted(NON_PAPPUS_LINES)
    for S in range(1 << 9):
        size = bin(S).count("1")
        expect = 2 if [e for e in range(9) if (S >> e) & 1] in NON_PAPPUS_LINES else min(size, 3)
        assert M(S) == expect


def test_non_pappus_distribution(sa_code):
    mu = code_to_distribution(sa_code)
    assert len(mu.atoms) == 729
    assert as_entropic_matroid(mu).matroid == catalog("nonpappus").matroid
