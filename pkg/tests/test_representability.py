import itertools
import json

import numpy as np
import pytest

from entropic_matroids.catalog import FANO_DUAL_MATRIX, FANO_MATRIX, catalog, column_matroid
from entropic_matroids.entropy import as_entropic_matroid, product, FiniteDistribution
from entropic_matroids.exceptions import CapabilityError, FormatError
from entropic_matroids.matroid import RankTable, delete, dual, enumerate_matroids, free, from_circuits, uniform
from entropic_matroids.representability import (
    FpMatrix,
    Representation,
    find_representation,
    fp_rank,
    projective_points,
    representation_to_distribution,
    verify_representation,
    with_parallel_copy,
)

from . import oracles


# ---------------------------------------------------------------- matrices and rank


def test_matrix_requires_prime():
    with pytest.raises(FormatError):
        FpMatrix(4, [[1]])


def test_matrix_prime_cap():
    with pytest.raises(FormatError):
        FpMatrix(1_000_003, [[1]])


def test_matrix_must_be_two_dimensional():
    with pytest.raises(FormatError):
        FpMatrix(2, [1, 0])


def test_fp_rank_examples():
    assert fp_rank(FpMatrix(2, np.eye(3, dtype=int))) == 3
    assert fp_rank(FANO_MATRIX) == 3
    assert fp_rank(FpMatrix(5, np.zeros((2, 3), dtype=int))) == 0


def test_fp_rank_matches_span_count():
    rng = np.random.default_rng(0)
    for _ in range(60):
        p = int(rng.choice([2, 3, 5]))
        rows, cols = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        A = rng.integers(0, p, size=(rows, cols))
        expect = oracles.span_rank([tuple(int(x) for x in A[:, j]) for j in range(cols)], p)
        assert fp_rank(FpMatrix(p, A)) == expect


def test_matrix_format_uses_brackets():
    assert FANO_MATRIX.format().splitlines()[0] == "[1 1 0 0 0 1 1]"


# ---------------------------------------------------------------- representations


def test_representation_json_round_trip():
    R = Representation.from_matrix(FANO_DUAL_MATRIX)
    assert Representation.from_json(json.loads(json.dumps(R.to_json()))) == R
    assert R.matrix() == FANO_DUAL_MATRIX


def test_fano_matrices_verify():
    assert verify_representation(catalog("F7").matroid, Representation.from_matrix(FANO_MATRIX))
    assert verify_representation(catalog("F7*").matroid, Representation.from_matrix(FANO_DUAL_MATRIX))


def test_u24_fails_with_binary_plane_vectors():
    for cols in itertools.product(projective_points(2, 2) + [(0, 0)], repeat=4):
        assert not verify_representation(uniform(2, 4), Representation(2, 2, cols))


def test_verify_reports_witness():
    R = Representation(2, 2, ((1, 0), (0, 1), (1, 1), (1, 0)))
    check = verify_representation(uniform(2, 4), R)
    assert not check and check.witness is not None
    assert R.subset_rank(check.witness) != uniform(2, 4)(check.witness)


def test_projective_points_count():
    for p, d in [(2, 2), (3, 2), (5, 2), (3, 3)]:
        assert len(projective_points(p, d)) == (p**d - 1) // (p - 1)


# ---------------------------------------------------------------- search


def test_u24_ternary_uses_all_four_points():
    res = find_representation(uniform(2, 4), 3)
    assert res
    cols = res.representation.columns
    assert sorted(cols) == sorted(projective_points(3, 2))


def test_u24_not_binary():
    assert not find_representation(uniform(2, 4), 2)


def test_non_pappus_not_ternary():
    res = find_representation(catalog("nonpappus").matroid, 3)
    assert not res and res.nodes > 0


@pytest.mark.parametrize("name, p, expect", [
    ("F7", 2, True), ("F7", 3, False), ("F7*", 2, True), ("F7*", 3, False),
    ("U2,5", 3, False), ("U2,5", 5, True), ("U3,5", 3, False), ("U3,5", 5, True),
])
def test_catalog_representability(name, p, expect):
    res = find_representation(catalog(name).matroid, p)
    assert bool(res) == expect
    if res:
        assert verify_representation(catalog(name).matroid, res.representation)


def test_representability_is_dual_invariant_on_catalog():
    for name in ("U2,3", "U2,4", "U2,5", "U2,6", "U2,7", "U3,5", "F7", "F7*"):
        M = catalog(name).matroid
        for p in (2, 3):
            assert bool(find_representation(M, p)) == bool(find_representation(dual(M), p))


def test_search_handles_loops_and_parallel_elements():
    M = from_circuits(4, [[0], [1, 2]])
    res = find_representation(M, 2)
    assert res
    assert res.representation.columns[0] == (0, 0)


def test_rank_zero_matroid():
    res = find_representation(uniform(0, 3), 3)
    assert res and res.representation.d == 0


def test_search_caps():
    with pytest.raises(CapabilityError):
        find_representation(uniform(2, 4), 11)
    with pytest.raises(CapabilityError):
        find_representation(uniform(2, 10), 2)


def test_search_agrees_with_brute_force_on_small_matroids():
    for M in enumerate_matroids(4):
        d = M.full_rank
        vectors = list(itertools.product(range(2), repeat=d))
        brute = any(
            verify_representation(M, Representation(2, d, cols))
            for cols in itertools.product(vectors, repeat=4)
        )
        assert bool(find_representation(M, 2)) == brute


# ---------------------------------------------------------------- linear codes as distributions


def test_identity_gives_product_of_uniforms():
    mu = representation_to_distribution(Representation.from_matrix(FpMatrix(3, np.eye(2, dtype=int))))
    u = FiniteDistribution.uniform_on([(0,), (1,), (2,)], 3)
    assert mu == product(u, u)


def test_fano_distribution_has_eight_atoms():
    mu = representation_to_distribution(Representation.from_matrix(FANO_MATRIX))
    assert len(mu.atoms) == 8
    assert as_entropic_matroid(mu).matroid == catalog("F7").matroid


def test_u24_ternary_distribution():
    res = find_representation(uniform(2, 4), 3)
    mu = representation_to_distribution(res.representation)
    assert len(mu.atoms) == 9
    assert as_entropic_matroid(mu).matroid == uniform(2, 4)


def test_found_representations_give_the_matroid_back():
    for name in ("U2,3", "U2,4", "U2,6", "U3,5", "F7", "F7*"):
        M = catalog(name).matroid
        for p in (2, 3, 5):
            res = find_representation(M, p)
            if res:
                assert as_entropic_matroid(representation_to_distribution(res.representation)).matroid == M


def test_parallel_copy_preserves_search_outcome():
    # rank-2 matroids with a parallel pair: representable iff the simplification is
    for n, p in [(3, 2), (4, 2), (4, 3), (5, 3), (5, 5)]:
        base = uniform(2, n)
        res = find_representation(base, p)
        rank = [0] * (1 << (n + 1))
        for S in range(1 << (n + 1)):
            # element n is parallel to element 0
            T = (S & ((1 << n) - 1)) | ((S >> n) & 1)
            rank[S] = base(T)
        M = RankTable(n + 1, rank)
        assert delete(M, 1 << n) == base
        assert bool(find_representation(M, p)) == bool(res)
        if res:
            R = with_parallel_copy(res.representation, 0, n)
            assert verify_representation(M, R)
            # the copied coordinate is a function of the original one
            mu = representation_to_distribution(R)
            assert all(w[0] == w[n] for w in mu.atoms)


def test_column_matroid_of_identity_is_free():
    assert column_matroid(FpMatrix(2, np.eye(4, dtype=int))) == free(4)
